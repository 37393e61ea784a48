"""
Purifying a channel through its Choi state
==========================================

A single-qubit channel is encoded as the two-qubit state (I x U)|Bell>. Noise
then hits both qubits. One shared ancilla keeps the even-parity jump patterns
(E0 x E0 and E1 x E1); two ancillas keep only E0 x E0.
"""

import numpy as np

from adpurify import choi_of, purify_pair_one_ancilla, purify_pair_two_ancilla
from adpurify.sampling import Distribution, Kind, SampleSpec, sample_unitary_channel

spec = SampleSpec(Kind.UNITARY_CHANNEL, Distribution.HAAR_COMPLEX, seed=1234)
channel = sample_unitary_channel(spec, 0)
choi = choi_of(channel).state
print("sampled unitary:\n", np.round(channel.ops[0], 4))

gamma = 0.15
one = purify_pair_one_ancilla(choi, gamma)
two = purify_pair_two_ancilla(choi, gamma)

print(f"\nunpurified fidelity: {one['0'].fidelity_before:.4f}")
print(f"one ancilla, outcome 0:   p = {one['0'].probability:.4f}, f = {one['0'].fidelity_after:.4f}")
print("  kept Kraus words:", [b.kraus_word[-2:] for b in one["0"].purified])
print(f"two ancillas, outcome 00: p = {two['00'].probability:.4f}, f = {two['00'].fidelity_after:.4f}")

# every two-ancilla outcome names the jump pattern that happened
for label, rep in two.items():
    print(f"  {label}: p = {rep.probability:.4f}, words {[b.kraus_word[-2:] for b in rep.purified]}")
