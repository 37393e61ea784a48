"""
Purifying one qubit with one ancilla
====================================

An ancilla in |+> is CZ-coupled to the data qubit before and after the
amplitude-damping noise. A Hadamard and a measurement on the ancilla then tell
us whether a decay jump happened.
"""

import numpy as np

from adpurify import analytic_state_purification, ket, purify_state

psi = ket(1, 1).normalized()
gamma = 0.5
reports = purify_state(psi, gamma)

for label, rep in reports.items():
    print(f"ancilla reads {label}: p = {rep.probability:.4f}, "
          f"fidelity {rep.fidelity_before:.4f} -> {rep.fidelity_after:.4f}")

# the kept branch is exactly the no-jump evolution E0|psi>
print("kept state:", np.round(reports["0"].purified.branches[0].state.amplitudes, 6))

# the simulated circuit agrees with the closed form
print("closed form (p0, f):", analytic_state_purification(*np.abs(psi.amplitudes), gamma))

# success probability falls linearly with gamma, fidelity stays high
for g in np.linspace(0, 0.8, 9):
    r = purify_state(ket(0.6, 0.8), g)["0"]
    print(f"gamma={g:.1f}  p0={r.probability:.3f}  f={r.fidelity_after:.5f}")
