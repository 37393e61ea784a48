"""
Estimating gamma and undoing the no-jump attenuation
====================================================

With the data qubit prepared in |1>, the ancilla reads 1 with probability
gamma, so the purification circuit doubles as a noise probe. Once gamma is
known, diag(1, 1/sqrt(1 - gamma)) restores the purified state exactly.
"""

import numpy as np

from adpurify import BranchEnsemble, compensation_filter, estimate_gamma, fidelity_to_pure, ket, purify_state

rng = np.random.default_rng(7)
for shots in (100, 1_000, 10_000, 100_000):
    est, se = estimate_gamma(0.25, shots, rng)
    print(f"{shots:>7} shots: gamma = {est:.4f} +- {se:.4f}")

gamma_hat, _ = estimate_gamma(0.3, 100_000, rng)
psi = ket(0.6, 0.8j)
kept = purify_state(psi, 0.3)["0"].purified.branches[0].state
fixed = compensation_filter(kept, gamma_hat)
print("fidelity after post-selection:", fidelity_to_pure(psi, BranchEnsemble.pure(kept)))
print("fidelity after the filter:    ", fidelity_to_pure(psi, BranchEnsemble.pure(fixed)))
