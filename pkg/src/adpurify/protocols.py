"""Post-selection purification circuits for amplitude-damping noise.

All three circuits share one gadget: ancillas start in ``|+>``, a CZ layer
couples each ancilla to its data qubits, AD noise hits every data qubit, the
CZ layer is repeated, and each ancilla gets a Hadamard before measurement.
Because ``E0`` commutes with Z and ``E1`` anticommutes with it, an ancilla
ends in ``|1>`` exactly when an odd number of jumps hit the data qubits it
watches. Ancillas are qubits ``0..k-1``; data qubits follow.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channels import make_ad, apply_channel
from .qcore import (
    CZ,
    H,
    BranchEnsemble,
    ImpossibleOutcome,
    PureState,
    discard_qubits,
    evolve,
    fidelity_to_pure,
    ket,
    plus,
    post_select,
    prepend_qubits,
    product,
)


@dataclass(frozen=True)
class PostSelectionReport:
    """One ancilla outcome of a purification run.

    ``purified`` and ``fidelity_after`` are ``None`` when the outcome cannot
    occur (probability zero).
    """

    outcome_label: str
    probability: float
    purified: BranchEnsemble | None
    fidelity_before: float | None
    fidelity_after: float | None


def _as_ensemble(state: PureState | BranchEnsemble) -> BranchEnsemble:
    if isinstance(state, BranchEnsemble):
        return state
    return BranchEnsemble.pure(state)


def _default_reference(ens: BranchEnsemble, reference: PureState | None) -> PureState | None:
    if reference is not None:
        return reference
    if len(ens) == 1:
        return ens.branches[0].state
    return None


def _run_gadget(
    data: BranchEnsemble,
    gamma: float,
    couplings: Sequence[Sequence[int]],
    reference: PureState | None,
) -> dict[str, PostSelectionReport]:
    """Simulate the shared circuit.

    ``couplings[a]`` lists the data-qubit indices (0-based within ``data``)
    that ancilla ``a`` is CZ-coupled to.
    """
    n_anc = len(couplings)
    n_data = data.n_qubits
    ad = make_ad(gamma)
    ref = _default_reference(data, reference)

    noisy = data
    for q in range(n_data):
        noisy = apply_channel(noisy, ad, q)
    fid_before = fidelity_to_pure(ref, noisy) if ref is not None else None

    ens = prepend_qubits(data, product(*([plus()] * n_anc)))

    def cz_layer(e: BranchEnsemble) -> BranchEnsemble:
        for a, watched in enumerate(couplings):
            for d in watched:
                e = evolve(e, CZ, [a, n_anc + d])
        return e

    ens = cz_layer(ens)
    for q in range(n_data):
        ens = apply_channel(ens, ad, n_anc + q)
    ens = cz_layer(ens)
    for a in range(n_anc):
        ens = evolve(ens, H, [a])

    reports = {}
    for bits in itertools.product((0, 1), repeat=n_anc):
        label = "".join(map(str, bits))
        prob = 1.0
        cur = ens
        try:
            for a, bit in enumerate(bits):
                p, cur = post_select(cur, a, bit)
                prob *= p
        except ImpossibleOutcome:
            reports[label] = PostSelectionReport(label, 0.0, None, fid_before, None)
            continue
        purified = discard_qubits(cur, range(n_anc))
        fid_after = fidelity_to_pure(ref, purified) if ref is not None else None
        reports[label] = PostSelectionReport(label, prob, purified, fid_before, fid_after)
    return reports


def purify_state(psi: PureState, gamma: float) -> dict[str, PostSelectionReport]:
    """Single-qubit purification with one ancilla.

    Outcome ``"0"`` keeps the no-jump branch ``E0|psi>``; outcome ``"1"``
    leaves the data qubit in ``|0>``.
    """
    if psi.n_qubits != 1:
        raise ValueError(f"expected a single-qubit state, got {psi.n_qubits} qubits")
    return _run_gadget(BranchEnsemble.pure(psi), gamma, [[0]], None)


def purify_pair_one_ancilla(
    state: PureState | BranchEnsemble,
    gamma: float,
    reference: PureState | None = None,
) -> dict[str, PostSelectionReport]:
    """Two-qubit (or Choi-state) purification with one ancilla watching both qubits.

    Outcome ``"0"`` keeps the even-parity noise branches ``E0 x E0`` and
    ``E1 x E1`` as an incoherent mixture; ``"1"`` keeps the odd ones.
    If ``state`` is a mixed ensemble, fidelities need an explicit ``reference``.
    """
    ens = _as_ensemble(state)
    if ens.n_qubits != 2:
        raise ValueError(f"expected a two-qubit input, got {ens.n_qubits} qubits")
    return _run_gadget(ens, gamma, [[0, 1]], reference)


def purify_pair_two_ancilla(
    state: PureState | BranchEnsemble,
    gamma: float,
    reference: PureState | None = None,
) -> dict[str, PostSelectionReport]:
    """Two copies of the single-qubit gadget, one ancilla per data qubit.

    Outcome bits ``ab`` select the branch ``E_a x E_b``.
    """
    ens = _as_ensemble(state)
    if ens.n_qubits != 2:
        raise ValueError(f"expected a two-qubit input, got {ens.n_qubits} qubits")
    return _run_gadget(ens, gamma, [[0], [1]], reference)


def estimate_gamma(gamma_true: float, shots: int, rng: np.random.Generator) -> tuple[float, float]:
    """Estimate the damping probability from ``shots`` runs on input ``|1>``.

    Each run's ancilla reads 1 with probability ``gamma``.

    Returns:
        (estimate, binomial standard error)
    """
    shots = int(shots)
    if shots < 1:
        raise ValueError("shots must be at least 1")
    p1 = purify_state(ket(0, 1), gamma_true)["1"].probability
    p1 = min(max(p1, 0.0), 1.0)
    count = int(rng.binomial(shots, p1))
    est = count / shots
    return est, math.sqrt(est * (1 - est) / shots)


def compensation_filter(state: PureState, gamma_hat: float) -> PureState:
    """Undo the no-jump attenuation with ``diag(1, 1/sqrt(1 - gamma_hat))``, then renormalize."""
    if state.n_qubits != 1:
        raise ValueError("compensation filter acts on a single qubit")
    gamma_hat = float(gamma_hat)
    if not 0.0 <= gamma_hat < 1.0:
        raise ValueError(f"gamma_hat must lie in [0, 1), got {gamma_hat}")
    amps = state.amplitudes * np.array([1.0, 1.0 / math.sqrt(1.0 - gamma_hat)])
    return PureState(amps).normalized()


def analytic_state_purification(alpha: float, beta: float, gamma: float) -> tuple[float, float]:
    """Closed-form success probability and purified fidelity for ``alpha|0> + beta|1>``.

    Only ``alpha**2`` and ``beta**2`` enter, so pass moduli for complex states.
    """
    a2 = float(alpha) ** 2
    b2 = float(beta) ** 2
    if abs(a2 + b2 - 1.0) > 1e-12:
        raise ValueError(f"alpha^2 + beta^2 = {a2 + b2} is not 1")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    p0 = a2 + (1 - gamma) * b2
    if p0 == 0.0:
        return 0.0, math.nan
    fid = (a2 + math.sqrt(1 - gamma) * b2) ** 2 / p0
    return p0, fid


COUPLINGS = {
    "state_1q": ((0,),),
    "channel_1anc": ((0, 1),),
    "pair_2anc": ((0,), (1,)),
}


@dataclass(frozen=True)
class BatchOutcome:
    probability: np.ndarray
    fidelity_after: np.ndarray  # nan where the outcome is impossible


@dataclass(frozen=True)
class BatchResult:
    fidelity_before: np.ndarray
    outcomes: dict[str, BatchOutcome]


def _apply_1q(psi: np.ndarray, op: np.ndarray, axis: int) -> np.ndarray:
    out = np.tensordot(psi, op, axes=([axis], [1]))
    return np.moveaxis(out, -1, axis)


def _kraus_split(psi: np.ndarray, ops, axis: int) -> np.ndarray:
    # axis 1 enumerates Kraus words; new index = 2*word + k
    parts = np.stack([_apply_1q(psi, op, axis) for op in ops], axis=2)
    shape = parts.shape
    return parts.reshape(shape[0], shape[1] * shape[2], *shape[3:])


def simulate_batch(protocol: str, inputs: np.ndarray, gamma: float) -> BatchResult:
    """Run one purification circuit on many pure inputs at once.

    Same gate sequence as the per-state functions above, vectorized over the
    leading axis of ``inputs`` (shape ``(batch, 2**n_data)``). Kraus words live
    on a second axis as unnormalized branch vectors, so weights are squared
    norms and distinct words never interfere.
    """
    couplings = COUPLINGS[protocol]
    inputs = np.asarray(inputs, dtype=complex)
    batch, dim = inputs.shape
    n_data = int(np.log2(dim))
    n_anc = len(couplings)
    n = n_anc + n_data
    if 2**n_data != dim or n_data != (1 if protocol == "state_1q" else 2):
        raise ValueError(f"input dimension {dim} does not fit protocol {protocol!r}")
    ad = make_ad(gamma).ops
    ref = inputs.reshape(batch, 1, dim)

    # unpurified: noise on the data register alone
    noisy = inputs.reshape((batch, 1) + (2,) * n_data)
    for q in range(n_data):
        noisy = _kraus_split(noisy, ad, 2 + q)
    noisy = noisy.reshape(batch, -1, dim)
    fid_before = np.sum(np.abs(np.sum(ref.conj() * noisy, axis=2)) ** 2, axis=1)

    anc = np.full(2**n_anc, 2 ** (-n_anc / 2), dtype=complex)
    psi = np.einsum("a,bd->bad", anc, inputs).reshape((batch, 1) + (2,) * n)

    bits = np.indices((2,) * n)
    cz_diag = np.ones((2,) * n)
    for a, watched in enumerate(couplings):
        for d in watched:
            cz_diag = cz_diag * np.where(bits[a] & bits[n_anc + d], -1.0, 1.0)

    psi = psi * cz_diag
    for q in range(n_data):
        psi = _kraus_split(psi, ad, 2 + n_anc + q)
    psi = psi * cz_diag
    for a in range(n_anc):
        psi = _apply_1q(psi, H, 2 + a)

    outcomes = {}
    n_words = psi.shape[1]
    for label_bits in itertools.product((0, 1), repeat=n_anc):
        label = "".join(map(str, label_bits))
        phi = psi[(slice(None), slice(None)) + label_bits].reshape(batch, n_words, dim)
        prob = np.sum(np.abs(phi) ** 2, axis=(1, 2))
        overlap = np.sum(np.abs(np.sum(ref.conj() * phi, axis=2)) ** 2, axis=1)
        possible = prob >= 1e-15
        fid = np.full(batch, np.nan)
        fid[possible] = overlap[possible] / prob[possible]
        outcomes[label] = BatchOutcome(np.where(possible, prob, 0.0), fid)
    return BatchResult(fid_before, outcomes)
