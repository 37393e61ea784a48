"""Dense few-qubit linear algebra: kets, operator embedding, post-selection, fidelity.

Operators are plain complex ``numpy`` arrays. Qubit 0 is the most significant
bit of the basis index, so ``|q0 q1 ...>`` reads left to right.

Mixed states are kept as explicit pure-state decompositions
(:class:`BranchEnsemble`) rather than density matrices; each branch carries the
Kraus indices that produced it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

ATOL = 1e-10
ZERO_WEIGHT = 1e-15
# rescaling a unit vector by 1 +- eps only adds rounding noise
RESCALE_TOL = 4 * np.finfo(float).eps

_SQRT2_INV = 1 / math.sqrt(2)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV
CZ = np.diag([1, 1, 1, -1]).astype(complex)


class ImpossibleOutcome(ValueError):
    """Raised when a post-selected outcome has (numerically) zero probability."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PureState:
    """Amplitude vector over ``n_qubits`` qubits.

    Not necessarily normalized; use :meth:`normalized` or :func:`normalize`.
    """

    amplitudes: np.ndarray
    n_qubits: int = field(init=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        n = int(round(math.log2(amps.size))) if amps.size else -1
        if n < 0 or 2**n != amps.size:
            raise ValueError(f"amplitude vector length {amps.size} is not a power of two")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", _freeze(amps))
        object.__setattr__(self, "n_qubits", n)

    @classmethod
    def basis(cls, label: str) -> "PureState":
        """Computational basis state from a bit string, e.g. ``"01"``."""
        amps = np.zeros(2 ** len(label), dtype=complex)
        amps[int(label, 2)] = 1.0
        return cls(amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, atol: float = 1e-12) -> bool:
        return abs(np.vdot(self.amplitudes, self.amplitudes).real - 1.0) <= atol

    def normalized(self) -> "PureState":
        return normalize(self)

    def overlap(self, other: "PureState") -> complex:
        """``<self|other>``."""
        _check_dims(self.dim, other.dim)
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def normalize(state: PureState) -> PureState:
    nrm = state.norm()
    if nrm < ZERO_WEIGHT:
        raise ValueError("cannot normalize a zero vector")
    if abs(nrm - 1.0) <= RESCALE_TOL:
        return state
    return PureState(state.amplitudes / nrm)


def ket(*amplitudes: complex) -> PureState:
    return PureState(np.asarray(amplitudes, dtype=complex))


def plus() -> PureState:
    return ket(_SQRT2_INV, _SQRT2_INV)


def bell() -> PureState:
    """(|00> + |11>)/sqrt(2)."""
    return ket(_SQRT2_INV, 0, 0, _SQRT2_INV)


def product(*states: PureState) -> PureState:
    amps = np.ones(1, dtype=complex)
    for st in states:
        amps = np.kron(amps, st.amplitudes)
    return PureState(amps)


@dataclass(frozen=True)
class Branch:
    weight: float
    state: PureState
    kraus_word: tuple[int, ...] = ()


@dataclass(frozen=True)
class BranchEnsemble:
    """Weighted mixture of normalized pure states.

    The weights sum to one. ``kraus_word`` of each branch records which Kraus
    operator every noise site applied, in application order.
    """

    branches: tuple[Branch, ...]

    def __post_init__(self):
        branches = tuple(self.branches)
        if not branches:
            raise ValueError("ensemble needs at least one branch")
        dims = {b.state.dim for b in branches}
        if len(dims) != 1:
            raise ValueError(f"branches have mixed dimensions {sorted(dims)}")
        if any(b.weight < 0 for b in branches):
            raise ValueError("branch weights must be non-negative")
        object.__setattr__(self, "branches", branches)

    @classmethod
    def pure(cls, state: PureState) -> "BranchEnsemble":
        return cls((Branch(1.0, normalize(state), ()),))

    @property
    def dim(self) -> int:
        return self.branches[0].state.dim

    @property
    def n_qubits(self) -> int:
        return self.branches[0].state.n_qubits

    @property
    def target_dims(self) -> int:
        return self.dim

    @property
    def weights(self) -> np.ndarray:
        return np.array([b.weight for b in self.branches])

    def total_weight(self) -> float:
        return math.fsum(b.weight for b in self.branches)

    def density_matrix(self) -> np.ndarray:
        rho = np.zeros((self.dim, self.dim), dtype=complex)
        for b in self.branches:
            rho += b.weight * np.outer(b.state.amplitudes, b.state.amplitudes.conj())
        return rho

    def __len__(self) -> int:
        return len(self.branches)

    def __iter__(self):
        return iter(self.branches)


def _check_dims(a: int, b: int) -> None:
    if a != b:
        raise ValueError(f"dimension mismatch: {a} vs {b}")


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, ``a``'s indices major."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def apply_operator(state: PureState, op: np.ndarray, targets: Sequence[int]) -> PureState:
    """Apply ``op`` on the listed qubits (in the order given). No renormalization.

    ``targets[0]`` is the most significant qubit of ``op``'s own index.
    """
    targets = [int(t) for t in targets]
    n = state.n_qubits
    k = len(targets)
    op = np.asarray(op, dtype=complex)
    if len(set(targets)) != k:
        raise ValueError(f"duplicate target in {targets}")
    if any(t < 0 or t >= n for t in targets):
        raise ValueError(f"targets {targets} out of range for {n} qubits")
    if op.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {op.shape} does not act on {k} qubit(s)")

    psi = state.amplitudes.reshape((2,) * n)
    op_t = op.reshape((2,) * (2 * k))
    out = np.tensordot(op_t, psi, axes=(list(range(k, 2 * k)), targets))
    # tensordot puts the operator's output axes first; move them back into place
    out = np.moveaxis(out, list(range(k)), targets)
    return PureState(out.reshape(-1))


def projector(outcome: int) -> np.ndarray:
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome!r}")
    p = np.zeros((2, 2), dtype=complex)
    p[outcome, outcome] = 1.0
    return p


def post_select(ensemble: BranchEnsemble, qubit: int, outcome: int) -> tuple[float, BranchEnsemble]:
    """Project ``qubit`` onto ``outcome`` and renormalize.

    The measured qubit stays in the index space, collapsed. Branches that the
    projection annihilates are dropped.

    Returns:
        (probability of the outcome, post-measurement ensemble)

    Raises:
        ImpossibleOutcome: if the outcome probability is below 1e-15.
    """
    proj = projector(outcome)
    kept = []
    for b in ensemble.branches:
        projected = apply_operator(b.state, proj, [qubit])
        norm2 = float(np.vdot(projected.amplitudes, projected.amplitudes).real)
        w = b.weight * norm2
        if w >= ZERO_WEIGHT:
            kept.append((w, projected, norm2, b.kraus_word))
    prob = math.fsum(w for w, *_ in kept)
    if prob < ZERO_WEIGHT:
        raise ImpossibleOutcome(f"outcome {outcome} on qubit {qubit} has probability {prob:.3g}")
    branches = tuple(
        Branch(w / prob, PureState(psi.amplitudes / math.sqrt(n2)), word)
        for w, psi, n2, word in kept
    )
    return prob, BranchEnsemble(branches)


def discard_qubits(ensemble: BranchEnsemble, qubits: Sequence[int]) -> BranchEnsemble:
    """Drop qubits that have been collapsed to a basis value.

    Each branch must be a product of a basis state on ``qubits`` and the rest;
    the rest is returned as the new branch state.
    """
    qubits = sorted(set(int(q) for q in qubits))
    out = []
    for b in ensemble.branches:
        n = b.state.n_qubits
        psi = b.state.amplitudes.reshape((2,) * n)
        keep = [q for q in range(n) if q not in qubits]
        psi = np.moveaxis(psi, qubits, list(range(len(qubits))))
        psi = psi.reshape(2 ** len(qubits), 2 ** len(keep))
        nonzero = np.flatnonzero(np.linalg.norm(psi, axis=1) > 1e-12)
        if nonzero.size != 1:
            raise ValueError(f"qubits {qubits} are not collapsed in this branch")
        out.append(Branch(b.weight, PureState(psi[nonzero[0]]), b.kraus_word))
    return BranchEnsemble(tuple(out))


def fidelity_to_pure(reference: PureState, ensemble: BranchEnsemble) -> float:
    """``<phi|rho|phi>`` with ``rho`` the ensemble mixture."""
    _check_dims(reference.dim, ensemble.dim)
    ref = reference.amplitudes
    f = math.fsum(b.weight * abs(np.vdot(ref, b.state.amplitudes)) ** 2 for b in ensemble.branches)
    return min(max(f, 0.0), 1.0)


def evolve(ensemble: BranchEnsemble, op: np.ndarray, targets: Sequence[int]) -> BranchEnsemble:
    """Apply a unitary to every branch; weights and Kraus words are untouched."""
    return BranchEnsemble(
        tuple(Branch(b.weight, apply_operator(b.state, op, targets), b.kraus_word) for b in ensemble.branches)
    )


def prepend_qubits(ensemble: BranchEnsemble, state: PureState) -> BranchEnsemble:
    """Tensor ``state`` in front of (more significant than) every branch."""
    return BranchEnsemble(
        tuple(Branch(b.weight, product(state, b.state), b.kraus_word) for b in ensemble.branches)
    )
