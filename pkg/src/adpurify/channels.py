"""Kraus channels, the amplitude-damping channel, Choi states, Z-parity."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qcore import (
    RESCALE_TOL,
    ZERO_WEIGHT,
    Z,
    Branch,
    BranchEnsemble,
    PureState,
    apply_operator,
    bell,
)

CPTP_TOL = 1e-12
PARITY_TOL = 1e-12


@dataclass(frozen=True)
class KrausChannel:
    ops: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.array(op, dtype=complex) for op in self.ops)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        shape = ops[0].shape
        if len(shape) != 2 or shape[0] != shape[1]:
            raise ValueError(f"Kraus operators must be square, got {shape}")
        if any(op.shape != shape for op in ops):
            raise ValueError("Kraus operators must share one shape")
        for op in ops:
            op.setflags(write=False)
        object.__setattr__(self, "ops", ops)

    @property
    def dim(self) -> int:
        return self.ops[0].shape[0]

    def __len__(self) -> int:
        return len(self.ops)


@dataclass(frozen=True)
class ADChannel(KrausChannel):
    """Amplitude damping with decay probability ``gamma``; ``ops == (E0, E1)``."""

    gamma: float = 0.0

    @property
    def e0(self) -> np.ndarray:
        return self.ops[0]

    @property
    def e1(self) -> np.ndarray:
        return self.ops[1]


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    return gamma


def make_ad(gamma: float) -> ADChannel:
    gamma = _check_gamma(gamma)
    e0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex)
    e1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    return ADChannel((e0, e1), gamma=gamma)


def unitary_channel(u: np.ndarray) -> KrausChannel:
    return KrausChannel((np.asarray(u, dtype=complex),))


def identity_channel(dim: int = 2) -> KrausChannel:
    return KrausChannel((np.eye(dim, dtype=complex),))


@dataclass(frozen=True)
class CPTPCheck:
    passed: bool
    deviation: float

    def __bool__(self) -> bool:
        return self.passed


def validate_cptp(channel: KrausChannel | Sequence[np.ndarray]) -> CPTPCheck:
    """Check completeness: max entrywise |sum K^dag K - I| <= 1e-12."""
    ops = channel.ops if isinstance(channel, KrausChannel) else KrausChannel(tuple(channel)).ops
    acc = sum(op.conj().T @ op for op in ops)
    dev = float(np.max(np.abs(acc - np.eye(ops[0].shape[0]))))
    return CPTPCheck(dev <= CPTP_TOL, dev)


def apply_channel(ensemble: BranchEnsemble, channel: KrausChannel, target: int) -> BranchEnsemble:
    """Split every branch over the channel's Kraus operators acting on ``target``.

    Branch weights become ``w * <psi|K^dag K|psi>``; the Kraus index is appended
    to each branch's word. Branches below 1e-15 weight are dropped.
    """
    if channel.dim != 2:
        raise ValueError(f"only single-qubit channels are supported, got dim {channel.dim}")
    out = []
    for b in ensemble.branches:
        for i, op in enumerate(channel.ops):
            psi = apply_operator(b.state, op, [target])
            norm2 = float(np.vdot(psi.amplitudes, psi.amplitudes).real)
            if abs(norm2 - 1.0) <= RESCALE_TOL:
                norm2 = 1.0
            w = b.weight * norm2
            if w < ZERO_WEIGHT:
                continue
            if norm2 != 1.0:
                psi = PureState(psi.amplitudes / math.sqrt(norm2))
            out.append(Branch(w, psi, b.kraus_word + (i,)))
    return BranchEnsemble(tuple(out))


@dataclass(frozen=True)
class ChoiState:
    """Channel applied to the second half of a Bell pair (trace-one convention)."""

    channel_dim: int
    ensemble: BranchEnsemble

    @property
    def is_pure(self) -> bool:
        return len(self.ensemble) == 1

    @property
    def state(self) -> PureState | BranchEnsemble:
        return self.ensemble.branches[0].state if self.is_pure else self.ensemble


def choi_of(channel: KrausChannel) -> ChoiState:
    check = validate_cptp(channel)
    if not check:
        raise ValueError(f"channel is not CPTP (deviation {check.deviation:.3g})")
    if channel.dim != 2:
        raise ValueError("Choi states are built for single-qubit channels only")
    ens = apply_channel(BranchEnsemble.pure(bell()), channel, target=1)
    return ChoiState(channel.dim, ens)


class Parity(enum.Enum):
    COMMUTES = "commutes"
    ANTICOMMUTES = "anticommutes"
    NEITHER = "neither"


def z_parity(op: np.ndarray) -> Parity:
    """Classify ``op`` by whether it commutes or anticommutes with Pauli Z."""
    op = np.asarray(op, dtype=complex)
    if op.shape != (2, 2):
        raise ValueError(f"expected a 2x2 operator, got {op.shape}")
    comm = np.max(np.abs(op @ Z - Z @ op))
    anti = np.max(np.abs(op @ Z + Z @ op))
    # the zero matrix (E1 at gamma=0) satisfies both; it is reported as anticommuting
    if anti <= PARITY_TOL:
        return Parity.ANTICOMMUTES
    if comm <= PARITY_TOL:
        return Parity.COMMUTES
    return Parity.NEITHER
