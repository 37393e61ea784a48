"""Seeded random input states and unitary channels.

Sample ``i`` of a spec is drawn from its own generator keyed by
``(seed, i)``, so any subset of samples can be produced in any order, on any
number of workers, with identical bits.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channels import KrausChannel, unitary_channel
from .qcore import PureState

DEFAULT_SEED = 1234


class Kind(str, enum.Enum):
    SINGLE_QUBIT_STATE = "single_qubit_state"
    TWO_QUBIT_STATE = "two_qubit_state"
    UNITARY_CHANNEL = "unitary_channel"


class Distribution(str, enum.Enum):
    UNIFORM_ALPHA = "uniform_alpha"
    HAAR_REAL = "haar_real"
    HAAR_COMPLEX = "haar_complex"


@dataclass(frozen=True)
class SampleSpec:
    kind: Kind = Kind.SINGLE_QUBIT_STATE
    distribution: Distribution = Distribution.UNIFORM_ALPHA
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "distribution", Distribution(self.distribution))
        seed = int(self.seed)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        object.__setattr__(self, "seed", seed)
        if self.kind is Kind.TWO_QUBIT_STATE and self.distribution is Distribution.UNIFORM_ALPHA:
            raise ValueError("uniform_alpha is defined for single-qubit states only")


def rng_for(spec: SampleSpec, index: int) -> np.random.Generator:
    return np.random.default_rng([spec.seed, int(index)])


def sample_state(spec: SampleSpec, index: int) -> PureState:
    """Draw input state number ``index``.

    ``uniform_alpha`` gives ``alpha|0> + sqrt(1 - alpha^2)|1>`` with ``alpha``
    uniform on [0, 1]; the Haar options normalize a vector of i.i.d. real or
    complex standard normals.
    """
    if spec.kind is Kind.UNITARY_CHANNEL:
        raise ValueError("use sample_unitary_channel for channel specs")
    rng = rng_for(spec, index)
    dim = 2 if spec.kind is Kind.SINGLE_QUBIT_STATE else 4
    if spec.distribution is Distribution.UNIFORM_ALPHA:
        alpha = rng.uniform(0.0, 1.0)
        return PureState(np.array([alpha, np.sqrt(1.0 - alpha * alpha)]))
    vec = rng.standard_normal(dim)
    if spec.distribution is Distribution.HAAR_COMPLEX:
        vec = vec + 1j * rng.standard_normal(dim)
    return PureState(vec / np.linalg.norm(vec))


def haar_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    # fix the QR phase ambiguity so q is Haar distributed
    return q * (d / np.abs(d))


def sample_unitary_channel(spec: SampleSpec, index: int) -> KrausChannel:
    if spec.kind is not Kind.UNITARY_CHANNEL:
        raise ValueError(f"spec kind {spec.kind.value} does not describe a channel")
    return unitary_channel(haar_unitary(rng_for(spec, index)))
