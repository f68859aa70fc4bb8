"""Hybrid beamformer construction.

The two information beams are convex-like mixes of unit channel directions,

    v1 = (sqrt(b1) h1^ + sqrt(1-b1) h2^) / || . ||
    v2 = (sqrt(b2) h2^ + sqrt(1-b2) e^)  / || . ||

so b1 steers the weak user's beam between "towards user 1" and "towards
user 2" (the latter helps the strong user's interference cancellation), and
b2 steers the strong user's beam between its own channel and a random
direction. The artificial-noise basis spans the space unseen by both users.
Denominators are computed explicitly; they are NOT assumed to be 1 even
though they concentrate there for large N.
"""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet
from .linalg import as_cvector, null_space_basis


@dataclass(frozen=True)
class BetaPair:
    """Beam-mixing scalars, each in [0, 1]."""

    beta1: float
    beta2: float

    def __post_init__(self):
        for name in ("beta1", "beta2"):
            val = getattr(self, name)
            if not (0.0 <= val <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {val}")


@dataclass(frozen=True)
class BeamformSet:
    """Unit beams v1, v2 and the N x (N-2) orthonormal AN basis vn."""

    v1: np.ndarray
    v2: np.ndarray
    vn: np.ndarray


def _unit(x: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(x)
    if nrm == 0.0:
        raise ValueError("zero vector cannot be normalized")
    return x / nrm


def _mix(a: np.ndarray, b: np.ndarray, weight: float) -> np.ndarray:
    if not (0.0 <= weight <= 1.0):
        raise ValueError(f"mixing weight must lie in [0, 1], got {weight}")
    # Endpoints return the pure direction exactly.
    if weight >= 1.0:
        return _unit(a)
    if weight <= 0.0:
        return _unit(b)
    return _unit(np.sqrt(weight) * _unit(a) + np.sqrt(1.0 - weight) * _unit(b))


def build_v1(h1, h2, beta1: float) -> np.ndarray:
    """Weak-user beam: mix of the two user channel directions."""
    return _mix(as_cvector(h1), as_cvector(h2), beta1)


def build_v2(h2, e, beta2: float) -> np.ndarray:
    """Strong-user beam: mix of the strong channel and the random direction."""
    return _mix(as_cvector(h2), as_cvector(e), beta2)


def build_set(ch: ChannelSet, betas: BetaPair) -> BeamformSet:
    """Assemble both beams plus the AN null-space basis for one realization."""
    return BeamformSet(
        v1=build_v1(ch.h1, ch.h2, betas.beta1),
        v2=build_v2(ch.h2, ch.e, betas.beta2),
        vn=null_space_basis(ch.h1, ch.h2),
    )
