"""Exact per-realization rates and the deterministic large-N approximation.

Exact mode evaluates the realized SINRs and the eavesdropper's log-det rates
for one ``ChannelSet``; approximate mode evaluates the closed-form secrecy sum
rate that the optimizers work on, where the coefficients

    c1 = (1 + (N-1) b1) rho_u1,   c2 = (1 + (N-1) b2) rho_u2

capture the large-N beamforming gains. The approximation of the weak user's
SINR comes in two flavours: the single-branch expression that is exact on the
optimizer's balance manifold (branch "balanced"), and the explicit minimum of
both decoding branches, valid for arbitrary fixed beams (branch "min").
"""

import math
from dataclasses import dataclass

import numpy as np

from .beamform import BeamformSet, BetaPair
from .channel import ChannelSet, SystemConfig
from .linalg import logdet_hpd

LN2 = math.log(2.0)

BRANCH_TAGS = ("interior", "lower_clamp", "upper_clamp", "forced")
APPROX_BRANCHES = ("balanced", "min")

SIMPLEX_TOL = 1e-12


@dataclass(frozen=True)
class PowerSplit:
    """Power fractions (phi1, phi2, phie) on the unit simplex.

    ``branch_tag`` records which solver branch produced the split:
    "interior" for the unconstrained stationary point, "lower_clamp" /
    "upper_clamp" for QoS-bound solutions, "forced" for anything chosen by
    direct comparison (grid solvers, degenerate discriminants, hand-built
    splits).
    """

    phi1: float
    phi2: float
    phie: float
    branch_tag: str = "forced"

    def __post_init__(self):
        if self.branch_tag not in BRANCH_TAGS:
            raise ValueError(f"unknown branch_tag {self.branch_tag!r}")
        if not (self.phi1 > 0.0 and self.phi2 > 0.0):
            raise ValueError(
                f"user power fractions must be positive, got ({self.phi1}, {self.phi2})"
            )
        if self.phie < 0.0:
            raise ValueError(f"AN fraction must be nonnegative, got {self.phie}")
        total = self.phi1 + self.phi2 + self.phie
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"power fractions must sum to 1, got {total!r}")


@dataclass(frozen=True)
class RateReport:
    """Per-user rates, eavesdropper rates and the secrecy sum rate (bits)."""

    r_u1: float
    r_u2: float
    r_e1: float
    r_e2: float
    r_s: float
    mode: str


def _gain(h: np.ndarray, v: np.ndarray) -> float:
    return float(abs(h @ v.conj()) ** 2)


def sinr_u1_exact(ch: ChannelSet, bf: BeamformSet, p: PowerSplit) -> float:
    """Realized SINR of the weak user's stream: worst of the two decoders.

    Stream 1 must be decodable both at user 1 (direct) and at user 2 (for
    interference cancellation), hence the min.
    """
    num1 = p.phi1 * _gain(ch.h1, bf.v1)
    den1 = p.phi2 * _gain(ch.h1, bf.v2) + 1.0
    num2 = p.phi1 * _gain(ch.h2, bf.v1)
    den2 = p.phi2 * _gain(ch.h2, bf.v2) + 1.0
    return min(num1 / den1, num2 / den2)


def exact_rates(ch: ChannelSet, bf: BeamformSet, p: PowerSplit) -> RateReport:
    """Exact rate bundle for one realization.

    The eavesdropper performs the same interference cancellation as the
    strong user, so its per-stream rates are differences of log-dets of the
    nested received-covariance matrices. Raises ``np.linalg.LinAlgError`` if
    a covariance is numerically not positive definite (broken realization).
    """
    n = ch.h1.size
    k = ch.he.shape[0]

    r_u1 = math.log2(1.0 + sinr_u1_exact(ch, bf, p))
    r_u2 = math.log2(1.0 + p.phi2 * _gain(ch.h2, bf.v2))

    a1 = ch.he @ bf.v1.conj()
    a2 = ch.he @ bf.v2.conj()
    an = ch.he @ bf.vn.conj()
    w1 = p.phi1 * np.outer(a1, a1.conj())
    w2 = p.phi2 * np.outer(a2, a2.conj())
    wn = (p.phie / (n - 2)) * (an @ an.conj().T)
    eye = np.eye(k)

    base = logdet_hpd(eye + wn) / LN2
    mid = logdet_hpd(eye + w2 + wn) / LN2
    top = logdet_hpd(eye + w1 + w2 + wn) / LN2
    r_e1 = top - mid
    r_e2 = mid - base

    r_s = max(0.0, r_u1 - r_e1) + max(0.0, r_u2 - r_e2)
    return RateReport(r_u1=r_u1, r_u2=r_u2, r_e1=r_e1, r_e2=r_e2, r_s=r_s, mode="exact")


def beam_coefficients(cfg: SystemConfig, betas: BetaPair) -> tuple[float, float]:
    """Large-N gain coefficients (c1, c2) of the two information beams."""
    n = cfg.n_tx
    c1 = (1.0 + (n - 1) * betas.beta1) * cfg.rho_u1
    c2 = (1.0 + (n - 1) * betas.beta2) * cfg.rho_u2
    return c1, c2


def approx_sinr_branches(cfg: SystemConfig, betas: BetaPair, phi1, phi2):
    """Large-N SINRs of the weak user's stream at both decoders.

    First entry: decoding at user 1; second: decoding at user 2 prior to its
    interference cancellation. Vectorized over phi1/phi2 arrays.
    """
    n = cfg.n_tx
    c1, c2 = beam_coefficients(cfg, betas)
    phi1 = np.asarray(phi1)
    phi2 = np.asarray(phi2)
    g1 = c1 * phi1 / (1.0 + phi2 * cfg.rho_u1)
    g2 = ((n - 1) * (1.0 - betas.beta1) + 1.0) * cfg.rho_u2 * phi1 / (1.0 + phi2 * c2)
    return g1, g2


def approx_sinr_u1(cfg: SystemConfig, betas: BetaPair, phi1, phi2, branch: str = "balanced"):
    """Large-N weak-user SINR; vectorized over phi1/phi2 arrays."""
    if branch not in APPROX_BRANCHES:
        raise ValueError(f"unknown branch {branch!r}")
    g1, g2 = approx_sinr_branches(cfg, betas, phi1, phi2)
    if branch == "balanced":
        return g1
    return np.minimum(g1, g2)


def approx_ssr_parts(cfg: SystemConfig, betas: BetaPair, phi1, phi2, phie, branch: str = "balanced"):
    """Vectorized approximate SSR; negative values are NOT clamped here.

    The optimizers maximize this smooth objective directly; only the
    reporting layer applies the nonnegativity clamp.
    """
    _, c2 = beam_coefficients(cfg, betas)
    k = cfg.k_eve
    gamma = approx_sinr_u1(cfg, betas, phi1, phi2, branch)
    users = np.log2((1.0 + gamma) * (1.0 + c2 * np.asarray(phi2)))
    an = k * np.log2(1.0 + np.asarray(phie) * cfg.rho_e) - k * np.log2(1.0 + cfg.rho_e)
    return users + an


def approx_ssr(cfg: SystemConfig, betas: BetaPair, p: PowerSplit, branch: str = "balanced") -> float:
    """Deterministic large-N approximation of the secrecy sum rate (bits)."""
    return float(approx_ssr_parts(cfg, betas, p.phi1, p.phi2, p.phie, branch))
