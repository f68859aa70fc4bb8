"""Power-allocation solvers.

The QoS constraints pin the feasible power region. With the beam gains
``c1, c2`` from :func:`secnoma.rates.beam_coefficients` and rate thresholds
``t_m = 2^Q_m - 1`` they read

    phi1 >= t1 (1 + phi2 rho_u1) / c1,      phi2 >= t2 / c2 = mu1.

For a fixed AN fraction ``phie`` the remaining power splits along the line
``phi1 + phi2 = 1 - phie``; the user-rate objective restricted to that line is
strictly concave in ``phi2``, so its maximizer is the stationary point of the
quadratic

    c2 c3 rho_u1 x^2 + 2 c2 c3 x + c4 = 0,
    c3 = rho_u1 - c1,   c4 = (1 + (1 - phie) c1)(c2 - rho_u1) + rho_u1 - c1,

clamped to the feasible interval [mu1, mu2]. Since c3 <= 0 always, the
relevant root is the unique one right of the parabola vertex at -1/rho_u1.

The full allocation problem adds a one-dimensional search over the AN
fraction; in the high-SNR limit the whole solution collapses to closed form
(phi2 pinned by the strong user's QoS, phi1 balancing its rate against the
AN degradation of the eavesdropper).
"""

import math
from dataclasses import dataclass

import numpy as np

from .beamform import BetaPair
from .channel import SystemConfig
from .errors import InfeasibleConfigError
from .rates import LN2, PowerSplit, approx_ssr_parts, beam_coefficients

PE_GRID_STEP = 1e-3
GOLDEN_TOL = 1e-6
TIE_TOL = 1e-12
PMIN_REL_TOL = 1e-9
PMIN_CAP = 1e12

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class AllocContext:
    """Coefficients entering the closed-form allocation at one AN fraction."""

    c1: float
    c2: float
    c3: float
    c4: float
    mu0: float  # unconstrained stationary phi2 (nan if undefined)
    mu1: float  # strong user's QoS lower bound on phi2
    mu2: float  # weak user's QoS upper bound on phi2 along the split line
    gamma0: float  # high-SNR lower bound on phi1
    gamma1: float  # high-SNR phi2 (equals mu1)


@dataclass(frozen=True)
class AllocSolution:
    split: PowerSplit
    objective: float  # approximate SSR at the split, unclamped
    feasible: bool
    context: AllocContext


def _rate_gain(q: float) -> float:
    return 2.0**q - 1.0


def _qos_bounds(cfg: SystemConfig, c1: float, c2: float, phie):
    """Feasible phi2 interval [mu1, mu2] for the given AN fraction(s).

    A zero QoS rate collapses a bound onto the boundary where one user's
    share vanishes; both users must keep strictly positive power, so those
    corners retreat inward by one part in 1e12 (far below every solver
    tolerance).
    """
    phie = np.asarray(phie, dtype=float)
    t1 = _rate_gain(cfg.q1)
    t2 = _rate_gain(cfg.q2)
    mu1 = t2 / c2
    mu2 = (1.0 - phie - t1 / c1) / (1.0 + t1 / (c1 / cfg.rho_u1))
    if t2 == 0.0:
        mu1 = 1e-12
    if t1 == 0.0:
        mu2 = mu2 * (1.0 - 1e-12)
    return mu1, mu2


def _stationary_phi2(c2: float, c3: float, rho1: float, c4):
    """Stationary point of the reduced split objective (vectorized in c4).

    Larger root of the derivative quadratic; nan where c3 == 0 (derivative
    degenerates to a constant) or the discriminant is negative.
    """
    q = -(c2 * c3)  # >= 0 because c3 <= 0
    c4 = np.asarray(c4, dtype=float)
    disc = q * q + q * rho1 * c4
    with np.errstate(invalid="ignore", divide="ignore"):
        mu0 = np.where(
            (q > 0.0) & (disc >= 0.0),
            (np.sqrt(np.maximum(disc, 0.0)) - q) / (q * rho1),
            np.nan,
        )
    return mu0


def user_rate_objective(cfg: SystemConfig, betas: BetaPair, phi1, phi2):
    """Joint user-rate term F = log2((1 + c1 phi1 / (1 + phi2 rho_u1))(1 + c2 phi2))."""
    c1, c2 = beam_coefficients(cfg, betas)
    phi1 = np.asarray(phi1, dtype=float)
    phi2 = np.asarray(phi2, dtype=float)
    return np.log2((1.0 + c1 * phi1 / (1.0 + phi2 * cfg.rho_u1)) * (1.0 + c2 * phi2))


def alloc_context(cfg: SystemConfig, betas: BetaPair, phie: float) -> AllocContext:
    c1, c2 = beam_coefficients(cfg, betas)
    rho1 = cfg.rho_u1
    t1 = _rate_gain(cfg.q1)
    c3 = rho1 - c1
    c4 = (1.0 + (1.0 - phie) * c1) * (c2 - rho1) + c3
    mu1, mu2 = _qos_bounds(cfg, c1, c2, phie)
    mu1, mu2 = float(mu1), float(mu2)
    gamma1 = mu1
    gamma0 = t1 * (1.0 + gamma1 * rho1) / c1
    mu0 = float(_stationary_phi2(c2, c3, rho1, c4))
    return AllocContext(
        c1=c1, c2=c2, c3=c3, c4=c4, mu0=mu0, mu1=mu1, mu2=mu2, gamma0=gamma0, gamma1=gamma1
    )


# tag codes used by the vectorized splitter
_INTERIOR, _LOWER, _UPPER, _FORCED = 0, 1, 2, 3
_TAG_NAMES = {_INTERIOR: "interior", _LOWER: "lower_clamp", _UPPER: "upper_clamp", _FORCED: "forced"}


def _split_arrays(cfg: SystemConfig, betas: BetaPair, phie: np.ndarray):
    """Closed-form (phi1, phi2) for an array of AN fractions.

    Returns (phi1, phi2, tags, feasible); entries with mu1 > mu2 are marked
    infeasible. Where the stationary point is undefined the better QoS
    boundary is taken directly (tag "forced"), which is safe because the
    reduced objective is concave.
    """
    phie = np.asarray(phie, dtype=float)
    c1, c2 = beam_coefficients(cfg, betas)
    rho1 = cfg.rho_u1
    c3 = rho1 - c1

    mu1, mu2 = _qos_bounds(cfg, c1, c2, phie)
    feasible = mu2 >= mu1
    c4 = (1.0 + (1.0 - phie) * c1) * (c2 - rho1) + c3
    mu0 = _stationary_phi2(c2, c3, rho1, c4)

    defined = np.isfinite(mu0)
    phi2 = np.clip(np.where(defined, mu0, mu1), mu1, mu2)
    tags = np.full(phie.shape, _INTERIOR, dtype=np.int8)
    tags = np.where(defined & (mu0 <= mu1), _LOWER, tags)
    tags = np.where(defined & (mu0 >= mu2), _UPPER, tags)

    if not np.all(defined):
        f_lo = user_rate_objective(cfg, betas, 1.0 - phie - mu1, np.full_like(phie, mu1))
        f_hi = user_rate_objective(cfg, betas, 1.0 - phie - mu2, mu2)
        forced = np.where(f_lo >= f_hi, mu1, mu2)
        phi2 = np.where(defined, phi2, forced)
        tags = np.where(defined, tags, _FORCED)

    phi1 = 1.0 - phie - phi2
    return phi1, phi2, tags, feasible


def qos_power_mass(cfg: SystemConfig, betas: BetaPair, multiplier: float = 1.0) -> float:
    """Minimum phi1 + phi2 meeting both QoS bounds, at scaled user SNRs."""
    rho1 = cfg.rho_u1 * multiplier
    rho2 = cfg.rho_u2 * multiplier
    n = cfg.n_tx
    c1 = (1.0 + (n - 1) * betas.beta1) * rho1
    c2 = (1.0 + (n - 1) * betas.beta2) * rho2
    mu1 = _rate_gain(cfg.q2) / c2
    phi1 = _rate_gain(cfg.q1) * (1.0 + mu1 * rho1) / c1
    return mu1 + phi1


def feasibility_pmin(cfg: SystemConfig, betas: BetaPair) -> float:
    """Smallest SNR multiplier on (rho_u1, rho_u2) making the QoS mass fit.

    Bisection to 1e-9 relative; returns 0 for vacuous QoS and +inf when no
    multiplier below the cap works. Values above 1 mean the configured power
    is insufficient for these beams.
    """
    if _rate_gain(cfg.q1) == 0.0 and _rate_gain(cfg.q2) == 0.0:
        return 0.0

    def feasible(t: float) -> bool:
        return qos_power_mass(cfg, betas, t) <= 1.0

    hi = 1.0
    while not feasible(hi):
        hi *= 2.0
        if hi > PMIN_CAP:
            return math.inf
    lo = 0.0  # mass diverges as t -> 0, so lo is always infeasible
    for _ in range(200):
        if hi - lo <= PMIN_REL_TOL * hi:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _objective_at(cfg: SystemConfig, betas: BetaPair, phie: np.ndarray):
    phi1, phi2, tags, feasible = _split_arrays(cfg, betas, phie)
    obj = approx_ssr_parts(cfg, betas, phi1, phi2, phie, branch="balanced")
    return np.where(feasible, obj, -np.inf), phi1, phi2, tags


def inner_power_split(cfg: SystemConfig, betas: BetaPair, phie: float) -> AllocSolution:
    """Closed-form optimal (phi1, phi2) for a fixed AN fraction."""
    ctx = alloc_context(cfg, betas, phie)
    if ctx.mu1 > ctx.mu2:
        raise InfeasibleConfigError(
            f"AN fraction {phie} leaves no feasible user split (mu1={ctx.mu1:.6g} > mu2={ctx.mu2:.6g})"
        )
    arr = np.array([phie], dtype=float)
    obj, phi1, phi2, tags = _objective_at(cfg, betas, arr)
    split = PowerSplit(
        phi1=float(phi1[0]),
        phi2=float(phi2[0]),
        phie=float(phie),
        branch_tag=_TAG_NAMES[int(tags[0])],
    )
    return AllocSolution(split=split, objective=float(obj[0]), feasible=True, context=ctx)


def _pick_best(obj: np.ndarray) -> int:
    """Index of the maximal objective; ties within TIE_TOL go to the first
    (smallest-coordinate) entry."""
    best = float(np.max(obj))
    return int(np.argmax(obj >= best - TIE_TOL))


def _golden_max(f, a: float, b: float, tol: float) -> float:
    """Golden-section maximizer; ties step left so results are deterministic."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def optimize_power(cfg: SystemConfig, betas: BetaPair) -> AllocSolution:
    """Full power allocation: coarse AN grid plus golden-section refinement.

    The feasible AN fractions form the interval [0, 1 - qos_mass]; the grid
    locates the global maximum of the (not necessarily unimodal) profile and
    the refinement polishes the bracketing interval.
    """
    pmin = feasibility_pmin(cfg, betas)
    if pmin > 1.0:
        raise InfeasibleConfigError(
            f"QoS constraints need an SNR multiplier of {pmin:.4g} > 1", pmin=pmin
        )
    pe_max = max(0.0, 1.0 - qos_power_mass(cfg, betas))
    grid = np.arange(0.0, pe_max, PE_GRID_STEP)
    grid = np.append(grid, pe_max)
    obj, _, _, _ = _objective_at(cfg, betas, grid)
    idx = _pick_best(obj)

    lo = grid[max(0, idx - 1)]
    hi = grid[min(len(grid) - 1, idx + 1)]

    def scalar_obj(pe: float) -> float:
        val, _, _, _ = _objective_at(cfg, betas, np.array([pe]))
        return float(val[0])

    refined = _golden_max(scalar_obj, float(lo), float(hi), GOLDEN_TOL) if hi > lo else float(grid[idx])
    cand = [(float(grid[idx]), float(obj[idx])), (refined, scalar_obj(refined))]
    cand.sort(key=lambda t: t[0])  # smaller phie first on ties
    best_pe, best_obj = cand[0]
    if cand[1][1] > best_obj + TIE_TOL:
        best_pe, best_obj = cand[1]
    return inner_power_split(cfg, betas, best_pe)


def optimize_power_highsnr(cfg: SystemConfig, betas: BetaPair) -> AllocSolution:
    """Closed-form high-SNR allocation.

    phi2 is pinned by the strong user's QoS (gamma1), and phi1 is the
    stationary point of phi1 (1 + (1 - phi1 - gamma1) rho_e)^K clamped to
    [gamma0, 1 - gamma1]. The upper clamp means no AN is transmitted.
    """
    ctx = alloc_context(cfg, betas, 0.0)
    gamma0, gamma1 = ctx.gamma0, ctx.gamma1
    if gamma1 <= 0.0:
        raise ValueError("high-SNR allocation requires q2 > 0")
    if gamma0 > 1.0 - gamma1:
        raise InfeasibleConfigError(
            f"high-SNR QoS bounds overlap (gamma0={gamma0:.6g}, 1-gamma1={1.0 - gamma1:.6g})"
        )
    interior = (1.0 + cfg.rho_e - gamma1 * cfg.rho_e) / ((cfg.k_eve + 1) * cfg.rho_e)
    if interior < gamma0:
        phi1, tag = gamma0, "lower_clamp"
    elif interior > 1.0 - gamma1:
        phi1, tag = 1.0 - gamma1, "upper_clamp"
    else:
        phi1, tag = interior, "interior"
    # no AN at the upper clamp, exactly
    phie = 0.0 if tag == "upper_clamp" else max(0.0, 1.0 - phi1 - gamma1)
    split = PowerSplit(phi1=phi1, phi2=gamma1, phie=phie, branch_tag=tag)
    obj = float(approx_ssr_parts(cfg, betas, phi1, gamma1, phie, branch="balanced"))
    return AllocSolution(split=split, objective=obj, feasible=True, context=ctx)


def no_an_power_split(cfg: SystemConfig, betas: BetaPair, highsnr: bool = False) -> AllocSolution:
    """Best user split with artificial noise disabled (phie = 0).

    At arbitrary SNR this is the closed-form split at phie = 0; in the
    high-SNR regime the objective grows with phi1, so everything above the
    strong user's QoS floor goes to the weak user.
    """
    if not highsnr:
        return inner_power_split(cfg, betas, 0.0)
    ctx = alloc_context(cfg, betas, 0.0)
    if ctx.gamma0 > 1.0 - ctx.gamma1:
        raise InfeasibleConfigError(
            f"QoS bounds overlap at phie=0 (gamma0={ctx.gamma0:.6g}, 1-gamma1={1.0 - ctx.gamma1:.6g})"
        )
    split = PowerSplit(phi1=1.0 - ctx.gamma1, phi2=ctx.gamma1, phie=0.0, branch_tag="upper_clamp")
    obj = float(approx_ssr_parts(cfg, betas, split.phi1, split.phi2, 0.0, branch="balanced"))
    return AllocSolution(split=split, objective=obj, feasible=True, context=ctx)


def split_objective_derivatives(
    cfg: SystemConfig, betas: BetaPair, phie: float, phi2: float
) -> tuple[float, float]:
    """Analytic first and second derivative of the reduced split objective.

    G(phi2) = F(1 - phie - phi2, phi2). The first derivative shares its zero
    set with the stationary-point quadratic (numerator below); the second is
    strictly negative on the feasible domain because c2 > rho_u1, which is
    what makes the clamped closed form globally optimal.
    """
    c1, c2 = beam_coefficients(cfg, betas)
    rho1 = cfg.rho_u1
    c3 = rho1 - c1
    a = 1.0 + (1.0 - phie) * c1
    c4 = a * (c2 - rho1) + c3
    num = c2 * c3 * rho1 * phi2**2 + 2.0 * c2 * c3 * phi2 + c4
    den = (1.0 + rho1 * phi2) * (a + c3 * phi2) * (1.0 + c2 * phi2)
    g1 = num / (den * LN2)
    g2 = (
        -(c3**2) / (a + c3 * phi2) ** 2
        + rho1**2 / (1.0 + rho1 * phi2) ** 2
        - c2**2 / (1.0 + c2 * phi2) ** 2
    ) / LN2
    return float(g1), float(g2)


def an_tradeoff_derivative(cfg: SystemConfig, phi1: float, gamma1: float) -> float:
    """Derivative of phi1 (1 + (1 - phi1 - gamma1) rho_e)^K in phi1.

    Its unique zero on the feasible range, (1 + rho_e - gamma1 rho_e) /
    ((K + 1) rho_e), is the interior high-SNR operating point.
    """
    re = cfg.rho_e
    k = cfg.k_eve
    g = 1.0 + (1.0 - phi1 - gamma1) * re
    return float(g ** (k - 1) * (g - k * phi1 * re))
