"""Beam-scalar optimization and the three transmission schemes.

At the optimum the weak user's stream is decoded equally well at both users,
which couples the two beam scalars: for each beta1 there is (at most) one
beta2 balancing the two decoding SINRs. In the high-SNR limit the coupling
collapses to the closed relation beta2 = (1 - beta1)/(1 + N beta1) and the
whole design reduces to a one-dimensional search; at arbitrary SNR the
balance point is found by root-bracketing with the power allocation re-solved
inside every residual evaluation.

Schemes:
  hb_an -- hybrid beams plus artificial noise (the full design)
  hb    -- same beams, no AN (phie forced to 0)
  h2_an -- both beams point at the strong user (beta = (0, 1)) plus AN;
           power optimized by brute-force grid on the min-branch objective
           because these beams do not satisfy the balance coupling
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .allocation import (
    TIE_TOL,
    AllocSolution,
    _golden_max,
    _pick_best,
    alloc_context,
    no_an_power_split,
    optimize_power,
    optimize_power_highsnr,
)
from .beamform import BetaPair
from .channel import SystemConfig
from .errors import InfeasibleConfigError
from .rates import (
    PowerSplit,
    approx_sinr_branches,
    approx_sinr_u1,
    approx_ssr_parts,
    beam_coefficients,
)

SCHEME_KINDS = ("hb_an", "hb", "h2_an")

BETA1_GRID_STEP = 1e-2  # outer grid of the coupled search
BETA1_FINE_STEP = 1e-3  # high-SNR one-dimensional search
COUPLING_REL_TOL = 1e-3
COUPLING_MAX_ITER = 50
H2AN_GRID_STEP = 1e-3


@dataclass(frozen=True)
class SchemeSpec:
    """Which scheme to run and whether its beams are fixed or optimized."""

    kind: str
    betas: BetaPair | None = None  # None means optimize

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.kind == "h2_an":
            if self.betas is None or self.betas != BetaPair(0.0, 1.0):
                object.__setattr__(self, "betas", BetaPair(0.0, 1.0))

    @property
    def an_allowed(self) -> bool:
        return self.kind != "hb"


@dataclass(frozen=True)
class SchemeResult:
    """Optimized beams, power split and the reported secrecy sum rate.

    ``ssr`` is the clamped approximate SSR on ``branch``; schemes always
    report the min-of-branches form, which equals the single-branch value at
    a balanced point and stays valid for arbitrary fixed beams.
    ``coupling_ok`` is False when the balance equation had no root and the
    returned point only minimizes the residual.
    """

    betas: BetaPair
    alloc: AllocSolution
    ssr: float
    branch: str = "min"
    coupling_ok: bool = True


def beta2_from_beta1_highsnr(beta1: float, n_tx: int) -> float:
    """High-SNR balance coupling beta2 = (1 - beta1) / (1 + N beta1)."""
    if not (0.0 <= beta1 <= 1.0):
        raise ValueError(f"beta1 must lie in [0, 1], got {beta1}")
    return (1.0 - beta1) / (1.0 + n_tx * beta1)


def coupling_residual(cfg: SystemConfig, betas: BetaPair, split: PowerSplit) -> float:
    """Difference of the two large-N decoding SINRs of the weak user's stream.

    Zero means both users decode stream 1 equally well, the property the
    optimal design satisfies.
    """
    g1, g2 = _coupling_sinrs(cfg, betas, split)
    return g1 - g2


def _coupling_sinrs(cfg: SystemConfig, betas: BetaPair, split: PowerSplit) -> tuple[float, float]:
    n = cfg.n_tx
    g1 = split.phi1 * (n * betas.beta1 + 1.0) * cfg.rho_u1 / (split.phi2 * cfg.rho_u1 + 1.0)
    g2 = (
        split.phi1
        * n
        * (1.0 - betas.beta1)
        * cfg.rho_u2
        / (1.0 + split.phi2 * (1.0 + n * betas.beta2) * cfg.rho_u2)
    )
    return g1, g2


def _allocate(cfg: SystemConfig, betas: BetaPair, no_an: bool, highsnr: bool) -> AllocSolution:
    if no_an:
        return no_an_power_split(cfg, betas, highsnr=highsnr)
    if highsnr:
        return optimize_power_highsnr(cfg, betas)
    return optimize_power(cfg, betas)


def _min_branch_result(
    cfg: SystemConfig, betas: BetaPair, alloc: AllocSolution, coupling_ok: bool = True
) -> SchemeResult:
    """Scheme result re-scored on the min-branch objective.

    The inner solvers maximize the single-branch objective that is exact on
    the balance manifold; reported scheme values always use the explicit
    minimum of both decoding branches, which is valid for any beam pair and
    coincides with the single branch at a balanced point.
    """
    split = alloc.split
    obj = float(
        approx_ssr_parts(cfg, betas, split.phi1, split.phi2, split.phie, branch="min")
    )
    scored = AllocSolution(
        split=split, objective=obj, feasible=alloc.feasible, context=alloc.context
    )
    return SchemeResult(
        betas=betas, alloc=scored, ssr=max(0.0, obj), branch="min", coupling_ok=coupling_ok
    )


def balance_residual(cfg: SystemConfig, betas: BetaPair, split: PowerSplit) -> float:
    """Relative decoding-SINR imbalance, in the solver's coefficient form.

    Uses the same (N-1)-based gain coefficients as the optimized objective
    (coupling_residual keeps the cruder printed coefficients); mixing the two
    families shifts the balance point by O(1/N) and can misrank beam pairs.
    """
    g1, g2 = approx_sinr_branches(cfg, betas, split.phi1, split.phi2)
    g1, g2 = float(g1), float(g2)
    return (g1 - g2) / g1 if g1 > 0 else np.inf


def _solve_coupled_beta2(cfg: SystemConfig, beta1: float, no_an: bool):
    """Balance beta2 for one beta1, re-allocating power per residual call.

    Returns (beta2, alloc, rel_residual, coupled) or None when no beta2 is
    feasible. When the residual has no sign change on [0, 1] (corner optima:
    one decoder dominates for every beta2), the probe closest to balance is
    returned with ``coupled`` False; for a dominating strong user that probe
    is the beta2 = 1 boundary, where the min-branch objective is maximal.
    """
    cache: dict[float, tuple[AllocSolution, float] | None] = {}

    def evaluate(b2: float):
        if b2 not in cache:
            betas = BetaPair(beta1, b2)
            try:
                alloc = _allocate(cfg, betas, no_an, highsnr=False)
            except InfeasibleConfigError:
                cache[b2] = None
            else:
                cache[b2] = (alloc, balance_residual(cfg, betas, alloc.split))
        return cache[b2]

    probes = sorted({0.0, 0.25, 0.5, 0.75, 1.0, beta2_from_beta1_highsnr(beta1, cfg.n_tx)})
    valid = [(b2, evaluate(b2)) for b2 in probes]
    valid = [(b2, out) for b2, out in valid if out is not None]
    if not valid:
        return None

    for (b2a, out_a), (b2b, out_b) in zip(valid, valid[1:]):
        if np.sign(out_a[1]) * np.sign(out_b[1]) < 0:
            root = brentq(
                lambda b2: evaluate(b2)[1],
                b2a,
                b2b,
                xtol=1e-6,
                maxiter=COUPLING_MAX_ITER,
            )
            alloc, rel = evaluate(float(root))
            return float(root), alloc, rel, abs(rel) <= COUPLING_REL_TOL
    # no bracket: keep the probe closest to balance
    b2, (alloc, rel) = min(valid, key=lambda item: abs(item[1][1]))
    return b2, alloc, rel, abs(rel) <= COUPLING_REL_TOL


def _min_branch_score(cfg: SystemConfig, betas: BetaPair, alloc: AllocSolution) -> float:
    split = alloc.split
    return float(approx_ssr_parts(cfg, betas, split.phi1, split.phi2, split.phie, branch="min"))


def optimize_betas(cfg: SystemConfig, no_an: bool = False) -> SchemeResult:
    """Joint beam-scalar and power optimization at arbitrary SNR.

    Outer grid over beta1; per grid point the coupled beta2 is root-bracketed
    with the full power search re-run inside each residual evaluation, and
    boundary points stand in where no balance root exists. All candidates
    compete on the min-branch objective (equal to the balanced objective at
    a root); ties go to the smaller beta1.
    """
    best = None  # (score, beta1, beta2, alloc, coupled)
    for b1 in np.arange(0.0, 1.0 + BETA1_GRID_STEP / 2, BETA1_GRID_STEP):
        b1 = float(min(b1, 1.0))
        out = _solve_coupled_beta2(cfg, b1, no_an)
        if out is None:
            continue
        b2, alloc, _, coupled = out
        score = _min_branch_score(cfg, BetaPair(b1, b2), alloc)
        if best is None or score > best[0] + TIE_TOL:
            best = (score, b1, b2, alloc, coupled)

    if best is None:
        raise InfeasibleConfigError("no feasible beam pair under the QoS constraints")
    _, b1, b2, alloc, coupled = best
    return _min_branch_result(cfg, BetaPair(b1, b2), alloc, coupling_ok=coupled)


def optimize_betas_highsnr(cfg: SystemConfig, no_an: bool = False) -> SchemeResult:
    """One-dimensional beam search with the closed-form high-SNR allocation.

    beta2 follows the closed coupling relation and candidates are scored on
    the min-branch objective, which stays honest where the relation drifts
    off the exact balance (it does at finite SNR, since the QoS pins phi2 at
    a level where the relation's dropped unit terms matter).
    """

    def evaluate(b1: float):
        betas = BetaPair(b1, beta2_from_beta1_highsnr(b1, cfg.n_tx))
        try:
            alloc = _allocate(cfg, betas, no_an, highsnr=True)
        except InfeasibleConfigError:
            return None
        return _min_branch_score(cfg, betas, alloc), betas, alloc

    grid = np.append(np.arange(0.0, 1.0, BETA1_FINE_STEP), 1.0)
    evals = [evaluate(float(b1)) for b1 in grid]
    objs = np.array([e[0] if e is not None else -np.inf for e in evals])
    if not np.isfinite(objs).any():
        raise InfeasibleConfigError("no feasible beam pair under the QoS constraints")
    idx = _pick_best(objs)

    lo = float(grid[max(0, idx - 1)])
    hi = float(grid[min(len(grid) - 1, idx + 1)])
    refined = _golden_max(
        lambda b1: out[0] if (out := evaluate(b1)) is not None else -np.inf, lo, hi, 1e-6
    )
    best = evals[idx]
    cand = evaluate(refined)
    if cand is not None and cand[0] > best[0] + TIE_TOL:
        best = cand
    _, betas, alloc = best
    return _min_branch_result(cfg, betas, alloc)


def _optimize_h2an_grid(cfg: SystemConfig) -> SchemeResult:
    """Brute-force power optimization of the strong-user-beam benchmark.

    Beams are fixed at beta = (0, 1); the weak user has no beamforming gain,
    so its QoS is enforced on the explicit min-branch SINR. Grid over
    (phi2, phie) with the QoS floor on phi2 included exactly; ties prefer
    less AN, then less strong-user power.
    """
    betas = BetaPair(0.0, 1.0)
    _, c2 = beam_coefficients(cfg, betas)
    t1 = 2.0**cfg.q1 - 1.0
    mu1 = (2.0**cfg.q2 - 1.0) / c2
    if mu1 >= 1.0:
        raise InfeasibleConfigError("strong user's QoS floor exceeds the power budget")

    start = np.ceil(mu1 / H2AN_GRID_STEP) * H2AN_GRID_STEP
    phi2 = np.unique(np.concatenate(([mu1], np.arange(start, 1.0, H2AN_GRID_STEP))))
    phie = np.arange(0.0, 1.0, H2AN_GRID_STEP)
    pe, p2 = np.meshgrid(phie, phi2, indexing="ij")  # phie on axis 0: ties prefer small phie
    p1 = 1.0 - p2 - pe
    valid = p1 > 0.0
    p1_safe = np.where(valid, p1, np.nan)
    gmin = approx_sinr_u1(cfg, betas, p1_safe, p2, branch="min")
    valid &= gmin >= t1
    obj = approx_ssr_parts(cfg, betas, p1_safe, p2, pe, branch="min")
    obj = np.where(valid, obj, -np.inf)
    if not np.isfinite(obj).any():
        raise InfeasibleConfigError("benchmark beams cannot meet the weak user's QoS")

    idx = _pick_best(obj.ravel())
    i, j = np.unravel_index(idx, obj.shape)
    split = PowerSplit(
        phi1=float(p1[i, j]), phi2=float(p2[i, j]), phie=float(pe[i, j]), branch_tag="forced"
    )
    alloc = AllocSolution(
        split=split,
        objective=float(obj[i, j]),
        feasible=True,
        context=alloc_context(cfg, betas, float(pe[i, j])),
    )
    return SchemeResult(betas=betas, alloc=alloc, ssr=max(0.0, alloc.objective), branch="min")


def run_scheme(cfg: SystemConfig, spec: SchemeSpec, highsnr: bool = False) -> SchemeResult:
    """Run one scheme end to end and report its approximate SSR."""
    if spec.kind == "h2_an":
        return _optimize_h2an_grid(cfg)
    no_an = spec.kind == "hb"
    if spec.betas is None:
        if highsnr:
            return optimize_betas_highsnr(cfg, no_an=no_an)
        return optimize_betas(cfg, no_an=no_an)
    # fixed arbitrary beams: optimize power only
    alloc = _allocate(cfg, spec.betas, no_an, highsnr)
    return _min_branch_result(cfg, spec.betas, alloc)
