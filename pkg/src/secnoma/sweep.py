"""Monte Carlo validation, experiment sweeps, config files and CSV output.

Config files are a flat TOML subset with the scenario keys (``n_tx``,
``k_eve``, ``q1_bpcu``, ``q2_bpcu``, ``rho_su_db``, ``rho_e_db``,
``rho_ratio``, ``seed``), optional fixed beams (``beta1``/``beta2``),
scheme and mode selectors (``schemes``, ``mc_trials``, ``highsnr_mode``) and
a ``[sweep]`` table with ``variable`` and ``values``. ``rho_e_ratio`` may
replace ``rho_e_db`` in SNR sweeps where the eavesdropper's SNR tracks the
users' (linear ratio).
"""

import concurrent.futures
import math
from dataclasses import dataclass, replace

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .beamform import BetaPair, build_set
from .channel import ChannelSet, SystemConfig, config_from_db, draw_channels
from .errors import DataQualityError, DegenerateChannelError, InfeasibleConfigError
from .rates import PowerSplit, exact_rates
from .schemes import SCHEME_KINDS, SchemeSpec, run_scheme

SWEEP_VARIABLES = ("n_tx", "k_eve", "rho_su_db")
MAX_REJECT_FRACTION = 1e-3
_MAX_ATTEMPTS = 64

CSV_COLUMNS = (
    "variable",
    "scheme",
    "ssr_approx",
    "ssr_mc_mean",
    "ssr_mc_stderr",
    "phi1",
    "phi2",
    "phie",
    "beta1",
    "beta2",
    "feasible",
    "trials",
)


@dataclass(frozen=True)
class SweepSpec:
    """One experiment: a variable swept over values for a set of schemes."""

    variable: str
    values: tuple
    base: SystemConfig
    schemes: tuple
    mc_trials: int = 0
    highsnr_mode: bool = False
    rho_ratio: float = 1.2
    rho_e_db: float | None = None
    rho_e_ratio: float | None = None

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"unknown sweep variable {self.variable!r}")
        if len(self.values) == 0:
            raise ValueError("sweep needs at least one value")
        if any(b >= a for a, b in zip(self.values[1:], self.values)):
            raise ValueError("sweep values must be strictly increasing")
        if self.mc_trials < 0:
            raise ValueError("mc_trials must be nonnegative")
        if self.variable == "rho_su_db" and self.rho_e_db is None and self.rho_e_ratio is None:
            raise ValueError("SNR sweeps need rho_e_db or rho_e_ratio")

    def materialize(self, value) -> SystemConfig:
        """System config at one sweep point."""
        if self.variable == "n_tx":
            return replace(self.base, n_tx=int(value))
        if self.variable == "k_eve":
            return replace(self.base, k_eve=int(value))
        rho_u2 = 10.0 ** (float(value) / 10.0)
        if self.rho_e_ratio is not None:
            rho_e = self.rho_e_ratio * rho_u2
        else:
            rho_e = 10.0 ** (self.rho_e_db / 10.0)
        return replace(self.base, rho_u1=rho_u2 / self.rho_ratio, rho_u2=rho_u2, rho_e=rho_e)


@dataclass(frozen=True)
class SweepRow:
    """One (value, scheme) result; solution fields are None when infeasible."""

    value: float
    scheme: str
    feasible: bool
    ssr_approx: float | None = None
    ssr_mc_mean: float | None = None
    ssr_mc_stderr: float | None = None
    phi1: float | None = None
    phi2: float | None = None
    phie: float | None = None
    beta1: float | None = None
    beta2: float | None = None
    trials_used: int = 0


def _trial_ssr(cfg: SystemConfig, betas: BetaPair, split: PowerSplit, trial: int) -> tuple[float, int]:
    """Clamped exact SSR of one trial; numerically broken draws are resampled."""
    rejected = 0
    for attempt in range(_MAX_ATTEMPTS):
        try:
            ch: ChannelSet = draw_channels(cfg, trial, attempt)
            bf = build_set(ch, betas)
            report = exact_rates(ch, bf, split)
        except (np.linalg.LinAlgError, DegenerateChannelError):
            rejected += 1
            continue
        return report.r_s, rejected
    raise DataQualityError(f"trial {trial} failed {_MAX_ATTEMPTS} redraw attempts")


def mc_validate(
    cfg: SystemConfig,
    betas: BetaPair,
    split: PowerSplit,
    trials: int,
    workers: int = 1,
) -> tuple[float, float]:
    """Monte Carlo mean and standard error of the exact SSR.

    Deterministic in (cfg.seed, trials): every trial owns a counter-derived
    substream and results land in indexed slots, so worker count cannot
    change the output. Raises DataQualityError if more than 0.1% of trials
    had to be rejected.
    """
    if trials < 100:
        raise ValueError(f"need at least 100 trials, got {trials}")
    values = np.empty(trials)
    rejected = np.zeros(trials, dtype=int)

    def work(t: int):
        values[t], rejected[t] = _trial_ssr(cfg, betas, split, t)

    if workers <= 1:
        for t in range(trials):
            work(t)
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, range(trials)))

    total_rejected = int(rejected.sum())
    if total_rejected > MAX_REJECT_FRACTION * trials:
        raise DataQualityError(f"{total_rejected}/{trials} trials rejected")
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(trials))
    return mean, stderr


def _sweep_point(spec: SweepSpec, value, scheme: SchemeSpec) -> SweepRow:
    cfg = spec.materialize(value)
    try:
        result = run_scheme(cfg, scheme, highsnr=spec.highsnr_mode)
    except InfeasibleConfigError:
        return SweepRow(value=float(value), scheme=scheme.kind, feasible=False)
    mc_mean = mc_stderr = None
    trials = 0
    if spec.mc_trials > 0 and scheme.kind == "hb_an":
        # exact-simulation validation is reserved for the proposed scheme
        mc_mean, mc_stderr = mc_validate(cfg, result.betas, result.alloc.split, spec.mc_trials)
        trials = spec.mc_trials
    split = result.alloc.split
    return SweepRow(
        value=float(value),
        scheme=scheme.kind,
        feasible=True,
        ssr_approx=result.ssr,
        ssr_mc_mean=mc_mean,
        ssr_mc_stderr=mc_stderr,
        phi1=split.phi1,
        phi2=split.phi2,
        phie=split.phie,
        beta1=result.betas.beta1,
        beta2=result.betas.beta2,
        trials_used=trials,
    )


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """All (value, scheme) points in deterministic order.

    Points run concurrently when workers > 1; each result is written to its
    own slot, so ordering and content are independent of the pool size.
    """
    tasks = [(value, scheme) for value in spec.values for scheme in spec.schemes]
    rows: list[SweepRow | None] = [None] * len(tasks)

    def work(i: int):
        value, scheme = tasks[i]
        rows[i] = _sweep_point(spec, value, scheme)

    if workers <= 1:
        for i in range(len(tasks)):
            work(i)
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, range(len(tasks))))
    return rows  # type: ignore[return-value]


def _fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".12g")


def rows_to_csv(rows) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        lines.append(
            ",".join(
                [
                    _fmt(r.value),
                    r.scheme,
                    _fmt(r.ssr_approx),
                    _fmt(r.ssr_mc_mean),
                    _fmt(r.ssr_mc_stderr),
                    _fmt(r.phi1),
                    _fmt(r.phi2),
                    _fmt(r.phie),
                    _fmt(r.beta1),
                    _fmt(r.beta2),
                    "true" if r.feasible else "false",
                    str(r.trials_used),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def write_csv(rows, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(rows_to_csv(rows))


# ---------------------------------------------------------------------------
# config ingestion


def load_config_file(path) -> dict:
    """Parse a config file; malformed input raises ValueError with location."""
    with open(path, "rb") as fh:
        try:
            return tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ValueError(f"{path}: {exc}") from exc


def _require(mapping: dict, key: str):
    if key not in mapping:
        raise ValueError(f"missing required config key {key!r}")
    return mapping[key]


def system_config_from_mapping(mapping: dict, seed: int | None = None) -> SystemConfig:
    return config_from_db(
        n_tx=int(_require(mapping, "n_tx")),
        k_eve=int(_require(mapping, "k_eve")),
        q1_bpcu=float(_require(mapping, "q1_bpcu")),
        q2_bpcu=float(_require(mapping, "q2_bpcu")),
        rho_su_db=float(_require(mapping, "rho_su_db")),
        rho_e_db=float(mapping.get("rho_e_db", 0.0)),
        rho_ratio=float(mapping.get("rho_ratio", 1.2)),
        seed=int(mapping.get("seed", 0) if seed is None else seed),
        allow_large_k=bool(mapping.get("allow_large_k", False)),
    )


def fixed_betas_from_mapping(mapping: dict) -> BetaPair | None:
    if "beta1" in mapping or "beta2" in mapping:
        if not ("beta1" in mapping and "beta2" in mapping):
            raise ValueError("beta1 and beta2 must be given together")
        return BetaPair(float(mapping["beta1"]), float(mapping["beta2"]))
    return None


def scheme_specs_from_mapping(mapping: dict) -> tuple[SchemeSpec, ...]:
    kinds = mapping.get("schemes", ["hb_an"])
    if not isinstance(kinds, list) or not kinds:
        raise ValueError("schemes must be a nonempty list")
    fixed = fixed_betas_from_mapping(mapping)
    specs = []
    for kind in kinds:
        if kind not in SCHEME_KINDS:
            raise ValueError(f"unknown scheme {kind!r} (expected one of {SCHEME_KINDS})")
        specs.append(SchemeSpec(kind=kind, betas=None if kind == "h2_an" else fixed))
    return tuple(specs)


def sweep_spec_from_mapping(mapping: dict, seed: int | None = None, trials: int | None = None) -> SweepSpec:
    sweep = _require(mapping, "sweep")
    if not isinstance(sweep, dict):
        raise ValueError("sweep must be a table with 'variable' and 'values'")
    values = _require(sweep, "values")
    if "rho_e_db" not in mapping and "rho_e_ratio" not in mapping:
        raise ValueError("missing required config key 'rho_e_db' (or 'rho_e_ratio')")
    base = system_config_from_mapping({**mapping, "rho_e_db": mapping.get("rho_e_db", 0.0)}, seed)
    if "rho_e_ratio" in mapping:
        base = replace(base, rho_e=float(mapping["rho_e_ratio"]) * base.rho_u2)
    variable = _require(sweep, "variable")
    return SweepSpec(
        variable=variable,
        values=tuple(values),
        base=base,
        schemes=scheme_specs_from_mapping(mapping),
        mc_trials=int(mapping.get("mc_trials", 0) if trials is None else trials),
        highsnr_mode=bool(mapping.get("highsnr_mode", False)),
        rho_ratio=float(mapping.get("rho_ratio", 1.2)),
        rho_e_db=float(mapping["rho_e_db"]) if "rho_e_db" in mapping else None,
        rho_e_ratio=float(mapping["rho_e_ratio"]) if "rho_e_ratio" in mapping else None,
    )
