"""Scenario configuration and reproducible random channel generation.

Normalization convention: total transmit power ``P = 1`` and every receiver
noise variance ``sigma^2 = 1``. Average SNRs are then carried entirely by the
per-entry channel variances, ``delta_m^2 = rho_um`` and ``delta_e^2 = rho_e``,
and any transmit-power sweep is realized by scaling the rho values.
"""

import warnings
from dataclasses import dataclass

import numpy as np

DEFAULT_RHO_RATIO = 1.2  # rho_u2 / rho_u1 convention used by all experiments

_U64 = (1 << 64) - 1
_MAX_REDRAWS = 128


@dataclass(frozen=True)
class SystemConfig:
    """Scenario parameters.

    n_tx     -- number of transmit antennas N (>= 3)
    k_eve    -- number of eavesdropper antennas K (kept << N)
    q1, q2   -- per-user QoS rates in bits per channel use
    rho_u1, rho_u2, rho_e -- linear average SNRs of the three links
    seed     -- base seed for all Monte Carlo substreams
    """

    n_tx: int
    k_eve: int
    q1: float
    q2: float
    rho_u1: float
    rho_u2: float
    rho_e: float
    seed: int = 0
    allow_large_k: bool = False

    def __post_init__(self):
        if self.n_tx < 3:
            raise ValueError(f"n_tx must be >= 3, got {self.n_tx}")
        if self.k_eve < 1:
            raise ValueError(f"k_eve must be >= 1, got {self.k_eve}")
        if self.k_eve > self.n_tx / 4:
            # The analytic approximations assume N >> K.
            if self.allow_large_k:
                warnings.warn(
                    f"k_eve={self.k_eve} exceeds n_tx/4={self.n_tx / 4:.1f}; "
                    "large-N approximations may be inaccurate",
                    stacklevel=2,
                )
            else:
                raise ValueError(
                    f"k_eve={self.k_eve} exceeds n_tx/4={self.n_tx / 4:.1f} "
                    "(set allow_large_k=True to override)"
                )
        if self.q1 < 0 or self.q2 < 0:
            raise ValueError("QoS rates must be nonnegative")
        for name in ("rho_u1", "rho_u2", "rho_e"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be finite and positive, got {val}")


def config_from_db(
    n_tx: int,
    k_eve: int,
    q1_bpcu: float,
    q2_bpcu: float,
    rho_su_db: float,
    rho_e_db: float,
    rho_ratio: float = DEFAULT_RHO_RATIO,
    seed: int = 0,
    allow_large_k: bool = False,
) -> SystemConfig:
    """Build a config from dB-valued SNRs.

    ``rho_su_db`` is the strong user's average SNR; the weak user gets
    ``rho_u1 = rho_u2 / rho_ratio``. Conversion to linear happens here, once.
    """
    rho_u2 = 10.0 ** (rho_su_db / 10.0)
    return SystemConfig(
        n_tx=n_tx,
        k_eve=k_eve,
        q1=q1_bpcu,
        q2=q2_bpcu,
        rho_u1=rho_u2 / rho_ratio,
        rho_u2=rho_u2,
        rho_e=10.0 ** (rho_e_db / 10.0),
        seed=seed,
        allow_large_k=allow_large_k,
    )


@dataclass(frozen=True)
class ChannelSet:
    """One channel realization.

    ``h1`` is always the weak user (``|h1|^2 <= |h2|^2``); when the raw draw
    came out the other way round the labels were swapped and ``delta1_sq`` /
    ``delta2_sq`` carry the per-entry variances that actually back each label
    for this trial.
    """

    h1: np.ndarray
    h2: np.ndarray
    he: np.ndarray
    e: np.ndarray
    delta1_sq: float
    delta2_sq: float
    swapped: bool = False


def snr_to_variances(cfg: SystemConfig) -> tuple[float, float, float]:
    """Per-entry channel variances (delta1^2, delta2^2, delta_e^2).

    With the P = sigma^2 = 1 normalization these equal the configured SNRs.
    """
    return cfg.rho_u1, cfg.rho_u2, cfg.rho_e


def trial_rng(seed: int, trial_index: int, attempt: int = 0) -> np.random.Generator:
    """Counter-based substream for one Monte Carlo trial.

    Deterministic in (seed, trial_index, attempt) and independent of how many
    workers consume the trial stream.
    """
    ss = np.random.SeedSequence(entropy=seed & _U64, spawn_key=(trial_index, attempt))
    return np.random.default_rng(ss)


def _complex_normal(rng: np.random.Generator, shape, var: float) -> np.ndarray:
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) * np.sqrt(var / 2.0)


def _aligned(a: np.ndarray, b: np.ndarray) -> bool:
    c = abs(a @ b.conj()) / (np.linalg.norm(a) * np.linalg.norm(b))
    return c > 1.0 - 1e-12


def draw_channels(cfg: SystemConfig, trial_index: int, attempt: int = 0) -> ChannelSet:
    """Draw one i.i.d. circularly-symmetric Gaussian channel realization.

    The weak/strong labels are ordered by realized channel gain; the auxiliary
    direction ``e`` has unit-variance entries and is redrawn on the
    (measure-zero) event that it aligns with either user channel.
    """
    rng = trial_rng(cfg.seed, trial_index, attempt)
    n, k = cfg.n_tx, cfg.k_eve
    d1, d2, de = snr_to_variances(cfg)

    h1 = _complex_normal(rng, n, d1)
    h2 = _complex_normal(rng, n, d2)
    for _ in range(_MAX_REDRAWS):
        if not _aligned(h1, h2):
            break
        h2 = _complex_normal(rng, n, d2)
    else:
        raise RuntimeError("could not draw non-parallel user channels")

    swapped = np.linalg.norm(h1) ** 2 > np.linalg.norm(h2) ** 2
    if swapped:
        h1, h2 = h2, h1
        d1, d2 = d2, d1

    he = _complex_normal(rng, (k, n), de)

    for _ in range(_MAX_REDRAWS):
        e = _complex_normal(rng, n, 1.0)
        if not (_aligned(e, h1) or _aligned(e, h2)):
            break
    else:
        raise RuntimeError("could not draw a non-aligned auxiliary direction")

    return ChannelSet(h1=h1, h2=h2, he=he, e=e, delta1_sq=d1, delta2_sq=d2, swapped=bool(swapped))


def draw_raw_pair(cfg: SystemConfig, trial_index: int) -> tuple[np.ndarray, np.ndarray]:
    """Unordered (h1, h2) draw for generator statistics tests.

    Bypasses the gain ordering so the sample mean of ``|h1|^2 / N`` can be
    compared against delta1^2 without the selection bias the label swap
    introduces.
    """
    rng = trial_rng(cfg.seed, trial_index)
    d1, d2, _ = snr_to_variances(cfg)
    h1 = _complex_normal(rng, cfg.n_tx, d1)
    h2 = _complex_normal(rng, cfg.n_tx, d2)
    return h1, h2
