import numpy as np
import pytest

from secnoma import BetaPair, SystemConfig, config_from_db, feasibility_pmin

# Fixed-beam reference scenario used across the suite: N=40, K=2,
# rho_su=20 dB, rho_e=10 dB, Q=(5, 5.5), beams (0.05, 0.9).
REF_BETAS = BetaPair(0.05, 0.9)


def ref_config(n_tx: int = 40, k_eve: int = 2, seed: int = 11) -> SystemConfig:
    return config_from_db(
        n_tx=n_tx, k_eve=k_eve, q1_bpcu=5.0, q2_bpcu=5.5,
        rho_su_db=20.0, rho_e_db=10.0, seed=seed,
    )


def sample_feasible(
    rng: np.random.Generator,
    n_range=(8, 64),
    k_max=4,
    q1_range=(0.25, 4.0),
    q2_range=(0.25, 6.0),
    rho_su_db_range=(10.0, 30.0),
    rho_e_db_range=(-5.0, 15.0),
    max_tries: int = 500,
):
    """Random (config, betas) with the QoS constraints satisfiable at P = 1."""
    for _ in range(max_tries):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        k = int(rng.integers(1, min(k_max, n // 4) + 1))
        cfg = config_from_db(
            n_tx=n,
            k_eve=k,
            q1_bpcu=float(rng.uniform(*q1_range)),
            q2_bpcu=float(rng.uniform(*q2_range)),
            rho_su_db=float(rng.uniform(*rho_su_db_range)),
            rho_e_db=float(rng.uniform(*rho_e_db_range)),
            seed=int(rng.integers(2**32)),
        )
        betas = BetaPair(float(rng.uniform()), float(rng.uniform()))
        if feasibility_pmin(cfg, betas) <= 1.0:
            return cfg, betas
    raise RuntimeError("could not sample a feasible configuration")


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
