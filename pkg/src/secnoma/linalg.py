"""Complex linear-algebra kernel.

Vectors are 1-D ``complex128`` arrays, matrices 2-D. All pairings between a
channel vector and a beamforming vector use the Hermitian inner product
``inner(h, v) = sum_k h_k conj(v_k)``, so an MRT-style beamformer ``v = h/|h|``
yields the full array gain ``inner(h, v) = |h|``.
"""

import numpy as np

from .errors import DegenerateChannelError

# |<h1^, h2^>| above 1 - PARALLEL_TOL is treated as parallel channels. For
# independent continuous draws this is a measure-zero event; the guard only
# protects the QR factorization from ill-conditioned input.
PARALLEL_TOL = 1e-12
HERMITIAN_TOL = 1e-10


def as_cvector(x) -> np.ndarray:
    """Coerce to a finite 1-D complex128 vector."""
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def as_cmatrix(x) -> np.ndarray:
    """Coerce to a finite 2-D complex128 matrix."""
    m = np.asarray(x, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def inner(a, b) -> complex:
    """Hermitian inner product ``sum_k a_k conj(b_k)``."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(a @ b.conj())


def logdet_hpd(m) -> float:
    """Natural-log determinant of a Hermitian positive definite matrix.

    Computed via Cholesky; raises ``np.linalg.LinAlgError`` if the matrix is
    not positive definite and ``ValueError`` if it is not square or not
    Hermitian within ``HERMITIAN_TOL``. Callers convert to log2 as needed.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"square matrix required, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
        raise ValueError("matrix is not Hermitian within tolerance")
    chol = np.linalg.cholesky(m)
    return 2.0 * float(np.sum(np.log(np.diag(chol).real)))


def null_space_basis(h1, h2) -> np.ndarray:
    """Orthonormal basis of the space Hermitian-orthogonal to ``h1`` and ``h2``.

    Returns an ``N x (N-2)`` matrix ``V`` with ``inner(h_m, V[:, j]) = 0`` and
    ``V^H V = I``, computed from the Householder QR of the two unit-scaled
    channels (trailing ``N - 2`` columns of the complete factor).
    """
    h1 = as_cvector(h1)
    h2 = as_cvector(h2)
    if h1.size != h2.size:
        raise ValueError("channel vectors must have equal length")
    n = h1.size
    if n < 3:
        raise ValueError(f"need at least 3 dimensions, got {n}")
    n1 = np.linalg.norm(h1)
    n2 = np.linalg.norm(h2)
    if n1 == 0.0 or n2 == 0.0:
        raise DegenerateChannelError("zero channel vector")
    h1u = h1 / n1
    h2u = h2 / n2
    if abs(inner(h1u, h2u)) > 1.0 - PARALLEL_TOL:
        raise DegenerateChannelError("channel vectors are near-parallel")
    q, _ = np.linalg.qr(np.column_stack([h1u, h2u]), mode="complete")
    return q[:, 2:]
