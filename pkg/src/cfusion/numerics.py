"""Dense linear-algebra kernels and the tolerance policy.

Every numerical threshold used elsewhere in the package comes from a
:class:`Tolerances` instance, so a single object decides what counts as
"zero", "surjective" or "equal to the identity".
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import AllVectorsNumericallyZero, NotHermitian, NotPositiveDefinite


@dataclass(frozen=True)
class Tolerances:
    rank_tol: float = 1e-10
    residual_tol: float = 1e-8
    psd_tol: float = 1e-10

    def __post_init__(self):
        for name in ("rank_tol", "residual_tol", "psd_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        if self.rank_tol >= 1:
            raise ValueError("rank_tol must be < 1")

    def as_dict(self):
        return {
            "rank_tol": self.rank_tol,
            "residual_tol": self.residual_tol,
            "psd_tol": self.psd_tol,
        }


DEFAULT_TOL = Tolerances()

HERMITIAN_TOL = 1e-10


def as_complex_matrix(M):
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def orthonormalize(vectors, tol=DEFAULT_TOL):
    """Orthonormal basis (as columns) for the numerical span of ``vectors``.

    ``vectors`` is a sequence of equal-length n-vectors, or an n x m array
    whose columns are the vectors. Gram-Schmidt is applied in input order
    (with one re-orthogonalisation pass), so the first basis vector is
    always parallel to the first non-negligible input vector. Vectors whose
    residual falls below ``rank_tol * sigma_max`` are dropped.
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        A = as_complex_matrix(vectors)
    else:
        vecs = [np.asarray(v, dtype=np.complex128).ravel() for v in vectors]
        if not vecs:
            raise ValueError("need at least one vector")
        if len({v.shape[0] for v in vecs}) != 1:
            raise ValueError("all vectors must have the same dimension")
        A = as_complex_matrix(np.column_stack(vecs))
    n = A.shape[0]
    if n < 1 or A.shape[1] < 1:
        raise ValueError("need at least one vector of dimension >= 1")

    sv = np.linalg.svd(A, compute_uv=False)
    smax = sv[0] if sv.size else 0.0
    if smax == 0.0:
        raise AllVectorsNumericallyZero("all input vectors are zero")
    cutoff = tol.rank_tol * smax
    rank = int(np.sum(sv > cutoff))
    if rank == 0:
        raise AllVectorsNumericallyZero("input vectors have numerical rank 0")

    basis = []
    for j in range(A.shape[1]):
        r = A[:, j].copy()
        for _ in range(2):
            for q in basis:
                r -= np.vdot(q, r) * q
        nrm = np.linalg.norm(r)
        if nrm > cutoff and len(basis) < n:
            basis.append(r / nrm)
    if len(basis) != rank:
        # Gram-Schmidt and SVD disagree near the cutoff; trust the SVD.
        U = np.linalg.svd(A, full_matrices=False)[0]
        return U[:, :rank].copy()
    return np.column_stack(basis)


def hermitian_extremes(M):
    """Smallest and largest eigenvalue of a Hermitian matrix."""
    A = as_complex_matrix(M)
    if A.shape[0] != A.shape[1]:
        raise NotHermitian(f"matrix is not square: {A.shape}")
    asym = np.linalg.norm(A - A.conj().T, 2)
    if asym > HERMITIAN_TOL * max(1.0, np.linalg.norm(A, 2)):
        raise NotHermitian(f"asymmetry {asym:.3e} exceeds tolerance")
    w = np.linalg.eigvalsh((A + A.conj().T) / 2)
    return float(w[0]), float(w[-1])


def spectral_norm(M):
    A = np.asarray(M, dtype=np.complex128)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A.reshape(A.shape[0], -1), 2))


def singular_values(M):
    A = np.asarray(M, dtype=np.complex128)
    if A.size == 0:
        return np.zeros(0)
    return np.linalg.svd(A, compute_uv=False)


def numerical_rank(M, tol=DEFAULT_TOL):
    sv = singular_values(M)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol.rank_tol * sv[0]))


def is_injective(M, tol=DEFAULT_TOL):
    """Full column rank under the relative singular-value cutoff."""
    A = np.asarray(M)
    return A.shape[1] <= A.shape[0] and numerical_rank(A, tol) == A.shape[1]


def is_surjective(M, tol=DEFAULT_TOL):
    """Full row rank under the relative singular-value cutoff."""
    A = np.asarray(M)
    return A.shape[0] <= A.shape[1] and numerical_rank(A, tol) == A.shape[0]


def solve_hpd(M, b, tol=DEFAULT_TOL):
    """Solve ``M x = b`` for Hermitian positive definite ``M``.

    ``b`` may be a vector or a matrix of right-hand sides.
    """
    A = as_complex_matrix(M)
    lo, _ = hermitian_extremes(A)
    if lo <= tol.psd_tol:
        raise NotPositiveDefinite(f"lambda_min = {lo:.3e} <= psd_tol = {tol.psd_tol:.1e}")
    A = (A + A.conj().T) / 2
    factor = scipy.linalg.cho_factor(A, lower=True)
    return scipy.linalg.cho_solve(factor, np.asarray(b, dtype=np.complex128))


def hpd_inverse(M, tol=DEFAULT_TOL):
    A = as_complex_matrix(M)
    inv = solve_hpd(A, np.eye(A.shape[0]), tol)
    return (inv + inv.conj().T) / 2
