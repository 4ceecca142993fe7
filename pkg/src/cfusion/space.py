"""Finite measure spaces, weight maps and subspaces of C^n."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, SingularOperator
from .numerics import DEFAULT_TOL, as_complex_matrix, orthonormalize, singular_values

ORTHONORMAL_TOL = 1e-10


@dataclass(frozen=True)
class MeasureSpace:
    """A finite atomic measure space: ordered ``(atom_id, mass)`` pairs."""

    atoms: tuple

    def __post_init__(self):
        atoms = tuple((str(a), float(m)) for a, m in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValueError("a measure space needs at least one atom")
        ids = [a for a, _ in atoms]
        if len(set(ids)) != len(ids):
            raise ValueError(f"atom ids must be unique: {ids}")
        for a, m in atoms:
            if not (np.isfinite(m) and m > 0):
                raise ValueError(f"atom {a!r} has non-positive mass {m!r}")

    @classmethod
    def from_masses(cls, masses, ids=None):
        if ids is None:
            ids = [f"x{i}" for i in range(len(masses))]
        return cls(tuple(zip(ids, masses)))

    @classmethod
    def counting(cls, size, prefix="x"):
        return cls(tuple((f"{prefix}{i}", 1.0) for i in range(size)))

    def __len__(self):
        return len(self.atoms)

    @property
    def ids(self):
        return tuple(a for a, _ in self.atoms)

    @property
    def masses(self):
        return np.array([m for _, m in self.atoms])

    @property
    def total_mass(self):
        return float(np.sum(self.masses))

    def integrate(self, values):
        """Integral of per-atom values (leading axis indexes atoms)."""
        vals = np.asarray(values)
        return np.tensordot(self.masses, vals, axes=(0, 0))


@dataclass(frozen=True)
class WeightMap:
    """Per-atom weight v(x). Atoms carry positive mass, so v must be > 0."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        for i, v in enumerate(vals):
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"weight at atom {i} must be > 0, got {v!r}")

    def __len__(self):
        return len(self.values)

    @property
    def array(self):
        return np.array(self.values)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of C^n stored as an n x k matrix with orthonormal columns."""

    basis: np.ndarray

    def __post_init__(self):
        B = as_complex_matrix(self.basis)
        n, k = B.shape
        if not 1 <= k <= n:
            raise ValueError(f"need 1 <= k <= n, got basis of shape {B.shape}")
        err = np.linalg.norm(B.conj().T @ B - np.eye(k), 2)
        if err > ORTHONORMAL_TOL:
            raise ValueError(f"basis columns are not orthonormal (error {err:.2e})")
        B.flags.writeable = False
        object.__setattr__(self, "basis", B)

    @classmethod
    def span(cls, vectors, tol=DEFAULT_TOL):
        return cls(orthonormalize(vectors, tol))

    @classmethod
    def full(cls, n):
        return cls(np.eye(n))

    @classmethod
    def coordinate(cls, n, *indices):
        """Span of the standard basis vectors ``e_i`` (0-based indices)."""
        return cls(np.eye(n)[:, list(indices)])

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    @cached_property
    def projection(self):
        P = self.basis @ self.basis.conj().T
        P = (P + P.conj().T) / 2
        P.flags.writeable = False
        return P

    def contains(self, v, atol=1e-10):
        v = np.asarray(v, dtype=np.complex128)
        return np.linalg.norm(v - self.projection @ v) <= atol * max(1.0, np.linalg.norm(v))

    def same_span(self, other, atol=1e-8):
        if self.ambient_dim != other.ambient_dim or self.dim != other.dim:
            return False
        return np.linalg.norm(self.projection - other.projection, 2) <= atol

    def __repr__(self):
        return f"Subspace(n={self.ambient_dim}, k={self.dim})"


def projection(S):
    return S.projection


def image_subspace(M, S, tol=DEFAULT_TOL):
    """The subspace ``M[S]`` for an invertible square matrix ``M``."""
    A = as_complex_matrix(M)
    if A.shape != (S.ambient_dim, S.ambient_dim):
        raise DimensionMismatch(f"operator of shape {A.shape} cannot act on C^{S.ambient_dim}")
    sv = singular_values(A)
    if sv[-1] <= tol.rank_tol * sv[0]:
        raise SingularOperator(f"operator is numerically singular (cond {sv[0] / max(sv[-1], 1e-300):.2e})")
    image = Subspace.span(A @ S.basis, tol)
    if image.dim != S.dim:
        raise SingularOperator("image lost dimension under the rank cutoff")
    return image


def product_space(X, Y):
    atoms = tuple(
        (f"({a},{b})", ma * mb) for a, ma in X.atoms for b, mb in Y.atoms
    )
    return MeasureSpace(atoms)
