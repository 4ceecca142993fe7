"""Continuous fusion frames over finite atomic measure spaces.

A family ``(F, v)`` assigns to every atom ``x_i`` (mass ``mu_i``) a subspace
``F(x_i)`` with orthonormal basis ``B_i`` (n x k_i) and a weight ``v_i > 0``.
Elements of the fiber space L^2(X, F) are stored in measure-scaled
coordinates ``c_i = sqrt(mu_i) B_i^* f(x_i)``, stacked over atoms, so that the
Euclidean norm of ``c`` is the L^2 norm of ``f``. In these coordinates the
synthesis operator is the n x K matrix with blocks ``sqrt(mu_i) v_i B_i``.
"""

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, NotAFrame, ZeroVector
from .numerics import DEFAULT_TOL, hermitian_extremes, solve_hpd
from .space import MeasureSpace, Subspace, WeightMap

PARSEVAL_TOL = 1e-8


class Classification(str, Enum):
    FRAME = "frame"
    BESSEL_ONLY = "bessel_only"
    # Every finite family is Bessel and has nonzero fibers, so the two
    # members below are never produced; they are kept for schema completeness.
    NOT_BESSEL = "not_bessel_never_occurs_finite"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float
    classification: Classification

    @property
    def is_frame(self):
        return self.classification is Classification.FRAME

    @property
    def is_tight(self):
        return self.is_frame and abs(self.upper - self.lower) <= PARSEVAL_TOL * max(1.0, self.upper)

    @property
    def is_parseval(self):
        return abs(self.lower - 1) <= PARSEVAL_TOL and abs(self.upper - 1) <= PARSEVAL_TOL

    @property
    def ratio(self):
        """sqrt(B/A); bounds the norm of the synthesis pseudoinverse."""
        return float(np.sqrt(self.upper / self.lower))


@dataclass(frozen=True, eq=False)
class CFusionFrame:
    space: MeasureSpace
    fibers: tuple
    weights: WeightMap

    def __post_init__(self):
        fibers = tuple(self.fibers)
        object.__setattr__(self, "fibers", fibers)
        if not isinstance(self.weights, WeightMap):
            object.__setattr__(self, "weights", WeightMap(tuple(self.weights)))
        if len(fibers) != len(self.space):
            raise DimensionMismatch(f"{len(fibers)} fibers for {len(self.space)} atoms")
        if len(self.weights) != len(self.space):
            raise DimensionMismatch(f"{len(self.weights)} weights for {len(self.space)} atoms")
        if len({S.ambient_dim for S in fibers}) != 1:
            raise DimensionMismatch("fibers do not share an ambient dimension")

    @property
    def ambient_dim(self):
        return self.fibers[0].ambient_dim

    @property
    def fiber_dims(self):
        return tuple(S.dim for S in self.fibers)

    @property
    def coord_dim(self):
        return sum(self.fiber_dims)

    @property
    def offsets(self):
        return np.concatenate([[0], np.cumsum(self.fiber_dims)]).astype(int)

    def block(self, i):
        o = self.offsets
        return slice(o[i], o[i + 1])

    @cached_property
    def T(self):
        return synthesis_matrix(self)

    @cached_property
    def S(self):
        return frame_operator(self)

    @cached_property
    def bounds(self):
        return frame_bounds(self)

    def with_weights(self, weights):
        return CFusionFrame(self.space, self.fibers, WeightMap(tuple(weights)))

    def __repr__(self):
        return (f"CFusionFrame(n={self.ambient_dim}, atoms={len(self.space)}, "
                f"fiber_dims={self.fiber_dims})")


def synthesis_matrix(F):
    mu = F.space.masses
    v = F.weights.array
    blocks = [np.sqrt(mu[i]) * v[i] * S.basis for i, S in enumerate(F.fibers)]
    return np.hstack(blocks)


def analysis_matrix(F):
    return synthesis_matrix(F).conj().T


def frame_operator(F):
    """S = sum_i mu_i v_i^2 pi_i, summed directly from the projections."""
    n = F.ambient_dim
    S = np.zeros((n, n), dtype=np.complex128)
    for m, w, fiber in zip(F.space.masses, F.weights.values, F.fibers):
        S += m * w * w * fiber.projection
    return (S + S.conj().T) / 2


def frame_bounds(F, tol=DEFAULT_TOL):
    lo, hi = hermitian_extremes(frame_operator(F))
    cls = Classification.FRAME if lo > tol.psd_tol else Classification.BESSEL_ONLY
    return FrameBounds(max(lo, 0.0), hi, cls)


def energy(F, h):
    """The integral of v^2 ||pi_F(x) h||^2 over X."""
    h = np.asarray(h, dtype=np.complex128)
    return float(sum(
        m * w * w * np.linalg.norm(S.basis.conj().T @ h) ** 2
        for m, w, S in zip(F.space.masses, F.weights.values, F.fibers)
    ))


def reconstruct(F, h, tol=DEFAULT_TOL):
    h = np.asarray(h, dtype=np.complex128)
    S = frame_operator(F)
    lo, _ = hermitian_extremes(S)
    if lo <= tol.psd_tol:
        raise NotAFrame(f"lower frame bound {lo:.3e} <= psd_tol")
    acc = np.zeros_like(h)
    for m, w, fiber in zip(F.space.masses, F.weights.values, F.fibers):
        acc += m * w * w * (fiber.projection @ h)
    return solve_hpd(S, acc, tol)


def to_coords(F, values):
    """Fiber-space coordinates of a field given by per-atom ambient vectors."""
    mu = F.space.masses
    return np.concatenate([
        np.sqrt(mu[i]) * (S.basis.conj().T @ np.asarray(values[i], dtype=np.complex128))
        for i, S in enumerate(F.fibers)
    ])


def from_coords(F, c):
    """Per-atom ambient vectors f(x_i) of the field with coordinates ``c``."""
    c = np.asarray(c, dtype=np.complex128)
    mu = F.space.masses
    return [S.basis @ c[F.block(i)] / np.sqrt(mu[i]) for i, S in enumerate(F.fibers)]


def from_discrete_frame(vectors, tol=DEFAULT_TOL):
    """Embed a discrete frame {h_i}: fibers span{h_i}, v_i = ||h_i||, unit masses."""
    vecs = [np.asarray(h, dtype=np.complex128).ravel() for h in vectors]
    norms = [np.linalg.norm(h) for h in vecs]
    for i, nrm in enumerate(norms):
        if nrm == 0.0:
            raise ZeroVector(f"vector {i} is zero")
    fibers = tuple(Subspace(h.reshape(-1, 1) / nrm) for h, nrm in zip(vecs, norms))
    return CFusionFrame(MeasureSpace.counting(len(vecs)), fibers, WeightMap(tuple(norms)))


def from_fusion_frame(subspaces, weights):
    subspaces = tuple(subspaces)
    weights = tuple(weights)
    if len(subspaces) != len(weights):
        raise DimensionMismatch(f"{len(subspaces)} subspaces but {len(weights)} weights")
    return CFusionFrame(MeasureSpace.counting(len(subspaces)), subspaces, WeightMap(weights))


def from_continuous_frame(space, vectors):
    """Embed a continuous frame x -> F(x) over a finite measure space."""
    vecs = [np.asarray(h, dtype=np.complex128).ravel() for h in vectors]
    if len(vecs) != len(space):
        raise DimensionMismatch(f"{len(vecs)} vectors for {len(space)} atoms")
    norms = [np.linalg.norm(h) for h in vecs]
    for i, nrm in enumerate(norms):
        if nrm == 0.0:
            raise ZeroVector(f"vector at atom {i} is zero")
    fibers = tuple(Subspace(h.reshape(-1, 1) / nrm) for h, nrm in zip(vecs, norms))
    return CFusionFrame(space, fibers, WeightMap(tuple(norms)))
