"""Gluing per-fiber continuous frames into global ones, and Q from local duals.

A :class:`LocalFrameFamily` attaches to every atom ``x`` of a base space X a
continuous frame ``y -> F_x(y)`` for the fiber ``F(x)``, indexed by a shared
inner space Y. Vectors are kept in ambient coordinates.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, FiberViolation, NotAFrame, ShapeMismatch
from .frame import CFusionFrame, Classification, FrameBounds, frame_bounds
from .numerics import DEFAULT_TOL, hermitian_extremes, spectral_norm
from .qdual import QOperator
from .space import MeasureSpace, Subspace, WeightMap, product_space

FIBER_TOL = 1e-10
SANDWICH_SLACK = 1e-8


@dataclass(frozen=True, eq=False)
class ContinuousFrame:
    """x -> phi(x) in C^n over a finite measure space."""

    space: MeasureSpace
    vectors: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.vectors, dtype=np.complex128)
        if V.ndim != 2 or V.shape[0] != len(self.space):
            raise DimensionMismatch(f"expected {len(self.space)} vectors, got array {V.shape}")
        V.flags.writeable = False
        object.__setattr__(self, "vectors", V)

    @property
    def ambient_dim(self):
        return self.vectors.shape[1]

    def synthesis_matrix(self):
        return (np.sqrt(self.space.masses)[:, None] * self.vectors).T

    def frame_operator(self):
        T = self.synthesis_matrix()
        S = T @ T.conj().T
        return (S + S.conj().T) / 2

    def bounds(self, tol=DEFAULT_TOL):
        lo, hi = hermitian_extremes(self.frame_operator())
        cls = Classification.FRAME if lo > tol.psd_tol else Classification.BESSEL_ONLY
        return FrameBounds(max(lo, 0.0), hi, cls)


@dataclass(frozen=True, eq=False)
class LocalFrameFamily:
    """Per-atom local frames: ``vectors[i, j]`` is F_{x_i}(y_j), lying in ``fibers[i]``."""

    base: MeasureSpace
    inner: MeasureSpace
    fibers: tuple
    vectors: np.ndarray

    def __post_init__(self):
        fibers = tuple(self.fibers)
        object.__setattr__(self, "fibers", fibers)
        V = np.asarray(self.vectors, dtype=np.complex128)
        if len(fibers) != len(self.base):
            raise DimensionMismatch(f"{len(fibers)} fibers for {len(self.base)} base atoms")
        n = fibers[0].ambient_dim
        if V.shape != (len(self.base), len(self.inner), n):
            raise DimensionMismatch(
                f"vectors have shape {V.shape}, expected {(len(self.base), len(self.inner), n)}")
        for i, fiber in enumerate(fibers):
            if fiber.ambient_dim != n:
                raise DimensionMismatch("fibers do not share an ambient dimension")
            for j in range(len(self.inner)):
                if not fiber.contains(V[i, j], FIBER_TOL):
                    raise FiberViolation(f"local vector ({i}, {j}) leaves its fiber")
        V.flags.writeable = False
        object.__setattr__(self, "vectors", V)
        lo = min(b[0] for b in self.local_bounds)
        if lo <= DEFAULT_TOL.psd_tol:
            raise NotAFrame(f"a local family is not a frame for its fiber (A_x = {lo:.3e})")

    @classmethod
    def from_vectors(cls, base, inner, vectors, tol=DEFAULT_TOL):
        """Take each fiber to be the span of its local vectors."""
        V = np.asarray(vectors, dtype=np.complex128)
        fibers = tuple(Subspace.span(V[i].T, tol) for i in range(V.shape[0]))
        return cls(base, inner, fibers, V)

    @property
    def ambient_dim(self):
        return self.fibers[0].ambient_dim

    def local_synthesis(self, i):
        """n x |Y| synthesis matrix of the local frame at atom i."""
        return (np.sqrt(self.inner.masses)[:, None] * self.vectors[i]).T

    @cached_property
    def local_bounds(self):
        """Optimal bounds of each local frame, as a frame for its own fiber."""
        out = []
        for i, fiber in enumerate(self.fibers):
            C = fiber.basis.conj().T @ self.local_synthesis(i)
            out.append(hermitian_extremes(C @ C.conj().T))
        return tuple(out)

    @property
    def inf_lower(self):
        return min(a for a, _ in self.local_bounds)

    @property
    def sup_upper(self):
        return max(b for _, b in self.local_bounds)

    def cfusion(self, v):
        return CFusionFrame(self.base, self.fibers, _weights(v))

    def scaled(self, factor):
        return LocalFrameFamily(self.base, self.inner, self.fibers, self.vectors * factor)


def _weights(v):
    return v if isinstance(v, WeightMap) else WeightMap(tuple(v))


def glue(L, v):
    """The continuous frame (x, y) -> v(x) F_x(y) over X x Y."""
    w = _weights(v)
    if len(w) != len(L.base):
        raise DimensionMismatch(f"{len(w)} weights for {len(L.base)} base atoms")
    space = product_space(L.base, L.inner)
    vecs = (w.array[:, None, None] * L.vectors).reshape(-1, L.ambient_dim)
    return ContinuousFrame(space, vecs)


@dataclass
class GlueReport:
    local_lower: float
    local_upper: float
    cfusion_bounds: FrameBounds
    glued_bounds: FrameBounds
    sandwich_lower: float
    sandwich_upper: float
    holds: bool


def sandwich(L, v, tol=DEFAULT_TOL):
    """Compare the glued bounds with A A_{F,v} and B B_{F,v}."""
    cf = frame_bounds(L.cfusion(v), tol)
    gb = glue(L, v).bounds(tol)
    A, B = L.inf_lower, L.sup_upper
    lo, hi = A * cf.lower, B * cf.upper
    holds = (lo <= gb.lower + SANDWICH_SLACK * max(1.0, lo)
             and gb.upper <= hi + SANDWICH_SLACK * max(1.0, hi))
    return GlueReport(A, B, cf, gb, lo, hi, holds)


@dataclass
class EquivalenceProbe:
    cfusion_is_frame: bool
    glued_is_frame: bool

    @property
    def agree(self):
        return self.cfusion_is_frame == self.glued_is_frame


def equivalence_probe(L, v, tol=DEFAULT_TOL):
    return EquivalenceProbe(
        frame_bounds(L.cfusion(v), tol).is_frame,
        glue(L, v).bounds(tol).is_frame,
    )


def _check_local_pair(LF, LG):
    if LF.base != LG.base or LF.inner != LG.inner:
        raise ShapeMismatch("local families must share base and inner spaces")
    if LF.ambient_dim != LG.ambient_dim:
        raise ShapeMismatch("local families live in different ambient spaces")


def local_operator(LF, LG, i):
    """T_{G_x} T_{F_x}^* at atom i, as an n x n matrix."""
    return LG.local_synthesis(i) @ LF.local_synthesis(i).conj().T


def q_from_local_duals(LF, LG, v, w):
    """Block-diagonal Q whose block at x is T_{G_x} T_{F_x}^* in fiber coordinates."""
    _check_local_pair(LF, LG)
    F, G = LF.cfusion(v), LG.cfusion(w)
    blocks = [
        G.fibers[i].basis.conj().T @ local_operator(LF, LG, i) @ F.fibers[i].basis
        for i in range(len(LF.base))
    ]
    return QOperator.from_blocks(F, G, blocks)


def local_norm_bound(LF, LG):
    """sqrt(B_F B_G) from the suprema of the local upper bounds."""
    return float(np.sqrt(LF.sup_upper * LG.sup_upper))


def local_dual_residuals(LF, LG, v, w):
    """Per-atom ||v(x) w(x) T_{G_x} T_{F_x}^* - I|| on the whole space.

    Zero at atom x means (v(x) F_x, w(x) G_x) is a dual pair for C^n. This is
    reported next to the global check because for several atoms the global
    identity T_G Q T_F^* = I integrates the local operators over X instead.
    """
    _check_local_pair(LF, LG)
    vv, ww = _weights(v).array, _weights(w).array
    eye = np.eye(LF.ambient_dim)
    return [
        spectral_norm(vv[i] * ww[i] * local_operator(LF, LG, i) - eye)
        for i in range(len(LF.base))
    ]
