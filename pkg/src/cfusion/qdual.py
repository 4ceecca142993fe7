"""Q-duality between two c-fusion frames over a shared measure space.

``(G, w)`` is a Q-dual of ``(F, v)`` when ``T_G Q T_F^* = I``, where Q maps
the fiber space of F into the fiber space of G. Q is stored as a
``K_G x K_F`` matrix in measure-scaled fiber coordinates, so its spectral
norm is the operator norm on L^2.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NotAFrame, NotADual, ShapeMismatch
from .frame import CFusionFrame, frame_bounds, frame_operator
from .numerics import (
    DEFAULT_TOL,
    hermitian_extremes,
    hpd_inverse,
    is_injective,
    is_surjective,
    spectral_norm,
)
from .space import image_subspace

PROBE_SLACK = 1e-8
FLOOR_SLACK = 1e-10


@dataclass(frozen=True, eq=False)
class QOperator:
    domain: CFusionFrame
    codomain: CFusionFrame
    matrix: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=np.complex128)
        expected = (self.codomain.coord_dim, self.domain.coord_dim)
        if M.shape != expected:
            raise ShapeMismatch(f"Q has shape {M.shape}, expected {expected}")
        if not np.all(np.isfinite(M)):
            raise ValueError("Q has non-finite entries")
        M.flags.writeable = False
        object.__setattr__(self, "matrix", M)

    @classmethod
    def from_blocks(cls, F, G, blocks):
        """Block-diagonal Q: one ``k_G(x) x k_F(x)`` block per atom."""
        check_pair(F, G)
        M = np.zeros((G.coord_dim, F.coord_dim), dtype=np.complex128)
        for i, b in enumerate(blocks):
            b = np.asarray(b, dtype=np.complex128)
            if b.shape != (G.fiber_dims[i], F.fiber_dims[i]):
                raise ShapeMismatch(
                    f"block {i} has shape {b.shape}, expected {(G.fiber_dims[i], F.fiber_dims[i])}")
            M[G.block(i), F.block(i)] = b
        return cls(F, G, M)

    @property
    def norm(self):
        return spectral_norm(self.matrix)

    @property
    def adjoint(self):
        return QOperator(self.codomain, self.domain, self.matrix.conj().T)

    def blocks(self):
        """Diagonal blocks, or None if Q has mass off the block diagonal."""
        F, G = self.domain, self.codomain
        if len(F.space) != len(G.space):
            return None
        mask = np.zeros(self.matrix.shape, dtype=bool)
        for i in range(len(F.space)):
            mask[G.block(i), F.block(i)] = True
        if np.any(self.matrix[~mask] != 0):
            return None
        return [self.matrix[G.block(i), F.block(i)] for i in range(len(F.space))]


@dataclass
class DualityReport:
    residual: float
    adjoint_residual: float
    is_dual: bool
    q_norm: float
    norm_floor: float
    conditions: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def all_conditions(self):
        return all(self.conditions.values())

    @property
    def no_conditions(self):
        return not any(self.conditions.values())


@dataclass
class QSolution:
    particular: QOperator | None
    nullspace_dim: int
    residual: float
    rank: int

    @property
    def consistent(self):
        return self.particular is not None

    @property
    def unique(self):
        return self.nullspace_dim == 0


def check_pair(F, G):
    if F.ambient_dim != G.ambient_dim:
        raise ShapeMismatch(f"ambient dimensions differ: {F.ambient_dim} vs {G.ambient_dim}")
    if F.space != G.space:
        raise ShapeMismatch("F and G must live on the same measure space")


def check_q(F, G, Q):
    check_pair(F, G)
    if Q.matrix.shape != (G.coord_dim, F.coord_dim):
        raise ShapeMismatch(f"Q has shape {Q.matrix.shape}, expected {(G.coord_dim, F.coord_dim)}")


def _idempotency_defect(left, right):
    """||P^2 - P|| for P = left @ right, with the natural scale ||left|| ||right||."""
    P = left @ right
    defect = spectral_norm(P @ P - P)
    scale = max(1.0, spectral_norm(left) * spectral_norm(right))
    return defect, scale


def _probe_pairs(n, count, seed):
    rng = np.random.default_rng(seed)
    H = rng.standard_normal((count, 2, n)) + 1j * rng.standard_normal((count, 2, n))
    return H / np.linalg.norm(H, axis=2, keepdims=True)


def verify_duality(F, G, Q, tol=DEFAULT_TOL, probes=50, seed=0):
    """Residual of ``T_G Q T_F^* = I`` plus the five equivalent conditions.

    Conditions:
      1. T_G Q T_F^* = I
      2. T_F Q^* T_G^* = I
      3. T_F^* injective, T_G Q surjective, (T_F^* T_G Q)^2 = T_F^* T_G Q
      4. the same with the roles of (F, Q) and (G, Q^*) exchanged
      5. <h, k> = <Q T_F^* h, T_G^* k> = <Q^* T_G^* h, T_F^* k> on random probes
    """
    check_q(F, G, Q)
    n = F.ambient_dim
    TF, TG, q = F.T, G.T, Q.matrix
    TFa, TGa, qa = TF.conj().T, TG.conj().T, q.conj().T
    eye = np.eye(n)

    residual = spectral_norm(TG @ q @ TFa - eye)
    adjoint_residual = spectral_norm(TF @ qa @ TGa - eye)
    c1 = bool(residual <= tol.residual_tol)
    c2 = bool(adjoint_residual <= tol.residual_tol)

    inj_f = is_injective(TFa, tol)
    surj_gq = is_surjective(TG @ q, tol)
    defect3, scale3 = _idempotency_defect(TFa, TG @ q)
    c3 = bool(inj_f and surj_gq and defect3 <= tol.residual_tol * scale3)

    inj_g = is_injective(TGa, tol)
    surj_fq = is_surjective(TF @ qa, tol)
    defect4, scale4 = _idempotency_defect(TGa, TF @ qa)
    c4 = bool(inj_g and surj_fq and defect4 <= tol.residual_tol * scale4)

    worst = 0.0
    for h, k in _probe_pairs(n, probes, seed):
        ref = np.vdot(k, h)
        lhs1 = np.vdot(TGa @ k, q @ (TFa @ h))
        lhs2 = np.vdot(TFa @ k, qa @ (TGa @ h))
        worst = max(worst, abs(lhs1 - ref), abs(lhs2 - ref))
    c5 = bool(worst <= PROBE_SLACK)

    bf = frame_bounds(F, tol).upper
    bg = frame_bounds(G, tol).upper
    q_norm = spectral_norm(q)
    return DualityReport(
        residual=residual,
        adjoint_residual=adjoint_residual,
        is_dual=c1,
        q_norm=q_norm,
        norm_floor=1.0 / (n * np.sqrt(bf * bg)),
        conditions={"1": c1, "2": c2, "3": c3, "4": c4, "5": c5},
        details={
            "analysis_F_injective": inj_f,
            "synthesis_GQ_surjective": surj_gq,
            "idempotency_defect_3": defect3,
            "idempotency_scale_3": scale3,
            "analysis_G_injective": inj_g,
            "synthesis_FQadj_surjective": surj_fq,
            "idempotency_defect_4": defect4,
            "idempotency_scale_4": scale4,
            "probe_max_error": worst,
            "probe_count": probes,
            "probe_seed": seed,
        },
    )


def canonical_qdual(F, tol=DEFAULT_TOL):
    """The canonical Q-dual built from the inverse frame operator.

    G has fibers ``S^{-1}[F(x)]`` and the same weights; Q is block diagonal
    with blocks ``B_G(x)^* S^{-1} B_F(x)``. Then T_G Q T_F^* equals
    ``sum mu v^2 S^{-1} pi_F(x) = S^{-1} S = I``.
    """
    S = frame_operator(F)
    lo, _ = hermitian_extremes(S)
    if lo <= tol.psd_tol:
        raise NotAFrame(f"lower frame bound {lo:.3e} <= psd_tol")
    Sinv = hpd_inverse(S, tol)
    fibers = tuple(image_subspace(Sinv, fiber, tol) for fiber in F.fibers)
    G = CFusionFrame(F.space, fibers, F.weights)
    blocks = [g.basis.conj().T @ Sinv @ f.basis for f, g in zip(F.fibers, fibers)]
    return G, QOperator.from_blocks(F, G, blocks)


def constraint_matrix(F, G):
    """The linear map vec(Q) -> vec(T_G Q T_F^*), column-major vec.

    vec(A X B) = (B^T kron A) vec(X) with A = T_G and B = T_F^*.
    """
    return np.kron(F.T.conj(), G.T)


def solve_q(F, G, tol=DEFAULT_TOL):
    """Minimum-Frobenius-norm Q with ``T_G Q T_F^* = I``, if one exists."""
    check_pair(F, G)
    n = F.ambient_dim
    C = constraint_matrix(F, G)
    rhs = np.eye(n).reshape(-1, order="F").astype(np.complex128)
    x, _, rank, _ = np.linalg.lstsq(C, rhs, rcond=tol.rank_tol)
    Qm = x.reshape((G.coord_dim, F.coord_dim), order="F")
    residual = spectral_norm(G.T @ Qm @ F.T.conj().T - np.eye(n))
    nullspace_dim = C.shape[1] - int(rank)
    particular = QOperator(F, G, Qm) if residual <= tol.residual_tol else None
    return QSolution(particular, nullspace_dim, residual, int(rank))


def uniqueness_hypothesis(F, G, tol=DEFAULT_TOL):
    """True when both analysis operators map onto their fiber spaces."""
    if F.ambient_dim != G.ambient_dim:
        raise ShapeMismatch(f"ambient dimensions differ: {F.ambient_dim} vs {G.ambient_dim}")
    return is_surjective(F.T.conj().T, tol) and is_surjective(G.T.conj().T, tol)


@dataclass
class DimensionCheck:
    lower_first: float
    mid_first: float
    upper_first: float
    lower_second: float
    mid_second: float
    upper_second: float
    holds_first: bool
    holds_second: bool


def _le(a, b, slack):
    return a <= b + slack * max(1.0, abs(a), abs(b))


def dimension_check(F, tol=DEFAULT_TOL, slack=1e-8):
    """A n <= int v^2 dim F dmu <= B n  and  A <= int v^2 dmu <= B n."""
    bounds = frame_bounds(F, tol)
    n = F.ambient_dim
    mu = F.space.masses
    v2 = F.weights.array ** 2
    mid1 = float(np.sum(mu * v2 * np.array(F.fiber_dims)))
    mid2 = float(np.sum(mu * v2))
    A, B = bounds.lower, bounds.upper
    return DimensionCheck(
        lower_first=A * n, mid_first=mid1, upper_first=B * n,
        lower_second=A, mid_second=mid2, upper_second=B * n,
        holds_first=_le(A * n, mid1, slack) and _le(mid1, B * n, slack),
        holds_second=_le(A, mid2, slack) and _le(mid2, B * n, slack),
    )


@dataclass
class NormFloor:
    q_norm: float
    floor: float
    holds: bool


def q_norm_floor(F, G, Q, tol=DEFAULT_TOL):
    """Check ``||Q|| >= 1 / (n sqrt(B_F B_G))`` for a verified Q-dual pair."""
    report = verify_duality(F, G, Q, tol)
    if not report.is_dual:
        raise NotADual(f"residual {report.residual:.3e} exceeds residual_tol")
    return NormFloor(report.q_norm, report.norm_floor,
                     report.q_norm >= report.norm_floor - FLOOR_SLACK)


def characterization_lower_bound(G, Q, tol=DEFAULT_TOL):
    """Lower frame bound for F certified by any Q-dual (G, Q): 1 / (B_G ||Q||^2)."""
    bg = frame_bounds(G, tol).upper
    qn = Q.norm
    return 1.0 / (bg * qn * qn)
