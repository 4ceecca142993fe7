"""Synthesis pseudoinverse and the perturbation test for c-fusion frames."""

from dataclasses import dataclass

import numpy as np

from .errors import NotAFrame
from .frame import frame_bounds, frame_operator
from .numerics import DEFAULT_TOL, hpd_inverse, spectral_norm
from .qdual import check_q

PROBE_SLACK = 1e-10
BOUND_SLACK = 1e-10


def pseudoinverse_matrix(F, tol=DEFAULT_TOL):
    """T^dagger = T^* S^{-1}, the right inverse of the synthesis matrix."""
    bounds = frame_bounds(F, tol)
    if not bounds.is_frame:
        raise NotAFrame(f"lower frame bound {bounds.lower:.3e} <= psd_tol")
    return F.T.conj().T @ hpd_inverse(frame_operator(F), tol)


@dataclass(frozen=True)
class PerturbationParams:
    lam: float = 0.0
    eps: float = 0.0

    def __post_init__(self):
        if not (self.lam >= 0 and self.eps >= 0):
            raise ValueError(f"lam and eps must be nonnegative, got {self.lam}, {self.eps}")


@dataclass
class PerturbationReport:
    hypothesis_margin: float
    probe_violations: int
    trials: int
    seed: int
    max_probe_excess: float
    defect_norm: float
    q_norm: float
    ratio: float
    pinv_norm: float
    guaranteed_lower: float
    actual_lower: float
    actual_upper: float
    concluded: bool
    reason: str
    g_bessel_bound: float | None = None

    @property
    def sound(self):
        return (not self.concluded) or self.actual_lower >= self.guaranteed_lower - 1e-8


def perturbation_check(F, G, Q, params, trials=1000, seed=0, tol=DEFAULT_TOL,
                       g_bessel_bound=None):
    """Test whether (G, w) inherits the frame property from (F, v).

    The hypothesis ``||(T_F - T_G Q) c|| <= lam ||T_F c|| + eps ||c||`` for all
    c is sampled on ``trials`` seeded random unit vectors. The conclusion
    additionally requires ``||I - T_G Q T_F^dagger|| <= lam + eps sqrt(B/A) < 1``,
    and from it the lower bound ``((1 - d) / (||T_F^dagger|| ||Q||))^2`` follows,
    with ``d = ||I - T_G Q T_F^dagger||``.

    ``||T_F^dagger||`` is exactly ``1 / sqrt(A)``. It is at most ``sqrt(B/A)``
    only when ``B >= 1``, so the ratio is not used in place of it.

    ``g_bessel_bound`` is an optional a-priori Bessel bound for G; if given it
    is checked against the actual upper bound.
    """
    check_q(F, G, Q)
    fb = frame_bounds(F, tol)
    if not fb.is_frame:
        raise NotAFrame(f"F has lower frame bound {fb.lower:.3e}")
    ratio = fb.ratio
    margin = 1.0 - (params.lam + params.eps * ratio)

    TF, TG, q = F.T, G.T, Q.matrix
    D = TF - TG @ q
    rng = np.random.default_rng(seed)
    K = F.coord_dim
    C = rng.standard_normal((trials, K)) + 1j * rng.standard_normal((trials, K))
    C /= np.linalg.norm(C, axis=1, keepdims=True)
    lhs = np.linalg.norm(C @ D.T, axis=1)
    rhs = params.lam * np.linalg.norm(C @ TF.T, axis=1) + params.eps
    excess = lhs - rhs
    violations = int(np.sum(excess > PROBE_SLACK))

    n = F.ambient_dim
    Tdag = pseudoinverse_matrix(F, tol)
    defect = spectral_norm(np.eye(n) - TG @ q @ Tdag)
    pinv_norm = spectral_norm(Tdag)
    q_norm = spectral_norm(q)
    if defect < 1 and q_norm > 0:
        guaranteed = ((1.0 - defect) / (pinv_norm * q_norm)) ** 2
    else:
        guaranteed = 0.0
    gb = frame_bounds(G, tol)

    if margin <= 0:
        concluded, reason = False, "hypothesis_violated"
    elif violations:
        concluded, reason = False, "probe_violations"
    elif defect > params.lam + params.eps * ratio + BOUND_SLACK:
        concluded, reason = False, "defect_exceeds_hypothesis"
    elif g_bessel_bound is not None and gb.upper > g_bessel_bound * (1 + BOUND_SLACK):
        concluded, reason = False, "g_bessel_bound_exceeded"
    else:
        concluded, reason = True, "ok"

    return PerturbationReport(
        hypothesis_margin=margin,
        probe_violations=violations,
        trials=trials,
        seed=seed,
        max_probe_excess=float(np.max(excess)) if trials else float("-inf"),
        defect_norm=defect,
        q_norm=q_norm,
        ratio=ratio,
        pinv_norm=pinv_norm,
        guaranteed_lower=guaranteed,
        actual_lower=gb.lower,
        actual_upper=gb.upper,
        concluded=concluded,
        reason=reason,
        g_bessel_bound=g_bessel_bound,
    )


def sufficient_eps(F, G, Q):
    """Smallest eps that makes the hypothesis hold for every c when lam = 0."""
    check_q(F, G, Q)
    return spectral_norm(F.T - G.T @ Q.matrix)

