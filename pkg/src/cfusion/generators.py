"""Golden example builders and seeded random generators."""

from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolation
from .frame import CFusionFrame, frame_bounds
from .localglue import LocalFrameFamily
from .numerics import DEFAULT_TOL, hpd_inverse, orthonormalize, spectral_norm
from .qdual import QOperator
from .space import MeasureSpace, Subspace, WeightMap, image_subspace


def build_disk_example(mass1, mass2):
    """The unit-disk example reduced to its two level sets B1, B2.

    F = (span e1 on B1, span e2 on B2), G swaps the fibers, v = 1/sqrt(mass).
    Q exchanges the two one-dimensional coordinates; in measure-scaled
    coordinates this is the unitary swap, so T_G Q T_F^* = I for any masses.
    """
    if not mass1 > 1:
        raise ConstraintViolation(f"need mass1 > 1, got {mass1}")
    if not mass2 >= mass1:
        raise ConstraintViolation(f"need mass2 >= mass1, got {mass2} < {mass1}")
    X = MeasureSpace((("B1", mass1), ("B2", mass2)))
    v = WeightMap((1 / np.sqrt(mass1), 1 / np.sqrt(mass2)))
    e1, e2 = Subspace.coordinate(2, 0), Subspace.coordinate(2, 1)
    F = CFusionFrame(X, (e1, e2), v)
    G = CFusionFrame(X, (e2, e1), v)
    Q = QOperator(F, G, np.array([[0.0, 1.0], [1.0, 0.0]]))
    return F, G, Q


def skew_pair_example():
    """span{e1}, span{(e1+e2)/sqrt 2} in R^2, unit masses and weights; S = [[1.5,.5],[.5,.5]]."""
    fibers = (Subspace.coordinate(2, 0), Subspace(np.array([[1.0], [1.0]]) / np.sqrt(2)))
    return CFusionFrame(MeasureSpace.counting(2), fibers, WeightMap((1.0, 1.0)))


def line_two_atoms():
    """H = R^1, two unit-mass atoms, full fibers, unit weights."""
    full = Subspace.full(1)
    return CFusionFrame(MeasureSpace.counting(2), (full, full), WeightMap((1.0, 1.0)))


def degenerate_e1_pair():
    """Both fibers span{e1} in R^2: Bessel but not a frame."""
    e1 = Subspace.coordinate(2, 0)
    return CFusionFrame(MeasureSpace.counting(2), (e1, e1), WeightMap((1.0, 1.0)))


@dataclass(frozen=True)
class RandomFrameSpec:
    seed: int = 0
    ambient_dim: tuple = (2, 4)
    atoms: tuple = (1, 5)
    fiber_dim: tuple = (1, None)
    weight: tuple = (0.5, 2.0)
    mass: tuple = (0.5, 2.0)
    ensure_frame: bool = True
    frame_threshold: float = 1e-2
    complex_field: bool = True

    def __post_init__(self):
        for name in ("ambient_dim", "atoms", "weight", "mass"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"empty range for {name}: {(lo, hi)}")
        if self.ambient_dim[0] < 1 or self.atoms[0] < 1:
            raise ValueError("ambient_dim and atoms must be >= 1")
        if self.weight[0] <= 0 or self.mass[0] <= 0:
            raise ValueError("weights and masses must be positive")


def random_subspace(rng, n, k, complex_field=True):
    A = rng.standard_normal((n, k))
    if complex_field:
        A = A + 1j * rng.standard_normal((n, k))
    return Subspace(orthonormalize(A))


def generate_random_frame(spec):
    """Random c-fusion family, deterministic in ``spec.seed``.

    With ``ensure_frame`` a full-space atom is appended whenever the lower
    bound falls below ``frame_threshold``.
    """
    rng = np.random.default_rng(spec.seed)
    n = int(rng.integers(spec.ambient_dim[0], spec.ambient_dim[1] + 1))
    m = int(rng.integers(spec.atoms[0], spec.atoms[1] + 1))
    kmin = max(1, spec.fiber_dim[0])
    kmax = n if spec.fiber_dim[1] is None else min(n, spec.fiber_dim[1])
    kmin = min(kmin, kmax)
    fibers = [random_subspace(rng, n, int(rng.integers(kmin, kmax + 1)), spec.complex_field)
              for _ in range(m)]
    masses = list(rng.uniform(*spec.mass, size=m))
    weights = list(rng.uniform(*spec.weight, size=m))
    F = CFusionFrame(MeasureSpace.from_masses(masses), tuple(fibers), WeightMap(tuple(weights)))
    if spec.ensure_frame and frame_bounds(F).lower < spec.frame_threshold:
        fibers.append(Subspace.full(n))
        masses.append(float(rng.uniform(*spec.mass)))
        weights.append(float(rng.uniform(*spec.weight)))
        F = CFusionFrame(MeasureSpace.from_masses(masses), tuple(fibers), WeightMap(tuple(weights)))
    return F


def random_frame_on(rng, space, n, fiber_dims=None, complex_field=True, weight=(0.5, 2.0)):
    """Random family on a given measure space; ``fiber_dims`` default to random."""
    m = len(space)
    if fiber_dims is None:
        fiber_dims = rng.integers(1, n + 1, size=m)
    fibers = tuple(random_subspace(rng, n, int(k), complex_field) for k in fiber_dims)
    return CFusionFrame(space, fibers, WeightMap(tuple(rng.uniform(*weight, size=m))))


def random_partition(rng, n, parts):
    """``parts`` positive integers summing to n."""
    cuts = np.sort(rng.choice(np.arange(1, n), size=parts - 1, replace=False)) if parts > 1 else []
    edges = np.concatenate([[0], cuts, [n]]).astype(int)
    return np.diff(edges)


def generate_square_frame(rng, space, n, complex_field=True):
    """Random frame with sum of fiber dims equal to n, so T^* is invertible."""
    dims = random_partition(rng, n, len(space))
    return random_frame_on(rng, space, n, dims, complex_field)


def random_dual_q(rng, F, G, spread=1.0):
    """A Q with T_G Q T_F^* = I, drawn from the affine solution set.

    Every solution is Q0 + Z - P_G Z P_F with Q0 = T_G^+ (T_F^*)^+,
    P_G = T_G^+ T_G and P_F = T_F^* (T_F^*)^+.
    """
    TG, TFa = G.T, F.T.conj().T
    TG_pinv, TFa_pinv = np.linalg.pinv(TG), np.linalg.pinv(TFa)
    Q0 = TG_pinv @ TFa_pinv
    Z = spread * (rng.standard_normal(Q0.shape) + 1j * rng.standard_normal(Q0.shape))
    Qm = Q0 + Z - TG_pinv @ TG @ Z @ TFa @ TFa_pinv
    return QOperator(F, G, Qm)


def random_q(rng, F, G, scale=1.0):
    shape = (G.coord_dim, F.coord_dim)
    return QOperator(F, G, scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)))


def perturbed_frame(rng, F, delta):
    """Nearby family on the same space and the identity-shaped Q into it.

    Fibers are moved by ``I + delta E`` (||E|| = 1), weights by a relative
    factor in [1 - delta, 1 + delta]; Q has blocks B_G^* B_F.
    """
    n = F.ambient_dim
    E = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    E /= spectral_norm(E)
    M = np.eye(n) + delta * E
    fibers = tuple(image_subspace(M, S) for S in F.fibers)
    w = F.weights.array * (1 + delta * rng.uniform(-1, 1, size=len(F.space)))
    G = CFusionFrame(F.space, fibers, WeightMap(tuple(w)))
    blocks = [g.basis.conj().T @ f.basis for f, g in zip(F.fibers, fibers)]
    return G, QOperator.from_blocks(F, G, blocks)


def random_local_family(rng, base, inner_size, n, fiber_dims=None, complex_field=True):
    """Local frames with ``inner_size`` vectors per fiber (needs inner_size >= k)."""
    inner = MeasureSpace.from_masses(rng.uniform(0.5, 2.0, size=inner_size),
                                     ids=[f"y{j}" for j in range(inner_size)])
    if fiber_dims is None:
        fiber_dims = rng.integers(1, min(n, inner_size) + 1, size=len(base))
    fibers, vecs = [], []
    for k in fiber_dims:
        S = random_subspace(rng, n, int(k), complex_field)
        C = rng.standard_normal((int(k), inner_size))
        if complex_field:
            C = C + 1j * rng.standard_normal((int(k), inner_size))
        fibers.append(S)
        vecs.append((S.basis @ C).T)
    return LocalFrameFamily(base, inner, tuple(fibers), np.array(vecs))


def local_dual_family(rng, LF, v, w, spread=0.5):
    """Local families G with (v(x) F_x, w(x) G_x) a dual pair for C^n at each x.

    Requires every fiber of LF to be the whole space. Uses the general dual
    synthesis Psi = S^{-1} Phi + Z (I - Phi^* S^{-1} Phi).
    """
    vv = np.asarray(v.values if isinstance(v, WeightMap) else v)
    ww = np.asarray(w.values if isinstance(w, WeightMap) else w)
    n = LF.ambient_dim
    sq = np.sqrt(LF.inner.masses)
    vecs = []
    for i in range(len(LF.base)):
        Phi = vv[i] * LF.local_synthesis(i)
        S = Phi @ Phi.conj().T
        Sinv = hpd_inverse(S, DEFAULT_TOL)
        P = Phi.conj().T @ Sinv @ Phi
        Z = spread * (rng.standard_normal(Phi.shape) + 1j * rng.standard_normal(Phi.shape))
        Psi = Sinv @ Phi + Z @ (np.eye(P.shape[0]) - P)
        vecs.append((Psi / (ww[i] * sq[None, :])).T)
    fibers = tuple(Subspace.full(n) for _ in range(len(LF.base)))
    return LocalFrameFamily(LF.base, LF.inner, fibers, np.array(vecs))
