import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfusion.errors import NotAFrame, ZeroVector, DimensionMismatch
from cfusion.frame import (
    CFusionFrame,
    Classification,
    analysis_matrix,
    energy,
    frame_bounds,
    frame_operator,
    from_continuous_frame,
    from_coords,
    from_discrete_frame,
    from_fusion_frame,
    reconstruct,
    synthesis_matrix,
    to_coords,
)
from cfusion.generators import (
    RandomFrameSpec,
    build_disk_example,
    degenerate_e1_pair,
    generate_random_frame,
    skew_pair_example,
)
from cfusion.space import MeasureSpace, Subspace, WeightMap

DISK = (1.5, np.pi - 1.5)
SMALL = RandomFrameSpec(ambient_dim=(1, 10), atoms=(1, 8), ensure_frame=False)


def single_atom(mass, v, n=2, fiber=None):
    fiber = Subspace.full(n) if fiber is None else fiber
    return CFusionFrame(MeasureSpace((("x", mass),)), (fiber,), WeightMap((v,)))


def test_synthesis_examples():
    np.testing.assert_allclose(synthesis_matrix(single_atom(1.0, 1.0)), np.eye(2))
    T = synthesis_matrix(single_atom(4.0, 1.0, fiber=Subspace.coordinate(2, 0)))
    np.testing.assert_allclose(T, [[2.0], [0.0]])
    F, _, _ = build_disk_example(*DISK)
    np.testing.assert_allclose(synthesis_matrix(F), np.eye(2), atol=1e-15)


def test_frame_operator_examples():
    F, _, _ = build_disk_example(*DISK)
    np.testing.assert_allclose(frame_operator(F), np.eye(2), atol=1e-15)
    # pi_1 + pi_2 = [[1,0],[0,0]] + [[.5,.5],[.5,.5]]
    np.testing.assert_allclose(frame_operator(skew_pair_example()),
                               [[1.5, 0.5], [0.5, 0.5]], atol=1e-15)
    np.testing.assert_allclose(frame_operator(single_atom(3.0, 0.5)), 3.0 * 0.25 * np.eye(2))


def test_frame_bounds_examples():
    F, _, _ = build_disk_example(*DISK)
    b = frame_bounds(F)
    assert b.is_parseval and b.is_tight and b.is_frame
    b = frame_bounds(skew_pair_example())
    assert (b.lower, b.upper) == pytest.approx((1 - np.sqrt(2) / 2, 1 + np.sqrt(2) / 2), abs=1e-14)
    b = frame_bounds(degenerate_e1_pair())
    assert b.lower == 0.0 and b.upper == pytest.approx(2.0)
    assert b.classification is Classification.BESSEL_ONLY


def test_reconstruct_examples():
    F, _, _ = build_disk_example(*DISK)
    np.testing.assert_allclose(reconstruct(F, [0.7, -1.3]), [0.7, -1.3], atol=1e-14)
    np.testing.assert_allclose(reconstruct(skew_pair_example(), [1.0, 0.0]), [1.0, 0.0],
                               atol=1e-14)
    with pytest.raises(NotAFrame):
        reconstruct(degenerate_e1_pair(), [1.0, 0.0])


def test_from_discrete_frame():
    F = from_discrete_frame([[1, 0], [0, 1]])
    assert frame_bounds(F).is_parseval
    F = from_discrete_frame([[1, 0], [1, 0], [0, 1]])
    np.testing.assert_allclose(frame_operator(F), np.diag([2.0, 1.0]), atol=1e-15)
    b = frame_bounds(F)
    assert (b.lower, b.upper) == pytest.approx((1.0, 2.0))
    b = frame_bounds(from_discrete_frame([[1, 1]]))
    assert b.lower == pytest.approx(0.0, abs=1e-15) and b.upper == pytest.approx(2.0)
    assert not b.is_frame
    with pytest.raises(ZeroVector):
        from_discrete_frame([[1, 0], [0, 0]])


@settings(max_examples=200)
@given(seed=st.integers(0, 2**32 - 1))
def test_discrete_frame_operator(seed):
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(1, 6)), int(rng.integers(1, 8))
    H = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    S = sum(np.outer(h, h.conj()) for h in H)
    assert np.linalg.norm(frame_operator(from_discrete_frame(H)) - S) <= 1e-10 * max(1, np.linalg.norm(S))


def test_from_fusion_frame():
    e1, e2 = Subspace.coordinate(2, 0), Subspace.coordinate(2, 1)
    assert frame_bounds(from_fusion_frame([e1, e2], [1, 1])).is_parseval
    b = frame_bounds(from_fusion_frame([e1, e1], [1, 1]))
    assert (b.lower, b.upper) == pytest.approx((0.0, 2.0), abs=1e-15)
    b = frame_bounds(from_fusion_frame([Subspace.full(2)], [3.0]))
    assert (b.lower, b.upper) == pytest.approx((9.0, 9.0))
    with pytest.raises(DimensionMismatch):
        from_fusion_frame([e1], [1, 2])


def test_from_continuous_frame():
    X = MeasureSpace.from_masses([0.5, 2.0, 1.0])
    vecs = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    S = sum(m * np.outer(v, v) for m, v in zip(X.masses, vecs))
    np.testing.assert_allclose(frame_operator(from_continuous_frame(X, vecs)), S, atol=1e-14)


def test_direct_energy_matches_quadratic_form(rng):
    F = generate_random_frame(RandomFrameSpec(seed=3))
    h = rng.standard_normal(F.ambient_dim) + 1j * rng.standard_normal(F.ambient_dim)
    assert energy(F, h) == pytest.approx(np.vdot(h, F.S @ h).real, rel=1e-12)


@settings(max_examples=1000)
@given(seed=st.integers(0, 2**32 - 1))
def test_frame_operator_equals_t_tstar(seed):
    F = generate_random_frame(RandomFrameSpec(seed=seed, ambient_dim=(1, 10), atoms=(1, 8),
                                              ensure_frame=False))
    T = synthesis_matrix(F)
    assert np.linalg.norm(frame_operator(F) - T @ T.conj().T, 2) <= 1e-10 * max(1, np.linalg.norm(T) ** 2)


@settings(max_examples=200)
@given(seed=st.integers(0, 2**32 - 1))
def test_bound_certificate_and_psd(seed):
    F = generate_random_frame(RandomFrameSpec(seed=seed, ambient_dim=(1, 8), ensure_frame=False))
    b = frame_bounds(F)
    assert np.linalg.eigvalsh(frame_operator(F))[0] >= -1e-10
    rng = np.random.default_rng(seed)
    n = F.ambient_dim
    for _ in range(100):
        h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        h /= np.linalg.norm(h)
        e = energy(F, h)
        assert b.lower - 1e-8 <= e <= b.upper + 1e-8


@settings(max_examples=300)
@given(seed=st.integers(0, 2**32 - 1))
def test_reconstruction_property(seed):
    F = generate_random_frame(RandomFrameSpec(seed=seed, ambient_dim=(1, 8)))
    assert frame_bounds(F).is_frame
    rng = np.random.default_rng(seed)
    h = rng.standard_normal(F.ambient_dim) + 1j * rng.standard_normal(F.ambient_dim)
    assert np.linalg.norm(reconstruct(F, h) - h) <= 1e-8 * np.linalg.norm(h)


@settings(max_examples=300)
@given(seed=st.integers(0, 2**32 - 1))
def test_synthesis_against_direct_sum_and_adjoint(seed):
    F = generate_random_frame(RandomFrameSpec(seed=seed, ambient_dim=(1, 8), ensure_frame=False))
    rng = np.random.default_rng(seed + 1)
    n = F.ambient_dim
    # a field f with f(x) in F(x)
    values = [S.basis @ (rng.standard_normal(S.dim) + 1j * rng.standard_normal(S.dim))
              for S in F.fibers]
    c = to_coords(F, values)
    direct = sum(m * v * f for m, v, f in zip(F.space.masses, F.weights.values, values))
    np.testing.assert_allclose(synthesis_matrix(F) @ c, direct, atol=1e-10 * max(1, np.linalg.norm(direct)))
    l2 = sum(m * np.linalg.norm(f) ** 2 for m, f in zip(F.space.masses, values))
    assert np.linalg.norm(c) ** 2 == pytest.approx(l2, rel=1e-10)
    for f, g in zip(values, from_coords(F, c)):
        np.testing.assert_allclose(f, g, atol=1e-10 * max(1, np.linalg.norm(f)))
    # <T c, h> = <c, T^* h>
    h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    lhs = np.vdot(h, synthesis_matrix(F) @ c)
    rhs = np.vdot(analysis_matrix(F) @ h, c)
    assert abs(lhs - rhs) <= 1e-10 * max(1, abs(lhs))
    # analysis operator realises h -> v pi_F h
    fields = from_coords(F, analysis_matrix(F) @ h)
    for (m, v, S), f in zip(zip(F.space.masses, F.weights.values, F.fibers), fields):
        np.testing.assert_allclose(f, v * S.projection @ h, atol=1e-10 * max(1, np.linalg.norm(h)))


def test_frame_rejects_mismatched_fibers():
    with pytest.raises(DimensionMismatch):
        CFusionFrame(MeasureSpace.counting(2), (Subspace.full(2), Subspace.full(3)),
                     WeightMap((1, 1)))
    with pytest.raises(DimensionMismatch):
        CFusionFrame(MeasureSpace.counting(2), (Subspace.full(2),), WeightMap((1,)))
