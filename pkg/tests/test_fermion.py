import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from xycompress.fermion import (
    Boundary,
    ChainSpec,
    GeneratorKind,
    PlaneRotationSet,
    Side,
    XYChain,
    apply_rotation,
    build_generator,
    rotation,
)

KINDS = list(GeneratorKind)
angles = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)


def test_chainspec_validation():
    for bad in (3, 6, 2, 12):
        with pytest.raises(ValueError):
            ChainSpec(bad)
    with pytest.raises(ValueError):
        ChainSpec(8, B=0.0)
    with pytest.raises(ValueError):
        ChainSpec(8, delta=1.5)
    c = ChainSpec(16, boundary="jw")
    assert (c.m, c.m_hat) == (5, 4)
    assert c.boundary is Boundary.JORDAN_WIGNER
    # XYChain accepts any n >= 2
    assert XYChain(3).n == 3


def test_h1_open_pairs():
    h = build_generator("H1", ChainSpec(4)).dense()
    nz = {(r + 1, c + 1): h[r, c] for r, c in zip(*np.nonzero(np.triu(h)))}
    assert nz == {(2, 3): -0.5, (4, 5): -0.5, (6, 7): -0.5}


def test_h0_pairs():
    for n in (4, 8):
        h = build_generator("H0", ChainSpec(n)).dense()
        for j in range(n):
            assert h[2 * j, 2 * j + 1] == -0.5
        assert np.count_nonzero(h) == 2 * n


def test_h1_jw_wrap_pair():
    h_open = build_generator("H1", ChainSpec(4)).dense()
    h_jw = build_generator("H1", ChainSpec(4, boundary="jw")).dense()
    diff = np.argwhere(h_jw != h_open)
    assert {tuple(d) for d in diff} == {(7, 0), (0, 7)}
    # -i c_8 c_1 corresponds to h_{8,1} = -1/2
    assert h_jw[7, 0] == -0.5


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("bc", ["open", "jw"])
def test_generators_antisymmetric_and_sparse(kind, bc):
    g = build_generator(kind, ChainSpec(8, boundary=bc))
    h = g.dense()
    assert np.array_equal(h, -h.T)
    assert g.row_nnz().max() <= 2


@pytest.mark.parametrize("kind", KINDS)
def test_zero_angle_is_identity(kind):
    for bc in ("open", "jw"):
        assert np.array_equal(rotation(kind, 0.0, ChainSpec(8, boundary=bc)).dense(), np.eye(16))


@settings(max_examples=100, deadline=None)
@given(kind=st.sampled_from(KINDS), angle=angles, n=st.sampled_from([4, 8]), bc=st.sampled_from(["open", "jw"]))
def test_rotation_matches_expm(kind, angle, n, bc):
    chain = ChainSpec(n, boundary=bc)
    R = rotation(kind, angle, chain).dense()
    h = build_generator(kind, chain).dense()
    assert np.abs(R - sla.expm(2 * angle * h)).max() < 1e-12
    assert np.abs(R @ R.T - np.eye(2 * n)).max() < 1e-12
    assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(angle=angles)
def test_r2_is_reflected_r1(angle):
    # X on the last qubit swaps the members of every pair (2k-1, 2k)
    chain = ChainSpec(8)
    X = np.kron(np.eye(8), [[0, 1], [1, 0]])
    R1 = rotation("H1", angle, chain).dense()
    R2 = rotation("H2", angle, chain).dense()
    assert np.abs(R2 - X @ R1.T @ X).max() < 1e-12


def test_open_endpoints_fixed():
    chain = ChainSpec(4)
    R1 = rotation("H1", 0.7, chain).dense()
    R2 = rotation("H2", 0.7, chain).dense()
    assert R1[0, 0] == R1[7, 7] == 1.0
    assert R2[1, 1] == R2[6, 6] == 1.0


@settings(max_examples=30, deadline=None)
@given(kind=st.sampled_from(KINDS), angle=angles)
def test_jw_differs_only_at_boundary_modes(kind, angle):
    a = rotation(kind, angle, ChainSpec(8)).dense()
    b = rotation(kind, angle, ChainSpec(8, boundary="jw")).dense()
    rows, cols = np.nonzero(np.abs(a - b) > 0)
    edge = {0, 1, 14, 15}
    assert all(r in edge and c in edge for r, c in zip(rows, cols))


def test_plane_order_irrelevant():
    rot = rotation("H1", 0.3, ChainSpec(8))
    perm = np.random.default_rng(0).permutation(rot.n_planes)
    shuffled = PlaneRotationSet(rot.dim, rot.i[perm], rot.j[perm], rot.c[perm], rot.s[perm])
    assert np.array_equal(shuffled.dense(), rot.dense())


def test_apply_rotation_identity_and_quarter_turn():
    M = np.random.default_rng(1).normal(size=(6, 6))
    assert np.array_equal(apply_rotation(PlaneRotationSet.identity(6), M), M)
    quarter = PlaneRotationSet(2, [0], [1], [0.0], [1.0])
    assert np.allclose(apply_rotation(quarter, np.eye(2)), [[0, -1], [1, 0]])


def test_apply_rotation_round_trip():
    rng = np.random.default_rng(2)
    perm = rng.permutation(16)
    theta = rng.uniform(-np.pi, np.pi, 8)
    rot = PlaneRotationSet(16, perm[:8], perm[8:], np.cos(theta), np.sin(theta))
    M = rng.normal(size=(16, 16))
    left = apply_rotation(rot, M, Side.LEFT)
    assert np.allclose(left, rot.dense() @ M, atol=1e-13)
    right = apply_rotation(rot, M.T, "right_transposed")
    assert np.abs(right - left.T).max() < 1e-13
    back = apply_rotation(rot.transpose(), left)
    assert np.abs(back - M).max() < 1e-13


def test_apply_rotation_dimension_mismatch():
    with pytest.raises(ValueError):
        apply_rotation(PlaneRotationSet.identity(4), np.eye(6))


def test_overlapping_planes_rejected():
    with pytest.raises(ValueError):
        PlaneRotationSet(4, [0, 1], [1, 2], [1, 1], [0, 0])


def test_invalid_kind():
    with pytest.raises(ValueError):
        build_generator("H3", ChainSpec(4))
