from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xycompress.compressed import (
    CompressedGate,
    CompressedGateList,
    InputKind,
    OpKind,
    WKind,
    compile_step,
    controlled,
    elementary_cost,
    kink_from_w,
    magnetization_from_w,
    offblock_residue,
    prepared_input,
    shift_ladder,
    shift_matrix,
    v_matrix,
    w_factor,
    w_of_schedule,
)
from xycompress.fermion import ChainSpec, rotation
from xycompress.protocols import r_of_schedule

Y = np.array([[0, -1j], [1j, 0]])
PLUS_Y = np.array([1, 1j]) / np.sqrt(2)
KIND_PAIRS = [(WKind.W0, "H0"), (WKind.W1, "H1"), (WKind.W2, "H2")]


def x_all(width):
    return reduce(np.kron, [np.array([[0, 1], [1, 0]])] * width)


def test_v_unitary():
    for n in (4, 8, 16):
        U = v_matrix(n).dense()
        assert np.abs(U.conj().T @ U - np.eye(2 * n)).max() < 1e-14


def test_v_rejects_bad_n():
    for n in (2, 6, 12):
        with pytest.raises(ValueError):
            v_matrix(n)


def test_transformed_y():
    vt = v_matrix(4)
    t = vt.conjugate(np.kron(np.eye(4), Y))
    expected = np.kron(np.diag([1, 0]), -np.kron(np.eye(2), Y)) + np.kron(np.diag([0, 1]), np.kron(np.eye(2), Y))
    assert np.abs(t - expected).max() < 1e-14
    # the real antisymmetric form I (x) iY picks up the same factor i
    assert np.abs(vt.conjugate(np.kron(np.eye(4), 1j * Y)) - 1j * expected).max() < 1e-14


@settings(max_examples=50, deadline=None)
@given(angle=st.floats(-np.pi, np.pi), n=st.sampled_from([4, 8]), bc=st.sampled_from(["open", "jw"]))
def test_block_diagonal_and_w_factors(angle, n, bc):
    chain = ChainSpec(n, boundary=bc)
    vt = v_matrix(n)
    X = x_all(chain.m_hat)
    for wk, hk in KIND_PAIRS:
        R = rotation(hk, angle, chain).dense()
        assert offblock_residue(vt, R) < 1e-12
        upper, lower = vt.blocks(R)
        W = w_factor(wk, angle, chain)
        assert np.abs(upper - W).max() < 1e-12
        assert np.abs(lower - X @ W.conj() @ X).max() < 1e-12


def test_w0_zero_is_identity():
    assert np.array_equal(w_factor("W0", 0.0, ChainSpec(8)), np.eye(8))


def test_w_factor_bad_kind():
    with pytest.raises(ValueError):
        w_factor("W3", 0.1, ChainSpec(8))


@pytest.mark.parametrize("bc", ["open", "jw"])
def test_w_of_schedule_is_upper_block(bc):
    chain = ChainSpec(4, boundary=bc)
    omegas = np.random.default_rng(0).uniform(-1, 1, (3, 3))
    upper, _ = v_matrix(4).blocks(r_of_schedule(chain, omegas))
    assert np.abs(w_of_schedule(chain, omegas) - upper).max() < 1e-12


def test_w_of_schedule_at_zero_coupling():
    chain = ChainSpec(16)
    omegas = np.tile([-0.04, 0.0, 0.0], (30, 1))
    W = w_of_schedule(chain, omegas)
    assert magnetization_from_w(W) == pytest.approx(1.0, abs=1e-13)


def test_w_of_schedule_initial_extends():
    chain = ChainSpec(8, boundary="jw")
    omegas = np.random.default_rng(1).uniform(-1, 1, (6, 3))
    W = w_of_schedule(chain, omegas[3:], initial=w_of_schedule(chain, omegas[:3]))
    assert np.abs(W - w_of_schedule(chain, omegas)).max() < 1e-13


def test_two_routes_for_trace_form():
    # tr[W Y W^dag Y]/2 directly and through the column states of W
    rng = np.random.default_rng(2)
    chain = ChainSpec(8, boundary="jw")
    W = w_of_schedule(chain, rng.uniform(-1, 1, (20, 3)))
    Ym = np.kron(np.eye(4), Y)
    direct = np.real(np.trace(W @ Ym @ W.conj().T @ Ym)) / 2
    rho = prepared_input(InputKind.RHO_IN_HAT, n=8).matrix
    via_state = np.real(np.trace(W @ rho @ W.conj().T @ Ym)) * 8 / 2
    assert abs(direct - via_state) < 1e-12
    assert abs(magnetization_from_w(W) - np.real(np.trace(W @ rho @ W.conj().T @ Ym))) < 1e-12


def test_magnetization_routes_agree():
    from xycompress.protocols import magnetization_from_r, kink_from_r

    rng = np.random.default_rng(3)
    for bc in ("open", "jw"):
        chain = ChainSpec(16, boundary=bc)
        omegas = rng.uniform(-0.5, 0.5, (40, 3))
        R = r_of_schedule(chain, omegas)
        W = w_of_schedule(chain, omegas)
        assert abs(magnetization_from_r(R) - magnetization_from_w(W)) < 1e-10
        assert abs(kink_from_r(r_of_schedule(chain, omegas)) - kink_from_w(w_of_schedule(chain, omegas))) < 1e-10


def test_shift_matrix_action():
    A = shift_matrix(8)
    e = np.eye(8)
    assert np.array_equal(A @ e[0], e[1])
    assert np.array_equal(A @ e[7], e[0])


@pytest.mark.parametrize("width", [2, 3, 4, 5])
def test_shift_ladder_expands_to_shift(width):
    gl = CompressedGateList(width, shift_ladder(width))
    assert np.array_equal(gl.dense().real, shift_matrix(2 ** width))
    inv = CompressedGateList(width, [CompressedGate(OpKind.SHIFT_INV)]).expand_shifts()
    assert np.array_equal(inv.dense().real, shift_matrix(2 ** width).T)
    assert gl.elementary_count() == width ** 2


def test_controlled_examples():
    X = np.array([[0, 1], [1, 0]])
    cnot = controlled(X, [1], [2], 2)
    assert np.array_equal(cnot.real, np.eye(4)[[0, 1, 3, 2]])
    with pytest.raises(ValueError):
        controlled(X, [1], [1], 2)


def test_elementary_cost():
    assert elementary_cost(0) == 1
    assert elementary_cost(3) == 7
    assert elementary_cost(2, 2) == 10


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.sampled_from([4, 8, 16, 32]), bc=st.sampled_from(["open", "jw"]))
def test_compiled_step_reconstructs(seed, n, bc):
    chain = ChainSpec(n, boundary=bc)
    w = np.random.default_rng(seed).uniform(-np.pi, np.pi, 3)
    target = w_factor("W0", w[0], chain) @ w_factor("W1", w[1], chain) @ w_factor("W2", w[2], chain)
    assert np.abs(compile_step(chain, *w).dense() - target).max() < 1e-10


def test_gate_count_quadratic():
    for bc in ("open", "jw"):
        ratios = []
        for n in (8, 16, 32, 64):
            mh = int(np.log2(n))
            ratios.append(compile_step(ChainSpec(n, boundary=bc), 0.1, 0.2, 0.3).elementary_count() / mh ** 2)
        # count / m_hat^2 settles at a fixed constant instead of growing
        assert max(ratios) < 12
        assert all(b <= a for a, b in zip(ratios, ratios[1:]))


def test_gate_list_json_round_trip():
    gl = compile_step(ChainSpec(16, boundary="jw"), 0.3, -0.2, 0.9)
    back = CompressedGateList.from_json(gl.to_json())
    assert back.width == gl.width and back.gates == gl.gates
    assert np.array_equal(back.dense(), gl.dense())


@pytest.mark.parametrize("kind", list(InputKind))
def test_prepared_inputs_are_states(kind):
    for n in (4, 8, 16):
        rho = prepared_input(kind, n=n, k=2).matrix
        assert np.abs(rho - rho.conj().T).max() < 1e-12
        assert abs(np.trace(rho) - 1) < 1e-12
        assert np.linalg.eigvalsh(rho).min() > -1e-12


def test_rho_in_hat_closed_form():
    py = np.outer(PLUS_Y, PLUS_Y.conj())
    assert np.allclose(prepared_input("rho_in_hat", n=4).matrix, 0.5 * np.kron(np.eye(2), py))


def test_zeta_in_closed_form():
    my = np.outer(PLUS_Y.conj(), PLUS_Y)
    rho = prepared_input("zeta_in", n=4).matrix
    expected = (2 * np.kron(np.diag([1, 0]), my) + np.kron(np.diag([0, 1]), np.diag([0, 1]))) / 3
    assert np.allclose(rho, expected)


def test_rho_in_k_pure():
    rho = prepared_input("rho_in_k", n=8, k=3).matrix
    assert np.allclose(rho @ rho, rho)
    assert rho[4, 4] == pytest.approx(0.5) and rho[5, 4] == pytest.approx(0.5j)


def test_rho_in_k_needs_k():
    with pytest.raises(ValueError):
        prepared_input("rho_in_k", n=8)
    with pytest.raises(IndexError):
        prepared_input("rho_in_k", n=8, k=9)
