import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xycompress.fermion import XYChain
from xycompress.spectrum import (
    QuadraticForm,
    bogoliubov,
    brute_force_labels,
    dense_hamiltonian,
    dense_quadratic_hamiltonian,
    gap_curves,
    ground_magnetization,
    momentum_operator,
    parity_diagonal,
    quadratic_form,
    reflection_operator,
    sector_crossings,
    sector_ground,
    spectrum,
)

chains = st.builds(
    XYChain,
    n=st.integers(2, 8),
    B=st.floats(0.1, 2.0),
    j_max=st.floats(0.0, 2.0),
    delta=st.floats(0.0, 1.0),
    boundary=st.sampled_from(["open", "jw"]),
)


def z_mean(n):
    bits = (np.arange(2 ** n)[:, None] >> np.arange(n)) & 1
    return (1 - 2 * bits).mean(axis=1)


def test_quadratic_form_zero_coupling():
    qf = quadratic_form(XYChain(5, B=0.7, j_max=0.0))
    assert np.array_equal(qf.a, -1.4 * np.eye(5))
    assert not qf.b.any()
    assert qf.constant == pytest.approx(3.5)


def test_quadratic_form_open_entries():
    qf = quadratic_form(XYChain(4, B=1.0, j_max=1.0, delta=0.5))
    assert np.allclose(np.diag(qf.a, 1), -1.5)
    assert np.allclose(np.diag(qf.b, 1), -0.5)
    assert np.allclose(np.diag(qf.b, -1), 0.5)
    assert np.count_nonzero(np.triu(qf.a, 2)) == 0


def test_quadratic_form_jw_corner_only():
    open_, jw = quadratic_form(XYChain(6, j_max=0.8, delta=0.2)), quadratic_form(XYChain(6, j_max=0.8, delta=0.2, boundary="jw"))
    da = np.argwhere(open_.a != jw.a)
    db = np.argwhere(open_.b != jw.b)
    assert {tuple(x) for x in da} == {(0, 5), (5, 0)}
    assert {tuple(x) for x in db} == {(0, 5), (5, 0)}


def test_quadratic_form_validation():
    with pytest.raises(ValueError):
        QuadraticForm(np.array([[0, 1], [0, 0.0]]), np.zeros((2, 2)), 0.0)
    with pytest.raises(ValueError):
        QuadraticForm(np.zeros((2, 2)), np.eye(2), 0.0)


def test_quadratic_form_reproduces_spin_hamiltonian():
    for bc in ("open", "jw"):
        for n in (2, 3, 4, 5):
            chain = XYChain(n, B=0.9, j_max=1.3, delta=0.35, boundary=bc)
            H = dense_quadratic_hamiltonian(quadratic_form(chain))
            assert np.abs(H - dense_hamiltonian(chain)).max() < 1e-12


def test_zero_coupling_modes():
    sol = bogoliubov(quadratic_form(XYChain(4, B=1.0, j_max=0.0)))
    assert np.allclose(sol.lambdas, -2.0)
    assert sol.ground_energy == pytest.approx(-4.0)
    spec = spectrum(sol)
    assert np.allclose(np.unique(np.round(spec.energy, 9)), [-4, -2, 0, 2, 4])
    assert spec.energy[1] - spec.energy[0] == pytest.approx(2.0)
    assert ground_magnetization(sol) == pytest.approx(1.0)
    # parity alternates with the number of flipped spins
    flipped = 4 - np.array([bin(int(m)).count("1") for m in spec.occupation])
    assert np.array_equal(spec.parity, (-1) ** flipped)


@settings(max_examples=50, deadline=None)
@given(chain=chains)
def test_spectrum_matches_dense(chain):
    sol = bogoliubov(quadratic_form(chain))
    E = np.linalg.eigvalsh(dense_hamiltonian(chain))
    assert np.abs(spectrum(sol).energy - E).max() < 1e-9
    assert abs(sol.ground_energy - E[0]) < 1e-9


@settings(max_examples=50, deadline=None)
@given(chain=chains)
def test_bogoliubov_residuals(chain):
    r_modes1, r_modes2, r_comm, r_canon = bogoliubov(quadratic_form(chain)).residuals()
    assert r_modes1 < 1e-9 and r_modes2 < 1e-9
    assert r_comm < 1e-9
    assert r_canon < 1e-10


@settings(max_examples=30, deadline=None)
@given(chain=chains)
def test_parity_labels_match_dense(chain):
    sol = bogoliubov(quadratic_form(chain))
    ours = sorted(zip(np.round(spectrum(sol).energy, 7), spectrum(sol).parity))
    dense = brute_force_labels(chain)
    assert ours == sorted(zip(np.round(dense.energy, 7), dense.parity))


@settings(max_examples=30, deadline=None)
@given(chain=chains)
def test_magnetization_matches_dense(chain):
    sol = bogoliubov(quadratic_form(chain))
    E, V = np.linalg.eigh(dense_hamiltonian(chain))
    if E[1] - E[0] < 1e-8:
        return  # degenerate ground state
    m = float(np.abs(V[:, 0]) ** 2 @ z_mean(chain.n))
    assert abs(ground_magnetization(sol) - m) < 1e-9


def test_magnetization_example_n8():
    chain = XYChain(8, B=1.0, j_max=2.0, delta=0.0)
    E, V = np.linalg.eigh(dense_hamiltonian(chain))
    m = float(np.abs(V[:, 0]) ** 2 @ z_mean(8))
    assert ground_magnetization(bogoliubov(quadratic_form(chain))) == pytest.approx(m, abs=1e-9)


def test_energy_bookkeeping():
    chain = XYChain(7, B=1.3, j_max=0.9, delta=0.4, boundary="jw")
    qf = quadratic_form(chain)
    sol = bogoliubov(qf)
    e0 = qf.constant + 0.5 * (np.trace(qf.a) - sol.lambdas.sum())
    assert sol.e0 == pytest.approx(e0)
    E = np.linalg.eigvalsh(dense_hamiltonian(chain))
    assert e0 + sol.lambdas[sol.lambdas < 0].sum() == pytest.approx(E[0], abs=1e-9)


def test_sector_ground():
    chain = XYChain(6, B=1.0, j_max=1.4, delta=0.3, boundary="jw")
    sol = bogoliubov(quadratic_form(chain))
    labels = brute_force_labels(chain)
    for p in (1, -1):
        e, _ = sector_ground(sol, p)
        assert e == pytest.approx(labels.energy[labels.parity == p].min(), abs=1e-9)


def test_symmetries_commute():
    for bc in ("open", "jw"):
        for n in (3, 4, 5):
            H = dense_hamiltonian(XYChain(n, B=0.8, j_max=1.1, delta=0.6, boundary=bc))
            Pz = np.diag(parity_diagonal(n))
            assert np.abs(H @ Pz - Pz @ H).max() < 1e-12
            R = reflection_operator(n)
            assert np.abs(H @ R - R @ H).max() < 1e-12
            if bc == "jw":
                P = momentum_operator(n)
                assert np.abs(H @ P - P @ H).max() < 1e-10


def test_brute_force_zero_coupling_parity():
    labels = brute_force_labels(XYChain(4, B=1.0, j_max=0.0))
    flipped = (4 - np.rint(-labels.energy).astype(int)) // 2  # E = -(4 - 2w)
    assert np.array_equal(labels.parity, (-1) ** flipped)


def test_brute_force_momentum_labels_are_eigenvalues():
    labels = brute_force_labels(XYChain(4, B=1.0, j_max=0.7, delta=0.5, boundary="jw"))
    assert labels.momentum is not None
    assert np.all(np.abs(labels.momentum) <= 4 + 1e-9)
    assert brute_force_labels(XYChain(4)).momentum is None


def test_spectrum_truncation_and_limits():
    sol = bogoliubov(quadratic_form(XYChain(6, j_max=0.5)))
    top = spectrum(sol, 5)
    assert len(top) == 5 and np.all(np.diff(top.energy) >= 0)
    with pytest.raises(ValueError):
        spectrum(sol, 2 ** 6 + 1)
    with pytest.raises(ValueError):
        spectrum(bogoliubov(quadratic_form(XYChain(21))))
    with pytest.raises(ValueError):
        dense_hamiltonian(XYChain(11))


def test_large_chain_is_fast_and_consistent():
    sol = bogoliubov(quadratic_form(XYChain(256, B=1.0, j_max=0.6, delta=0.5, boundary="jw")))
    assert max(sol.residuals()) < 1e-9
    assert -1 <= ground_magnetization(sol) <= 1


def test_gap_curves_shape():
    gc = gap_curves(XYChain(8, B=1.0, delta=0.5), np.linspace(0, 2, 11))
    assert set(gc) == {"J", "particle", "hole", "two_particle", "ground_parity"}
    # at J = 0 every mode is filled: no particle excitation, hole gap 2B
    assert np.isnan(gc["particle"][0]) and gc["hole"][0] == pytest.approx(2.0)
    assert np.all(np.isin(gc["ground_parity"], [-1, 1]))


def test_same_label_crossings_are_split_by_reflection():
    # equal-label degeneracies of n = 4 sit at E = 0 and differ in the mirror quantum number
    for bc in ("open", "jw"):
        chain = XYChain(4, B=1.0, delta=0.5, boundary=bc)
        crossings = sector_crossings(chain, np.linspace(0, 2, 101))
        assert crossings
        R = reflection_operator(4)
        for c in crossings:
            assert abs(c.energy) < 1e-6
            E, V = np.linalg.eigh(dense_hamiltonian(chain.replace(j_max=c.J)))
            blk = V[:, np.abs(E - c.energy) < 1e-5]
            r = blk.conj().T @ R @ blk
            assert np.allclose(np.sort(np.linalg.eigvalsh((r + r.conj().T) / 2)), [-1, 1], atol=1e-6)


def test_ising_n4_has_no_same_label_crossings():
    for bc in ("open", "jw"):
        assert sector_crossings(XYChain(4, B=1.0, delta=0.0, boundary=bc), np.linspace(0, 2, 101)) == []
