import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from indefmetric import fock as fk
from indefmetric.errors import DimensionOverflow, ModeMismatch
from indefmetric.testfunc import METRIC, gaussian, lattice_table, mode_indicator

L = 2 * np.pi
Z = fk.MomentumLattice.from_integer_modes(L, [(0, 0, 1)])
SEVEN = fk.MomentumLattice.from_integer_modes(
    L, [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1), (1, 1, 0)]
)


def multiset_count(n_slots, n_max):
    """Oracle: count occupation vectors by brute force."""
    return sum(1 for occ in itertools.product(range(n_max + 1), repeat=n_slots) if sum(occ) <= n_max)


@pytest.fixture(scope="module")
def z2():
    return fk.build_fock(Z, 2)


@pytest.fixture(scope="module")
def seven2():
    return fk.build_fock(SEVEN, 2)


def test_dimension_examples():
    two = fk.MomentumLattice.from_integer_modes(L, [(0, 0, 1), (0, 0, -1)])
    assert fk.build_fock(Z, 1).dim == 5
    assert fk.build_fock(Z, 2).dim == 15
    assert fk.build_fock(two, 1).dim == 9


@pytest.mark.parametrize("modes,n_max", [(1, 3), (2, 2), (2, 3)])
def test_dimension_matches_multiset_oracle(modes, n_max):
    lat = fk.MomentumLattice.from_integer_modes(L, [(0, 0, 1), (1, 0, 0)][:modes])
    assert fk.build_fock(lat, n_max).dim == multiset_count(4 * modes, n_max) == comb(4 * modes + n_max, n_max)


def test_dimension_limit():
    with pytest.raises(DimensionOverflow):
        fk.build_fock(SEVEN, 3, dim_limit=100)


def test_lattice_validation():
    with pytest.raises(ValueError):
        fk.MomentumLattice.from_integer_modes(L, [(0, 0, 0)])
    with pytest.raises(ValueError):
        fk.MomentumLattice.from_integer_modes(L, [(0, 0, 1), (0, 0, 1)])
    cube = fk.MomentumLattice.cube(L, 1)
    assert cube.n_modes == 26 and cube.symmetric
    assert np.all(cube.omega > 0)
    assert not Z.symmetric


def test_eta_and_vacuum(seven2):
    e = seven2.eta_diag
    assert set(np.unique(e)) <= {-1.0, 1.0}
    np.testing.assert_array_equal(seven2.eta @ seven2.eta, np.eye(seven2.dim))
    om = seven2.vacuum()
    assert seven2.inner(om, om) == 1
    assert np.count_nonzero(seven2.occupations.sum(axis=1) == 0) == 1


def test_ladder_examples(z2):
    below = z2.below_cap()
    for mu, sign in [(1, 1.0), (0, -1.0)]:
        a = fk.ladder(z2, 0, mu, "annihilate").matrix
        ad = fk.ladder(z2, 0, mu, "create").matrix
        c = (a @ ad - ad @ a)[np.ix_(below, below)]
        np.testing.assert_allclose(c, sign * np.eye(below.sum()), atol=1e-14)
    for mu in range(4):
        assert not np.any(fk.ladder(z2, 0, mu, "annihilate").matrix @ z2.vacuum())
    with pytest.raises(ValueError):
        fk.ladder(z2, 0, 0, "destroy")


def test_ccr_all_slot_pairs():
    lat = fk.MomentumLattice.from_integer_modes(L, [(0, 0, 1), (1, 0, 0)])
    f = fk.build_fock(lat, 2)
    for m1, m2 in itertools.product(range(2), repeat=2):
        for mu, nu in itertools.product(range(4), repeat=2):
            assert fk.ccr_residual(f, m1, mu, m2, nu) < 1e-14


def test_one_mode_two_point(z2):
    f = mode_indicator(Z, 0)
    om = z2.vacuum()
    omega = Z.omega[0]
    for mu, nu in itertools.product(range(4), repeat=2):
        v = fk.two_point_vacuum(z2, fk.field_A(z2, mu, f), fk.field_A(z2, nu, f))
        assert v == pytest.approx(-METRIC[mu, nu] / (2 * omega * L**3), abs=1e-15)
    one_step = fk.field_A(z2, 2, f).matrix @ om
    assert not np.any(one_step[z2.level != 1])


def test_field_hermiticity(seven2):
    f = gaussian((0.3, -0.2, 0.1, 0.5), 0.8, (1, -0.5, 0.25, 2))
    for mu in range(4):
        assert fk.field_A(seven2, mu, f).is_krein_hermitian()
    for mu, nu in [(0, 1), (1, 2), (2, 3)]:
        assert fk.field_F(seven2, mu, nu, f).is_krein_hermitian()
    b, bp, bm = fk.field_B(seven2, f)
    assert b.is_krein_hermitian()
    np.testing.assert_allclose(bp.dagger.matrix, bm.matrix, atol=1e-14)


def test_field_F_antisymmetry(z2):
    f = gaussian()
    for mu in range(4):
        assert not np.any(fk.field_F(z2, mu, mu, f).matrix)
    s = fk.field_F(z2, 0, 1, f).matrix + fk.field_F(z2, 1, 0, f).matrix
    np.testing.assert_allclose(s, 0, atol=1e-15)


def test_lightlike_mode_F_two_point(z2):
    f, g = gaussian(), gaussian((0.2, 0, 0, 0.1))
    v = fk.two_point_vacuum(z2, fk.field_F(z2, 0, 3, f), fk.field_F(z2, 0, 3, g))
    w = fk.two_point_vacuum(z2, fk.field_F(z2, 0, 1, f), fk.field_F(z2, 0, 1, g))
    # F_03 along the propagation direction carries only the k_mu k_nu part, which cancels
    assert abs(v) < 1e-15
    assert abs(w) > 1e-6


def test_B_plus_examples(z2):
    f = gaussian()
    _, bp, _ = fk.field_B(z2, f)
    om = z2.vacuum()
    assert not np.any(bp.matrix @ om)
    t1 = fk.ladder(z2, 0, 1, "create").matrix @ om
    np.testing.assert_allclose(bp.matrix @ t1, 0, atol=1e-15)
    t0 = fk.ladder(z2, 0, 0, "create").matrix @ om
    out = bp.matrix @ t0
    omega = Z.omega[0]
    c = -1j * np.conj(f.scalar_on_lattice(Z)[0]) / np.sqrt(2 * omega * L**3)
    assert np.count_nonzero(np.abs(out) > 1e-15) == 1
    assert out[0] == pytest.approx(-omega * c)


def test_momentum_examples(seven2):
    p = fk.momentum_eigenvalues(seven2)
    np.testing.assert_array_equal(p[0], 0)
    p2 = fk.minkowski_squares(seven2)
    one = seven2.level == 1
    assert np.all(p2[one] == 0)
    # oracle: direct Minkowski square of the summed momenta
    direct = p[:, 0] ** 2 - np.sum(p[:, 1:] ** 2, axis=1)
    np.testing.assert_allclose(p2, direct, atol=1e-12)
    ok, mn, p0 = fk.spectral_check(seven2)
    assert ok and mn >= -1e-12 and p0 >= 0
    assert fk.vacuum_uniqueness(seven2)
    m = fk.momentum_operator(seven2, 0).matrix
    np.testing.assert_allclose(np.diag(m).real, p[:, 0])


def test_translation_covariance(seven2, rng):
    f = gaussian((0.1, 0.2, 0.3, 0.4), 1.0, (1, 2, -1, 0.5))
    eta = seven2.eta_diag
    for _ in range(10):
        a = rng.normal(size=4) * 2
        u = fk.translation(seven2, a).matrix
        ud = u.conj().T
        d = np.diag(u)
        np.testing.assert_allclose(d * eta, eta * d)
        for mu in range(4):
            lhs = u @ fk.field_A(seven2, mu, f).matrix @ ud
            rhs = fk.field_A(seven2, mu, f.shifted(a)).matrix
            assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_lattice_table_shift_and_mismatch(seven2, rng):
    t = lattice_table(SEVEN, rng.normal(size=7) + 1j * rng.normal(size=7))
    a = rng.normal(size=4)
    u = fk.translation(seven2, a).matrix
    lhs = u @ fk.field_A(seven2, 1, t).matrix @ u.conj().T
    np.testing.assert_allclose(lhs, fk.field_A(seven2, 1, t.shifted(a, SEVEN)).matrix, atol=1e-12)
    with pytest.raises(ModeMismatch):
        fk.field_A(fk.build_fock(Z, 1), 0, t)


def test_mode_sum_matches_fock(seven2):
    f = gaussian((0.0, 0.1, 0.0, -0.2), 1.2, (1, 0.3, -0.7, 0.2))
    g = gaussian((0.4, 0.0, 0.5, 0.0), 0.9, (0.2, 1, 0.1, -1))
    for mu, nu in itertools.product(range(4), repeat=2):
        v = fk.two_point_vacuum(seven2, fk.field_A(seven2, mu, f), fk.field_A(seven2, nu, g))
        assert abs(v - fk.mode_sum_two_point(SEVEN, mu, nu, f, g)) < 1e-15


def test_wightman_from_fock_requires_budget(z2):
    with pytest.raises(ValueError):
        fk.wightman_from_fock(z2, fk.letters_for_modes(z2), 5)


@given(st.lists(st.tuples(st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2)),
                min_size=1, max_size=3, unique=True))
def test_spectral_condition_random_lattices(modes):
    modes = [m for m in modes if m != (0, 0, 0)]
    if not modes:
        return
    lat = fk.MomentumLattice.from_integer_modes(3.0, modes)
    ok, _, _ = fk.spectral_check(fk.build_fock(lat, 2))
    assert ok
