import numpy as np
import pytest

from indefmetric import fock as fk, gupta_bleuler as gb, krein
from indefmetric.errors import NotPositiveSemidefinite
from indefmetric.testfunc import gaussian

L = 2 * np.pi
Z = fk.MomentumLattice.from_integer_modes(L, [(0, 0, 1)])
TWO = fk.MomentumLattice.from_integer_modes(L, [(0, 0, 1), (1, 0, 0)])


def brute_kernel(fock, level, tol=1e-8):
    """Oracle: dense SVD of all B+(k) stacked, restricted to one occupation level."""
    idx = np.nonzero(fock.level == level)[0]
    stacked = np.vstack([b.matrix[:, idx] for b in fk.subsidiary_operators(fock)])
    _, s, vh = np.linalg.svd(stacked)
    s = np.concatenate([s, np.zeros(len(idx) - len(s))])
    return idx, vh[s <= tol].conj().T


@pytest.fixture(scope="module")
def z1():
    f = fk.build_fock(Z, 1)
    return f, gb.physical_subspace(f)


@pytest.fixture(scope="module")
def z2():
    f = fk.build_fock(Z, 2)
    return f, gb.physical_subspace(f)


def test_single_mode_one_particle_span(z1):
    fock, ps = z1
    one = ps.basis[:, ps.levels == 1]
    om = fock.vacuum()
    create = [fk.ladder(fock, 0, mu, "create").matrix @ om for mu in range(4)]
    # polarisation vectors c with sum_mu c_mu a_mu^+ Omega
    expect = np.column_stack([sum(c * v for c, v in zip(pol, create))
                              for pol in [(0, 1, 0, 0), (0, 0, 1, 0), (1, 0, 0, 1)]])
    q, _ = np.linalg.qr(expect)
    np.testing.assert_allclose(one @ one.conj().T, q @ q.conj().T, atol=1e-12)
    lam = np.linalg.eigvalsh(fock.gram(one))
    np.testing.assert_allclose(lam, [0, 1, 1], atol=1e-12)


def test_matches_brute_force_kernel(z2):
    fock, ps = z2
    for n in range(3):
        idx, ker = brute_kernel(fock, n)
        mine = ps.basis[idx][:, ps.levels == n]
        assert mine.shape[1] == ker.shape[1]
        np.testing.assert_allclose(mine @ mine.conj().T, ker @ ker.conj().T, atol=1e-10)


@pytest.mark.parametrize("n_max,dims", [(2, {0: 1, 1: 3, 2: 6}), (3, {0: 1, 1: 3, 2: 6, 3: 10})])
def test_symmetric_power_structure(n_max, dims):
    ps = gb.physical_subspace(fk.build_fock(Z, n_max))
    assert ps.level_dims() == dims == gb.symmetric_power_dims(3, n_max)
    assert ps.subsidiary_residual() <= 1e-8


def test_quotient_dims(z1):
    _, ps = z1
    q = gb.physical_quotient(ps)
    assert q.level_dims == {0: 1, 1: 2}
    ps2 = gb.physical_subspace(fk.build_fock(TWO, 1))
    assert gb.physical_quotient(ps2).level_dims[1] == 4


def test_negated_gram_rejected(z1):
    _, ps = z1
    with pytest.raises(NotPositiveSemidefinite):
        krein.quotient_psd(-ps.gram)


def test_quotient_independent_of_complement(z2, rng):
    fock, ps = z2
    lam, u = np.linalg.eigh(ps.gram)
    keep = np.abs(lam) > ps.tol_null
    comp = ps.basis @ u[:, keep]
    null = ps.basis @ u[:, ~keep]
    r = keep.sum()
    q, _ = np.linalg.qr(rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r)))
    other = comp @ q + null @ (rng.normal(size=(null.shape[1], r)))
    s1 = np.linalg.eigvalsh(fock.gram(comp))
    s2 = np.linalg.eigvalsh(fock.gram(other))
    np.testing.assert_allclose(s1, s2, atol=1e-10)
    assert np.all(s1 > 0)


def test_observable_preservation_examples(z2):
    fock, ps = z2
    f = gaussian((0, 0, 0, 0), 1.0, (1, 0.4, -0.2, 0.3))
    assert gb.observable_preservation(fk.field_F(fock, 0, 1, f), ps).passed
    assert not gb.observable_preservation(fk.field_A(fock, 0, f), ps).passed
    ident = fk.FieldOperator(np.eye(fock.dim, dtype=complex), "1", fock.eta_diag)
    assert gb.observable_preservation(ident, ps).passed


def test_weak_maxwell_examples(z2):
    fock, ps = z2
    f = gaussian()
    for mu in range(4):
        assert gb.weak_maxwell(ps, mu, f).residual < 1e-10
    om = fock.vacuum()
    t0 = fk.ladder(fock, 0, 0, "create").matrix @ om
    # the divergence needs one unphysical scalar photon to connect to the vacuum
    assert max(abs(gb.maxwell_matrix_element(fock, mu, f, t0, om)) for mu in range(4)) > 1e-6
    assert all(abs(gb.maxwell_matrix_element(fock, mu, f, om, om)) < 1e-15 for mu in range(4))


def test_b_f_commutators(z2):
    fock, _ = z2
    f, g = gaussian((0.1, 0.2, 0, 0), 0.8), gaussian((0, 0, 0.3, -0.1), 1.3)
    assert gb.b_f_commutator(fock, f, g) <= 1e-10
    b, _, _ = fk.field_B(fock, f)
    assert max(gb.commutator_norm(fock, b, fk.field_A(fock, mu, g)) for mu in range(4)) > 1e-6
    bg_, _, _ = fk.field_B(fock, g)
    assert gb.commutator_norm(fock, b, bg_) <= 1e-10


def test_field_tensor_span(z2):
    _, ps = z2
    span, quot, leak = gb.field_tensor_span(ps, [gaussian(), gaussian((0.3, 0, 0, 0.2), 0.7)])
    assert leak <= 1e-9
    assert span[1] == 3 and quot[1] == 2
    assert span[2] <= ps.level_dims()[2]
    assert quot[2] == 3


def test_certify_seven_modes():
    lat = fk.MomentumLattice.from_integer_modes(
        L, [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1), (1, 1, 0)]
    )
    fock = fk.build_fock(lat, 2)
    results, ps = gb.certify(fock, gaussian((0.1, 0, 0.2, 0), 1.1, (1, 0.2, 0.3, -0.4)))
    assert all(r[1] for r in results), results
    assert ps.level_dims() == gb.symmetric_power_dims(21, 2)
    assert gb.physical_quotient(ps).level_dims[1] == 14
