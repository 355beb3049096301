"""Certification suites run by the command-line driver.

Each suite is a generator of check records
``{"name", "pass", "residual", "tolerance", "wall_time"}`` plus optional
tables; all randomness flows from the configured seed.
"""

from __future__ import annotations

import itertools
import time

import numpy as np

from . import borchers, fock as fk, gupta_bleuler as gb, krein, twopoint as tp
from .config import RunConfig
from .errors import LandauGauge
from .testfunc import gaussian


class Recorder:
    def __init__(self):
        self.checks = []
        self.tables = {}

    def run(self, name, fn):
        """``fn() -> (passed, residual, tolerance)``; exceptions count as failures."""
        t0 = time.perf_counter()
        try:
            passed, residual, tol = fn()
            error = None
        except Exception as exc:  # a crashing check is a failing check
            passed, residual, tol, error = False, None, None, f"{type(exc).__name__}: {exc}"
        rec = {
            "name": name,
            "pass": bool(passed),
            "residual": None if residual is None else float(residual),
            "tolerance": None if tol is None else float(tol),
            "wall_time": time.perf_counter() - t0,
        }
        if error:
            rec["error"] = error
        self.checks.append(rec)
        return rec


def random_gram(rng, n=8, rank=None):
    """Random Hermitian ``n x n`` matrix, optionally of reduced rank."""
    rank = n if rank is None else rank
    x = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    d = rng.choice([-1.0, 1.0], rank) * rng.uniform(0.5, 2.0, rank)
    return (x * d) @ x.conj().T


def two_step(gram, aux=None, tol_null=krein.TOL_NULL):
    """``strip_nulls`` then ``krein_normalize``; returns the pieces and residuals."""
    space = krein.build_space(gram, aux)
    eta = krein.metric_operator(space)
    reduced, eta_r = krein.strip_nulls(space, eta, tol_null=tol_null)
    new_aux, eta1 = krein.krein_normalize(reduced, eta_r, tol_null=tol_null)
    n = eta1.dim
    sq = float(np.max(np.abs(eta1.eta @ eta1.eta - np.eye(n)), initial=0.0))
    rec = krein.reconstruction_error(reduced, eta1, new_aux)
    return reduced, eta1, sq, rec


def suite_krein(cfg: RunConfig, rec: Recorder, rng):
    def two_step_runs():
        worst = 0.0
        ok = True
        for i in range(100):
            rank = 8 if i % 4 else int(rng.integers(2, 8))
            g = random_gram(rng, 8, rank)
            _, eta1, sq, err = two_step(g, tol_null=cfg.tol_null)
            ok &= krein.is_maximal(eta1) and eta1.is_krein
            worst = max(worst, sq, err)
        return ok and worst < cfg.tol_eq, worst, cfg.tol_eq

    def inertia():
        bad = 0
        for _ in range(20):
            g = random_gram(rng, 6, int(rng.integers(1, 7)))
            s = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
            bad += krein.signature(g, cfg.tol_null) != krein.signature(s.conj().T @ g @ s, cfg.tol_null)
        return bad == 0, float(bad), 0.0

    def admissibility():
        g = random_gram(rng, 8)
        space = krein.build_space(g)
        c = krein.admissibility_constant(space)
        # |<x,y>|^2 <= C (x,x)(y,y) must be sharp: attained at the top singular pair
        u, s, vh = np.linalg.svd(g)
        x, y = u[:, 0], vh[0].conj()
        ratio = abs(np.vdot(x, g @ y)) ** 2 / (np.vdot(x, x).real * np.vdot(y, y).real)
        return abs(ratio - c) <= cfg.tol_eq * c, abs(ratio - c) / c, cfg.tol_eq

    rec.run("krein.two_step_random_8x8", two_step_runs)
    rec.run("krein.sylvester_inertia", inertia)
    rec.run("krein.admissibility_sharp", admissibility)


def fock_wightman(lattice, n_max=2, d_max=4):
    fock = fk.build_fock(lattice, n_max)
    return fock, fk.wightman_from_fock(fock, fk.letters_for_modes(fock), d_max)


def permute_letters(W: borchers.WightmanFunctional, perm):
    arrays = []
    for n, t in enumerate(W.W):
        for ax in range(n):
            t = np.take(t, perm, axis=ax)
        arrays.append(t)
    return borchers.WightmanFunctional.from_arrays(W.b, arrays, hermitian=W.hermitian)


def suite_gns(cfg: RunConfig, rec: Recorder, rng):
    lat = fk.MomentumLattice.from_integer_modes(cfg.L, [(0, 0, 1)])
    _, W = fock_wightman(lat)
    G = borchers.gns_construct(W, tol_null=cfg.tol_null, tol_eq=cfg.tol_eq)
    one = [i for i, w in enumerate(G.representatives) if len(w) == 1]

    def one_particle():
        block = G.space.gram[np.ix_(one, one)]
        dev = float(np.max(np.abs(block + np.diag([1.0, -1, -1, -1]))))
        return dev < cfg.tol_eq and len(one) == 4, dev, cfg.tol_eq

    def field_w2():
        vac = G.vacuum
        dev = 0.0
        for j in range(W.b):
            bra = G.coords((j,))
            for k in range(W.b):
                v = G.inner(bra, borchers.field_action(G, k, vac))
                dev = max(dev, abs(v - W.W[2][j, k]))
        return dev < cfg.tol_eq, dev, cfg.tol_eq

    def dominance():
        weights = krein.normalized_weights(W)
        table = krein.seminorm_dominance(W, weights)
        perm = rng.permutation(W.b)
        Wp = permute_letters(W, perm)
        tp_ = krein.seminorm_dominance(Wp, krein.normalized_weights(Wp))
        stable = table.admissible == tp_.admissible
        drift = max(abs(table.constants[k] - tp_.constants[k]) for k in table.constants)
        return table.admissible and stable and drift < cfg.tol_eq, table.max_constant(), 1.0

    rec.run("gns.hermiticity", lambda: (borchers.hermiticity_check(W, cfg.tol_eq), 0.0, cfg.tol_eq))
    rec.run("gns.one_particle_gram", one_particle)
    rec.run("gns.field_action_reproduces_W2", field_w2)
    rec.run("gns.seminorm_dominance", dominance)


def _lattices(cfg):
    lats = dict(cfg.named_lattices())
    lats["cube"] = cfg.cube_lattice()
    return lats


def _test_functions(cfg):
    tfs = [s.build() for s in cfg.test_functions]
    if len(tfs) < 2:
        tfs += [gaussian((0, 0, 0, 0), 1.0), gaussian((0.2, 0.1, -0.3, 0.4), 1.0, (0.3, 1, 0.7, -0.5))]
    return tfs[0], tfs[1]


def suite_fock(cfg: RunConfig, rec: Recorder, rng):
    f, g = _test_functions(cfg)
    for name, lat in _lattices(cfg).items():
        def spectral(lat=lat):
            fock = fk.build_fock(lat, cfg.n_max, cfg.dim_limit)
            ok, p2, p0 = fk.spectral_check(fock)
            ok &= fk.vacuum_uniqueness(fock)
            return ok, max(0.0, -p2, -p0), 1e-12

        rec.run(f"fock.spectral_condition.{name}", spectral)

    lat = cfg.named_lattices().get("seven") or cfg.cube_lattice()
    fock = fk.build_fock(lat, cfg.n_max, cfg.dim_limit)

    def ccr():
        worst = 0.0
        for m1, m2 in [(0, 0), (0, 1), (lat.n_modes - 1, 0)]:
            for mu, nu in itertools.product(range(4), repeat=2):
                worst = max(worst, fk.ccr_residual(fock, m1, mu, m2, nu))
        return worst <= cfg.tol_eq, worst, cfg.tol_eq

    def hermitian():
        d = max(fk.field_A(fock, mu, h).krein_hermiticity_defect() for h in (f, g) for mu in range(4))
        return d <= cfg.tol_eq, d, cfg.tol_eq

    def two_point():
        dev = 0.0
        for mu, nu in itertools.product(range(4), repeat=2):
            v = fk.two_point_vacuum(fock, fk.field_A(fock, mu, f), fk.field_A(fock, nu, g))
            dev = max(dev, abs(v - fk.mode_sum_two_point(lat, mu, nu, f, g)))
        return dev <= cfg.tol_eq, dev, cfg.tol_eq

    def translation():
        a = rng.normal(size=4)
        u = fk.translation(fock, a).matrix
        dev = 0.0
        for mu in range(4):
            lhs = u @ fk.field_A(fock, mu, f).matrix @ u.conj().T
            dev = max(dev, float(np.max(np.abs(lhs - fk.field_A(fock, mu, f.shifted(a)).matrix))))
        return dev <= cfg.tol_eq, dev, cfg.tol_eq

    rec.run("fock.ccr", ccr)
    rec.run("fock.krein_hermitian_fields", hermitian)
    rec.run("fock.two_point_matches_mode_sum", two_point)
    rec.run("fock.translation_covariance", translation)


def suite_gupta_bleuler(cfg: RunConfig, rec: Recorder, rng):
    f, _ = _test_functions(cfg)
    for name, lat in cfg.named_lattices().items():
        fock = fk.build_fock(lat, cfg.n_max, cfg.dim_limit)
        t0 = time.perf_counter()
        results, ps = gb.certify(fock, f, tol_eq=cfg.tol_eq, tol_null=cfg.tol_null, tol_obs=cfg.tol_obs)
        share = (time.perf_counter() - t0) / len(results)
        for cname, passed, residual, tol in results:
            rec.checks.append({
                "name": f"gupta_bleuler.{name}.{cname}",
                "pass": bool(passed),
                "residual": float(residual),
                "tolerance": float(tol),
                "wall_time": share,
            })

        def count(ps=ps, lat=lat):
            dims = ps.level_dims()
            expect = gb.symmetric_power_dims(3 * lat.n_modes, fock.n_max)
            quot = gb.physical_quotient(ps).level_dims
            bad = sum(dims[n] != expect[n] for n in expect)
            bad += quot.get(1, 0) != 2 * lat.n_modes if fock.n_max >= 1 else 0
            return bad == 0, float(bad), 0.0

        rec.run(f"gupta_bleuler.{name}.photon_count", count)


def suite_twopoint(cfg: RunConfig, rec: Recorder, rng, refine=None):
    f, g = _test_functions(cfg)
    quad = cfg.quadrature.build()
    gauges = cfg.gauge_parameters()

    def witness():
        sig, _ = tp.indefiniteness_witness([f], quad, tol_null=cfg.tol_null)
        return sig.as_tuple() == (3, 0, 1), float(sig.n_minus != 1), 0.0

    def gauge():
        spread, _ = tp.gauge_independence(f, g, gauges, quad)
        return spread <= cfg.tol_eq, spread, cfg.tol_eq

    def landau():
        try:
            tp.GaugeParameters(1.0, 0.0, cfg.tol_gauge)
        except LandauGauge:
            return True, 0.0, cfg.tol_gauge
        return False, 1.0, cfg.tol_gauge

    def hermiticity():
        dev = 0.0
        for gp in gauges:
            for mu, nu in [(0, 0), (0, 1), (2, 3)]:
                a = tp.two_point_A(mu, nu, f, g, gp, quad)
                b = tp.two_point_A(nu, mu, g, f, gp, quad)
                dev = max(dev, abs(a - np.conj(b)))
        return dev <= cfg.tol_eq, dev, cfg.tol_eq

    loc = cfg.locality
    lq = tp.Quadrature(loc.directions, loc.radial_points, 0.0, loc.r_max)
    x = gaussian((0, 0, 0, 0), loc.width, label="x")

    def locality():
        table = tp.commutator_locality(x, gaussian(loc.spacelike, loc.width, label="y"), lq,
                                       loc.levels, loc_tol=cfg.loc_tol)
        rec.tables["locality_spacelike"] = table.rows()
        return table.passed, table.relative[-1], cfg.loc_tol

    def control():
        table = tp.smeared_commutator_table(x, gaussian(loc.timelike, loc.width, label="y"), lq, loc.levels)
        rec.tables["locality_timelike_control"] = table.rows()
        return table.relative[-1] > 0.1, table.relative[-1], 0.1

    ref = cfg.refine
    levels = ref.levels if refine is None else refine

    def cross():
        fr = gaussian((0, 0, 0, 0), ref.width, label="f")
        gr = gaussian(ref.center, ref.width, label="g")
        base = tp.Quadrature(ref.directions, ref.radial_points, 0.0, ref.cutoff)
        lats, quads = tp.refinement_plan(ref.L0, levels, ref.cutoff, base)
        rows = tp.cross_module_table(fr, gr, lats, quads)
        rec.tables["cross_module"] = [
            {k: (v if not isinstance(v, complex) else [v.real, v.imag]) for k, v in r.items()} for r in rows
        ]
        final = rows[-1]["relative_gap"]
        return tp.gaps_shrink(rows) and final <= 1e-2, final, 1e-2

    rec.run("twopoint.indefiniteness_witness", witness)
    rec.run("twopoint.gauge_independence", gauge)
    rec.run("twopoint.landau_rejected", landau)
    rec.run("twopoint.hermiticity", hermiticity)
    rec.run("twopoint.locality_spacelike", locality)
    rec.run("twopoint.locality_timelike_control", control)
    rec.run("twopoint.cross_module", cross)


SUITES = {
    "krein": suite_krein,
    "gns": suite_gns,
    "fock": suite_fock,
    "gupta-bleuler": suite_gupta_bleuler,
    "twopoint": suite_twopoint,
}
