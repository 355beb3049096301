"""Acceptance criteria 1-10, one pass/fail line each.

Run directly (``python3 tests/test_acceptance.py``) or through pytest, which
echoes the lines in its terminal summary.
"""

import time

import numpy as np
import pytest

from indefmetric import borchers as bg, fock as fk, gupta_bleuler as gb, krein, twopoint as tp
from indefmetric.config import load_config
from indefmetric.errors import LandauGauge
from indefmetric.suites import fock_wightman, permute_letters, random_gram, two_step
from indefmetric.testfunc import gaussian

LINES = []
CFG = load_config(environ={})


def report(n, title, passed, detail):
    line = f"criterion {n:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    LINES.append(line)
    print(line)
    return passed


def test_criterion_01_indefiniteness():
    t0 = time.perf_counter()
    f = gaussian((0, 0, 0, 0), 1.0)
    sig, gram = tp.indefiniteness_witness([f], CFG.quadrature.build())
    oracle = np.linalg.eigvalsh(gram)
    dt = time.perf_counter() - t0
    ok = sig.as_tuple() == (3, 0, 1) and int(np.sum(oracle < 0)) == 1 and dt < 1.0
    assert report(1, "indefiniteness witness", ok, f"signature {sig.as_tuple()}, {dt:.2f}s (< 1s)")


def test_criterion_02_gupta_bleuler_conditions():
    t0 = time.perf_counter()
    f = CFG.test_functions[0].build()
    worst = {}
    ok = True
    for name, lat in CFG.named_lattices().items():
        results, _ = gb.certify(fk.build_fock(lat, 2), f)
        for cname, passed, residual, tol in results:
            ok &= passed
            key = cname.split("_")[0]
            worst[key] = max(worst.get(key, 0.0), residual)
    dt = time.perf_counter() - t0
    ok &= dt < 30 and set(CFG.lattices) == {"single", "seven"}
    detail = ", ".join(f"{k} {v:.1e}" for k, v in sorted(worst.items()))
    assert report(2, "Gupta-Bleuler conditions 1-5 (1- and 7-mode, n_max=2)", ok, f"{detail}; {dt:.1f}s (< 30s)")


def test_criterion_03_photon_count():
    lat = CFG.named_lattices()["single"]
    fock = fk.build_fock(lat, 2)
    ps = gb.physical_subspace(fock)
    dims = ps.level_dims()
    # oracle: brute-force joint kernel by dense SVD on the whole Fock space
    stacked = np.vstack([b.matrix for b in fk.subsidiary_operators(fock)])
    s = np.linalg.svd(stacked, compute_uv=False)
    brute = fock.dim - int(np.sum(s > 1e-8))
    quot = gb.physical_quotient(ps).level_dims
    seven = CFG.named_lattices()["seven"]
    q7 = gb.physical_quotient(gb.physical_subspace(fk.build_fock(seven, 2))).level_dims
    ok = (dims == {0: 1, 1: 3, 2: 6} == gb.symmetric_power_dims(3, 2) and brute == 10
          and quot[1] == 2 and q7[1] == 2 * seven.n_modes)
    assert report(3, "physical photon count", ok,
                  f"H' levels {list(dims.values())} (brute {brute}), quotient/mode 2 (1-mode {quot[1]}, 7-mode {q7[1]}/7)")


def test_criterion_04_krein_mechanics():
    t0 = time.perf_counter()
    rng = np.random.default_rng(CFG.seed)
    worst_sq = worst_rec = 0.0
    maximal = True
    for i in range(100):
        g = random_gram(rng, 8, 8 if i % 4 else int(rng.integers(2, 8)))
        _, eta1, sq, err = two_step(g)
        worst_sq, worst_rec = max(worst_sq, sq), max(worst_rec, err)
        maximal &= krein.is_maximal(eta1)
    dt = time.perf_counter() - t0
    ok = worst_sq < 1e-10 and worst_rec < 1e-10 and maximal and dt < 5
    assert report(4, "Krein two-step on 100 random 8x8", ok,
                  f"|eta1^2-1| {worst_sq:.1e}, reconstruction {worst_rec:.1e}, maximal {maximal}, {dt:.2f}s (< 5s)")


def test_criterion_05_seminorm_dominance():
    t0 = time.perf_counter()
    _, W = fock_wightman(CFG.named_lattices()["single"], n_max=2, d_max=4)
    table = krein.seminorm_dominance(W, krein.normalized_weights(W))
    rng = np.random.default_rng(CFG.seed)
    stable = True
    for _ in range(5):
        Wp = permute_letters(W, rng.permutation(W.b))
        stable &= krein.seminorm_dominance(Wp, krein.normalized_weights(Wp)).admissible == table.admissible
    dt = time.perf_counter() - t0
    ok = table.admissible and stable and dt < 10
    assert report(5, "seminorm dominance (d_max=4)", ok,
                  f"max c(n,m) {table.max_constant():.6f} <= 1, permutation-stable {stable}, {dt:.2f}s (< 10s)")


def test_criterion_06_gns_reconstruction():
    _, W = fock_wightman(CFG.named_lattices()["single"], n_max=2, d_max=4)
    G = bg.gns_construct(W)
    one = [i for i, w in enumerate(G.representatives) if len(w) == 1]
    dev = float(np.max(np.abs(G.space.gram[np.ix_(one, one)] + np.diag([1.0, -1, -1, -1]))))
    w2 = 0.0
    for j in range(W.b):
        for k in range(W.b):
            v = G.inner(G.vacuum, bg.field_action(G, j, bg.field_action(G, k, G.vacuum)))
            w2 = max(w2, abs(v - W.W[2][j, k]))
    ok = dev < 1e-10 and w2 < 1e-10
    assert report(6, "GNS reconstruction", ok, f"one-particle gram vs -g {dev:.1e}, W2 from field_action {w2:.1e}")


def test_criterion_07_gauge_independence():
    f = gaussian((0, 0, 0, 0), 1.0)
    g = gaussian((0.2, 0.1, -0.3, 0.4), 1.0)
    gauges = [tp.GaugeParameters(0.0, 0.0), tp.GaugeParameters(0.5, 2.0), tp.GaugeParameters(-3.0, 1.0)]
    spread, values = tp.gauge_independence(f, g, gauges, CFG.quadrature.build())
    n_pairs = len({k[:2] for k in values})
    try:
        tp.GaugeParameters(1.0, 0.0)
        landau = False
    except LandauGauge:
        landau = True
    ok = spread <= 1e-10 and n_pairs == 36 and landau
    assert report(7, "F-sector gauge independence", ok,
                  f"spread {spread:.1e} over {n_pairs} index pairs, Landau rejected {landau}")


def test_criterion_08_locality():
    t0 = time.perf_counter()
    loc = CFG.locality
    q = tp.Quadrature(loc.directions, loc.radial_points, 0.0, loc.r_max)
    x = gaussian((0, 0, 0, 0), loc.width)
    y = gaussian(loc.spacelike, loc.width)
    margin = np.linalg.norm(np.asarray(loc.spacelike[1:])) - abs(loc.spacelike[0])
    table = tp.commutator_locality(x, y, q, levels=3, loc_tol=1e-3)
    control = tp.smeared_commutator_table(x, gaussian(loc.timelike, loc.width), q, levels=3)
    dt = time.perf_counter() - t0
    ok = (abs(margin - 6 * loc.width) < 1e-12 and table.passed and table.relative[-1] <= 1e-3
          and control.relative[-1] > 0.1 and dt < 60)
    rel = ", ".join(f"{r:.1e}" for r in table.relative)
    assert report(8, "locality convergence (margin 6 sigma)", ok,
                  f"|C|/scale {rel}; control {control.relative[-1]:.2f} > 0.1; {dt:.2f}s (< 60s)")


def test_criterion_09_spectral_condition():
    worst_p2 = worst_p0 = np.inf
    ok = True
    lats = dict(CFG.named_lattices(), cube=CFG.cube_lattice())
    for lat in lats.values():
        fock = fk.build_fock(lat, CFG.n_max)
        passed, p2, p0 = fk.spectral_check(fock, tol=1e-12)
        ok &= passed
        worst_p2, worst_p0 = min(worst_p2, p2), min(worst_p0, p0)
    assert report(9, "spectral condition on shipped lattices", ok,
                  f"{len(lats)} lattices, min p.p {worst_p2:.1e} >= -1e-12, min p0 {worst_p0:.1e} >= 0")


def test_criterion_10_cross_module():
    ref = CFG.refine
    f = gaussian((0, 0, 0, 0), ref.width)
    g = gaussian(ref.center, ref.width)
    base = tp.Quadrature(ref.directions, ref.radial_points, 0.0, ref.cutoff)
    lats, quads = tp.refinement_plan(ref.L0, 3, ref.cutoff, base)
    rows = tp.cross_module_table(f, g, lats, quads)
    gaps = [r["relative_gap"] for r in rows]
    ok = tp.gaps_shrink(rows) and gaps[-1] <= 1e-2
    table = ", ".join(f"{r['modes']} modes/{r['nodes']} nodes {r['relative_gap']:.1e}" for r in rows)
    assert report(10, "cross-module oracle", ok, table)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
