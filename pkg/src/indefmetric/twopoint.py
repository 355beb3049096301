"""Smeared two-point functions of the free vector potential for gauge parameters (lambda, rho).

Momentum-space form used here, with ``p_mu`` covariant and ``p^0 > 0``:

    <A_mu(f) A_nu(g)> = int dmu(p) conj(f_mu) g_nu (-g_{mu nu} - rho p_mu p_nu)
                        + lambda/(1 - lambda) int d^4p theta(p0) delta'(p^2) conj(f_mu) g_nu (-p_mu p_nu)

where ``dmu(p) = d^3p / (2 omega (2 pi)^3)`` on the forward massless shell.
The ``delta'`` term is evaluated as a derivative in the shell mass:
``int theta(p0) delta'(p^2) X = -d/dm^2 int dmu_m X`` at ``m^2 = 0``, by central
differences with a halving guard.

Any pair of one-particle wave functions ``(psi, chi)`` is handled the same
way; field-strength smearings just use ``psi_alpha = i (p_mu d_{alpha nu} - p_nu d_{alpha mu}) f^``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .errors import GridMismatch, LandauGauge, ModeMismatch, NotSpacelike, StepTooLarge
from .krein import TOL_NULL, signature
from .testfunc import METRIC, TestFunction

TOL_GAUGE = 1e-6
RICH_TOL = 1e-4
_METRIC_DIAG = np.diag(METRIC)
_NORM = 1.0 / (2.0 * (2.0 * np.pi) ** 3)

__all__ = [
    "GaugeParameters",
    "Quadrature",
    "FEYNMAN",
    "dplus",
    "eplus",
    "two_point_A",
    "two_point_F",
    "two_point_wavefunctions",
    "gauge_independence",
    "f_index_pairs",
    "indefiniteness_witness",
    "LocalityTable",
    "smeared_commutator_table",
    "commutator_locality",
    "cross_module_table",
    "refinement_plan",
    "gaps_shrink",
]


@dataclass(frozen=True)
class GaugeParameters:
    lam: float = 0.0
    rho: float = 0.0
    tol_gauge: float = field(default=TOL_GAUGE, compare=False)

    def __post_init__(self):
        if abs(self.lam - 1.0) < self.tol_gauge:
            raise LandauGauge(f"lambda = {self.lam} is within {self.tol_gauge:g} of the Landau value 1")

    @property
    def e_coefficient(self) -> float:
        return self.lam / (1.0 - self.lam)


FEYNMAN = GaugeParameters(0.0, 0.0)


@dataclass(frozen=True)
class Quadrature:
    """Product rule on ``R^3``: Gauss-Legendre in ``cos(theta)`` x uniform ``phi`` x Gauss-Legendre radius.

    ``n_phi = 2 * n_theta`` (even), so the direction set is closed under ``p -> -p``.
    """

    n_theta: int = 16
    radial_points: int = 64
    r_min: float = 0.1
    r_max: float = 10.0
    h: float = 1e-4
    rich_tol: float = RICH_TOL

    def __post_init__(self):
        if self.n_theta < 1 or self.radial_points < 1:
            raise GridMismatch("quadrature needs at least one node per direction")
        if not 0 <= self.r_min < self.r_max:
            raise GridMismatch("need 0 <= r_min < r_max")
        if self.h <= 0:
            raise GridMismatch("mass step must be positive")

    @property
    def n_phi(self) -> int:
        return 2 * self.n_theta

    @property
    def size(self) -> int:
        return self.n_theta * self.n_phi * self.radial_points

    def refined(self, level: int = 1) -> "Quadrature":
        f = 2**level
        return replace(self, n_theta=self.n_theta * f, radial_points=self.radial_points * f)

    @cached_property
    def directions(self):
        x, wx = np.polynomial.legendre.leggauss(self.n_theta)
        phi = 2 * np.pi * np.arange(self.n_phi) / self.n_phi
        st = np.sqrt(1 - x**2)
        d = np.stack(
            [np.outer(st, np.cos(phi)), np.outer(st, np.sin(phi)), np.outer(x, np.ones_like(phi))],
            axis=-1,
        ).reshape(-1, 3)
        w = np.outer(wx, np.full(self.n_phi, 2 * np.pi / self.n_phi)).reshape(-1)
        return d, w

    @cached_property
    def radii(self):
        x, wx = np.polynomial.legendre.leggauss(self.radial_points)
        half = 0.5 * (self.r_max - self.r_min)
        return self.r_min + half * (x + 1), half * wx

    @cached_property
    def points(self):
        """Momenta ``(N, 3)`` and weights for ``int d^3p``."""
        d, wd = self.directions
        r, wr = self.radii
        p = (r[:, None, None] * d[None, :, :]).reshape(-1, 3)
        w = (wr[:, None] * r[:, None] ** 2 * wd[None, :]).reshape(-1)
        return p, w


def _grid(quad: Quadrature, m2: float):
    p, w = quad.points
    r2 = np.sum(p * p, axis=1)
    if m2 < 0 and np.min(r2) <= -m2:
        raise StepTooLarge(f"mass step {-m2:g} reaches below the radial cutoff")
    e = np.sqrt(r2 + m2)
    plow = np.column_stack([e, -p])
    return e, p, plow, w * _NORM / e


def _eval(fn, e, p, what):
    try:
        out = fn(e, p)
    except ModeMismatch as exc:
        raise GridMismatch(f"{what}: {exc}") from exc
    out = np.asarray(out, dtype=complex)
    if out.shape[0] != len(e) or not np.all(np.isfinite(out)):
        raise GridMismatch(f"{what}: amplitudes must be finite with one row per quadrature node")
    return out


def _shell_sums(psi_fn, chi_fn, quad, m2):
    """``(int dmu_m conj(psi).(-g).chi, int dmu_m conj(psi.p)(chi.p))``."""
    e, p, plow, w = _grid(quad, m2)
    psi = _eval(psi_fn, e, p, "psi")
    chi = _eval(chi_fn, e, p, "chi")
    sg = np.sum(w * np.einsum("na,a,na->n", psi.conj(), -_METRIC_DIAG, chi))
    pp = np.einsum("na,na->n", psi, plow)
    cp = np.einsum("na,na->n", chi, plow)
    sp = np.sum(w * pp.conj() * cp)
    return complex(sg), complex(sp), float(np.sum(w * np.linalg.norm(psi, axis=1) * np.linalg.norm(chi, axis=1)
                                                      * np.sum(plow * plow, axis=1)))


def _mass_derivative(fn, quad, scale):
    """Central difference ``d/dm^2 fn(m^2)`` at 0 with a step-halving guard.

    ``scale`` bounds the integrand magnitude; differences far below
    ``scale / h`` are rounding noise and do not trip the guard.
    """
    h = quad.h
    d1 = (fn(h) - fn(-h)) / (2 * h)
    d2 = (fn(h / 2) - fn(-h / 2)) / h
    floor = 1e-8 * max(scale, 1e-300) / h
    if abs(d1 - d2) > quad.rich_tol * max(abs(d2), floor):
        raise StepTooLarge(f"halving h changes the mass derivative by {abs(d1 - d2):.3e}")
    return d2


def _scalar_wavefunction(f: TestFunction):
    return lambda e, p: f.scalar(e, p)[:, None] * np.ones(4)


def dplus(f: TestFunction, g: TestFunction, quad: Quadrature = Quadrature()) -> complex:
    """``int dmu(p) conj(f^(p)) g^(p)`` over the forward massless shell (scalar profiles)."""
    e, p, _, w = _grid(quad, 0.0)
    fa = _eval(f.scalar, e, p, f.label)
    ga = _eval(g.scalar, e, p, g.label)
    return complex(np.sum(w * fa.conj() * ga))


def eplus(f: TestFunction, g: TestFunction, quad: Quadrature = Quadrature()) -> complex:
    """Smeared dipole kernel ``int d^4p theta(p0) delta'(p^2) conj(f^) g^``.

    Equals ``-d/dm^2`` of the mass-``m`` shell integral at ``m^2 = 0``.
    """

    def terms(m2):
        e, p, _, w = _grid(quad, m2)
        return w * _eval(f.scalar, e, p, f.label).conj() * _eval(g.scalar, e, p, g.label)

    scale = float(np.sum(np.abs(terms(0.0))))
    return -_mass_derivative(lambda m2: complex(np.sum(terms(m2))), quad, scale)


def two_point_wavefunctions(psi_fn, chi_fn, gp: GaugeParameters, quad: Quadrature) -> complex:
    """``<Omega, X(psi) X(chi) Omega>`` for wave-function callables ``(e, p) -> (N, 4)``."""
    sg, sp, scale = _shell_sums(psi_fn, chi_fn, quad, 0.0)
    value = sg - gp.rho * sp
    if gp.lam != 0.0:
        deriv = _mass_derivative(lambda m2: _shell_sums(psi_fn, chi_fn, quad, m2)[1], quad, scale)
        value += gp.e_coefficient * deriv
    return complex(value)


def _check_gauge(gp):
    if abs(gp.lam - 1.0) < gp.tol_gauge:
        raise LandauGauge(f"lambda = {gp.lam} is the excluded Landau gauge")


def _component_wavefunction(f: TestFunction, mu: int):
    def psi(e, p):
        out = np.zeros((len(e), 4), dtype=complex)
        out[:, mu] = f.amplitude(e, p)[:, mu]
        return out

    return psi


def two_point_A(mu, nu, f: TestFunction, g: TestFunction, gp: GaugeParameters = FEYNMAN,
                quad: Quadrature = Quadrature()) -> complex:
    """``<Omega, A_mu(f) A_nu(g) Omega>`` with component amplitudes of ``f`` and ``g``."""
    _check_gauge(gp)
    return two_point_wavefunctions(_component_wavefunction(f, mu), _component_wavefunction(g, nu), gp, quad)


def _f_wavefunction(f: TestFunction, mu: int, nu: int):
    def psi(e, p):
        plow = np.column_stack([e, -p])
        s = f.scalar(e, p)
        out = np.zeros((len(e), 4), dtype=complex)
        out[:, nu] += 1j * plow[:, mu] * s
        out[:, mu] -= 1j * plow[:, nu] * s
        return out

    return psi


def two_point_F(mu, nu, rho, sigma, f: TestFunction, g: TestFunction, gp: GaugeParameters = FEYNMAN,
                quad: Quadrature = Quadrature()) -> complex:
    """``<Omega, F_{mu nu}(f) F_{rho sigma}(g) Omega>`` smeared with scalar profiles."""
    _check_gauge(gp)
    if mu == nu or rho == sigma:
        return 0j
    return two_point_wavefunctions(_f_wavefunction(f, mu, nu), _f_wavefunction(g, rho, sigma), gp, quad)


def f_index_pairs():
    """The 36 ordered pairs of independent antisymmetric index pairs."""
    single = [(m, n) for m in range(4) for n in range(m + 1, 4)]
    return [(a, b) for a in single for b in single]


def gauge_independence(f, g, gauges, quad: Quadrature = Quadrature(), pairs=None):
    """Largest deviation of the F two-point values from Feynman gauge.

    Returns ``(spread, values)`` with ``values[(pair, gp)]`` the raw numbers.
    """
    gauges = list(gauges)
    for gp in gauges:
        _check_gauge(gp)
    pairs = f_index_pairs() if pairs is None else pairs
    values, spread = {}, 0.0
    for (mn, rs) in pairs:
        ref = two_point_F(*mn, *rs, f, g, FEYNMAN, quad)
        for gp in gauges:
            v = two_point_F(*mn, *rs, f, g, gp, quad)
            values[(mn, rs, gp.lam, gp.rho)] = v
            spread = max(spread, abs(v - ref))
    return spread, values


def indefiniteness_witness(profiles, quad: Quadrature = Quadrature(), components=(0, 1, 2, 3),
                           tol_null=TOL_NULL):
    """Signature of the Feynman-gauge Gram ``G[(mu, i), (nu, j)] = <A_mu(f_i) A_nu(f_j)>``.

    Each profile's scalar amplitude is used for every listed component.
    Returns ``(Signature, gram)``; the witness passes iff ``n_minus >= 1``.
    """
    e, p, _, w = _grid(quad, 0.0)
    amps = np.stack([_eval(f.scalar, e, p, f.label) for f in profiles])
    scalar = (amps.conj() * w) @ amps.T
    comps = list(components)
    gmat = np.diag(-_METRIC_DIAG[comps])
    gram = np.kron(gmat, scalar)
    gram = 0.5 * (gram + gram.conj().T)
    return signature(gram, tol_null), gram


@dataclass(frozen=True)
class LocalityTable:
    sizes: list
    magnitudes: list
    scales: list
    loc_tol: float

    @property
    def relative(self) -> list:
        return [m / s if s else float("inf") for m, s in zip(self.magnitudes, self.scales)]

    @property
    def ratios(self) -> list:
        m = self.magnitudes
        return [m[i] / m[i + 1] if m[i + 1] else float("inf") for i in range(len(m) - 1)]

    @property
    def passed(self) -> bool:
        return all(r >= 2.0 for r in self.ratios) and self.relative[-1] <= self.loc_tol

    def rows(self):
        return [
            {"nodes": n, "commutator": c, "scale": s, "relative": c / s if s else None}
            for n, c, s in zip(self.sizes, self.magnitudes, self.scales)
        ]


def _separation(f, g):
    if f.center is None or g.center is None or f.width is None or g.width is None:
        raise NotSpacelike("locality needs Gaussian test functions with centers and widths")
    d = np.asarray(g.center) - np.asarray(f.center)
    return float(np.linalg.norm(d[1:]) - abs(d[0])), max(f.width, g.width)


def smeared_commutator_table(f, g, quad: Quadrature = Quadrature(), levels=3, mu=1, nu=1,
                             loc_tol=1e-3) -> LocalityTable:
    """``|<[A_mu(f), A_nu(g)]>|`` in Feynman gauge at successive quadrature doublings."""
    sizes, mags, scales = [], [], []
    for lev in range(levels):
        q = quad.refined(lev)
        a = dplus(f, g, q)
        c = -METRIC[mu, nu] * (a - dplus(g, f, q))
        sizes.append(q.size)
        mags.append(abs(c))
        scales.append(abs(a))
    return LocalityTable(sizes, mags, scales, loc_tol)


def commutator_locality(f, g, quad: Quadrature = Quadrature(), levels=3, mu=1, nu=1,
                        loc_tol=1e-3, min_margin=4.0) -> LocalityTable:
    """Decay table of the smeared commutator for spacelike-separated Gaussians.

    Requires ``|x - y| - |x0 - y0| > min_margin * width``.
    """
    margin, width = _separation(f, g)
    if margin <= min_margin * width:
        raise NotSpacelike(f"spacelike margin {margin:.3g} <= {min_margin} * width {width:.3g}")
    return smeared_commutator_table(f, g, quad, levels, mu, nu, loc_tol)


def cross_module_table(f, g, lattices, quads, mu=1, nu=1):
    """Feynman-gauge values from lattice mode sums against shell quadrature.

    Returns rows ``{"modes", "nodes", "lattice", "quadrature", "relative_gap"}``.
    """
    from .fock import mode_sum_two_point

    rows = []
    for lat, q in zip(lattices, quads):
        lv = mode_sum_two_point(lat, mu, nu, f, g)
        qv = two_point_A(mu, nu, f, g, FEYNMAN, q)
        rows.append({
            "modes": lat.n_modes,
            "nodes": q.size,
            "lattice": lv,
            "quadrature": qv,
            "relative_gap": abs(lv - qv) / abs(qv),
        })
    return rows


def refinement_plan(L0=8.0, levels=3, cutoff=16.0, quad: Quadrature | None = None):
    """Lattices and quadratures refined together: ``L`` and node counts double per level.

    Cube lattices keep every mode with ``|k_i| <= cutoff``; quadrature covers
    ``[0, cutoff]`` radially.
    """
    from .fock import MomentumLattice

    base = quad or Quadrature(n_theta=4, radial_points=8, r_min=0.0, r_max=cutoff)
    lats, quads = [], []
    for lev in range(levels):
        L = L0 * 2**lev
        lats.append(MomentumLattice.cube(L, int(np.ceil(cutoff * L / (2 * np.pi)))))
        quads.append(base.refined(lev))
    return lats, quads


def gaps_shrink(rows) -> bool:
    gaps = [r["relative_gap"] for r in rows]
    return all(b < a for a, b in zip(gaps, gaps[1:]))
