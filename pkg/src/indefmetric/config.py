"""Run configuration: INI file with sections, validated into frozen dataclasses.

Every validation error raises :class:`ConfigInvalid` whose ``path`` names the
offending field as ``section.key``.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigInvalid

ENV_PREFIX = "INDEFMETRIC_"


@dataclass(frozen=True)
class TestFunctionSpec:
    name: str
    center: tuple
    width: float
    components: tuple

    __test__ = False

    def build(self):
        from .testfunc import gaussian

        return gaussian(self.center, self.width, self.components, label=self.name)


@dataclass(frozen=True)
class QuadratureSpec:
    directions: int = 16
    radial_points: int = 64
    r_min: float = 0.1
    r_max: float = 10.0
    h: float = 1e-4

    def build(self, rich_tol=1e-4):
        from .twopoint import Quadrature

        return Quadrature(self.directions, self.radial_points, self.r_min, self.r_max, self.h, rich_tol)


@dataclass(frozen=True)
class LocalitySpec:
    width: float = 1.0
    spacelike: tuple = (0.5, 0.0, 0.0, 6.5)
    timelike: tuple = (3.0, 0.0, 0.0, 0.5)
    directions: int = 4
    radial_points: int = 12
    r_max: float = 8.0
    levels: int = 3


@dataclass(frozen=True)
class RefineSpec:
    L0: float = 8.0
    cutoff: float = 16.0
    width: float = 0.5
    center: tuple = (0.1, 0.2, -0.1, 0.3)
    directions: int = 4
    radial_points: int = 8
    levels: int = 3


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    L: float = 2 * np.pi
    k_max: int = 1
    lattices: dict = field(default_factory=dict)
    n_max: int = 2
    dim_limit: int = 20000
    tol_eq: float = 1e-10
    tol_null: float = 1e-8
    tol_obs: float = 1e-8
    tol_gauge: float = 1e-6
    loc_tol: float = 1e-3
    gauges: tuple = ((0.0, 0.0),)
    quadrature: QuadratureSpec = QuadratureSpec()
    test_functions: tuple = ()
    locality: LocalitySpec = LocalitySpec()
    refine: RefineSpec = RefineSpec()
    source: str = "<defaults>"

    def cube_lattice(self):
        from .fock import MomentumLattice

        return MomentumLattice.cube(self.L, self.k_max)

    def named_lattices(self):
        from .fock import MomentumLattice

        return {k: MomentumLattice.from_integer_modes(self.L, v) for k, v in self.lattices.items()}

    def gauge_parameters(self):
        from .twopoint import GaugeParameters

        return [GaugeParameters(lam, rho, self.tol_gauge) for lam, rho in self.gauges]


def default_config_path() -> Path:
    return Path(str(resources.files("indefmetric") / "data" / "default.ini"))


def _floats(text, path, n=None):
    try:
        vals = tuple(float(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise ConfigInvalid(path, f"expected numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise ConfigInvalid(path, f"expected {n} numbers, got {len(vals)}")
    if not all(np.isfinite(vals)):
        raise ConfigInvalid(path, "values must be finite")
    return vals


class _Reader:
    def __init__(self, parser):
        self.p = parser

    def raw(self, section, key, default):
        if self.p.has_option(section, key):
            return self.p.get(section, key)
        return None if default is None else str(default)

    def num(self, section, key, default, kind=float, positive=False, minimum=None):
        path = f"{section}.{key}"
        text = self.raw(section, key, default)
        if text is None:
            raise ConfigInvalid(path, "missing required value")
        try:
            v = kind(text) if kind is float else int(text, 0)
        except ValueError:
            raise ConfigInvalid(path, f"expected {kind.__name__}, got {text!r}") from None
        if kind is float and not np.isfinite(v):
            raise ConfigInvalid(path, "must be finite")
        if positive and v <= 0:
            raise ConfigInvalid(path, f"must be positive, got {v}")
        if minimum is not None and v < minimum:
            raise ConfigInvalid(path, f"must be >= {minimum}, got {v}")
        return v

    def vec(self, section, key, default, n=None):
        text = self.raw(section, key, " ".join(map(str, default)))
        return _floats(text, f"{section}.{key}", n)


def _modes(text, path):
    rows = [r for r in text.split(";") if r.strip()]
    out = []
    for r in rows:
        try:
            v = [int(x) for x in r.split()]
        except ValueError:
            raise ConfigInvalid(path, f"mode {r.strip()!r} is not three integers") from None
        if len(v) != 3:
            raise ConfigInvalid(path, f"mode {r.strip()!r} is not three integers")
        if v == [0, 0, 0]:
            raise ConfigInvalid(path, "the zero mode is not allowed")
        out.append(tuple(v))
    if not out:
        raise ConfigInvalid(path, "empty mode list")
    if len(set(out)) != len(out):
        raise ConfigInvalid(path, "duplicate modes")
    return tuple(out)


def _apply_env(parser, environ):
    for name, value in environ.items():
        if not name.startswith(ENV_PREFIX) or "__" not in name[len(ENV_PREFIX):]:
            continue
        sec, key = name[len(ENV_PREFIX):].split("__", 1)
        sec = sec.lower()
        match = [s for s in parser.sections() if s.replace(".", "_").lower() == sec]
        target = match[0] if match else sec
        if not parser.has_section(target):
            parser.add_section(target)
        parser.set(target, key.lower(), value)


def parse_config(text: str, source="<string>", environ=None) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str.lower
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigInvalid(source, f"unreadable config: {exc}") from None
    _apply_env(parser, os.environ if environ is None else environ)
    r = _Reader(parser)
    d = RunConfig()

    tols = {}
    for key in ("tol_eq", "tol_null", "tol_obs", "tol_gauge", "loc_tol"):
        tols[key] = r.num("tolerances", key, getattr(d, key), positive=True)

    lams = r.vec("gauge", "lambda", [0.0])
    for lam in lams:
        if abs(lam - 1.0) < tols["tol_gauge"]:
            raise ConfigInvalid("gauge.lambda", f"lambda = {lam} is the excluded Landau gauge")
    rhos = r.vec("gauge", "rho", [0.0] * len(lams))
    if len(rhos) != len(lams):
        raise ConfigInvalid("gauge.rho", f"{len(rhos)} values for {len(lams)} lambdas")

    lattices = {}
    if parser.has_section("lattices"):
        for key in parser.options("lattices"):
            lattices[key] = _modes(parser.get("lattices", key), f"lattices.{key}")

    tfs = []
    for sec in parser.sections():
        if sec.startswith("testfunction."):
            name = sec.split(".", 1)[1]
            tfs.append(TestFunctionSpec(
                name,
                r.vec(sec, "center", (0, 0, 0, 0), 4),
                r.num(sec, "width", 1.0, positive=True),
                r.vec(sec, "components", (1, 1, 1, 1), 4),
            ))

    qd = QuadratureSpec()
    quad = QuadratureSpec(
        r.num("quadrature", "directions", qd.directions, int, minimum=1),
        r.num("quadrature", "radial_points", qd.radial_points, int, minimum=1),
        r.num("quadrature", "r_min", qd.r_min, minimum=0.0),
        r.num("quadrature", "r_max", qd.r_max, positive=True),
        r.num("quadrature", "h", qd.h, positive=True),
    )
    if quad.r_max <= quad.r_min:
        raise ConfigInvalid("quadrature.r_max", "must exceed quadrature.r_min")

    ld = LocalitySpec()
    loc = LocalitySpec(
        r.num("locality", "width", ld.width, positive=True),
        r.vec("locality", "spacelike", ld.spacelike, 4),
        r.vec("locality", "timelike", ld.timelike, 4),
        r.num("locality", "directions", ld.directions, int, minimum=1),
        r.num("locality", "radial_points", ld.radial_points, int, minimum=1),
        r.num("locality", "r_max", ld.r_max, positive=True),
        r.num("locality", "levels", ld.levels, int, minimum=2),
    )
    rd = RefineSpec()
    ref = RefineSpec(
        r.num("refine", "l0", rd.L0, positive=True),
        r.num("refine", "cutoff", rd.cutoff, positive=True),
        r.num("refine", "width", rd.width, positive=True),
        r.vec("refine", "center", rd.center, 4),
        r.num("refine", "directions", rd.directions, int, minimum=1),
        r.num("refine", "radial_points", rd.radial_points, int, minimum=1),
        r.num("refine", "levels", rd.levels, int, minimum=2),
    )

    return RunConfig(
        seed=r.num("run", "seed", d.seed, int, minimum=0),
        L=r.num("lattice", "l", d.L, positive=True),
        k_max=r.num("lattice", "k_max", d.k_max, int, minimum=1),
        lattices=lattices,
        n_max=r.num("fock", "n_max", d.n_max, int, minimum=0),
        dim_limit=r.num("fock", "dim_limit", d.dim_limit, int, minimum=1),
        gauges=tuple(zip(lams, rhos)),
        quadrature=quad,
        test_functions=tuple(tfs),
        locality=loc,
        refine=ref,
        source=source,
        **tols,
    )


def load_config(path=None, environ=None) -> RunConfig:
    path = default_config_path() if path is None else Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigInvalid(str(path), f"cannot read config: {exc.strerror}") from None
    return parse_config(text, str(path), environ)
