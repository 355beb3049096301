"""Test functions described by their momentum-space amplitudes.

Conventions used throughout the package:

* Minkowski product ``p.x = p0*x0 - p_vec.x_vec`` with ``g = diag(+1,-1,-1,-1)``.
* The amplitude of a test function ``f`` is ``f^(p) = \\int f(x) exp(i p.x) d^4x``.
  For real ``f`` this is the one-particle wave function of ``A(f) Omega``.
* A test function carries a scalar profile and a component vector ``c_mu``;
  the component-``mu`` amplitude is ``c_mu * profile(p)``.  Field-strength and
  divergence smearings use the scalar profile only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ModeMismatch

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])


def minkowski_dot(p0, p, a):
    """``p.a`` for on-grid momenta ``(p0, p)`` and a 4-vector ``a``."""
    a = np.asarray(a, dtype=float)
    return p0 * a[0] - p @ a[1:]


@dataclass(frozen=True)
class TestFunction:
    profile: Callable[[np.ndarray, np.ndarray], np.ndarray]
    components: np.ndarray = field(default_factory=lambda: np.ones(4, dtype=complex))
    center: np.ndarray | None = None
    width: float | None = None
    real: bool = True
    label: str = "f"
    # fixed per-mode scalar amplitudes for lattice-only test functions
    table: np.ndarray | None = field(default=None, compare=False)
    lattice_key: tuple | None = field(default=None, compare=False)

    __test__ = False  # keep pytest from collecting this class

    def scalar(self, p0, p):
        if self.table is not None:
            raise ModeMismatch(f"{self.label} is defined on a lattice only")
        return np.asarray(self.profile(np.asarray(p0, float), np.asarray(p, float)), dtype=complex)

    def amplitude(self, p0, p):
        """Component amplitudes, shape ``p0.shape + (4,)``."""
        return self.scalar(p0, p)[..., None] * self.components

    def on_lattice(self, lattice):
        """Per-mode amplitudes ``(n_modes, 4)`` evaluated on the massless shell."""
        if self.table is not None:
            if self.lattice_key != lattice.key:
                raise ModeMismatch(f"{self.label} was built for a different lattice")
            return self.table[:, None] * self.components
        return self.amplitude(lattice.omega, lattice.modes)

    def scalar_on_lattice(self, lattice):
        if self.table is not None:
            if self.lattice_key != lattice.key:
                raise ModeMismatch(f"{self.label} was built for a different lattice")
            return self.table
        return self.scalar(lattice.omega, lattice.modes)

    def shifted(self, a, lattice=None):
        """Translate by the 4-vector ``a``: ``f_a(x) = f(x - a)``.

        Lattice-only test functions need the ``lattice`` they live on.
        """
        a = np.asarray(a, dtype=float)
        if self.table is not None:
            if lattice is None or lattice.key != self.lattice_key:
                raise ModeMismatch(f"{self.label}: shifting a lattice table needs its lattice")
            phase = np.exp(1j * minkowski_dot(lattice.omega, lattice.modes, a))
            return TestFunction(self.profile, self.components, None, None, self.real,
                                self.label, self.table * phase, self.lattice_key)
        base = self.profile
        center = None if self.center is None else self.center + a

        def prof(p0, p):
            return np.exp(1j * minkowski_dot(p0, p, a)) * base(p0, p)

        return TestFunction(prof, self.components, center, self.width, self.real, self.label)

    def with_components(self, components):
        return TestFunction(
            self.profile, np.asarray(components, dtype=complex), self.center, self.width,
            self.real, self.label, self.table, self.lattice_key,
        )


def gaussian(center=(0.0, 0.0, 0.0, 0.0), width=1.0, components=(1, 1, 1, 1), label="gauss"):
    """Normalised real Gaussian ``f(x) ~ exp(-|x - center|^2 / width^2)`` (Euclidean norm).

    ``width`` is the 1/e radius.  Amplitude:
    ``exp(-width^2 (p0^2 + |p|^2) / 4) * exp(i p.center)``.
    """
    center = np.asarray(center, dtype=float)
    if center.shape != (4,):
        raise ValueError("center must be a 4-vector")
    if width <= 0:
        raise ValueError("width must be positive")
    s2 = float(width) ** 2

    def prof(p0, p):
        r2 = p0 * p0 + np.sum(p * p, axis=-1)
        return np.exp(-0.25 * s2 * r2 + 1j * minkowski_dot(p0, p, center))

    return TestFunction(prof, np.asarray(components, dtype=complex), center, float(width), True, label)


def radial(func, components=(1, 1, 1, 1), label="radial"):
    """Amplitude depending on ``|p_vec|`` only (independent of ``p0``)."""

    def prof(p0, p):
        r = np.sqrt(np.sum(p * p, axis=-1))
        return np.asarray(func(r), dtype=complex) * np.ones_like(np.asarray(p0, float))

    return TestFunction(prof, np.asarray(components, dtype=complex), label=label)


def shell(r_lo, r_hi, components=(1, 1, 1, 1), label="shell"):
    """Indicator of ``r_lo <= |p| < r_hi``."""
    return radial(lambda r: ((r >= r_lo) & (r < r_hi)).astype(float), components, label)


def from_callable(func, components=(1, 1, 1, 1), real=False, label="custom"):
    """Wrap an arbitrary scalar amplitude ``func(p0, p)``."""
    return TestFunction(func, np.asarray(components, dtype=complex), real=real, label=label)


def lattice_table(lattice, amplitudes, components=(1, 1, 1, 1), label="table"):
    """Test function given only by per-mode scalar amplitudes ``(n_modes,)``."""
    amplitudes = np.asarray(amplitudes, dtype=complex)
    if amplitudes.shape != (lattice.n_modes,):
        raise ModeMismatch(
            f"amplitude table has shape {amplitudes.shape}, lattice has {lattice.n_modes} modes"
        )

    def prof(p0, p):
        raise ModeMismatch(f"{label} is defined on a lattice only")

    return TestFunction(prof, np.asarray(components, dtype=complex), real=False, label=label,
                        table=amplitudes, lattice_key=lattice.key)


def mode_indicator(lattice, mode, amplitude=1.0, components=(1, 1, 1, 1), label=None):
    """Scalar amplitude ``amplitude`` on one lattice mode, zero elsewhere."""
    t = np.zeros(lattice.n_modes, dtype=complex)
    t[mode] = amplitude
    return lattice_table(lattice, t, components, label or f"mode{mode}")
