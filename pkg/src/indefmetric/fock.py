"""Mode-truncated bosonic Fock space for the vector potential in Feynman gauge.

Each lattice mode ``k`` carries four slots ``(k, mu)``.  Standard ladder
operators ``b, b^dagger`` act on occupation vectors with total occupation at
most ``n_max``; the covariant operators are

    a_mu(k)    = b_{mu k}
    a_mu(k)^+  = eta b_{mu k}^dagger eta,    eta = (-1)^{N_0}

so that ``[a_mu(k), a_nu(k')^+] = -g_{mu nu} delta_{k k'}`` below the cap and
``<psi, phi> = psi^H eta phi``.  The auxiliary scalar product is the
Euclidean one of the occupation basis.

Field operators are assembled from one-particle wave functions ``psi_alpha(k)``:

    X(psi) = sum_{k, alpha} [conj(psi_alpha(k)) a_alpha(k) + psi_alpha(k) a_alpha(k)^+] / sqrt(2 omega L^3)

A derivative ``d_mu`` multiplies the wave function by ``i k_mu`` (``k^0 = omega``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .errors import DimensionOverflow, ModeMismatch
from .testfunc import METRIC, TestFunction

DIM_LIMIT = 20_000
LORENTZ = 4

__all__ = [
    "MomentumLattice",
    "FockSpace",
    "FieldOperator",
    "build_fock",
    "ladder",
    "field_A",
    "field_F",
    "field_B",
    "maxwell_divergence",
    "field_from_wavefunction",
    "momentum_operator",
    "translation",
    "spectral_check",
    "minkowski_squares",
    "vacuum_uniqueness",
    "ccr_residual",
    "two_point_vacuum",
    "mode_sum_two_point",
    "wightman_from_fock",
    "letters_for_modes",
]


@dataclass(frozen=True)
class MomentumLattice:
    L: float
    integer_modes: np.ndarray

    def __post_init__(self):
        im = np.asarray(self.integer_modes, dtype=np.int64).reshape(-1, 3)
        if self.L <= 0:
            raise ValueError("box length must be positive")
        if len(im) == 0:
            raise ValueError("lattice needs at least one mode")
        if np.any(np.all(im == 0, axis=1)):
            raise ValueError("the zero mode is excluded")
        if len({tuple(r) for r in im.tolist()}) != len(im):
            raise ValueError("duplicate lattice modes")
        object.__setattr__(self, "integer_modes", im)

    @classmethod
    def cube(cls, L, k_max):
        """All ``k = (2 pi / L) n`` with ``0 < max|n_i| <= k_max``."""
        r = np.arange(-k_max, k_max + 1)
        n = np.stack(np.meshgrid(r, r, r, indexing="ij"), axis=-1).reshape(-1, 3)
        n = n[np.any(n != 0, axis=1)]
        return cls(float(L), n)

    @classmethod
    def from_integer_modes(cls, L, modes):
        return cls(float(L), np.asarray(modes))

    @property
    def n_modes(self) -> int:
        return len(self.integer_modes)

    @cached_property
    def modes(self) -> np.ndarray:
        return (2 * np.pi / self.L) * self.integer_modes.astype(float)

    @cached_property
    def omega(self) -> np.ndarray:
        return np.sqrt(np.sum(self.modes**2, axis=1))

    @cached_property
    def four_momenta(self) -> np.ndarray:
        """Contravariant ``k^mu = (omega, k)``, shape ``(n_modes, 4)``."""
        return np.column_stack([self.omega, self.modes])

    @cached_property
    def key(self) -> tuple:
        return (self.L, tuple(map(tuple, self.integer_modes.tolist())))

    @property
    def volume(self) -> float:
        return self.L**3

    @property
    def symmetric(self) -> bool:
        """Mode set closed under ``k -> -k``."""
        s = {tuple(r) for r in self.integer_modes.tolist()}
        return all((-a, -b, -c) in s for a, b, c in s)

    def normalization(self) -> np.ndarray:
        return 1.0 / np.sqrt(2.0 * self.omega * self.volume)


class FockSpace:
    """Occupation basis over ``(mode, mu)`` slots with total occupation <= ``n_max``.

    Basis order is graded lexicographic: by total occupation, then by the
    sorted tuple of occupied slots.  Slot index is ``4 * mode + mu``.
    """

    def __init__(self, lattice: MomentumLattice, n_max: int, dim_limit: int = DIM_LIMIT):
        if n_max < 1:
            raise ValueError("n_max must be at least 1")
        n_slots = LORENTZ * lattice.n_modes
        dim = kernels.basis_size(n_slots, n_max)
        if dim > dim_limit:
            raise DimensionOverflow(f"Fock dimension {dim} exceeds limit {dim_limit}")
        self.lattice = lattice
        self.n_max = n_max
        self.n_slots = n_slots
        self.dim = dim
        self.tuples, self.level = kernels.enumerate_states(n_slots, n_max)
        rows, cols, slots, vals = kernels.annihilation_entries(self.tuples, self.level, n_slots, n_max)
        self._entries = (rows, cols, slots, vals)
        occ = np.zeros((dim, n_slots), dtype=np.int64)
        for j in range(max(n_max, 1)):
            t = self.tuples[:, j]
            live = t >= 0
            np.add.at(occ, (np.nonzero(live)[0], t[live]), 1)
        self.occupations = occ
        n0 = occ[:, 0::LORENTZ].sum(axis=1)
        self.eta_diag = np.where(n0 % 2 == 0, 1.0, -1.0)
        self.vacuum_index = 0
        for arr in (self.tuples, self.level, self.occupations, self.eta_diag, *self._entries):
            arr.setflags(write=False)

    def __repr__(self):
        return f"FockSpace(modes={self.lattice.n_modes}, n_max={self.n_max}, dim={self.dim})"

    @property
    def eta(self) -> np.ndarray:
        return np.diag(self.eta_diag)

    def slot(self, mode: int, mu: int) -> int:
        if not (0 <= mode < self.lattice.n_modes and 0 <= mu < LORENTZ):
            raise ModeMismatch(f"no slot for mode {mode}, index {mu}")
        return LORENTZ * mode + mu

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.vacuum_index] = 1.0
        return v

    def inner(self, psi, phi):
        return np.vdot(psi, self.eta_diag * phi)

    def gram(self, vectors) -> np.ndarray:
        """``<v_i, v_j>`` for the columns of ``vectors``."""
        return vectors.conj().T @ (self.eta_diag[:, None] * vectors)

    def below_cap(self) -> np.ndarray:
        """Mask of basis states with total occupation <= ``n_max - 1``."""
        return self.level <= self.n_max - 1

    def mode_occupations(self) -> np.ndarray:
        return self.occupations.reshape(self.dim, self.lattice.n_modes, LORENTZ).sum(axis=2)

    def ladder_combination(self, ann, cre) -> np.ndarray:
        """``sum_s ann[s] a_s + cre[s] a_s^+`` as a dense matrix."""
        rows, cols, slots, vals = self._entries
        m = np.zeros((self.dim, self.dim), dtype=complex)
        ann = np.asarray(ann, dtype=complex)
        cre = np.asarray(cre, dtype=complex)
        if np.any(ann):
            np.add.at(m, (rows, cols), ann[slots] * vals)
        if np.any(cre):
            sign = self.eta_diag[cols] * self.eta_diag[rows]
            np.add.at(m, (cols, rows), cre[slots] * vals * sign)
        return m


def build_fock(lattice: MomentumLattice, n_max: int, dim_limit: int = DIM_LIMIT) -> FockSpace:
    return FockSpace(lattice, n_max, dim_limit)


@dataclass(frozen=True)
class FieldOperator:
    matrix: np.ndarray
    label: str
    eta_diag: np.ndarray = field(repr=False)

    @property
    def dagger(self) -> "FieldOperator":
        """Krein adjoint ``eta M^H eta``."""
        e = self.eta_diag
        return FieldOperator(e[:, None] * self.matrix.conj().T * e[None, :], f"{self.label}^+", e)

    def krein_hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.dagger.matrix - self.matrix), initial=0.0))

    def is_krein_hermitian(self, tol=1e-10) -> bool:
        return self.krein_hermiticity_defect() <= tol

    def _wrap(self, m, label):
        return FieldOperator(m, label, self.eta_diag)

    def __matmul__(self, other):
        if isinstance(other, FieldOperator):
            return self._wrap(self.matrix @ other.matrix, f"{self.label} {other.label}")
        return self.matrix @ other

    def __add__(self, other):
        return self._wrap(self.matrix + other.matrix, f"({self.label} + {other.label})")

    def __sub__(self, other):
        return self._wrap(self.matrix - other.matrix, f"({self.label} - {other.label})")

    def __neg__(self):
        return self._wrap(-self.matrix, f"-{self.label}")

    def __mul__(self, c):
        return self._wrap(c * self.matrix, f"{c}*{self.label}")

    __rmul__ = __mul__

    def commutator(self, other) -> "FieldOperator":
        m = self.matrix @ other.matrix - other.matrix @ self.matrix
        return self._wrap(m, f"[{self.label}, {other.label}]")


def _op(fock, m, label):
    return FieldOperator(m, label, fock.eta_diag)


def ladder(fock: FockSpace, mode: int, mu: int, kind: str) -> FieldOperator:
    s = fock.slot(mode, mu)
    coef = np.zeros(fock.n_slots, dtype=complex)
    coef[s] = 1.0
    if kind == "annihilate":
        return _op(fock, fock.ladder_combination(coef, 0 * coef), f"a_{mu}(k{mode})")
    if kind == "create":
        return _op(fock, fock.ladder_combination(0 * coef, coef), f"a+_{mu}(k{mode})")
    raise ValueError(f"kind must be 'annihilate' or 'create', got {kind!r}")


def field_from_wavefunction(fock: FockSpace, psi, label="X") -> FieldOperator:
    """Operator with one-particle wave function ``psi`` of shape ``(n_modes, 4)``."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (fock.lattice.n_modes, LORENTZ):
        raise ModeMismatch(f"wave function shape {psi.shape} does not match lattice")
    w = psi * fock.lattice.normalization()[:, None]
    flat = w.reshape(-1)
    return _op(fock, fock.ladder_combination(flat.conj(), flat), label)


def _lower(kup):
    return kup * np.diag(METRIC)


def _amplitudes(fock, f: TestFunction):
    return f.on_lattice(fock.lattice)


def _scalar(fock, f: TestFunction):
    return f.scalar_on_lattice(fock.lattice)


def field_A(fock: FockSpace, mu: int, f: TestFunction) -> FieldOperator:
    amp = _amplitudes(fock, f)
    psi = np.zeros_like(amp)
    psi[:, mu] = amp[:, mu]
    return field_from_wavefunction(fock, psi, f"A_{mu}({f.label})")


def _f_wavefunction(lattice, mu, nu, fhat):
    klow = _lower(lattice.four_momenta)
    psi = np.zeros((lattice.n_modes, LORENTZ), dtype=complex)
    psi[:, nu] += 1j * klow[:, mu] * fhat
    psi[:, mu] -= 1j * klow[:, nu] * fhat
    return psi


def field_F(fock: FockSpace, mu: int, nu: int, f: TestFunction) -> FieldOperator:
    """``F_{mu nu}(f) = d_mu A_nu(f) - d_nu A_mu(f)`` smeared with the scalar profile of ``f``."""
    psi = _f_wavefunction(fock.lattice, mu, nu, _scalar(fock, f))
    return field_from_wavefunction(fock, psi, f"F_{mu}{nu}({f.label})")


def field_B(fock: FockSpace, f: TestFunction):
    """``B = d^mu A_mu`` and its frequency parts ``(B, B_plus, B_minus)``.

    ``B_plus = sum_k c(k) k^mu a_mu(k)`` with ``c(k) = -i conj(f^(k)) / sqrt(2 omega L^3)``.
    """
    lat = fock.lattice
    psi = 1j * lat.four_momenta * _scalar(fock, f)[:, None]
    w = (psi * lat.normalization()[:, None]).reshape(-1)
    zero = np.zeros_like(w)
    bp = _op(fock, fock.ladder_combination(w.conj(), zero), f"B+({f.label})")
    bm = _op(fock, fock.ladder_combination(zero, w), f"B-({f.label})")
    return bp + bm, bp, bm


def subsidiary_operators(fock: FockSpace):
    """Per-mode ``B^+(k) = k^mu a_mu(k)`` (no smearing factor)."""
    out = []
    for m in range(fock.lattice.n_modes):
        coef = np.zeros(fock.n_slots, dtype=complex)
        coef[LORENTZ * m:LORENTZ * (m + 1)] = fock.lattice.four_momenta[m]
        out.append(_op(fock, fock.ladder_combination(coef, np.zeros_like(coef)), f"B+(k{m})"))
    return out


def maxwell_divergence(fock: FockSpace, mu: int, f: TestFunction) -> FieldOperator:
    """``G_mu(f) = sum_nu d^nu F_{nu mu}(f)``.

    Wave function ``(k_mu k^alpha - (k.k) delta^alpha_mu) f^``; the second term
    vanishes on the massless shell up to rounding and is kept.
    """
    lat = fock.lattice
    kup = lat.four_momenta
    klow = _lower(kup)
    fhat = _scalar(fock, f)
    k2 = np.einsum("ka,ka->k", kup, klow)
    psi = klow[:, mu][:, None] * kup * fhat[:, None]
    psi[:, mu] -= k2 * fhat
    return field_from_wavefunction(fock, psi, f"dF_{mu}({f.label})")


def momentum_operator(fock: FockSpace, mu: int) -> FieldOperator:
    """Diagonal ``P^mu``: sum of occupied contravariant ``k^mu``."""
    p = fock.mode_occupations() @ fock.lattice.four_momenta[:, mu]
    return _op(fock, np.diag(p.astype(complex)), f"P^{mu}")


def momentum_eigenvalues(fock: FockSpace) -> np.ndarray:
    """``(dim, 4)`` contravariant momentum of every basis state."""
    return fock.mode_occupations() @ fock.lattice.four_momenta


def translation(fock: FockSpace, a) -> FieldOperator:
    """``U(a) = exp(i a.P)``, diagonal and unitary for both products."""
    a = np.asarray(a, dtype=float)
    p = momentum_eigenvalues(fock)
    phase = p[:, 0] * a[0] - p[:, 1:] @ a[1:]
    return _op(fock, np.diag(np.exp(1j * phase)), "U(a)")


def minkowski_squares(fock: FockSpace) -> np.ndarray:
    """``p.p`` per basis state from pair sums ``2 (w_i w_j - k_i.k_j)``.

    The one-photon diagonal is set to zero exactly (massless shell).
    """
    lat = fock.lattice
    kk = np.outer(lat.omega, lat.omega) - lat.modes @ lat.modes.T
    np.fill_diagonal(kk, 0.0)
    n = fock.mode_occupations().astype(float)
    return np.einsum("si,ij,sj->s", n, kk, n)


def spectral_check(fock: FockSpace, tol=1e-12):
    """Every basis momentum in the closed forward cone.

    Returns ``(ok, min p.p, min p0)``.
    """
    p2 = minkowski_squares(fock)
    p0 = momentum_eigenvalues(fock)[:, 0]
    ok = bool(np.all(p2 >= -tol) and np.all(p0 >= -tol))
    return ok, float(p2.min()), float(p0.min())


def vacuum_uniqueness(fock: FockSpace, tol=1e-12) -> bool:
    """Only the vacuum has zero energy."""
    p0 = momentum_eigenvalues(fock)[:, 0]
    zero = np.nonzero(np.abs(p0) <= tol)[0]
    return zero.tolist() == [fock.vacuum_index]


def ccr_residual(fock: FockSpace, mode1, mu, mode2, nu) -> float:
    """``||[a_mu(k), a_nu(k')^+] + g_{mu nu} delta_{k k'}||`` on inputs below the cap."""
    a = ladder(fock, mode1, mu, "annihilate").matrix
    ad = ladder(fock, mode2, nu, "create").matrix
    c = a @ ad - ad @ a
    if mode1 == mode2:
        c = c + METRIC[mu, nu] * np.eye(fock.dim)
    return float(np.max(np.abs(c[:, fock.below_cap()]), initial=0.0))


def two_point_vacuum(fock: FockSpace, x: FieldOperator, y: FieldOperator) -> complex:
    """``<Omega, X Y Omega>``."""
    om = fock.vacuum()
    return complex(fock.inner(om, x.matrix @ (y.matrix @ om)))


def mode_sum_two_point(lattice: MomentumLattice, mu, nu, f: TestFunction, g: TestFunction) -> complex:
    """Closed-form ``<Omega, A_mu(f) A_nu(g) Omega>`` in Feynman gauge.

    ``-g_{mu nu} sum_k conj(f^_mu(k)) g^_nu(k) / (2 omega L^3)``; needs no Fock
    basis, so it scales to fine lattices.
    """
    fa = f.on_lattice(lattice)[:, mu]
    ga = g.on_lattice(lattice)[:, nu]
    w = 1.0 / (2.0 * lattice.omega * lattice.volume)
    return complex(-METRIC[mu, nu] * np.sum(fa.conj() * ga * w))


def letters_for_modes(fock: FockSpace, amplitude=None):
    """Letters ``A_mu(f_k)`` for every mode ``k`` and index ``mu``.

    ``f_k`` is a mode indicator; the default amplitude ``sqrt(2 omega L^3)``
    makes the one-particle two-point block equal ``-g`` per mode.
    """
    from .testfunc import mode_indicator

    lat = fock.lattice
    ops = []
    for m in range(lat.n_modes):
        amp = np.sqrt(2 * lat.omega[m] * lat.volume) if amplitude is None else amplitude
        f = mode_indicator(lat, m, amp)
        ops.extend(field_A(fock, mu, f) for mu in range(LORENTZ))
    return ops


def wightman_from_fock(fock: FockSpace, letters, d_max: int, tol=1e-10):
    """Wightman data ``W_n[k1..kn] = <Omega, X_k1 ... X_kn Omega>`` for Krein-Hermitian letters.

    Exact on the truncated space as long as ``2 * n_max >= d_max``.
    """
    from .borchers import AlgebraBasis, WightmanFunctional

    if 2 * fock.n_max < d_max:
        raise ValueError(f"n_max={fock.n_max} too small for exact data up to degree {d_max}")
    for x in letters:
        if not x.is_krein_hermitian(tol):
            raise ValueError(f"letter {x.label} is not Krein-Hermitian")
    b = len(letters)
    bra = fock.eta_diag * fock.vacuum()
    mats = np.stack([x.matrix for x in letters])
    W = [np.array(1.0 + 0j)]
    # vecs[w] = X_w Omega for all words of the current degree, last axis = Fock index
    vecs = fock.vacuum()[None, :]
    for n in range(1, d_max + 1):
        vecs = np.einsum("kij,wj->kwi", mats, vecs).reshape(b ** n, fock.dim)
        W.append((vecs @ bra.conj()).reshape((b,) * n))
    basis = AlgebraBasis(b, d_max)
    return WightmanFunctional(basis, W, hermitian=True)
