"""Truncated Borchers algebra over a finite letter basis and the GNS construction.

Words are tuples of letter indices; the empty tuple is the unit.  An algebra
element is a ``dict`` mapping words to complex coefficients.  Letters are
abstract: binding them to smeared fields happens in :mod:`indefmetric.fock`.

Everything is truncated at tensor degree ``d_max``.  The GNS space uses words
of degree at most ``d_max // 2`` so that every pairing ``W(f* (x) h)`` exists,
and the left action of a letter is only defined below that degree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import DegreeOverflow, NotHermitian
from .krein import TOL_EQ, TOL_NULL, IndefiniteSpace, _select_columns, build_space

__all__ = [
    "AlgebraBasis",
    "WightmanFunctional",
    "GnsSpace",
    "involution",
    "evaluate",
    "hermiticity_check",
    "gns_construct",
    "field_action",
    "field_matrix",
    "wightman_to_json",
    "wightman_from_json",
]


@dataclass(frozen=True)
class AlgebraBasis:
    b: int
    d_max: int
    star: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.b < 1 or self.d_max < 0:
            raise ValueError("need b >= 1 and d_max >= 0")
        star = tuple(range(self.b)) if self.star is None else tuple(int(s) for s in self.star)
        if sorted(star) != list(range(self.b)):
            raise ValueError("star map must be a permutation of the letters")
        if any(star[star[k]] != k for k in range(self.b)):
            raise ValueError("star map must be an involution")
        object.__setattr__(self, "star", star)

    @property
    def size(self) -> int:
        return sum(self.b**n for n in range(self.d_max + 1))

    def words(self, degree: int):
        return list(itertools.product(range(self.b), repeat=degree))

    def all_words(self, max_degree=None):
        top = self.d_max if max_degree is None else max_degree
        return [w for n in range(top + 1) for w in self.words(n)]

    def index(self, word) -> int:
        n = len(word)
        if n > self.d_max:
            raise DegreeOverflow(f"word of degree {n} exceeds d_max={self.d_max}")
        off = sum(self.b**j for j in range(n))
        pos = 0
        for k in word:
            pos = pos * self.b + k
        return off + pos


@dataclass(frozen=True)
class WightmanFunctional:
    basis: AlgebraBasis
    W: list = field(repr=False)
    hermitian: bool = False

    def __post_init__(self):
        b, d = self.basis.b, self.basis.d_max
        if len(self.W) != d + 1:
            raise ValueError(f"need W_0..W_{d}, got {len(self.W)} arrays")
        arrs = [np.asarray(w, dtype=complex).reshape((b,) * n) for n, w in enumerate(self.W)]
        if abs(arrs[0] - 1) > 0:
            raise ValueError("Wightman functional must be normalised: W_0 = 1")
        object.__setattr__(self, "W", arrs)

    @property
    def b(self) -> int:
        return self.basis.b

    @property
    def d_max(self) -> int:
        return self.basis.d_max

    @classmethod
    def from_arrays(cls, b, arrays, star=None, hermitian=False):
        return cls(AlgebraBasis(b, len(arrays) - 1, star), list(arrays), hermitian)


def involution(x, basis: AlgebraBasis | None = None):
    """``(f_1 (x) ... (x) f_n)* = f_n* (x) ... (x) f_1*``; coefficients are conjugated."""
    star = (lambda k: k) if basis is None else (lambda k: basis.star[k])
    if isinstance(x, dict):
        return {tuple(star(k) for k in reversed(w)): np.conj(c) for w, c in x.items()}
    return tuple(star(k) for k in reversed(x))


def _as_element(x):
    return x if isinstance(x, dict) else {tuple(x): 1.0}


def evaluate(W: WightmanFunctional, element) -> complex:
    total = 0j
    for word, c in _as_element(element).items():
        if len(word) > W.d_max:
            raise DegreeOverflow(f"word of degree {len(word)} exceeds d_max={W.d_max}")
        total += c * W.W[len(word)][tuple(word)]
    return complex(total)


def _starred(W, n):
    """``W_n`` with the star map applied on every axis."""
    t = W.W[n]
    star = np.asarray(W.basis.star)
    for ax in range(n):
        t = np.take(t, star, axis=ax)
    return t


def hermiticity_check(W: WightmanFunctional, tol=TOL_EQ) -> bool:
    """``W(f*) = conj(W(f))`` on every basis word."""
    for n in range(W.d_max + 1):
        t = _starred(W, n)
        if n:
            t = np.transpose(t, tuple(reversed(range(n))))
        if np.max(np.abs(t - W.W[n].conj()), initial=0.0) > tol:
            return False
    return True


def _pairing_block(W, n, m):
    """Block ``M[f, h] = W(f* (x) h)`` for degree-n ``f`` and degree-m ``h``."""
    b = W.b
    t = W.W[n + m]
    star = np.asarray(W.basis.star)
    for ax in range(n):
        t = np.take(t, star, axis=ax)
    perm = tuple(reversed(range(n))) + tuple(range(n, n + m))
    return np.transpose(t, perm).reshape(b**n, b**m)


@dataclass(frozen=True)
class GnsSpace:
    functional: WightmanFunctional = field(repr=False)
    space: IndefiniteSpace
    words: list = field(repr=False)
    representatives: list
    projection: np.ndarray = field(repr=False)
    pairing: np.ndarray = field(repr=False)
    degree_cap: int = 0

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def vacuum(self) -> np.ndarray:
        return self.projection[:, 0].copy()

    def word_vector(self, element) -> np.ndarray:
        v = np.zeros(len(self.words), dtype=complex)
        basis = self.functional.basis
        for word, c in _as_element(element).items():
            if len(word) > self.degree_cap:
                raise DegreeOverflow(f"word of degree {len(word)} exceeds GNS cap {self.degree_cap}")
            v[basis.index(word)] += c
        return v

    def coords(self, element) -> np.ndarray:
        """Quotient coordinates of the class ``[element]``."""
        return self.projection @ self.word_vector(element)

    def inner(self, u, v) -> complex:
        return complex(np.vdot(u, self.space.gram @ v))

    def rep_degrees(self) -> np.ndarray:
        return np.array([len(w) for w in self.representatives], dtype=int)


def gns_construct(W: WightmanFunctional, *, tol_null=TOL_NULL, tol_eq=TOL_EQ) -> GnsSpace:
    """Quotient the degree-truncated algebra by ``L_W`` and return the inner-product space.

    Classes are represented by words chosen greedily in word order, so a class
    is always represented by the lowest-degree words available.
    """
    if not hermiticity_check(W, tol_eq):
        raise NotHermitian("W(f*) != conj(W(f)) on some basis word")
    h = W.d_max // 2
    words = W.basis.all_words(h)
    offs = np.cumsum([0] + [W.b**n for n in range(h + 1)])
    M = np.zeros((len(words), len(words)), dtype=complex)
    for n in range(h + 1):
        for m in range(h + 1):
            M[offs[n]:offs[n + 1], offs[m]:offs[m + 1]] = _pairing_block(W, n, m)
    M = 0.5 * (M + M.conj().T)
    lam, u = np.linalg.eigh(M)
    null = np.abs(lam) <= tol_null
    nb = u[:, null]
    q = np.eye(len(words)) - nb @ nb.conj().T
    rank = int(len(words) - null.sum())
    sel = _select_columns(q, rank)
    qs = q[:, sel]
    projection = np.linalg.pinv(qs) @ q
    gram = M[np.ix_(sel, sel)]
    aux = qs.conj().T @ qs
    space = build_space(gram, aux)
    return GnsSpace(W, space, words, [words[i] for i in sel], projection, M, h)


def field_action(G: GnsSpace, k: int, vector) -> np.ndarray:
    """Coordinates of ``[e_k (x) f]`` given the coordinates of ``[f]``."""
    vector = np.asarray(vector, dtype=complex)
    deg = G.rep_degrees()
    scale = max(np.max(np.abs(vector), initial=0.0), 1e-300)
    at_cap = deg >= G.degree_cap
    if np.any(at_cap & (np.abs(vector) > 1e-14 * scale)):
        raise DegreeOverflow("left action would leave the truncated degree budget")
    basis = G.functional.basis
    y = np.zeros(len(G.words), dtype=complex)
    # rounding-level weight on capped representatives is dropped
    for c, w, skip in zip(vector, G.representatives, at_cap):
        if c != 0 and not skip:
            y[basis.index((k,) + tuple(w))] += c
    return G.projection @ y


def field_matrix(G: GnsSpace, k: int):
    """Matrix of the letter ``k`` on the representatives below the degree cap.

    Returns ``(matrix, domain)`` where ``domain`` masks the columns that are
    defined; the remaining columns are zero.
    """
    domain = G.rep_degrees() < G.degree_cap
    m = np.zeros((G.dim, G.dim), dtype=complex)
    for j in np.nonzero(domain)[0]:
        e = np.zeros(G.dim, dtype=complex)
        e[j] = 1.0
        m[:, j] = field_action(G, k, e)
    return m, domain


def _encode(arr):
    arr = np.asarray(arr, dtype=complex)
    if not np.any(arr.imag):
        return arr.real.tolist()
    return {"re": arr.real.tolist(), "im": arr.imag.tolist()}


def _decode(obj, shape):
    if isinstance(obj, dict):
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        arr = re + 1j * im
    else:
        arr = np.asarray(obj, dtype=complex)
    return arr.reshape(shape)


def wightman_to_json(W: WightmanFunctional) -> dict:
    return {
        "b": W.b,
        "d_max": W.d_max,
        "W": {str(n): _encode(W.W[n]) for n in range(1, W.d_max + 1)},
        "star": list(W.basis.star),
    }


def wightman_from_json(obj: dict) -> WightmanFunctional:
    b, d = int(obj["b"]), int(obj["d_max"])
    data = obj.get("W", {})
    arrays = [np.array(1.0 + 0j)]
    for n in range(1, d + 1):
        arrays.append(_decode(data[str(n)], (b,) * n) if str(n) in data else np.zeros((b,) * n, complex))
    if "0" in data and complex(np.asarray(_decode(data["0"], ()))) != 1:
        raise ValueError("W_0 must equal 1")
    basis = AlgebraBasis(b, d, obj.get("star"))
    W = WightmanFunctional(basis, arrays)
    return WightmanFunctional(basis, arrays, hermiticity_check(W))
