"""Finite-dimensional indefinite inner-product linear algebra.

A space carries two Hermitian forms on ``C^dim``:

* the indefinite inner product ``<psi, phi> = psi^H @ gram @ phi``;
* an auxiliary scalar product ``(psi, phi) = psi^H @ aux @ phi`` that is
  positive definite and fixes the topology.

They are linked by the metric operator ``eta = aux^{-1} @ gram``, which is
self-adjoint with respect to ``aux``.  All spectral work is done on the
Hermitian matrix ``aux^{1/2} @ eta @ aux^{-1/2}`` so that ``numpy.linalg.eigh``
can be used throughout.

Infinite-dimensional notions (continuity of ``eta^{-1}``, maximal closures)
are represented here by their finite surrogates: an eigenvalue gap above a
tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import (
    AuxNotPositive,
    DegreeOverflow,
    NonHermitian,
    NotPositiveSemidefinite,
    SingularEta,
)

TOL_HERM = 1e-10
TOL_EQ = 1e-10
TOL_NULL = 1e-8
TOL_PD = 1e-12

__all__ = [
    "IndefiniteSpace",
    "MetricOperator",
    "Signature",
    "Quotient",
    "DominanceTable",
    "build_space",
    "metric_operator",
    "krein_normalize",
    "strip_nulls",
    "is_maximal",
    "admissibility_constant",
    "seminorm_dominance",
    "normalized_weights",
    "quotient_psd",
    "signature",
    "reconstruction_error",
    "matrix_to_json",
    "matrix_from_json",
]


@dataclass(frozen=True)
class IndefiniteSpace:
    gram: np.ndarray
    aux: np.ndarray
    # columns: this space's basis expressed in the parent space (None for a root space)
    embedding: np.ndarray | None = field(default=None, compare=False)

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def inner(self, psi, phi):
        """Indefinite inner product ``<psi, phi>``."""
        return np.vdot(psi, self.gram @ phi)

    def scalar(self, psi, phi):
        """Auxiliary scalar product ``(psi, phi)``."""
        return np.vdot(psi, self.aux @ phi)


@dataclass(frozen=True)
class MetricOperator:
    eta: np.ndarray
    aux: np.ndarray
    scale: float = 1.0
    is_krein: bool = False

    @property
    def dim(self) -> int:
        return self.eta.shape[0]


@dataclass(frozen=True)
class Signature:
    n_plus: int
    n_zero: int
    n_minus: int

    @property
    def dim(self) -> int:
        return self.n_plus + self.n_zero + self.n_minus

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n_plus, self.n_zero, self.n_minus)


class Quotient(NamedTuple):
    """Null quotient of a positive semidefinite form.

    ``projection @ x`` gives the class coordinates of ``x``; ``gram`` is the
    induced positive-definite form on those coordinates; ``representatives``
    holds one original vector per coordinate; ``null_basis`` spans the kernel.
    """

    projection: np.ndarray
    gram: np.ndarray
    representatives: np.ndarray
    null_basis: np.ndarray


def _hermitize(m):
    return 0.5 * (m + m.conj().T)


def _as_square(m, name):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {m.shape}")
    return m


def _aux_roots(aux, tol_pd=TOL_PD):
    """Return ``(aux^{1/2}, aux^{-1/2})``; raise if ``aux`` is not positive."""
    if aux.shape[0] == 0:
        return aux.copy(), aux.copy()
    w, v = np.linalg.eigh(_hermitize(aux))
    if w[0] <= tol_pd:
        raise AuxNotPositive(f"auxiliary product has eigenvalue {w[0]:.3e} <= {tol_pd:g}")
    sq = np.sqrt(w)
    return (v * sq) @ v.conj().T, (v / sq) @ v.conj().T


def build_space(gram, aux=None, *, tol_herm=TOL_HERM, tol_pd=TOL_PD) -> IndefiniteSpace:
    gram = _as_square(gram, "gram")
    aux = np.eye(gram.shape[0], dtype=complex) if aux is None else _as_square(aux, "aux")
    if aux.shape != gram.shape:
        raise ValueError(f"gram {gram.shape} and aux {aux.shape} differ in dimension")
    if gram.size:
        dev = np.max(np.abs(gram - gram.conj().T))
        if dev >= tol_herm:
            raise NonHermitian(f"gram deviates from Hermitian by {dev:.3e}")
        dev = np.max(np.abs(aux - aux.conj().T))
        if dev >= tol_herm:
            raise AuxNotPositive(f"aux is not Hermitian (deviation {dev:.3e})")
    _aux_roots(aux, tol_pd)
    return IndefiniteSpace(_hermitize(gram), _hermitize(aux))


def _hermitian_eta(eta: MetricOperator):
    """``aux^{1/2} eta aux^{-1/2}`` (Hermitian) together with the roots."""
    root, inv_root = _aux_roots(eta.aux)
    return _hermitize(root @ eta.eta @ inv_root), root, inv_root


def metric_operator(space: IndefiniteSpace, *, tol_eq=TOL_EQ) -> MetricOperator:
    """Solve ``(psi, eta phi) = <psi, phi>`` for ``eta``.

    If the solution is not a contraction, the auxiliary product is multiplied
    by ``||eta||`` and the factor is stored in ``scale``.
    """
    n = space.dim
    if n == 0:
        return MetricOperator(np.zeros((0, 0), complex), space.aux, 1.0, True)
    eta = np.linalg.solve(space.aux, space.gram)
    _, inv_root = _aux_roots(space.aux)
    norm = float(np.max(np.abs(np.linalg.eigvalsh(_hermitize(inv_root @ space.gram @ inv_root)))))
    scale = 1.0
    aux = space.aux
    if norm > 1.0:
        scale = norm
        eta = eta / norm
        aux = aux * norm
    is_krein = bool(np.max(np.abs(eta @ eta - np.eye(n))) < tol_eq)
    return MetricOperator(eta, aux, scale, is_krein)


def krein_normalize(space: IndefiniteSpace, eta: MetricOperator, *, tol_null=TOL_NULL):
    """Replace ``(.,.)`` by ``(., |eta| .)``; the new metric operator is ``sign(eta)``.

    Returns ``(new_aux, MetricOperator)`` with ``is_krein=True``.
    """
    n = eta.dim
    if n == 0:
        return eta.aux.copy(), MetricOperator(eta.eta.copy(), eta.aux.copy(), eta.scale, True)
    k, root, inv_root = _hermitian_eta(eta)
    lam, u = np.linalg.eigh(k)
    small = np.abs(lam) <= tol_null
    if np.any(small):
        raise SingularEta(
            f"{int(small.sum())} eigenvalue(s) of eta within {tol_null:g} of zero; strip nulls first"
        )
    new_aux = _hermitize(root @ (u * np.abs(lam)) @ u.conj().T @ root)
    eta1 = inv_root @ (u * np.sign(lam)) @ u.conj().T @ root
    return new_aux, MetricOperator(eta1, new_aux, eta.scale, True)


def _select_columns(x, rank, inner=None):
    """Choose ``rank`` columns of ``x`` spanning its range, preferring early ones.

    Greedy Gram-Schmidt in input order; falls back to column-pivoted QR if
    rounding makes the greedy pass disagree with ``rank``.
    """
    n_cols = x.shape[1]
    if rank == 0:
        return np.zeros(0, dtype=int)
    y = x.astype(complex) if inner is None else _aux_roots(inner)[0] @ x
    norms = np.linalg.norm(y, axis=0)
    thresh = 1e-7 * max(norms.max(), 1e-300)
    q = np.zeros((y.shape[0], rank), dtype=complex)
    kept = []
    for j in range(n_cols):
        v = y[:, j]
        k = len(kept)
        # two passes of classical Gram-Schmidt are as stable as modified
        for _ in range(2):
            v = v - q[:, :k] @ (q[:, :k].conj().T @ v)
        nv = np.linalg.norm(v)
        if nv > thresh:
            q[:, k] = v / nv
            kept.append(j)
            if len(kept) == rank:
                break
    if len(kept) == rank:
        return np.array(kept, dtype=int)
    _, _, piv = scipy.linalg.qr(y, pivoting=True, mode="economic")
    return np.sort(piv[:rank])


def _lowdin(v, aux):
    """Symmetric orthonormalisation of the columns of ``v`` w.r.t. ``aux``."""
    if v.shape[1] == 0:
        return v
    s = _hermitize(v.conj().T @ aux @ v)
    w, u = np.linalg.eigh(s)
    return v @ ((u / np.sqrt(w)) @ u.conj().T)


def strip_nulls(space: IndefiniteSpace, eta: MetricOperator, *, tol_null=TOL_NULL):
    """Restrict to ``range(1 - P0)``, ``P0`` the projector onto the null space of ``eta``.

    The retained basis is aux-orthonormal, so the reduced auxiliary product is
    the identity and the reduced metric operator equals the reduced gram.
    ``space.embedding`` of the result maps reduced coordinates to the input.
    """
    n = space.dim
    k, root, inv_root = _hermitian_eta(eta) if n else (None, None, None)
    if n == 0:
        return space, eta
    lam, u = np.linalg.eigh(k)
    null = np.abs(lam) <= tol_null
    if not np.any(null):
        return IndefiniteSpace(space.gram, space.aux, np.eye(n, dtype=complex)), eta
    x0 = inv_root @ u[:, null]
    p0 = x0 @ x0.conj().T @ eta.aux
    q = np.eye(n) - p0
    rank = int(n - null.sum())
    sel = _select_columns(q, rank, eta.aux)
    v = _lowdin(q[:, sel], eta.aux)
    gram = _hermitize(v.conj().T @ space.gram @ v)
    aux = np.eye(rank, dtype=complex)
    reduced = IndefiniteSpace(gram, aux, v)
    is_krein = bool(rank == 0 or np.max(np.abs(gram @ gram - aux)) < TOL_EQ)
    return reduced, MetricOperator(gram.copy(), aux, eta.scale, is_krein)


def is_maximal(eta: MetricOperator, tol=TOL_NULL) -> bool:
    """Finite surrogate of a bounded inverse: every ``|eigenvalue(eta)| >= tol``."""
    if eta.dim == 0:
        return True
    return bool(np.min(np.abs(np.linalg.eigvals(eta.eta))) >= tol)


def admissibility_constant(space: IndefiniteSpace) -> float:
    """Smallest ``C`` with ``|<phi,psi>|^2 <= C (psi,psi)(phi,phi)``."""
    if space.dim == 0:
        return 0.0
    _, inv_root = _aux_roots(space.aux)
    s = np.linalg.norm(inv_root @ space.gram @ inv_root, 2)
    return float(s * s)


def reconstruction_error(space: IndefiniteSpace, eta: MetricOperator, aux=None) -> float:
    """``max |<e_i, e_j> - (e_i, eta e_j)|`` over basis pairs."""
    if space.dim == 0:
        return 0.0
    aux = eta.aux if aux is None else aux
    return float(np.max(np.abs(space.gram - aux @ eta.eta)))


def signature(gram, tol_null=TOL_NULL) -> Signature:
    gram = _as_square(gram, "gram")
    if gram.shape[0] == 0:
        return Signature(0, 0, 0)
    lam = np.linalg.eigvalsh(_hermitize(gram))
    plus = int(np.sum(lam > tol_null))
    minus = int(np.sum(lam < -tol_null))
    return Signature(plus, len(lam) - plus - minus, minus)


def quotient_psd(gram, tol_null=TOL_NULL) -> Quotient:
    """Quotient a positive semidefinite form by its null vectors.

    Representatives are original basis vectors chosen in input order, so a
    form that is already definite comes back unchanged.
    """
    gram = _hermitize(_as_square(gram, "gram"))
    n = gram.shape[0]
    if n == 0:
        z = np.zeros((0, 0), complex)
        return Quotient(z, z, z, z)
    lam, u = np.linalg.eigh(gram)
    if lam[0] < -tol_null:
        raise NotPositiveSemidefinite(f"form has eigenvalue {lam[0]:.3e} < -{tol_null:g}")
    null = lam <= tol_null
    nb = u[:, null]
    q = np.eye(n) - nb @ nb.conj().T
    rank = int(n - null.sum())
    sel = _select_columns(q, rank)
    reps = np.eye(n, dtype=complex)[:, sel]
    projection = np.linalg.pinv(q[:, sel]) @ q if rank else np.zeros((0, n), complex)
    reduced = _hermitize(gram[np.ix_(sel, sel)])
    return Quotient(projection, reduced, reps, nb)


@dataclass(frozen=True)
class DominanceTable:
    constants: dict[tuple[int, int], float]
    weights: dict[int, np.ndarray]

    @property
    def admissible(self) -> bool:
        return all(c <= 1.0 for c in self.constants.values())

    def admissible_for(self, pairs) -> bool:
        return all(self.constants[p] <= 1.0 for p in pairs)

    def max_constant(self) -> float:
        return max(self.constants.values(), default=0.0)


def _block(W, n, m):
    b = W.b
    t = np.asarray(W.W[n + m], dtype=complex)
    return t.reshape(b**n, b**m)


def _weight_vector(weights, n, b):
    w = weights.get(n, 1.0) if isinstance(weights, dict) else weights[n]
    w = np.broadcast_to(np.asarray(w, dtype=float), (b**n,)).copy()
    if np.any(w <= 0):
        raise ValueError(f"weights for degree {n} must be positive")
    return w


def seminorm_dominance(W, weights=None, *, max_degree=None) -> DominanceTable:
    """Constants ``c(n, m)`` with ``|W_{n+m}(f (x) h)| <= c(n, m) p_n(f) p_m(h)``.

    ``p_n(f) = ||weights[n] * f||`` on the degree-``n`` word basis.  Each
    constant is the largest singular value of the weighted cross block.
    """
    d = W.d_max if max_degree is None else max_degree
    if d > W.d_max:
        raise DegreeOverflow(f"requested total degree {d} exceeds truncation {W.d_max}")
    weights = {} if weights is None else weights
    wv = {n: _weight_vector(weights, n, W.b) for n in range(d + 1)}
    table = {}
    for n in range(d + 1):
        for m in range(d + 1 - n):
            blk = _block(W, n, m) / wv[n][:, None] / wv[m][None, :]
            table[(n, m)] = float(np.linalg.norm(blk, 2)) if blk.size else 0.0
    return DominanceTable(table, wv)


def normalized_weights(W, *, max_degree=None) -> dict[int, float]:
    """Uniform per-degree weights making every ``c(n, m) <= 1``.

    With ``a(n, m) = ||block(n, m)||`` the choice
    ``w_n = max(1, sqrt(max_m max(a(n, m), a(m, n))))`` gives
    ``w_n w_m >= a(n, m)``.
    """
    d = W.d_max if max_degree is None else max_degree
    raw = seminorm_dominance(W, max_degree=d).constants
    out = {}
    for n in range(d + 1):
        peak = max(max(raw[(n, m)], raw[(m, n)]) for m in range(d + 1 - n))
        # slack absorbs rounding in the norm evaluation
        out[n] = max(1.0, np.sqrt(peak) * (1 + 1e-12))
    return out


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"dim": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_json(obj) -> np.ndarray:
    n = int(obj["dim"])
    re = np.asarray(obj["re"], dtype=float).reshape(n, n) if n else np.zeros((0, 0))
    im = np.asarray(obj.get("im", np.zeros((n, n))), dtype=float).reshape(n, n) if n else re
    return re + 1j * im
