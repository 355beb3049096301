"""Gupta-Bleuler subsidiary condition on the truncated Feynman-gauge Fock space.

The physical subspace ``H' = {psi : B^+(k) psi = 0 for all modes k}`` is
computed level by level (each ``B^+(k)`` lowers the occupation by one), which
keeps the basis graded and lets truncation effects be masked by occupation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import krein
from .errors import EmptySubspace
from .fock import (
    FieldOperator,
    FockSpace,
    field_B,
    field_F,
    maxwell_divergence,
    subsidiary_operators,
)
from .krein import TOL_EQ, TOL_NULL, _lowdin, _select_columns

TOL_OBS = 1e-8

__all__ = [
    "PhysicalSubspace",
    "PhysicalHilbert",
    "PreservationReport",
    "MaxwellReport",
    "physical_subspace",
    "physical_quotient",
    "observable_preservation",
    "weak_maxwell",
    "maxwell_matrix_element",
    "commutator_norm",
    "b_f_commutator",
    "field_tensor_span",
    "symmetric_power_dims",
    "certify",
]


@dataclass(frozen=True)
class PhysicalSubspace:
    fock: FockSpace = field(repr=False)
    basis: np.ndarray = field(repr=False)
    levels: np.ndarray
    gram: np.ndarray = field(repr=False)
    null_basis: np.ndarray = field(repr=False)
    tol_null: float = TOL_NULL

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def level_dims(self) -> dict[int, int]:
        return {n: int(np.sum(self.levels == n)) for n in range(self.fock.n_max + 1)}

    def signature(self) -> krein.Signature:
        return krein.signature(self.gram, self.tol_null)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.gram)[0])

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def subsidiary_residual(self) -> float:
        """``max_k ||B^+(k) v||`` over the basis columns."""
        return max(
            float(np.max(np.linalg.norm(b.matrix @ self.basis, axis=0), initial=0.0))
            for b in subsidiary_operators(self.fock)
        )


@dataclass(frozen=True)
class PhysicalHilbert:
    quotient: krein.Quotient = field(repr=False)
    level_dims: dict

    @property
    def dim(self) -> int:
        return self.quotient.gram.shape[0]


@dataclass(frozen=True)
class PreservationReport:
    label: str
    residual_subspace: float
    residual_null: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual_subspace <= self.tolerance and self.residual_null <= self.tolerance


@dataclass(frozen=True)
class MaxwellReport:
    residual: float
    b_residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance and self.b_residual <= self.tolerance


def _canonical_basis(kernel):
    """Orthonormal basis of ``range(kernel)`` built from its projector's columns in order."""
    if kernel.shape[1] == 0:
        return kernel
    p = kernel @ kernel.conj().T
    sel = _select_columns(p, kernel.shape[1])
    return _lowdin(p[:, sel], np.eye(p.shape[0]))


def physical_subspace(fock: FockSpace, *, tol_null=TOL_NULL) -> PhysicalSubspace:
    """Joint kernel of all ``B^+(k)``, one occupation level at a time."""
    stacked = np.vstack([b.matrix for b in subsidiary_operators(fock)])
    cols, levels = [], []
    for n in range(fock.n_max + 1):
        idx = np.nonzero(fock.level == n)[0]
        block = stacked[:, idx]
        if n == 0 or not np.any(block):
            kern = np.eye(len(idx), dtype=complex)
        else:
            _, s, vh = np.linalg.svd(block, full_matrices=True)
            s_full = np.zeros(len(idx))
            s_full[: len(s)] = s
            kern = vh[s_full <= tol_null].conj().T
        kern = _canonical_basis(kern)
        full = np.zeros((fock.dim, kern.shape[1]), dtype=complex)
        full[idx] = kern
        cols.append(full)
        levels.extend([n] * kern.shape[1])
    basis = np.hstack(cols)
    if basis.shape[1] == 0:
        raise EmptySubspace("no physical states found; the vacuum should always qualify")
    gram = fock.gram(basis)
    gram = 0.5 * (gram + gram.conj().T)
    levels = np.array(levels)
    nulls = []
    for n in range(fock.n_max + 1):
        sel = np.nonzero(levels == n)[0]
        lam, u = np.linalg.eigh(gram[np.ix_(sel, sel)])
        nulls.append(basis[:, sel] @ u[:, np.abs(lam) <= tol_null])
    null_basis = np.hstack(nulls)
    return PhysicalSubspace(fock, basis, levels, gram, null_basis, tol_null)


def physical_quotient(ps: PhysicalSubspace) -> PhysicalHilbert:
    """``H'/H''`` with its positive-definite form; raises if the form is not PSD."""
    q = krein.quotient_psd(ps.gram, ps.tol_null)
    dims = {}
    for n in range(ps.fock.n_max + 1):
        sel = ps.levels == n
        dims[n] = krein.quotient_psd(ps.gram[np.ix_(sel, sel)], ps.tol_null).gram.shape[0]
    return PhysicalHilbert(q, dims)


def symmetric_power_dims(one_particle: int, n_max: int) -> dict[int, int]:
    return {n: comb(one_particle + n - 1, n) for n in range(n_max + 1)}


def _orth_residual(proj, op, vecs):
    if vecs.shape[1] == 0:
        return 0.0
    out = op @ vecs
    return float(np.linalg.norm(out - proj @ out, 2))


def observable_preservation(op: FieldOperator, ps: PhysicalSubspace, *, tol_obs=TOL_OBS) -> PreservationReport:
    """Residuals of ``op`` leaving ``H'`` and ``H''``, inputs masked below the cap."""
    fock = ps.fock
    below = fock.below_cap()
    v_in = ps.basis[:, ps.levels <= fock.n_max - 1]
    r2 = _orth_residual(ps.projector(), op.matrix, v_in)
    nb = ps.null_basis
    if nb.shape[1]:
        nb_orth = np.linalg.qr(nb)[0]
        # null vectors are graded; drop those living on the cap level
        n_in = nb[:, np.all(np.abs(nb[~below]) <= 1e-12, axis=0)]
        r4 = _orth_residual(nb_orth @ nb_orth.conj().T, op.matrix, n_in)
    else:
        r4 = 0.0
    return PreservationReport(op.label, r2, r4, tol_obs)


def weak_maxwell(ps: PhysicalSubspace, mu: int, f, *, current: FieldOperator | None = None,
                 tol=TOL_EQ) -> MaxwellReport:
    """``max |<psi, (d^nu F_{nu mu}(f) - j_mu(f)) phi>|`` over physical basis pairs.

    Also reports ``max |<psi, B(f) phi>|``, the mechanism behind the identity.
    """
    fock = ps.fock
    g = maxwell_divergence(fock, mu, f).matrix
    if current is not None:
        g = g - current.matrix
    ev = fock.eta_diag[:, None] * ps.basis
    res = float(np.max(np.abs(ev.conj().T @ g @ ps.basis), initial=0.0))
    b, _, _ = field_B(fock, f)
    bres = float(np.max(np.abs(ev.conj().T @ b.matrix @ ps.basis), initial=0.0))
    return MaxwellReport(res, bres, tol)


def maxwell_matrix_element(fock: FockSpace, mu: int, f, psi, phi) -> complex:
    g = maxwell_divergence(fock, mu, f)
    return complex(fock.inner(psi, g.matrix @ phi))


def commutator_norm(fock: FockSpace, x: FieldOperator, y: FieldOperator) -> float:
    """Operator norm of ``[x, y]`` on inputs with occupation <= ``n_max - 1``."""
    c = x.commutator(y).matrix[:, fock.below_cap()]
    return float(np.linalg.norm(c, 2)) if c.size else 0.0


def b_f_commutator(fock: FockSpace, f, g, mu=None, nu=None) -> float:
    """``||[B(f), F_{mu nu}(g)]||`` below the cap; max over all pairs if indices are omitted."""
    b, _, _ = field_B(fock, f)
    pairs = [(mu, nu)] if mu is not None else [(m, n) for m in range(4) for n in range(m + 1, 4)]
    return max(commutator_norm(fock, b, field_F(fock, m, n, g)) for m, n in pairs)


def field_tensor_span(ps: PhysicalSubspace, functions, *, tol=1e-9):
    """Span of repeated ``F_{mu nu}(f)`` applications to the vacuum.

    Returns ``(span_dims, quotient_dims, leak)`` per occupation level, where
    ``leak`` is the largest component outside ``H'``.
    """
    fock = ps.fock
    ops = [field_F(fock, m, n, f).matrix for f in functions for m in range(4) for n in range(m + 1, 4)]
    proj = ps.projector()
    frontier = fock.vacuum()[:, None]
    span_dims, quot_dims, leak = {0: 1}, {0: 1}, 0.0
    for n in range(1, fock.n_max + 1):
        new = np.hstack([op @ frontier for op in ops])
        # keep the level-n component; lower levels are already accounted for
        new = np.where((fock.level == n)[:, None], new, 0)
        leak = max(leak, float(np.max(np.linalg.norm(new - proj @ new, axis=0), initial=0.0)))
        u, s, _ = np.linalg.svd(new, full_matrices=False)
        r = int(np.sum(s > tol * max(s.max(initial=0.0), 1e-300)))
        frontier = u[:, :r]
        span_dims[n] = r
        g = fock.gram(frontier)
        quot_dims[n] = krein.signature(g, TOL_NULL).n_plus
    return span_dims, quot_dims, leak


def certify(fock: FockSpace, f, *, tol_eq=TOL_EQ, tol_null=TOL_NULL, tol_obs=TOL_OBS):
    """Run Gupta-Bleuler conditions 1-5 for one configuration.

    Returns a list of ``(name, passed, residual, tolerance)`` tuples.
    """
    ps = physical_subspace(fock, tol_null=tol_null)
    om = fock.vacuum()
    vac_res = float(np.linalg.norm(om - ps.projector() @ om))
    out = [("condition1_vacuum_physical", vac_res <= tol_eq, vac_res, tol_eq)]
    reports = [
        observable_preservation(field_F(fock, m, n, f), ps, tol_obs=tol_obs)
        for m in range(4) for n in range(m + 1, 4)
    ]
    r2 = max(r.residual_subspace for r in reports)
    r4 = max(r.residual_null for r in reports)
    out.append(("condition2_F_preserves_physical", r2 <= tol_obs, r2, tol_obs))
    lam_min = ps.min_eigenvalue()
    out.append(("condition3_positive_semidefinite", lam_min >= -tol_null, -min(lam_min, 0.0), tol_null))
    out.append(("condition4_F_preserves_null", r4 <= tol_obs, r4, tol_obs))
    mx = max(weak_maxwell(ps, mu, f, tol=tol_eq).residual for mu in range(4))
    out.append(("condition5_weak_maxwell", mx <= tol_eq, mx, tol_eq))
    return out, ps
