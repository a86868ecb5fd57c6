"""Restricted roots of (g, a), Weyl group, chambers and standard parabolics.

Elements of ``a`` are coordinate vectors over the supplied ``a``-basis
``A_1..A_m``; functionals on ``a`` are coordinate vectors of their values
``lambda(A_i)``.  Weyl words are tuples of 0-based simple-root indices,
``(i, j)`` meaning ``s_i s_j``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from .errors import InvalidInput, NotSplitStructure, ResourceLimit
from .lie_core import (
    LieAlgebraPresentation,
    Subspace,
    bracket,
    kappa,
    numerical_rank,
    span_sum,
)

TAU_ROOT = 1e-7
WEYL_LIMIT = 10**5


def word_label(word) -> str:
    return "e" if not word else "".join(f"s{i + 1}" for i in word)


def _joint_eigvecs(ops, tol):
    """Common orthonormal eigenbasis of commuting symmetric matrices."""
    dim = ops[0].shape[0]

    def refine(vecs, i):
        if i == len(ops) or vecs.shape[1] <= 1:
            return vecs
        sub = vecs.T @ ops[i] @ vecs
        w, v = np.linalg.eigh((sub + sub.T) / 2)
        vecs = vecs @ v
        out, k = [], 0
        while k < len(w):
            j = k
            while j + 1 < len(w) and abs(w[j + 1] - w[k]) < tol:
                j += 1
            out.append(refine(vecs[:, k:j + 1], i + 1))
            k = j + 1
        return np.hstack(out)

    return refine(np.eye(dim), 0)


@dataclass(frozen=True)
class Root:
    functional: np.ndarray
    space: Subspace

    @property
    def multiplicity(self) -> int:
        return self.space.dim


@dataclass(frozen=True)
class Chamber:
    weyl_word: tuple
    element: np.ndarray      # action of w on a-coordinates
    dual: np.ndarray         # action of w on functional coordinates
    positive_roots: tuple    # indices into RestrictedRootSystem.roots

    @property
    def label(self) -> str:
        return word_label(self.weyl_word)


@dataclass(frozen=True, eq=False)
class ParabolicData:
    F: tuple
    a_F: np.ndarray          # basis of a_F in a-coordinates, rows
    m_F: Subspace            # centraliser of a_F
    n_F: Subspace
    p_F: Subspace
    m_P: Subspace            # m_F minus a_F: the M_P of a Langlands split
    chamber: "Chamber | None" = None

    @property
    def langlands(self):
        return self.m_P, self.a_F, self.n_F


class RestrictedRootSystem:
    def __init__(self, g, a_basis, roots, zero_space, regular):
        self.g = g
        self.a_basis = np.asarray(a_basis, dtype=float)
        self.roots = roots
        self.zero_space = zero_space
        self.regular = regular
        self.gram = np.array([[kappa(x, y) for y in self.a_basis] for x in self.a_basis])
        self.gram_inv = np.linalg.inv(self.gram)
        self.positive = tuple(i for i, r in enumerate(roots) if r.functional @ regular > 0)
        self.simple = self._simple_roots()
        self.simple_mat = np.array([roots[i].functional for i in self.simple]).reshape(len(self.simple), self.rank_a)
        self.dual_basis = self._dual_basis()

    @property
    def rank_a(self) -> int:
        return len(self.a_basis)

    @property
    def rank(self) -> int:
        return len(self.simple)

    @property
    def a_space(self) -> Subspace:
        return Subspace.from_matrices(self.g, self.a_basis)

    def a_element(self, x) -> np.ndarray:
        return np.tensordot(np.asarray(x, dtype=float), self.a_basis, axes=1)

    def a_coords(self, X) -> np.ndarray:
        flat = self.a_basis.reshape(self.rank_a, -1)
        c, *_ = np.linalg.lstsq(flat.T, np.asarray(X, dtype=float).ravel(), rcond=None)
        return c

    def norm(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(np.sqrt(max(x @ self.gram @ x, 0.0)))

    def pair(self, lam, mu) -> float:
        return float(lam @ self.gram_inv @ mu)

    def find_root(self, functional):
        for i, r in enumerate(self.roots):
            if np.max(np.abs(r.functional - functional)) < TAU_ROOT * max(1.0, np.abs(functional).max()) * 10:
                return i
        return None

    def _simple_roots(self):
        pos = [self.roots[i].functional for i in self.positive]
        simple = []
        for i, a in zip(self.positive, pos):
            decomposable = any(
                self.find_root(a - b) in self.positive for b in pos if not np.allclose(a, b)
            )
            if not decomposable:
                simple.append(i)
        simple.sort(key=lambda i: tuple(-np.round(self.roots[i].functional, 7)))
        return tuple(simple)

    def _dual_basis(self):
        """H_j in span of the root vectors h_alpha with alpha_i(H_j) = delta_ij."""
        r = self.rank
        if r == 0:
            return np.zeros((0, self.rank_a))
        h = self.simple_mat @ self.gram_inv  # a-coords of h_alpha for the simple roots
        m = self.simple_mat @ h.T
        coeff = np.linalg.solve(m, np.eye(r))
        return coeff.T @ h

    def positive_root_coefficients(self) -> np.ndarray:
        """Coefficients of every positive root over the simple roots."""
        out = []
        for i in self.positive:
            c, *_ = np.linalg.lstsq(self.simple_mat.T, self.roots[i].functional, rcond=None)
            out.append(c)
        return np.array(out)

    def center(self) -> np.ndarray:
        """Rows spanning the common kernel of all roots, in a-coordinates."""
        if self.rank == 0:
            return np.eye(self.rank_a)
        _, s, vt = np.linalg.svd(self.simple_mat)
        return vt[self.rank:]

    def functional_from_dual_values(self, values) -> np.ndarray:
        """Functional taking ``values[j]`` on ``H_j`` and vanishing on the centre."""
        return np.asarray(values, dtype=float) @ self.simple_mat

    def dual_values(self, functional) -> np.ndarray:
        return self.dual_basis @ np.asarray(functional)

    def reflection_dual(self, i) -> np.ndarray:
        a = self.roots[self.simple[i]].functional
        return np.eye(self.rank_a) - 2.0 * np.outer(a, a @ self.gram_inv) / self.pair(a, a)

    def reflection(self, i) -> np.ndarray:
        a = self.roots[self.simple[i]].functional
        h = self.gram_inv @ a
        return np.eye(self.rank_a) - 2.0 * np.outer(h, a) / self.pair(a, a)

    @cached_property
    def weyl_group(self):
        """All (word, element matrix, dual matrix) in shortlex order of words."""
        key = lambda m: tuple(np.round(m, 6).ravel())  # noqa: E731
        ident = np.eye(self.rank_a)
        seen = {key(ident): ((), ident, ident)}
        layer = [((), ident, ident)]
        refl = [(self.reflection(i), self.reflection_dual(i)) for i in range(self.rank)]
        out = [((), ident, ident)]
        while layer:
            nxt = []
            for word, w, wd in layer:
                for i, (r, rd) in enumerate(refl):
                    w2, wd2 = w @ r, wd @ rd
                    k = key(w2)
                    if k in seen:
                        continue
                    item = (word + (i,), w2, wd2)
                    seen[k] = item
                    nxt.append(item)
                    if len(seen) > WEYL_LIMIT:
                        raise ResourceLimit(f"Weyl group exceeds {WEYL_LIMIT} elements")
            nxt.sort(key=lambda t: t[0])
            out.extend(nxt)
            layer = nxt
        return out

    @cached_property
    def chambers(self):
        out = []
        for word, w, wd in self.weyl_group:
            idx = []
            for i in self.positive:
                j = self.find_root(wd @ self.roots[i].functional)
                if j is None:
                    raise NotSplitStructure("Weyl image of a root is not a root")
                idx.append(j)
            out.append(Chamber(word, w, wd, tuple(sorted(idx))))
        return out

    def chamber_by_label(self, label) -> Chamber:
        for c in self.chambers:
            if c.label == label:
                return c
        raise KeyError(label)

    def in_closure(self, chamber: Chamber, x, tol=TAU_ROOT) -> bool:
        x = np.asarray(x, dtype=float)
        scale = max(1.0, float(np.abs(x).max()))
        return all(self.roots[i].functional @ x >= -tol * scale for i in chamber.positive_roots)

    def chamber_of(self, x):
        """First chamber (shortlex) whose closure contains x, and w^-1 x."""
        x = np.asarray(x, dtype=float)
        for c in self.chambers:
            if self.in_closure(c, x):
                return c, np.linalg.solve(c.element, x)
        raise NotSplitStructure("element lies in no chamber closure")

    def regular_element(self, chamber: Chamber) -> np.ndarray:
        return chamber.element @ self.regular

    def root_space_sum(self, indices) -> Subspace:
        parts = [self.roots[i].space for i in indices]
        if not parts:
            return Subspace.zero(self.g)
        return span_sum(*parts)

    def minimal_parabolic(self, chamber: Chamber) -> ParabolicData:
        n = self.root_space_sum(chamber.positive_roots)
        p = span_sum(self.zero_space, n)
        m_p = _remove(self.zero_space, self.a_space)
        return ParabolicData((), np.eye(self.rank_a), self.zero_space, n, p, m_p, chamber)

    def to_json(self) -> dict:
        return {
            "a_dim": self.rank_a,
            "roots": [[float(v) for v in np.round(r.functional, 9)] for r in self.roots],
            "multiplicities": [r.multiplicity for r in self.roots],
            "simple_roots": [[float(v) for v in np.round(self.roots[i].functional, 9)] for i in self.simple],
            "chambers": len(self.chambers),
        }


def _remove(big: Subspace, small: Subspace) -> Subspace:
    """Orthocomplement of ``small`` inside ``big``."""
    return small.orthocomplement(within=big)


def check_abelian(a_basis, tol=1e-9):
    for x, y in combinations(a_basis, 2):
        if np.linalg.norm(bracket(x, y)) > tol * max(1.0, np.linalg.norm(x) * np.linalg.norm(y)):
            return False
    return True


def compute_roots(g: LieAlgebraPresentation, a) -> RestrictedRootSystem:
    a_basis = a.matrices() if isinstance(a, Subspace) else np.asarray(a, dtype=float)
    if a_basis.ndim != 3 or len(a_basis) == 0:
        raise InvalidInput("a needs a non-empty list of matrices")
    if not all(g.contains_element(x) for x in a_basis):
        raise InvalidInput("a is not contained in g")
    if not check_abelian(a_basis):
        raise InvalidInput("a is not abelian")
    if any(np.linalg.norm(x - x.T) > 1e-9 * max(1.0, np.linalg.norm(x)) for x in a_basis):
        raise NotSplitStructure("a is not contained in s (elements are not symmetric)")

    ads = [g.ad(x) for x in a_basis]
    vecs = _joint_eigvecs(ads, tol=1e-6)
    values = np.array([[v @ ad @ v for ad in ads] for v in vecs.T])
    for ad, col in zip(ads, values.T):
        resid = np.linalg.norm(ad @ vecs - vecs * col, axis=0)
        if resid.max() > 1e-6 * max(1.0, np.abs(col).max()):
            raise NotSplitStructure("ad(a) is not simultaneously diagonalisable over R")

    groups: list[list[int]] = []
    for i, val in enumerate(values):
        for grp in groups:
            if np.max(np.abs(values[grp[0]] - val)) < TAU_ROOT * max(1.0, np.abs(val).max()) * 10:
                grp.append(i)
                break
        else:
            groups.append([i])

    onb = g.onb
    zero = None
    roots = []
    for grp in groups:
        functional = values[grp].mean(axis=0)
        rows = (vecs[:, grp].T @ onb)
        sub = Subspace(g, rows)
        if np.abs(functional).max() < TAU_ROOT * 10:
            zero = sub
        else:
            roots.append(Root(np.where(np.abs(functional - np.round(functional)) < 1e-9,
                                       np.round(functional), functional), sub))
    if zero is None:
        zero = Subspace.zero(g)
    roots.sort(key=lambda r: tuple(-r.functional))
    regular = np.pi ** np.arange(1, len(a_basis) + 1)
    if any(abs(r.functional @ regular) < 1e-9 for r in roots):
        raise NotSplitStructure("deterministic regular element is singular")
    return RestrictedRootSystem(g, a_basis, roots, zero, regular)


def standard_parabolic(rs: RestrictedRootSystem, F, chamber: Chamber | None = None) -> ParabolicData:
    """Standard parabolic p_F for the positive system of ``chamber`` (default: reference)."""
    chamber = chamber or rs.chambers[0]
    F = tuple(sorted(set(F)))
    if any(not 0 <= j < rs.rank for j in F):
        raise InvalidInput(f"F must be a subset of range({rs.rank})")
    simple = np.array([chamber.dual @ rs.simple_mat[j] for j in range(rs.rank)]).reshape(rs.rank, rs.rank_a)
    cons = simple[list(F)] if F else np.zeros((0, rs.rank_a))
    if cons.shape[0]:
        _, s, vt = np.linalg.svd(cons)
        r = numerical_rank(cons)
        a_F = vt[r:]
    else:
        a_F = np.eye(rs.rank_a)
    pos = set(chamber.positive_roots)
    vanish, keep = [], []
    for i, root in enumerate(rs.roots):
        if np.all(np.abs(a_F @ root.functional) < TAU_ROOT):
            vanish.append(i)
        elif i in pos:
            keep.append(i)
    m_F = span_sum(rs.zero_space, rs.root_space_sum(vanish)) if vanish else rs.zero_space
    n_F = rs.root_space_sum(keep)
    p_F = span_sum(m_F, n_F)
    a_F_space = Subspace.from_matrices(rs.g, [rs.a_element(x) for x in a_F]) if len(a_F) else Subspace.zero(rs.g)
    m_P = _remove(m_F, a_F_space)
    return ParabolicData(F, a_F, m_F, n_F, p_F, m_P, chamber)


def enumerate_minimal_parabolics(rs: RestrictedRootSystem):
    return [(c, standard_parabolic(rs, (), c)) for c in rs.chambers]


def chamber_of(rs: RestrictedRootSystem, x):
    return rs.chamber_of(x)


def is_maximal_abelian(g: LieAlgebraPresentation, s_part: Subspace, a_basis) -> bool:
    """No element of s outside a commutes with all of a."""
    s_mats = s_part.matrices()
    cols = [np.concatenate([bracket(m, x).ravel() for x in a_basis]) for m in s_mats]
    m = np.array(cols).T
    null = s_part.dim - numerical_rank(m)
    return null == numerical_rank(np.asarray(a_basis).reshape(len(a_basis), -1))


def centralizer_in(sub: Subspace, a_basis) -> Subspace:
    mats = sub.matrices()
    if not len(mats):
        return sub
    m = np.array([np.concatenate([bracket(x, y).ravel() for y in a_basis]) for x in mats]).T
    _, s, vt = np.linalg.svd(m)
    r = numerical_rank(m)
    return Subspace(sub.parent, vt[r:] @ sub.q)

