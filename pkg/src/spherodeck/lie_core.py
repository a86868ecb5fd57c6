"""Linear algebra over explicit real matrix Lie algebras.

A Lie algebra is given by a list of ``n x n`` real matrices spanning it.  All
subspaces are stored as orthonormal bases in flattened (Frobenius) matrix
coordinates, which makes sums, intersections and containment plain rank
computations.  The Cartan involution is always ``X -> -X.T`` and the invariant
form is the trace form ``kappa(X, Y) = trace(XY)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidInput, InvalidPresentation, NotReductive

TAU_DEF = 1e-9
RANK_RTOL = 1e-9


def rank_threshold(singular_values) -> float:
    """Singular values below this count as zero."""
    s = np.asarray(singular_values)
    top = float(s.max()) if s.size else 0.0
    return RANK_RTOL * max(top, 1.0)


def numerical_rank(m) -> int:
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > rank_threshold(s)))


def bracket(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or x.shape[0] != x.shape[1] or x.shape != y.shape:
        raise InvalidInput(f"bracket needs two square matrices of equal size, got {x.shape} and {y.shape}")
    return x @ y - y @ x


def theta(x):
    return -np.asarray(x).T


def kappa(x, y) -> float:
    return float(np.trace(np.asarray(x) @ np.asarray(y)))


def parse_entry(v) -> float:
    """Matrix entries are floats or exact rational strings like ``"-3/5"``."""
    if isinstance(v, str):
        return float(Fraction(v))
    return float(v)


def _orthonormal_rows(rows, truncate=True):
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.shape[0] == 0:
        return rows.reshape(0, rows.shape[-1] if rows.ndim == 2 else 0)
    u, s, vt = np.linalg.svd(rows, full_matrices=False)
    r = int(np.sum(s > rank_threshold(s))) if truncate else len(s)
    return vt[:r]


@dataclass(frozen=True, eq=False)
class LieAlgebraPresentation:
    name: str
    n: int
    basis: np.ndarray  # shape (dim, n, n)
    involution_tag: str = "neg_transpose"
    _q: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 3 or b.shape[1:] != (self.n, self.n):
            raise InvalidPresentation(f"basis must have shape (dim, {self.n}, {self.n}), got {b.shape}")
        if self.involution_tag != "neg_transpose":
            raise InvalidPresentation(f"unsupported involution {self.involution_tag!r}")
        object.__setattr__(self, "basis", b)
        flat = b.reshape(len(b), -1)
        if numerical_rank(flat) != len(b):
            raise InvalidPresentation(f"{self.name}: basis matrices are linearly dependent")
        object.__setattr__(self, "_q", _orthonormal_rows(flat))
        bad = [i for i, x in enumerate(b) if not self.contains_element(theta(x))]
        if bad:
            raise InvalidPresentation(f"{self.name}: theta does not preserve the algebra (basis {bad})")
        if self.closure_residual() > 1e-9:
            raise InvalidPresentation(f"{self.name}: basis is not closed under the bracket")

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def onb(self) -> np.ndarray:
        """Orthonormal basis as flattened rows."""
        return self._q

    def onb_matrices(self) -> np.ndarray:
        return self._q.reshape(-1, self.n, self.n)

    def residual(self, x) -> float:
        v = np.asarray(x, dtype=float).ravel()
        return float(np.linalg.norm(v - self._q.T @ (self._q @ v)))

    def contains_element(self, x, tol=None) -> bool:
        scale = max(1.0, float(np.linalg.norm(x)))
        return self.residual(x) <= (tol if tol is not None else 1e-9) * scale

    def coords(self, x) -> np.ndarray:
        """Coordinates of ``x`` in the given (not orthonormalised) basis."""
        flat = self.basis.reshape(self.dim, -1)
        c, *_ = np.linalg.lstsq(flat.T, np.asarray(x, dtype=float).ravel(), rcond=None)
        return c

    def element(self, coords) -> np.ndarray:
        return np.tensordot(np.asarray(coords, dtype=float), self.basis, axes=1)

    def closure_residual(self) -> float:
        worst = 0.0
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                c = bracket(self.basis[i], self.basis[j])
                worst = max(worst, self.residual(c) / max(1.0, np.linalg.norm(c)))
        return worst

    def structure_constants(self) -> np.ndarray:
        """``c[i, j, k]`` with ``[X_i, X_j] = sum_k c[i, j, k] X_k``."""
        d = self.dim
        flat = self.basis.reshape(d, -1)
        pinv = np.linalg.pinv(flat.T)
        c = np.empty((d, d, d))
        for i in range(d):
            for j in range(d):
                c[i, j] = pinv @ bracket(self.basis[i], self.basis[j]).ravel()
        return c

    def jacobi_residual(self) -> float:
        c = self.structure_constants()
        # sum over cyclic permutations of [[X_i, X_j], X_k]
        t = np.einsum("ijm,mkl->ijkl", c, c)
        cyc = t + np.transpose(t, (1, 2, 0, 3)) + np.transpose(t, (2, 0, 1, 3))
        return float(np.abs(cyc).max())

    def ad(self, x) -> np.ndarray:
        """Matrix of ``ad(x)`` in the orthonormal basis :attr:`onb`."""
        mats = self.onb_matrices()
        images = np.array([bracket(x, m).ravel() for m in mats])
        return self._q @ images.T

    def full(self) -> "Subspace":
        return Subspace(self, self._q, _trusted=True)

    def subspace(self, matrices) -> "Subspace":
        return Subspace.from_matrices(self, matrices)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "basis": [[float(v) for v in m.ravel()] for m in self.basis],
            "theta": self.involution_tag,
        }

    @classmethod
    def from_json(cls, d: dict) -> "LieAlgebraPresentation":
        n = int(d["n"])
        basis = [np.array([parse_entry(v) for v in m], dtype=float).reshape(n, n) for m in d["basis"]]
        return cls(d.get("name", ""), n, np.array(basis), d.get("theta", "neg_transpose"))


class Subspace:
    """Linear subspace of a parent algebra with an orthonormal flattened basis."""

    __slots__ = ("parent", "q")

    def __init__(self, parent: LieAlgebraPresentation, rows, _trusted=False):
        self.parent = parent
        rows = np.asarray(rows, dtype=float).reshape(-1, parent.n * parent.n)
        self.q = rows if _trusted else _orthonormal_rows(rows)
        if self.dim > parent.dim:
            raise InvalidInput("subspace dimension exceeds the parent algebra")

    @classmethod
    def from_matrices(cls, parent, matrices):
        m = np.asarray(matrices, dtype=float).reshape(-1, parent.n * parent.n)
        return cls(parent, m)

    @classmethod
    def zero(cls, parent):
        return cls(parent, np.zeros((0, parent.n * parent.n)), _trusted=True)

    @property
    def dim(self) -> int:
        return self.q.shape[0]

    def matrices(self) -> np.ndarray:
        n = self.parent.n
        return self.q.reshape(-1, n, n)

    @property
    def basis_coords(self) -> np.ndarray:
        """Basis vectors expressed in the parent's given basis."""
        return np.array([self.parent.coords(m) for m in self.matrices()]).reshape(self.dim, self.parent.dim)

    def project(self, x) -> np.ndarray:
        v = np.asarray(x, dtype=float).ravel()
        return (self.q.T @ (self.q @ v)).reshape(np.shape(x))

    def member(self, x, tol=1e-9) -> bool:
        v = np.asarray(x, dtype=float).ravel()
        r = np.linalg.norm(v - self.q.T @ (self.q @ v))
        return bool(r <= tol * max(1.0, np.linalg.norm(v)))

    def orthocomplement(self, within: "Subspace | None" = None) -> "Subspace":
        """Frobenius orthocomplement inside ``within`` (default: the parent)."""
        ambient = within if within is not None else self.parent.full()
        _check_parent(self, ambient)
        w = ambient.q
        m = w - (w @ self.q.T) @ self.q
        return Subspace(self.parent, m)

    def __repr__(self):
        return f"Subspace(dim={self.dim} of {self.parent.name})"


def _check_parent(u: Subspace, v: Subspace):
    if u.parent is not v.parent:
        raise InvalidInput("subspaces belong to different algebras")


def _sum_and_intersection(u: Subspace, v: Subspace):
    _check_parent(u, v)
    du, dv = u.dim, v.dim
    if du + dv == 0:
        z = Subspace.zero(u.parent)
        return z, z
    m = np.vstack([u.q, v.q])  # rows span u + v
    w, s, vt = np.linalg.svd(m.T, full_matrices=True)
    r = int(np.sum(s > rank_threshold(s))) if s.size else 0
    total = Subspace(u.parent, w[:, :r].T, _trusted=True)
    null = vt[r:]  # coefficient vectors (c_u, c_v) with c_u.u = -c_v.v
    if null.shape[0] == 0:
        return total, Subspace.zero(u.parent)
    elems = null[:, :du] @ u.q
    q = _orthonormal_rows(elems, truncate=False)
    return total, Subspace(u.parent, q, _trusted=True)


def subspace_sum(u: Subspace, v: Subspace) -> Subspace:
    return _sum_and_intersection(u, v)[0]


def subspace_intersect(u: Subspace, v: Subspace) -> Subspace:
    return _sum_and_intersection(u, v)[1]


def contains(u: Subspace, v: Subspace) -> bool:
    """True when ``v`` is a subspace of ``u``."""
    _check_parent(u, v)
    if v.dim == 0:
        return True
    return subspace_sum(u, v).dim == u.dim


def span_sum(*parts: Subspace) -> Subspace:
    out = parts[0]
    for p in parts[1:]:
        out = subspace_sum(out, p)
    return out


@dataclass(frozen=True, eq=False)
class CartanDecomposition:
    k_part: Subspace
    s_part: Subspace
    form_signature: tuple  # (min eigenvalue of -kappa on k, min eigenvalue of kappa on s)


def _gram(sub: Subspace) -> np.ndarray:
    m = sub.matrices()
    return np.array([[kappa(a, b) for b in m] for a in m]).reshape(sub.dim, sub.dim)


def cartan_decompose(g: LieAlgebraPresentation) -> CartanDecomposition:
    mats = g.basis
    for x in mats:
        if not g.contains_element(theta(x)):
            raise InvalidPresentation(f"{g.name}: theta does not preserve the algebra")
    k = Subspace.from_matrices(g, [(x - x.T) / 2 for x in mats])
    s = Subspace.from_matrices(g, [(x + x.T) / 2 for x in mats])
    if k.dim + s.dim != g.dim:
        raise InvalidPresentation(f"{g.name}: eigenspaces of theta do not add up")
    full = _gram(g.full())
    if numerical_rank(full) != g.dim:
        raise NotReductive(f"{g.name}: trace form is degenerate")
    ek = np.linalg.eigvalsh(-_gram(k)) if k.dim else np.array([np.inf])
    es = np.linalg.eigvalsh(_gram(s)) if s.dim else np.array([np.inf])
    if ek.min() <= TAU_DEF or es.min() <= TAU_DEF:
        raise NotReductive(f"{g.name}: trace form is not definite on k or s")
    return CartanDecomposition(k, s, (float(ek.min()), float(es.min())))
