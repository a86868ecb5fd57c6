"""Weights on Z = G/H: the group norm, the inf-weight, weights of spherical
representations, sandwich checks against a^lambda and weight synthesis.

A weight w has constants (C, N) with ``w(gz) <= C |g|^N w(z)``; expression
nodes compose those constants along the tree.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import combinations

import numpy as np
from scipy.linalg import expm
from scipy.optimize import linprog, minimize

from .errors import InvalidInput, SolverFailure, SpanDeficient, ToleranceViolation
from .lie_core import TAU_DEF, rank_threshold
from .root_system import _joint_eigvecs

SANDWICH_SPREAD = 1e4


def opnorm(g) -> float:
    return float(np.linalg.norm(g, 2))


def group_norm(g) -> float:
    """max(|g|_op, |g^-1|_op); at least 1, submultiplicative, inverse invariant."""
    g = np.asarray(g, dtype=float)
    s = np.linalg.svd(g, compute_uv=False)
    if s[-1] <= 0:
        raise InvalidInput("group_norm needs an invertible matrix")
    return float(max(s[0], 1.0 / s[-1]))


# --- spherical representations -------------------------------------------------

class SphericalRep:
    """Tensor product of standard and dual representations of the block factors.

    The Euclidean inner product on the tensor product is K-invariant and
    satisfies <X u, v> = <u, X^T v>, i.e. <X u, v> = <u, -theta(X) v>.
    """

    def __init__(self, space, factors, name=""):
        self.space = space
        self.name = name
        self.factors = [(f["kind"], int(f["block"])) if isinstance(f, dict) else (f[0], int(f[1])) for f in factors]
        slices = space.block_slices()
        for kind, b in self.factors:
            if kind not in ("std", "dual") or not 0 <= b < len(slices):
                raise InvalidInput(f"bad factor {(kind, b)}")
        self._slices = [slices[b] for _, b in self.factors]
        self.dims = [space.block_sizes[b] for _, b in self.factors]
        self.dimension = int(np.prod(self.dims))
        self.u_H = self._fixed_vector()
        self._weights = None

    @classmethod
    def from_space(cls, space, index):
        d = space.spherical_rep_data[index]
        return cls(space, d["factors"], d.get("name", f"rep{index}"))

    def _factor_mats(self, g, lie):
        out = []
        for (kind, _), sl in zip(self.factors, self._slices):
            x = g[sl, sl]
            if kind == "std":
                out.append(x)
            else:
                out.append(-x.T if lie else np.linalg.inv(x).T)
        return out

    def act(self, g) -> np.ndarray:
        return reduce(np.kron, self._factor_mats(np.asarray(g, dtype=float), lie=False))

    def dact(self, x) -> np.ndarray:
        mats = self._factor_mats(np.asarray(x, dtype=float), lie=True)
        out = np.zeros((self.dimension, self.dimension))
        for i, m in enumerate(mats):
            parts = [np.eye(d) for d in self.dims]
            parts[i] = m
            out += reduce(np.kron, parts)
        return out

    def _fixed_vector(self):
        hb = self.space.h.matrices()
        if len(hb) == 0:
            v = np.zeros(self.dimension)
            v[0] = 1.0
            return v
        stack = np.vstack([self.dact(x) for x in hb])
        _, s, vt = np.linalg.svd(stack)
        s_full = np.concatenate([s, np.zeros(self.dimension - len(s))])
        null = vt[s_full <= rank_threshold(s)]
        if len(null) == 0:
            raise InvalidInput(f"{self.name}: no H-fixed vector")
        v = null[0]
        v = v / np.linalg.norm(v)
        return v * np.sign(v[np.argmax(np.abs(v))])

    def fixed_residual(self) -> float:
        return max((np.linalg.norm(self.dact(x) @ self.u_H) for x in self.space.h.matrices()), default=0.0)

    def inner_product_residual(self) -> float:
        """max |<X u, v> - <u, X^T v>| over g-basis and standard basis vectors."""
        worst = 0.0
        for x in self.space.g.basis:
            worst = max(worst, float(np.abs(self.dact(x).T - self.dact(x.T)).max()))
        return worst

    def weights(self):
        """List of (functional on a, orthonormal basis of the weight space)."""
        if self._weights is None:
            rs = self.space.rs
            ops = [self.dact(a) for a in rs.a_basis]
            vecs = _joint_eigvecs(ops, tol=1e-8)
            vals = np.array([[v @ op @ v for op in ops] for v in vecs.T])
            groups = []
            for i, val in enumerate(vals):
                for grp in groups:
                    if np.abs(vals[grp[0]] - val).max() < 1e-7:
                        grp.append(i)
                        break
                else:
                    groups.append([i])
            self._weights = [(np.round(vals[g].mean(axis=0), 12), vecs[:, g].T) for g in groups]
        return self._weights

    def highest_weight(self, chamber):
        """Maximal weight for the positive system of ``chamber``, with its weight space."""
        x = self.space.rs.regular_element(chamber)
        return max(self.weights(), key=lambda wv: float(wv[0] @ x))

    def overlap(self, chamber) -> float:
        """|projection of u_H on the highest weight space|."""
        _, basis = self.highest_weight(chamber)
        return float(np.linalg.norm(basis @ self.u_H))

    def weight_value(self, g) -> float:
        return float(np.linalg.norm(self.act(g) @ self.u_H))


def rep_weight(U: SphericalRep, g) -> float:
    return U.weight_value(g)


# --- inf weight -------------------------------------------------------------

def inf_weight(space, g, restarts=8, seed=0):
    """(upper, lower) for inf over h in H of |g h|.

    upper: best of seeded multistart minimisation over the exponential chart of
    h and the Mostow candidate g h0^-1 = k exp(X).  lower: |gh| >= exp(|X|_F / sqrt n),
    because the H-orbit through the base point of G/K is totally geodesic and
    exp(-X) with X in s & q leaves it orthogonally.
    """
    from .decomp import mostow_decompose, rng, SOLVER

    g = np.asarray(g, dtype=float)
    try:
        k, x, h0 = mostow_decompose(space, g, rng(seed, SOLVER))
    except SolverFailure:
        return float("inf"), 1.0
    upper = group_norm(g @ np.linalg.inv(h0))
    lower = max(1.0, float(np.exp(np.linalg.norm(x) / np.sqrt(space.n))))
    hb = space.h.matrices()
    if len(hb):
        gen = rng(seed, SOLVER, 1)

        def f(c):
            return np.log(group_norm(g @ h0i @ expm(np.tensordot(c, hb, axes=1))))

        h0i = np.linalg.inv(h0)
        for i in range(restarts):
            c0 = np.zeros(len(hb)) if i == 0 else gen.normal(scale=0.5, size=len(hb))
            try:
                sol = minimize(f, c0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
            except (ValueError, np.linalg.LinAlgError):
                continue
            if np.isfinite(sol.fun):
                upper = min(upper, float(np.exp(sol.fun)))
    return upper, lower


# --- grids and sandwiches -------------------------------------------------------

def _normalized(rs, v):
    n = rs.norm(v)
    return v / n if n > 0 else v


def _null(m, dim):
    if m.shape[0] == 0:
        return np.eye(dim)
    _, s, vt = np.linalg.svd(m)
    r = int(np.sum(s > 1e-9 * max(1.0, s.max())))
    return vt[r:]


def chamber_rays(rs, chamber, subspace=None):
    """Extreme rays (unit, a-coordinates) and lineality basis of the closed
    chamber, optionally intersected with the span of ``subspace`` (rows in
    a-coordinates)."""
    if subspace is None:
        basis = np.eye(rs.rank_a)
    else:
        sub = np.atleast_2d(subspace)
        basis = np.linalg.svd(sub)[2][:np.linalg.matrix_rank(sub)]
    p = basis.shape[0]
    roots = np.array([rs.roots[i].functional for i in chamber.positive_roots]).reshape(-1, rs.rank_a)
    cons = roots @ basis.T
    lin = _null(cons, p)
    q = _null(lin, p) if len(lin) else np.eye(p)  # complement of the lineality space
    c = cons @ q.T
    r = q.shape[0]
    rays = []
    for subset in combinations(range(len(c)), r - 1):
        null = _null(c[list(subset)], r)
        if len(null) != 1:
            continue
        for v in (null[0], -null[0]):
            if np.all(c @ v >= -1e-9) and np.any(c @ v > 1e-9):
                x = _normalized(rs, (v @ q) @ basis)
                if not any(np.allclose(x, y, atol=1e-8) for y in rays):
                    rays.append(x)
    return np.array(rays).reshape(-1, rs.rank_a), lin @ basis


def standard_grid(rs, chamber, points_per_ray=64, max_norm=12.0, subspace=None):
    """Log-spaced points along each closed-chamber ray, the ray barycentre,
    and the lineality directions, up to |log a| = max_norm."""
    rays, lin = chamber_rays(rs, chamber, subspace)
    dirs = list(rays)
    if len(rays) > 1:
        dirs.append(_normalized(rs, rays.sum(axis=0)))
    for v in lin:
        dirs += [_normalized(rs, v), -_normalized(rs, v)]
    radii = np.concatenate([[0.0], np.geomspace(1e-2, max_norm, points_per_ray - 1)])
    pts = [r * d for d in dirs for r in radii]
    return np.array(pts).reshape(-1, rs.rank_a) if pts else np.zeros((1, rs.rank_a))


def k_samples(space, count, seed):
    from .decomp import K_SAMPLING, rng
    kb = space.cd.k_part.matrices()
    gen = rng(seed, K_SAMPLING)
    out = [np.eye(space.n)]
    for _ in range(count - 1):
        out.append(expm(np.tensordot(gen.normal(scale=np.pi, size=len(kb)), kb, axes=1)))
    return out


def _ratios(space, fn, lam, d, grid, ks):
    rs = space.rs
    out = []
    for x in grid:
        a = expm(rs.a_element(x))
        env = float(np.exp(lam @ x)) * (1.0 + rs.norm(x)) ** d
        for k in ks:
            out.append(fn(k @ a) / env)
    return np.array(out)


def _check_spread(r, label):
    if not np.all(np.isfinite(r)) or r.min() <= 0:
        raise ToleranceViolation(f"{label}: non-finite or vanishing ratio")
    c1, c2 = float(r.min()), float(r.max())
    if c2 / c1 > SANDWICH_SPREAD:
        raise ToleranceViolation(f"{label}: ratio spread {c2 / c1:.3e} exceeds {SANDWICH_SPREAD:.0e}")
    return c1, c2


def verify_sandwich(U: SphericalRep, chamber, grid=None, lam=None, k_count=32, seed=0):
    """Empirical (C1, C2) with C1 a^lam <= w_U(k a z0) <= C2 a^lam on the grid."""
    from .root_system import standard_parabolic
    from .sphericity import test_open

    space = U.space
    rs = space.rs
    if not test_open(standard_parabolic(rs, (), chamber), space.h)[0]:
        raise InvalidInput(f"chamber {chamber.label} does not give an open P H")
    lam = U.highest_weight(chamber)[0] if lam is None else np.asarray(lam, dtype=float)
    grid = standard_grid(rs, chamber) if grid is None else np.asarray(grid, dtype=float)
    r = _ratios(space, U.weight_value, lam, 0, grid, k_samples(space, k_count, seed))
    return _check_spread(r, f"{U.name} on {chamber.label}")


# --- weight expressions -----------------------------------------------------------

class WeightExpr:
    C = 1.0
    N = 0.0

    def __call__(self, g) -> float:
        raise NotImplementedError

    def describe(self) -> str:
        return type(self).__name__


@dataclass(frozen=True)
class Const(WeightExpr):
    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise InvalidInput("constant weight must be positive")

    C = property(lambda self: 1.0)
    N = property(lambda self: 0.0)

    def __call__(self, g):
        return float(self.c)

    def describe(self):
        return f"{self.c:g}"


@dataclass(frozen=True, eq=False)
class InfWeight(WeightExpr):
    space: object
    restarts: int = 8

    C = property(lambda self: 1.0)
    N = property(lambda self: 1.0)

    def __call__(self, g):
        return inf_weight(self.space, g, self.restarts)[0]

    def describe(self):
        return "w_inf"


@dataclass(frozen=True, eq=False)
class RepWeight(WeightExpr):
    U: SphericalRep

    C = property(lambda self: 1.0)
    N = property(lambda self: float(len(self.U.factors)))

    def __call__(self, g):
        return self.U.weight_value(g)

    def describe(self):
        return f"w[{self.U.name}]"


@dataclass(frozen=True, eq=False)
class Product(WeightExpr):
    parts: tuple

    C = property(lambda self: float(np.prod([p.C for p in self.parts])))
    N = property(lambda self: float(sum(p.N for p in self.parts)))

    def __call__(self, g):
        return float(np.prod([p(g) for p in self.parts]))

    def describe(self):
        return " * ".join(p.describe() for p in self.parts)


@dataclass(frozen=True, eq=False)
class Power(WeightExpr):
    base: WeightExpr
    alpha: float

    C = property(lambda self: float(self.base.C ** abs(self.alpha)))
    N = property(lambda self: float(abs(self.alpha) * self.base.N))

    def __call__(self, g):
        return float(self.base(g) ** self.alpha)

    def describe(self):
        return f"({self.base.describe()})^{self.alpha:g}"


@dataclass(frozen=True, eq=False)
class LogShift(WeightExpr):
    """max(1, log(c w)); the floor keeps the weight axiom with N = 1."""
    base: WeightExpr
    c: float = 1.0

    C = property(lambda self: float(1.0 + max(np.log(self.base.C), 0.0) + self.base.N))
    N = property(lambda self: 1.0)

    def __call__(self, g):
        return float(max(1.0, np.log(self.c * self.base(g))))

    def describe(self):
        return f"log({self.c:.4g} {self.base.describe()})"


def synthesize_weight(space, Lambda, d=0, chamber=None, check=True):
    """Weight with a^Lambda (1+|log a|)^d <~ w(k a z0) <~ a^Lambda (1+|log a|)^d on ``chamber``."""
    from .root_system import enumerate_minimal_parabolics
    from .sphericity import test_open

    rs = space.rs
    lam_t = np.asarray(Lambda, dtype=float)
    d = int(d)
    if d < 0:
        raise InvalidInput("d must be nonnegative")
    if chamber is None:
        opens = [c for c, par in enumerate_minimal_parabolics(rs) if test_open(par, space.h)[0]]
        if not opens:
            raise InvalidInput("no open chamber")
        chamber = opens[0]
    reps = [SphericalRep.from_space(space, i) for i in range(len(space.spherical_rep_data))]
    hw = np.array([U.highest_weight(chamber)[0] for U in reps]).reshape(len(reps), rs.rank_a)
    if np.abs(lam_t).max() < 1e-14 and d == 0:
        return Const(1.0)
    if len(reps):
        coef, *_ = np.linalg.lstsq(hw.T, lam_t, rcond=None)
        miss = np.linalg.norm(hw.T @ coef - lam_t)
    else:
        coef, miss = np.zeros(0), np.linalg.norm(lam_t)
    if miss > 1e-9 * max(1.0, np.linalg.norm(lam_t)):
        raise SpanDeficient("Lambda is not in the span of the highest weights", hw)
    terms = []
    for U, c in zip(reps, coef):
        if abs(c) < 1e-12:
            continue
        terms.append(RepWeight(U) if abs(c - 1) < 1e-12 else Power(RepWeight(U), float(c)))
    if d > 0:
        terms.append(Power(_log_weight(space, reps, hw, chamber), float(d)))
    expr = terms[0] if len(terms) == 1 else Product(tuple(terms)) if terms else Const(1.0)
    if check:
        verify_expr(space, expr, lam_t, d, chamber, subspace=_hw_subspace(rs, hw) if d else None)
    return expr


def _hw_subspace(rs, hw):
    """a_hw as a subspace of a (a-coordinates of the h_lambda)."""
    return hw @ rs.gram_inv


def _log_weight(space, reps, hw, chamber):
    rs = space.rs
    rays, lin = chamber_rays(rs, chamber, _hw_subspace(rs, hw))
    if len(lin):
        raise SpanDeficient("closed chamber meets a_hw in a line; no log weight exists", hw)
    k = len(reps)
    # lambda_0 = sum b_i lambda_i with lambda_0(v) >= 1 on every unit ray, min sum |b|
    vals = rays @ hw.T  # (rays, reps)
    c = np.ones(2 * k)
    a_ub = -np.hstack([vals, -vals])
    res = linprog(c, A_ub=a_ub, b_ub=-np.ones(len(rays)), bounds=[(0, None)] * (2 * k), method="highs")
    if not res.success:
        raise SpanDeficient("no lambda_0 in a_hw dominating the norm on the chamber", hw)
    b = res.x[:k] - res.x[k:]
    parts = tuple(Power(RepWeight(U), float(bi)) for U, bi in zip(reps, b) if abs(bi) > 1e-12)
    w0 = parts[0] if len(parts) == 1 else Product(parts)
    lam0 = b @ hw
    grid = standard_grid(rs, chamber, points_per_ray=16, subspace=_hw_subspace(rs, hw))
    r = _ratios(space, w0, lam0, 0, grid, [np.eye(space.n)])
    return LogShift(w0, float(np.e / r.min()))


def verify_expr(space, expr, Lambda, d, chamber, grid=None, subspace=None, k_count=8, seed=0):
    """(C1, C2) for expr / (a^Lambda (1+|log a|)^d) on the chamber grid."""
    rs = space.rs
    grid = standard_grid(rs, chamber, points_per_ray=24, subspace=subspace) if grid is None else grid
    r = _ratios(space, expr, np.asarray(Lambda, dtype=float), d, grid, k_samples(space, k_count, seed))
    return _check_spread(r, expr.describe())


def check_weight_axiom(expr, pairs, slack=1e-9):
    """Worst value of w(gz) / (C |g|^N w(z)) over (g, g') pairs, z = g'.z0."""
    worst = 0.0
    for g, gp in pairs:
        lhs = expr(g @ gp)
        rhs = expr.C * group_norm(g) ** expr.N * expr(gp)
        worst = max(worst, lhs / rhs)
    return worst
