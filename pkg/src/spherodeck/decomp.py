"""Group level decompositions g = k exp(X) h and the checks built on them.

Conventions: K is the orthogonal part of G (theta g = g^{-T}), elements of a
are coordinate vectors over the space's a-basis, and residuals are Frobenius
norms ``|k exp(X) h - g|``.  ``TAU_DEC`` is relative to ``|g|_F``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.optimize import brentq, least_squares

from .errors import InvalidInput, SolverFailure
from .lie_core import Subspace, subspace_intersect
from .models import H0, J0, block_diag, unit

TAU_DEC = 1e-8
MAX_RESTARTS = 16

# named RNG substreams, see rng()
SAMPLING, SOLVER, K_SAMPLING = 0, 1, 2


def rng(seed, stream, index=0):
    """Independent generator for (seed, named stream, sample index)."""
    return np.random.default_rng([int(seed), int(stream), int(index)])


# --- small matrix helpers ---------------------------------------------------

def sym_fun(a, f):
    """Apply ``f`` to the eigenvalues of a symmetric matrix."""
    a = (a + a.T) / 2
    w, v = np.linalg.eigh(a)
    return (v * f(w)) @ v.T


def log_spd(a):
    return sym_fun(a, np.log)


def sqrt_spd(a):
    return sym_fun(a, np.sqrt)


def exp_sym(a):
    return sym_fun(a, np.exp)


def geometric_mean(a, b):
    """``a # b``, the SPD solution of ``X b^-1 X = a``."""
    ah = sqrt_spd(a)
    ahi = np.linalg.inv(ah)
    return ah @ sqrt_spd(ahi @ b @ ahi) @ ah


def residual(g, k, x_mat, h) -> float:
    return float(np.linalg.norm(k @ expm(x_mat) @ h - g))


@dataclass
class KAHWitness:
    k: np.ndarray
    X_a: np.ndarray
    h: np.ndarray
    residual: float
    chamber: str | None = None
    solver: str = ""
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "k": np.round(self.k, 12).tolist(),
            "X_a": [float(v) for v in np.round(self.X_a, 12)],
            "h": np.round(self.h, 12).tolist(),
            "residual": float(self.residual),
            "chamber": self.chamber,
            "solver": self.solver,
        }


# --- KAK in the classical groups --------------------------------------------

def kak_decompose(g0):
    """``g0 = k1 @ a @ k2`` with ``a`` diagonal, entries decreasing and positive.

    For ``det g0 > 0`` both ``k1`` and ``k2`` are in SO(n).
    """
    g0 = np.asarray(g0, dtype=float)
    u, s, vt = np.linalg.svd(g0)
    if np.linalg.det(u) < 0 and np.linalg.det(vt) < 0:
        u[:, -1] *= -1
        vt[-1, :] *= -1
    return u, np.diag(s), vt


def _b_sqrt(alpha, beta):
    """Square root inside B of ``[[alpha, beta], [beta, alpha]]``."""
    sp, sm = np.sqrt(alpha + beta), np.sqrt(alpha - beta)
    return np.array([[sp + sm, sp - sm], [sp - sm, sp + sm]]) / 2


# --- group case and triple space --------------------------------------------

def _blocks(g, sizes):
    out, off = [], 0
    for s in sizes:
        out.append(g[off:off + s, off:off + s])
        off += s
    return out


def kah_group(g):
    """Group case SL(2)^2 / diag with A = A_0 x A_0.  Returns (k, X_a, h)."""
    g1, g2 = _blocks(g, [2, 2])
    u, b, v = kak_decompose(g1 @ np.linalg.inv(g2))
    tau = np.log(b[0, 0])
    bh = np.diag(np.sqrt(np.diag(b)))
    y = np.linalg.inv(bh) @ u.T @ g1
    return block_diag(u, v.T), np.array([tau / 2, -tau / 2]), block_diag(y, y)


def ambk_decompose(x):
    """SL(2) as A_0 M_0 B_0 K_0: ``x = a0 m0 b0 k0`` with a0 = exp(r H0), b0 = exp(beta J0).

    Closed form from ``x x^T = a0 exp(2 beta J0) a0``; m0 = 1 always works since
    -1 lies in SO(2).  A Newton polish runs only if the closed form misses.
    """
    p = x @ x.T
    beta = np.arcsinh(p[0, 1]) / 2
    r = np.log(p[0, 0] / np.cosh(2 * beta)) / 4
    a0, b0 = expm(r * H0), expm(beta * J0)
    k0 = np.linalg.inv(b0) @ np.linalg.inv(a0) @ x
    err = np.linalg.norm(a0 @ b0 @ k0 - x) + np.linalg.norm(k0.T @ k0 - np.eye(2))
    if err > 1e-12 * max(1.0, np.linalg.norm(x)):
        def f(z):
            r_, b_, phi = z
            c, s = np.cos(phi), np.sin(phi)
            return (expm(r_ * H0) @ expm(b_ * J0) @ np.array([[c, -s], [s, c]]) - x).ravel()
        phi0 = np.arctan2(k0[1, 0], k0[0, 0])
        sol = least_squares(f, [r, beta, phi0], xtol=1e-15, ftol=1e-15, gtol=1e-15)
        r, beta, phi = sol.x
        a0, b0 = expm(r * H0), expm(beta * J0)
        c, s = np.cos(phi), np.sin(phi)
        k0 = np.array([[c, -s], [s, c]])
    return r, np.eye(2), beta, k0


def kah_triple_degenerate(g):
    """SL(2)^3 / diag with A = A_0 x A_0 x B_0, following the two-step proof."""
    g1, g2, g3 = _blocks(g, [2, 2, 2])
    # step 1: symmetric decomposition of (g1, g2)
    u, b, v = kak_decompose(g1 @ np.linalg.inv(g2))
    tau = np.log(b[0, 0])
    bh = np.diag(np.sqrt(np.diag(b)))
    y = np.linalg.inv(bh) @ u.T @ g1
    # step 2: A_0 M_0 B_0 K_0 of y g3^-1
    r, m0, beta, k0 = ambk_decompose(y @ np.linalg.inv(g3))
    z = np.linalg.inv(m0) @ expm(-r * H0) @ y
    k = block_diag(u @ m0, v.T @ m0, k0.T)
    return k, np.array([tau / 2 + r, -tau / 2 + r, -beta]), block_diag(z, z, z)


def _commutator_residual(m, a):
    c = m @ a - a @ m
    return c[0, 1] / max(1.0, np.linalg.norm(m))


def kah_triple_generic(g, dirs, rng_=None, restarts=MAX_RESTARTS):
    """SL(2)^3 / diag with A = exp(R A_1) x exp(R A_2) x exp(R A_3), every A_i^2 = 1.

    Two unknowns remain after eliminating h: the angle of k_3 and the parameter
    of a_3.  The conditions are that ``x_i^T x_i`` commutes with A_i (i = 1, 2)
    where ``x_i = g_i g_3^-1 k_3 a_3``.
    """
    g1, g2, g3 = _blocks(g, [2, 2, 2])
    a1, a2, a3 = dirs
    g3i = np.linalg.inv(g3)
    p1 = (g1 @ g3i).T @ (g1 @ g3i)
    p2 = (g2 @ g3i).T @ (g2 @ g3i)

    def parts(z):
        phi, s = z
        c, sn = np.cos(phi), np.sin(phi)
        k3 = np.array([[c, -sn], [sn, c]])
        e = np.cosh(s) * np.eye(2) + np.sinh(s) * a3
        return k3, e, e @ k3.T @ p1 @ k3 @ e, e @ k3.T @ p2 @ k3 @ e

    def f(z):
        _, _, m1, m2 = parts(z)
        return [_commutator_residual(m1, a1), _commutator_residual(m2, a2)]

    rng_ = rng_ or np.random.default_rng(0)
    grid = [(phi, s) for s in (0.0, 0.8, -0.8, 1.6, -1.6) for phi in np.linspace(0, np.pi, 6, endpoint=False)]
    extra = [tuple(rng_.uniform([0, -4], [np.pi, 4])) for _ in range(restarts)]
    best, best_res = None, np.inf
    for z0 in grid + extra:
        sol = least_squares(f, z0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200)
        out = _assemble_triple(g, parts(sol.x), dirs)
        if out[3] < best_res:
            best, best_res = out, out[3]
        if best_res <= 1e-11 * max(1.0, np.linalg.norm(g)):
            break
    return best


def _assemble_triple(g, parts, dirs):
    g1, g2, g3 = _blocks(g, [2, 2, 2])
    k3, e3, m1, m2 = parts
    ks, ts = [], []
    for gi, mi, ai in ((g1, m1, dirs[0]), (g2, m2, dirs[1])):
        t = np.arcsinh(np.trace(mi @ ai) / 2) / 2
        ts.append(t)
        xi = gi @ np.linalg.inv(g3) @ k3 @ e3
        ks.append(xi @ (np.cosh(t) * np.eye(2) - np.sinh(t) * ai))
    z = np.linalg.inv(e3) @ k3.T @ g3
    # the a_3 parameter: e3 = cosh s + sinh s A_3
    s = np.arcsinh(np.trace(e3 @ dirs[2]) / 2)
    k = block_diag(ks[0], ks[1], k3)
    x = np.array([ts[0], ts[1], s])
    h = block_diag(z, z, z)
    full = block_diag(*(np.cosh(v) * np.eye(2) + np.sinh(v) * d for v, d in zip(x, dirs)))
    res = np.linalg.norm(k @ full @ h - g) + np.linalg.norm(k.T @ k - np.eye(6)) * np.linalg.norm(g)
    return k, x, h, res


# --- Gross-Prasad GL(n+1) x GL(n) / GL(n) ---------------------------------------

def iota(x, m):
    """Lower right corner embedding of GL(k) in GL(m)."""
    k = x.shape[0]
    out = np.eye(m)
    out[m - k:, m - k:] = x
    return out


def almost_symmetric(x):
    """``x = k b1 iota(y)`` with b1 in B (upper left corner) and y in GL(m-1)."""
    m = x.shape[0]
    p = x.T @ x
    alpha, v, q = p[0, 0], p[0, 1:], p[1:, 1:]
    qv = np.linalg.solve(q, v)
    bsq = alpha * (v @ qv)
    if bsq <= 1e-28 * alpha * alpha:
        beta = 0.0
        d = np.ones(m - 1)
        d[0] = alpha
        y = np.diag(1 / np.sqrt(d)) @ sqrt_spd(q)
    else:
        beta = np.sqrt(bsq)
        r = v / beta
        s = q - alpha * np.outer(r, r)
        w, vec = np.linalg.eigh((s + s.T) / 2)
        keep = np.argsort(w)[::-1][:m - 2]
        rest = (vec[:, keep] * np.sqrt(np.clip(w[keep], 0, None))).T
        y = np.vstack([r, rest])
    b1 = _b_sqrt(alpha, beta)
    big = np.eye(m)
    big[:2, :2] = b1
    k = x @ np.linalg.inv(iota(y, m)) @ np.linalg.inv(big)
    # snap to O(m): the triangular solves lose orthogonality like cond(x)^2
    u, _, vt = np.linalg.svd(k)
    return u @ vt, b1, y


def gp_polar(x):
    """``x = k a iota(a') iota(u)`` with a in A_m, a' in A_{m-1}, k in O(m), u in O(m-1).

    Recursion: the almost symmetric step, then the induction hypothesis applied
    to ``y^-1`` and inverted, which is the order reversal of the proof.
    """
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    if m == 1:
        s = np.sign(x[0, 0]) or 1.0
        return np.array([[s]]), np.abs(x), np.zeros((0, 0)), np.zeros((0, 0))
    k, b1, y = almost_symmetric(x)
    kt, at, apt, ut = gp_polar(np.linalg.inv(y))
    # y = iota(ut^T) iota(apt^-1) at^-1 kt^T inside GL(m-1)
    a = np.eye(m)
    a[:2, :2] = b1
    if m > 2:
        a[2:, 2:] = np.linalg.inv(apt)
        k = k @ iota(ut.T, m)
    return k, a, np.linalg.inv(at), kt.T


def kah_gross_prasad(g1, g2):
    """``(g1, g2) = (k1 a1 iota(y), k2 a2 y)``; returns (k1, a1, k2, a2, y)."""
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    m = g1.shape[0]
    if g2.shape[0] != m - 1:
        raise InvalidInput("Gross-Prasad needs GL(n+1) x GL(n)")
    x = g1 @ np.linalg.inv(iota(g2, m)) if m > 1 else g1
    k, a, ap, u = gp_polar(x)
    a2 = np.linalg.inv(ap) if m > 1 else np.zeros((0, 0))
    k2 = u.T
    y = ap @ u @ g2 if m > 1 else np.zeros((0, 0))
    return k, a, k2, a2, y


# --- Sp(2) / (Sp(1) x U(1)) chain --------------------------------------------

_Z = np.zeros((2, 2))
_E11, _E22 = unit(2, 0, 0), unit(2, 1, 1)


def _sp(x1, x2, x3):
    return np.block([[x1, x2], [x3, -x1.T]])


SP_Y1 = _sp(np.eye(2), _Z, _Z)
SP_Y2 = _sp(J0, _Z, _Z)
SP_Y3 = _sp(_Z, J0, J0)
SP_W = _sp(_Z, _E22, -_E22)
SP_Z1 = _sp(_Z, -_E11 + _E22, _E11 - _E22)
SP_Z2 = _sp(_Z, _E11, -_E11)
SP_E11 = _sp(_E11, _Z, _Z)
SP_E22 = _sp(_E22, _Z, _Z)
_SIGMA = np.diag([1.0, -1.0, 1.0, -1.0])


def symmetric_pair_sp(g):
    """``g = k exp(X) exp(T)`` for (Sp(2), Sp(1) x Sp(1)), X in s & q_L, T in s & l.

    With R = g^T g: exp(2T) = R # sigma(R) and exp(2X) = exp(-T) R exp(-T).
    """
    r = g.T @ g
    c = geometric_mean(r, _SIGMA @ r @ _SIGMA)
    t = log_spd(c) / 2
    et_inv = exp_sym(-t)
    x = log_spd(et_inv @ r @ et_inv) / 2
    k = g @ et_inv @ exp_sym(-x)
    return k, x, t


def _rotation_to_y2(x):
    """Angle phi with Ad(exp(phi Z2)) x in R_{>=0} Y2, for x in span(Y2, Y3)."""
    def coords(phi):
        m = expm(phi * SP_Z2)
        y = m @ x @ m.T
        return np.sum(y * SP_Y2) / 4, np.sum(y * SP_Y3) / 4

    if np.linalg.norm(x) < 1e-14:
        return 0.0
    grid = np.linspace(0, 2 * np.pi, 65)
    vals = [coords(p) for p in grid]
    for i in range(64):
        (c2a, c3a), (c2b, c3b) = vals[i], vals[i + 1]
        if c3a == 0 and c2a >= 0:
            return grid[i]
        if c3a * c3b < 0 and c2a + c2b > 0:
            return brentq(lambda p: coords(p)[1], grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15)
    raise SolverFailure("no rotation of the s & q_L component onto Y2 found")


def kah_sp_chain(g):
    """Sp(2) = K A_1 L, then L = (L & K) A_2 H, then remove the middle K-factor.

    Returns (k, (mu, tau), h) with a = exp(mu Y1 + tau Y2).
    """
    g = np.asarray(g, dtype=float)
    k, x, t = symmetric_pair_sp(g)
    phi = _rotation_to_y2(x)
    m = expm(phi * SP_Z2)
    tau = float(np.sum((m @ x @ m.T) * SP_Y2) / 4)
    k = k @ m.T
    l = m @ exp_sym(t)
    l2 = l[np.ix_([1, 3], [1, 3])]
    c2, a2, d2 = kak_decompose(l2)
    mu = np.log(a2[0, 0])
    d_full = np.eye(4)
    d_full[np.ix_([1, 3], [1, 3])] = d2
    c_full = np.eye(4)
    c_full[np.ix_([1, 3], [1, 3])] = c2
    h0 = np.linalg.inv(c_full @ expm(mu * SP_E22)) @ l
    psi = np.arctan2(c2[0, 1], c2[0, 0])  # c2 = exp(psi W) restricted to (1, 3)
    k = k @ expm(psi * SP_Z1)
    h = expm(-mu * SP_E11) @ expm(psi * SP_Z2) @ h0
    return k, np.array([mu, tau]), h


# --- generic numerical solvers ------------------------------------------------

def _basis(sub: Subspace):
    return sub.matrices()


def mostow_decompose(space, g, rng_=None, restarts=MAX_RESTARTS):
    """``g = k exp(X) h`` with X in s & q.  Returns (k, X, h).

    Writing h = exp(T) m with T in s & h, the unknown T solves
    ``proj_{s&h} log(exp(-T) R exp(-T)) = 0`` with R = g^T g.
    """
    g = np.asarray(g, dtype=float)
    s_h = subspace_intersect(space.h, space.cd.s_part)
    basis = _basis(s_h)
    r = g.T @ g

    def x_of(c):
        t = np.tensordot(c, basis, axes=1) if len(basis) else np.zeros_like(g)
        e = exp_sym(-t)
        return t, log_spd(e @ r @ e) / 2

    def f(c):
        _, x = x_of(c)
        return np.array([np.sum(x * b) for b in basis])

    rng_ = rng_ or np.random.default_rng(0)
    tol = 1e-12 * max(1.0, np.linalg.norm(r))
    if len(basis) == 0:
        t, x = x_of(np.zeros(0))
    else:
        x0 = np.zeros(len(basis))
        for attempt in range(restarts):
            sol = least_squares(f, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=500)
            if np.max(np.abs(sol.fun), initial=0.0) <= tol:
                break
            x0 = rng_.normal(size=len(basis))
        else:
            raise SolverFailure("Mostow decomposition did not converge", {"restarts": restarts})
        t, x = x_of(sol.x)
    k = g @ exp_sym(-t) @ exp_sym(-x)
    h = exp_sym(t)
    res = np.linalg.norm(k @ exp_sym(x) @ h - g)
    if res > TAU_DEC * max(1.0, np.linalg.norm(g)) or np.linalg.norm(k.T @ k - np.eye(len(g))) > 1e-8:
        raise SolverFailure("Mostow decomposition residual above tolerance", {"residual": float(res)})
    return k, x, h


def kah_generic(space, g, rng_=None, restarts=MAX_RESTARTS, max_iter=500):
    """Least squares over exponential charts of (k, a, h); evidence only."""
    g = np.asarray(g, dtype=float)
    kb = _basis(space.cd.k_part)
    ab = space.a_basis
    hb = _basis(space.h)
    nk, na, nh = len(kb), len(ab), len(hb)
    scale = max(1.0, np.linalg.norm(g))

    def build(z):
        k = expm(np.tensordot(z[:nk], kb, axes=1))
        x = np.tensordot(z[nk:nk + na], ab, axes=1)
        h = expm(np.tensordot(z[nk + na:], hb, axes=1))
        return k, x, h

    def f(z):
        k, x, h = build(z)
        return ((k @ expm(x) @ h - g) / scale).ravel()

    rng_ = rng_ or np.random.default_rng(0)
    best = None
    for attempt in range(restarts):
        z0 = np.zeros(nk + na + nh) if attempt == 0 else rng_.normal(size=nk + na + nh)
        sol = least_squares(f, z0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_iter)
        k, x, h = build(sol.x)
        res = np.linalg.norm(k @ expm(x) @ h - g)
        if best is None or res < best[3]:
            best = (k, sol.x[nk:nk + na], h, res)
        if res <= TAU_DEC * scale:
            break
    return best[0], best[1], best[2]


# --- dispatch ----------------------------------------------------------------

def _a_blocks_2x2(space):
    """Per-SL(2)-factor direction of the catalog a-basis (one element per factor)."""
    out = []
    for x, sl in zip(space.a_basis, space.block_slices()):
        out.append(x[sl, sl])
    return out


def kah_decompose(space, g, rng_=None, tol=TAU_DEC) -> KAHWitness:
    """Decompose with the space's solver; raises SolverFailure above tolerance."""
    g = np.asarray(g, dtype=float)
    if g.shape != (space.n, space.n):
        raise InvalidInput(f"element must be {space.n}x{space.n}")
    if not space.in_group(g):
        raise InvalidInput("element is not in the group")
    solver = space.kah_solver
    rs = space.rs
    try:
        if solver == "group":
            k, xa, h = kah_group(g)
        elif solver == "triple_degenerate":
            k, xa, h = kah_triple_degenerate(g)
        elif solver == "triple_generic":
            k, xa, h, _ = kah_triple_generic(g, _a_blocks_2x2(space), rng_)
        elif solver == "gross_prasad":
            sizes = space.block_sizes
            g1, g2 = _blocks(g, sizes)
            k1, a1, k2, a2, y = kah_gross_prasad(g1, g2)
            k = block_diag(k1, k2)
            h = block_diag(iota(y, sizes[0]), y)
            xa = rs.a_coords(block_diag(log_spd(a1), log_spd(a2)))
        elif solver == "sp_chain":
            k, xa, h = kah_sp_chain(g)
        else:
            k, xa, h = kah_generic(space, g, rng_)
    except (np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
        raise SolverFailure(f"{solver} solver raised {exc!r}") from exc
    xa = np.asarray(xa, dtype=float)
    res = residual(g, k, rs.a_element(xa), h)
    bound = tol * max(1.0, np.linalg.norm(g))
    kerr = float(np.linalg.norm(k.T @ k - np.eye(space.n)))
    if not np.isfinite(res) or res > bound or kerr > 1e-8:
        raise SolverFailure(f"{solver}: residual {res:.3e} above {bound:.3e}",
                            {"residual": float(res), "k_orthogonality": kerr})
    try:
        chamber = rs.chamber_of(xa)[0].label
    except Exception:  # noqa: BLE001 - an element off every closure is reported, not fatal
        chamber = None
    return KAHWitness(k, xa, h, float(res), chamber, solver)


# --- sampling, coverage, wavefront -----------------------------------------------

def sample_element(space, gen, radius=3.0):
    """``exp(S) exp(T)`` with S in s of norm uniform in [0, radius] and T in k."""
    s_b = space.cd.s_part.matrices()
    k_b = space.cd.k_part.matrices()
    c = gen.normal(size=len(s_b))
    c *= gen.uniform(0, radius) / max(np.linalg.norm(c), 1e-300)
    t = gen.normal(size=len(k_b)) * np.pi
    return exp_sym(np.tensordot(c, s_b, axes=1)) @ expm(np.tensordot(t, k_b, axes=1))


@dataclass
class CoverageReport:
    samples: int
    covered: int
    solver_failures: int
    per_chamber: dict
    offenders: list
    open_chambers: list
    max_residual: float = 0.0

    @property
    def coverage(self) -> float:
        done = self.samples - self.solver_failures
        return self.covered / done if done else 0.0

    @property
    def failure_rate(self) -> float:
        return self.solver_failures / self.samples if self.samples else 0.0

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "covered": self.covered,
            "solver_failures": self.solver_failures,
            "per_chamber": dict(sorted(self.per_chamber.items())),
            "offenders": list(self.offenders),
            "coverage": self.coverage,
            "open_chambers": list(self.open_chambers),
            "max_residual": self.max_residual,
        }


def coverage_check(space, samples, seed, tol=TAU_DEC, radius=3.0, threads=1) -> CoverageReport:
    """Fraction of sampled g whose a-part lies in the closure of an open chamber.

    Sample i draws from its own substreams, so the report does not depend on
    ``threads``; results are collected in index order."""
    from .root_system import enumerate_minimal_parabolics
    from .sphericity import test_open

    if int(samples) <= 0:
        raise InvalidInput("samples must be positive")
    rs = space.rs
    opens = [c for c, par in enumerate_minimal_parabolics(rs) if test_open(par, space.h)[0]]
    per, offenders = {}, []
    covered = failures = 0
    worst = 0.0
    space.rs, space.cd  # warm the cached properties before any worker threads start

    def one(i):
        g = sample_element(space, rng(seed, SAMPLING, i), radius)
        try:
            return g, kah_decompose(space, g, rng(seed, SOLVER, i), tol)
        except SolverFailure:
            return g, None

    idx = range(int(samples))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            results = list(pool.map(one, idx))
    else:
        results = [one(i) for i in idx]
    for i, (g, w) in enumerate(results):
        if w is None:
            failures += 1
            continue
        worst = max(worst, w.residual / max(1.0, np.linalg.norm(g)))
        per[w.chamber] = per.get(w.chamber, 0) + 1
        if any(rs.in_closure(c, w.X_a) for c in opens):
            covered += 1
        else:
            offenders.append(i)
    return CoverageReport(int(samples), covered, failures, per, offenders, [c.label for c in opens], worst)


def _h_distance(space, target, u_mat, g, eps_iter=200):
    """min over h in H (exponential chart) of |g u h g^-1 - I|_op."""
    hb = space.h.matrices()
    gi = np.linalg.inv(g)
    base = g @ u_mat

    def f(c):
        h = expm(np.tensordot(c, hb, axes=1))
        return (base @ h @ gi - target).ravel()

    sol = least_squares(f, np.zeros(len(hb)), max_nfev=eps_iter)
    h = expm(np.tensordot(sol.x, hb, axes=1))
    return np.linalg.norm(base @ h @ gi - target, 2), sol.success


def wavefront_probe(space, epsilon, samples, seed, t_max=3.0):
    """Empirical delta with ``g U z0`` inside ``V g z0`` for U = ball(delta), V = ball(epsilon).

    For each sampled g = k exp(X) with X in an open closed chamber and each u
    near e, the sample fails when no h brings ``g u h g^-1`` within epsilon of e.
    delta is the smallest d(e, u) over failing samples, capped at epsilon.
    """
    from .root_system import enumerate_minimal_parabolics
    from .sphericity import test_open

    rs = space.rs
    opens = [c for c, par in enumerate_minimal_parabolics(rs) if test_open(par, space.h)[0]]
    if not opens:
        raise InvalidInput("no open chamber: wavefront probe needs a spherical space")
    k_b = space.cd.k_part.matrices()
    g_b = space.g.onb_matrices()
    delta, worst, minimizer_failures = float(epsilon), None, 0
    for i in range(int(samples)):
        gen = rng(seed, SAMPLING, i)
        ch = opens[i % len(opens)]
        x = rs.regular_element(ch)
        x = x / rs.norm(x) * gen.uniform(0, t_max)
        k = expm(np.tensordot(gen.normal(size=len(k_b)), k_b, axes=1))
        g = k @ expm(rs.a_element(x))
        z = gen.normal(size=len(g_b))
        direction = np.tensordot(z / np.linalg.norm(z), g_b, axes=1)
        u = expm(gen.uniform(0, epsilon) * direction / max(np.linalg.norm(direction, 2), 1e-300))
        du = np.linalg.norm(u - np.eye(space.n), 2)
        dist, ok = _h_distance(space, np.eye(space.n), u, g)
        minimizer_failures += 0 if ok else 1
        if dist > epsilon and du < delta:
            delta, worst = du, {"index": i, "d_u": float(du), "residual": float(dist)}
    return delta, {"worst": worst, "minimizer_failures": minimizer_failures}
