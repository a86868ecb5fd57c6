"""Exponent calculus: E(V), the envelope (Lambda_V, d_V), Weyl transport,
restriction to faces, the half-step exponent improvement and the ODE lemma.

Exponents are complex functionals on a given by their values on the dual
basis H_1..H_r of the simple roots.  Envelope functionals are real and given
in a-coordinates (values on the a-basis), vanishing on the centre.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidInput, NumericalInstability
from .models import H0, sl_basis


@dataclass
class ExponentData:
    root_system: object
    exponents: np.ndarray            # (m, r) complex, lambda(H_j)
    face_multiplicities: np.ndarray  # (r,) positive integers d_{F_j}

    def __post_init__(self):
        e = np.atleast_2d(np.asarray(self.exponents, dtype=complex))
        r = self.root_system.rank
        if e.size == 0:
            raise InvalidInput("E(V) must be nonempty")
        if e.shape[1] != r:
            raise InvalidInput(f"exponents need {r} coordinates, got {e.shape[1]}")
        d = np.asarray(self.face_multiplicities, dtype=int).ravel()
        if d.shape != (r,) or np.any(d < 1):
            raise InvalidInput("face_multiplicities must be positive integers, one per simple root")
        self.exponents, self.face_multiplicities = e, d

    @classmethod
    def from_json(cls, rs, d: dict) -> "ExponentData":
        ex = [[complex(float(Fraction(v[0])), float(Fraction(v[1]))) for v in row] for row in d["exponents"]]
        return cls(rs, np.array(ex), np.array(d["face_multiplicities"]))

    def to_json(self) -> dict:
        return {
            "exponents": [[[float(z.real), float(z.imag)] for z in row] for row in self.exponents],
            "face_multiplicities": [int(v) for v in self.face_multiplicities],
        }

    def restrict(self, j):
        """E(F_j, V) for F_j = Pi minus {alpha_j}: restrictions to a_{F_j}.

        a_{F_j} is spanned by H_j together with the centre, and exponents
        vanish on the centre, so each restriction is determined by lambda(H_j).
        """
        return sorted({complex(np.round(z, 12)) for z in self.exponents[:, j]}, key=lambda z: (z.real, z.imag))


@dataclass
class Envelope:
    Lambda: np.ndarray   # real functional, a-coordinates
    d: int = 0

    def __post_init__(self):
        self.Lambda = np.asarray(self.Lambda, dtype=float).ravel()
        if self.d < 0 or int(self.d) != self.d:
            raise InvalidInput("d must be a nonnegative integer")
        self.d = int(self.d)

    def __call__(self, rs, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(np.exp(self.Lambda @ x) * (1 + rs.norm(x)) ** self.d)

    def to_json(self) -> dict:
        return {"Lambda": [float(v) for v in self.Lambda], "d": self.d}


def lambda_V(E: ExponentData) -> Envelope:
    """Lambda_V(H_j) = max over E(V) of -Re lambda(H_j); d_V = sum of d_{F_j}."""
    vals = np.max(-E.exponents.real, axis=0)
    lam = E.root_system.functional_from_dual_values(vals)
    return Envelope(lam, int(E.face_multiplicities.sum()))


def weyl_dual(rs, word) -> np.ndarray:
    """Action on functionals of s_{i1} ... s_{ik} for the word (i1, ..., ik)."""
    m = np.eye(rs.rank_a)
    for i in word:
        if not 0 <= i < rs.rank:
            raise InvalidInput(f"simple reflection index {i} out of range")
        m = m @ rs.reflection_dual(i)
    return m


def transport(env: Envelope, word, rs) -> Envelope:
    """Lambda o Ad(s^-1), i.e. the dual action of s on Lambda; d unchanged."""
    return Envelope(weyl_dual(rs, tuple(word)) @ env.Lambda, env.d)


def simple_coefficients(rs, functional) -> np.ndarray:
    """Coefficients over the simple roots (functional must vanish on the centre)."""
    c, *_ = np.linalg.lstsq(rs.simple_mat.T, np.asarray(functional, dtype=float), rcond=None)
    if np.linalg.norm(rs.simple_mat.T @ c - functional) > 1e-9 * max(1.0, np.linalg.norm(functional)):
        raise InvalidInput("functional does not vanish on the centre")
    return c


@dataclass
class Step:
    axis: int
    action: str      # "halve" or "finalize"
    before: float
    after: float
    d: int


@dataclass
class ImprovementResult:
    delta: np.ndarray
    d: int
    trace: list = field(default_factory=list)

    def halvings(self, axis) -> int:
        return sum(1 for s in self.trace if s.axis == axis and s.action == "halve")

    def to_json(self) -> dict:
        return {
            "delta": [float(v) for v in self.delta],
            "d": self.d,
            "trace": [s.__dict__ for s in self.trace],
        }


def improve_exponent(delta0, Lambda, d0, face_multiplicities) -> ImprovementResult:
    """Per axis: while delta_j - 1 > Lambda_j replace delta_j by delta_j - 1/2,
    then set delta_j = Lambda_j and add d_{F_j}.

    ``delta0`` and ``Lambda`` are coefficients over the simple roots.
    """
    delta = np.array(delta0, dtype=float).ravel()
    lam = np.array(Lambda, dtype=float).ravel()
    dF = np.array(face_multiplicities, dtype=int).ravel()
    if not (np.all(np.isfinite(delta)) and np.all(np.isfinite(lam)) and math.isfinite(d0)):
        raise InvalidInput("improve_exponent needs finite inputs")
    if delta.shape != lam.shape or dF.shape != lam.shape:
        raise InvalidInput("delta, Lambda and face multiplicities must have the same length")
    d = int(d0)
    trace = []
    half = Fraction(1, 2)
    for j in range(len(delta)):
        # exact arithmetic, so the step count cannot drift from the closed form
        cur, target = Fraction(delta[j]), Fraction(lam[j])
        while cur - 1 > target:
            trace.append(Step(j, "halve", float(cur), float(cur - half), d))
            cur -= half
        before = float(cur)
        delta[j] = lam[j]
        d += int(dF[j])
        trace.append(Step(j, "finalize", float(before), float(delta[j]), d))
    return ImprovementResult(delta, d, trace)


def halving_count(delta_j, lambda_j) -> int:
    """Closed form ceil(2 (delta_j - 1 - Lambda_j)), clipped at 0, evaluated exactly."""
    return max(0, math.ceil(2 * (Fraction(delta_j) - 1 - Fraction(lambda_j))))


# --- the SL(2, R) principal series -------------------------------------------------

def sl2_root_system():
    from .lie_core import LieAlgebraPresentation
    from .root_system import compute_roots
    g = LieAlgebraPresentation("sl2", 2, np.array(sl_basis(2)))
    return compute_roots(g, [H0])


def sl2_principal_series(lam, d_face=None) -> ExponentData:
    """E(V) = {(1 - lam) rho, (1 + lam) rho} in H-coordinates, so that
    Lambda_V(H) = |Re lam| - 1.  Coincident exponents (lam = 0) get d_F = 2."""
    rs = sl2_root_system()
    lam = complex(lam)
    # lambda(H_1) with H_1 = H / 2
    ex = sorted({np.round((1 - lam) / 2, 14), np.round((1 + lam) / 2, 14)}, key=lambda z: (z.real, z.imag))
    if d_face is None:
        d_face = 2 if len(ex) == 1 else 1
    return ExponentData(rs, np.array(ex).reshape(-1, 1), np.array([d_face]))


# --- the ODE lemma --------------------------------------------------------------

def _spectral_data(a, tol=1e-6):
    w = np.linalg.eigvals(a)
    mu = float(w.real.max())
    top = w[np.abs(w.real - mu) <= tol * max(1.0, abs(mu))]
    p = 0
    for z in top:
        p = max(p, int(np.sum(np.abs(w - z) <= 1e-4 * max(1.0, abs(z)))))
    return mu, p


def _forcing(direction, nu, s, n):
    """e^{nu s} u(s) / |u(s)| on the nodes s, shape (len(s), n).  The callable
    is tried once on a column of nodes and evaluated pointwise if that fails."""
    if direction is None:
        return np.zeros((len(s), n), dtype=complex)
    try:
        u = np.asarray(direction(s[:, None]), dtype=complex)
        if u.shape != (len(s), n):
            raise ValueError
    except (ValueError, TypeError, IndexError):
        u = np.array([np.asarray(direction(x), dtype=complex).ravel() for x in s])
    norm = np.linalg.norm(u, axis=1, keepdims=True)
    safe = np.where(norm > 0, norm, 1.0)
    return np.where(norm > 0, np.exp(nu * s)[:, None] * u / safe, 0.0)


def _rk4(a, nu, f0, direction, t_max, steps):
    """Classical RK4 for f' = A f + g.  For a linear right-hand side one step is
    the affine map y -> P y + Q0 g(t) + Qm g(t + h/2) + Q1 g(t + h), so the
    stage algebra is done once on matrices."""
    n = len(f0)
    h = t_max / steps
    t = np.linspace(0.0, t_max, steps + 1)
    eye, zero = np.eye(n, dtype=complex), np.zeros((n, n), dtype=complex)
    # each stage as coefficients on (y, g0, gm, g1)
    k1 = (a, eye, zero, zero)
    k2 = tuple(a @ (b + h / 2 * c) for b, c in zip((eye, zero, zero, zero), k1))
    k2 = (k2[0], k2[1], k2[2] + eye, k2[3])
    k3 = tuple(a @ (b + h / 2 * c) for b, c in zip((eye, zero, zero, zero), k2))
    k3 = (k3[0], k3[1], k3[2] + eye, k3[3])
    k4 = tuple(a @ (b + h * c) for b, c in zip((eye, zero, zero, zero), k3))
    k4 = (k4[0], k4[1], k4[2], k4[3] + eye)
    P, Q0, Qm, Q1 = ((b if i == 0 else zero) + h / 6 * (w + 2 * x + 2 * y + z)
                     for i, (b, w, x, y, z) in enumerate(zip((eye, zero, zero, zero), k1, k2, k3, k4)))
    g_nodes = _forcing(direction, nu, t, n)
    g_mid = _forcing(direction, nu, t[:-1] + h / 2, n)
    drive = g_nodes[:-1] @ Q0.T + g_mid @ Qm.T + g_nodes[1:] @ Q1.T

    f = np.empty((steps + 1, n), dtype=complex)
    f[0] = y = f0.astype(complex)
    for i in range(steps):
        y = P @ y + drive[i]
        f[i + 1] = y
    return t, np.linalg.norm(f, axis=1)


@dataclass
class ODEReport:
    C_fit: float
    violated: bool
    mu: float
    p: int
    C_fine: float


def ode_envelope_check(A, nu, f0, g_spec=None, t_max=10.0, steps=10_000) -> ODEReport:
    """Integrate f' = A f + g, |g(t)| = e^{nu t}, and fit C in
    |f(t)| <= C (1+t)^p e^{max(mu, nu) t}."""
    a = np.atleast_2d(np.asarray(A, dtype=complex))
    f0 = np.asarray(f0, dtype=complex).ravel()
    if a.shape[0] != a.shape[1] or len(f0) != a.shape[0]:
        raise InvalidInput("A must be square and match f0")
    if np.linalg.norm(f0) > 1 + 1e-12:
        raise InvalidInput("|f(0)| must be at most 1")
    if steps < 10_000:
        raise InvalidInput("at least 10^4 steps")
    mu, p = _spectral_data(a)
    rate = max(mu, float(nu))

    def fit(n):
        with np.errstate(over="ignore", invalid="ignore"):
            t, nf = _rk4(a, float(nu), f0, g_spec, float(t_max), n)
        env = (1 + t) ** p * np.exp(rate * t)
        return t, nf / env

    t, r = fit(int(steps))
    _, r2 = fit(2 * int(steps))
    c1, c2 = float(r.max()), float(r2.max())
    if not (np.isfinite(c1) and np.isfinite(c2)):
        raise NumericalInstability("RK4 overflowed; the step is too large for this spectrum")
    if abs(c1 - c2) > 0.01 * max(abs(c2), 1e-300):
        raise NumericalInstability(f"C changes from {c1:.6g} to {c2:.6g} under step halving")
    tail = r[t >= 0.6 * t[-1]]
    growing = bool(np.all(np.diff(tail) > 0) and tail[-1] > 1.01 * tail[0])
    return ODEReport(c1, growing, mu, p, c2)
