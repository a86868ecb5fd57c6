"""Spherical functions and K-finite matrix coefficients of the SL(2, R)
principal series, and the numerical envelope check.

Iwasawa convention: G = K A N with N upper unipotent, so for g in SL(2, R)
the A-part is exp(H(g) H) with H(g) = log |g e_1|.  The coefficient

    phi_lam(a_t) = (1/2pi) int_0^{2pi} exp((lam - rho) H(a_t k_theta)) dtheta

is evaluated after the substitution theta = pi/2 + psi, tan psi = e^{-2|t|} sinh s,
which moves the peak at theta = pi/2 to an O(1) window in s.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InvalidInput, QuadratureFailure
from .exponents import Envelope
from .models import a_t as a_t_matrix
from .models import rot

RTOL = 1e-10
N_START = 64
N_MAX = 2 ** 16
GROWTH_EXPONENT = 0.5


def iwasawa_H(g) -> float:
    """H(g) for g in SL(2, R): g = k exp(H(g) H) n with n upper unipotent."""
    g = np.asarray(g, dtype=float)
    if g.shape != (2, 2):
        raise InvalidInput("iwasawa_H expects a 2x2 matrix")
    det = np.linalg.det(g)
    if abs(det - 1) > 1e-9 * max(1.0, np.abs(g).max() ** 2):
        raise InvalidInput(f"matrix is not in SL(2,R): det = {det}")
    return float(np.log(np.hypot(g[0, 0], g[1, 0])))


def iwasawa(g):
    """(k, a, n) with k in SO(2), a positive diagonal, n upper unipotent."""
    g = np.asarray(g, dtype=float)
    q, r = np.linalg.qr(g)
    s = np.diag(np.sign(np.diag(r)))
    q, r = q @ s, s @ r
    a = np.diag(np.diag(r))
    return q, a, np.linalg.solve(a, r)


def _trapezoid_doubling(f, S, label):
    """Trapezoid rule on [-S, S], doubling the node count until the change
    drops below RTOL relative to the L1 norm of the integrand (equal to the
    value itself for positive integrands).  Returns (value, nodes)."""
    n = N_START
    s = np.linspace(-S, S, n + 1)
    h = 2 * S / n
    y = f(s)
    total = y.sum() - 0.5 * (y[0] + y[-1])
    mass = np.abs(y).sum() - 0.5 * (abs(y[0]) + abs(y[-1]))
    prev = total * h
    while n < N_MAX:
        # new midpoints only
        ym = f(s[:-1] + h / 2)
        total = total + ym.sum()
        mass = mass + np.abs(ym).sum()
        n, h = 2 * n, h / 2
        s = np.linspace(-S, S, n + 1)
        cur = total * h
        if abs(cur - prev) <= RTOL * max(mass * h, 1e-300):
            return cur, n
        prev = cur
    raise QuadratureFailure(f"{label}: no convergence with {N_MAX} nodes")


def _half_period(t, s):
    """Pieces of the substitution at nodes s: (base, dpsi/ds, sin psi, cos psi)
    where base = e^{2t} cos^2 theta + e^{-2t} sin^2 theta at theta = pi/2 + psi."""
    eps = math.exp(-2 * abs(t))
    sh, ch = np.sinh(s), np.cosh(s)
    tau = eps * sh
    den = 1 + tau ** 2
    base = eps * ch ** 2 / den
    dpsi = eps * ch / den
    r = np.sqrt(den)
    return base, dpsi, tau / r, 1 / r


def spherical_function(lam, t) -> complex:
    """phi_lam(a_t) by adaptive trapezoid quadrature on K."""
    lam = complex(lam)
    t = float(t)
    if not math.isfinite(t):
        raise InvalidInput("t must be finite")
    S = 2 * abs(t) + 40
    ex = (lam - 1) / 2

    def f(s):
        base, dpsi, _, _ = _half_period(t, s)
        return np.exp(ex * np.log(base)) * dpsi

    # two half periods of equal contribution, 2 * (1/2pi) = 1/pi
    val, _ = _trapezoid_doubling(f, S, f"phi_{lam}({t})")
    val /= math.pi
    return complex(val) if lam.imag else complex(val.real)


def spherical_function_direct(lam, t, n=4096) -> complex:
    """The same integral with a plain trapezoid in theta, H evaluated on
    matrices.  Only accurate for moderate |t|; used as an independent check."""
    th = 2 * np.pi * np.arange(n) / n
    at = a_t_matrix(t)
    hs = np.array([iwasawa_H(at @ rot(x)) for x in th])
    return complex(np.mean(np.exp((complex(lam) - 1) * hs)))


def k_angle(t, theta):
    """theta' with a_t k_theta in k_theta' A N."""
    return np.arctan2(np.exp(-t) * np.sin(theta), np.exp(t) * np.cos(theta))


def kfinite_coefficient(m, mp, lam, t) -> complex:
    """(1/2pi) int exp((lam - rho) H(a_t k_theta)) exp(i (m theta - m' theta')) dtheta.

    Both half periods are integrated separately, so the vanishing for odd
    m - m' is a numerical outcome rather than an assumption.  The phases are
    built from cos and sin of theta taken straight from the substitution:
    forming cos(pi/2 + psi) in floating point would cost about e^{2t} ulps
    in theta' near the peak.
    """
    if int(m) != m or int(mp) != mp:
        raise InvalidInput("K-types must be integers")
    m, mp = int(m), int(mp)
    lam, t = complex(lam), float(t)
    S = 2 * abs(t) + 40
    ex = (lam - 1) / 2
    total = 0j
    for sign in (1.0, -1.0):
        def f(s, sign=sign):
            base, dpsi, sp, cp = _half_period(t, s)
            # theta = pi/2 + psi (t >= 0) or psi (t < 0), plus pi on the second half
            c, sn = (-sp, cp) if t >= 0 else (cp, sp)
            c, sn = sign * c, sign * sn
            u = c + 1j * sn                       # e^{i theta}
            w = math.exp(t) * c + 1j * math.exp(-t) * sn
            up = w / np.abs(w)                    # e^{i theta'}
            return np.exp(ex * np.log(base)) * dpsi * u ** m * up ** (-mp)
        v, _ = _trapezoid_doubling(f, S, f"c_{m},{mp}")
        total += v
    return total / (2 * math.pi)


@dataclass
class SphericalFunctionModel:
    """phi_lam for SL(2, R), optionally a K-finite coefficient (m, m')."""
    lam: complex = 0.0
    m: int = 0
    mp: int = 0

    def value(self, t) -> complex:
        if self.m == 0 and self.mp == 0:
            return spherical_function(self.lam, t)
        return kfinite_coefficient(self.m, self.mp, self.lam, t)

    def values(self, ts) -> np.ndarray:
        return np.array([self.value(t) for t in ts])


@dataclass
class EnvelopeReport:
    t: list
    phi: list
    envelope: list
    ratio: list
    sup_ratio: float
    sup_ratio_refined: float
    tail_min: float
    tail_slope: float
    tail_growth: float
    bounded: bool
    sharp: bool
    violated: bool
    verdict: str
    Lambda_H: float
    d: int
    lam: list = field(default_factory=list)
    m: int = 0
    mp: int = 0

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "abs_value", "envelope", "ratio"])
        for row in zip(self.t, self.phi, self.envelope, self.ratio):
            w.writerow([f"{v:.17g}" for v in row])
        return buf.getvalue()


def log_grid(t_max, n):
    """n points from 0 to t_max, log-spaced in 1 + t."""
    return np.geomspace(1.0, 1.0 + t_max, n) - 1.0


def _tail_slope(t, phi, d, t_tail):
    sel = t >= t_tail
    y = np.log(np.abs(phi[sel])) - d * np.log1p(t[sel])
    return float(np.polyfit(t[sel], y, 1)[0])


def envelope_check(model: SphericalFunctionModel, env: Envelope, t_max=25.0, n=64) -> EnvelopeReport:
    """Ratio |phi(a_t)| / (e^{t Lambda(H)} (1+t)^d) on a log grid, with a
    refined grid of twice the density for the stability test."""
    if not t_max > 0:
        raise InvalidInput("t_max must be positive")
    if env.Lambda.shape != (1,):
        raise InvalidInput("the SL(2) model needs a rank one envelope")
    lam_h, d = float(env.Lambda[0]), env.d

    def ratios(k):
        t = log_grid(t_max, k)
        phi = np.abs(model.values(t))
        env_t = np.exp(lam_h * t) * (1 + t) ** d
        return t, phi, env_t, phi / env_t

    t, phi, env_t, r = ratios(n)
    *_, r_fine = ratios(2 * n)
    t_tail = 0.6 * t_max
    tail = r[t >= t_tail]
    if len(tail) < 3:
        raise InvalidInput("grid too coarse: fewer than 3 points on the tail")
    # growth exponent of the ratio in (1+t): about 1 per missing log power,
    # about 0 for a ratio that converges
    growth = math.log(tail[-1] / tail[0]) / math.log((1 + t[-1]) / (1 + t[t >= t_tail][0]))
    violated = bool(np.all(np.diff(tail) > 0) and growth > GROWTH_EXPONENT)
    sup, sup_fine = float(r.max()), float(r_fine.max())
    stable = np.isfinite(sup) and abs(sup_fine - sup) <= 0.01 * sup_fine
    bounded = bool(stable and not violated)
    tail_min = float(tail.min())
    sharp = bool(bounded and tail_min > 1e-3)
    verdict = "sharp" if sharp else ("bounded" if bounded else "violated")
    lam = complex(model.lam)
    return EnvelopeReport(
        t=[float(v) for v in t], phi=[float(v) for v in phi],
        envelope=[float(v) for v in env_t], ratio=[float(v) for v in r],
        sup_ratio=sup, sup_ratio_refined=sup_fine, tail_min=tail_min,
        tail_slope=_tail_slope(t, phi, d, t_tail), tail_growth=float(growth), bounded=bounded, sharp=sharp,
        violated=not bounded, verdict=verdict, Lambda_H=lam_h, d=d,
        lam=[lam.real, lam.imag], m=int(model.m), mp=int(model.mp),
    )


def kfinite_coefficient_check(m, mp, lam, env: Envelope, t_max=25.0, n=64):
    """The envelope check for a K-finite coefficient.  Odd m - m' gives a
    coefficient that vanishes identically; that case returns None for the
    report and the largest modulus seen."""
    model = SphericalFunctionModel(lam, m, mp)
    if (m - mp) % 2:
        t = log_grid(t_max, n)
        return None, float(np.abs(model.values(t)).max())
    return envelope_check(model, env, t_max, n), None
