"""Standard matrix models of the classical algebras used by the catalog."""
from __future__ import annotations

import numpy as np


def unit(n, i, j):
    m = np.zeros((n, n))
    m[i, j] = 1.0
    return m


def embed(block, sizes, which):
    """Place ``block`` as the ``which``-th diagonal block of a block-diagonal matrix."""
    n = sum(sizes)
    off = sum(sizes[:which])
    out = np.zeros((n, n))
    k = sizes[which]
    out[off:off + k, off:off + k] = block
    return out


def block_diag(*blocks):
    sizes = [b.shape[0] for b in blocks]
    out = np.zeros((sum(sizes), sum(sizes)))
    off = 0
    for b in blocks:
        k = b.shape[0]
        out[off:off + k, off:off + k] = b
        off += k
    return out


def blocks_of(g, sizes):
    out, off = [], 0
    for k in sizes:
        out.append(g[off:off + k, off:off + k])
        off += k
    return out


def gl_basis(n):
    return [unit(n, i, j) for i in range(n) for j in range(n)]


def sl_basis(n):
    out = [unit(n, i, j) for i in range(n) for j in range(n) if i != j]
    for i in range(n - 1):
        out.append(unit(n, i, i) - unit(n, i + 1, i + 1))
    return out


def sp_element(x1, x2, x3):
    """``[X1, X2, X3]`` in the standard model of sp(n, R)."""
    x1, x2, x3 = (np.asarray(v, dtype=float) for v in (x1, x2, x3))
    return np.block([[x1, x2], [x3, -x1.T]])


def sym_basis(n):
    out = []
    for i in range(n):
        for j in range(i, n):
            out.append(unit(n, i, j) + unit(n, j, i) if i != j else unit(n, i, i))
    return out


def sp_basis(n):
    z = np.zeros((n, n))
    out = [sp_element(m, z, z) for m in gl_basis(n)]
    out += [sp_element(z, s, z) for s in sym_basis(n)]
    out += [sp_element(z, z, s) for s in sym_basis(n)]
    return out


def symplectic_form(n):
    z, i = np.zeros((n, n)), np.eye(n)
    return np.block([[z, i], [-i, z]])


def complex_to_real(z):
    """Real ``2n x 2n`` realisation ``A + iB -> [[A, -B], [B, A]]``."""
    z = np.asarray(z, dtype=complex)
    a, b = z.real, z.imag
    return np.block([[a, -b], [b, a]])


def u_pq_basis(p, q):
    """Real basis of u(p, q) = {X : X* J + J X = 0}, J = diag(1_p, -1_q)."""
    n = p + q
    sig = np.array([1.0] * p + [-1.0] * q)
    out = []
    for i in range(n):
        out.append(complex_to_real(1j * unit(n, i, i)))
    for i in range(n):
        for j in range(i + 1, n):
            s = sig[i] * sig[j]
            re = unit(n, i, j) - s * unit(n, j, i)
            im = 1j * (unit(n, i, j) + s * unit(n, j, i))
            out.append(complex_to_real(re))
            out.append(complex_to_real(im))
    return out


H0 = np.array([[1.0, 0.0], [0.0, -1.0]])
J0 = np.array([[0.0, 1.0], [1.0, 0.0]])
W0 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def rot(phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def a_t(t):
    return np.diag([np.exp(t), np.exp(-t)])
