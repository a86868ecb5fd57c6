"""Infinitesimal openness tests: spherical and pure type, spherical pairs,
and the interior-point search for K A H."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.linalg import expm

from .errors import InvalidInput
from .lie_core import CartanDecomposition, Subspace, contains, span_sum, subspace_intersect, subspace_sum
from .root_system import ParabolicData, RestrictedRootSystem, enumerate_minimal_parabolics, standard_parabolic


def test_open(p: ParabolicData | Subspace, h: Subspace):
    """``(open, (dim(p+h), dim(p & h)))``; open means p + h = g."""
    p_sub = p.p_F if isinstance(p, ParabolicData) else p
    total = subspace_sum(p_sub, h)
    cap = subspace_intersect(p_sub, h)
    return total.dim == h.parent.dim, (total.dim, cap.dim)


def test_spherical_pair(p: ParabolicData, h: Subspace, cd: CartanDecomposition):
    """Both conditions for (P, H) to be a spherical pair, for this Langlands split.

    Condition 1 is ``m_P & s <= h``, condition 2 is openness of P H.
    """
    m_s = subspace_intersect(p.m_P, cd.s_part)
    cond1 = contains(h, m_s)
    cond2, _ = test_open(p, h)
    return cond1, cond2


@dataclass
class SphericityCertificate:
    space: str
    per_parabolic: list = field(default_factory=list)   # (chamber label, open, dim p+h, dim p&h)
    spherical_pairs: list = field(default_factory=list)  # (F, cond1, cond2)

    @property
    def is_spherical(self) -> bool:
        return any(entry[1] for entry in self.per_parabolic)

    @property
    def is_pure(self) -> bool:
        return any(entry[1] and entry[3] == 0 for entry in self.per_parabolic)

    @property
    def open_chambers(self):
        return [entry[0] for entry in self.per_parabolic if entry[1]]

    def to_json(self) -> dict:
        return {
            "space": self.space,
            "is_spherical": self.is_spherical,
            "is_pure": self.is_pure,
            "per_parabolic": [
                {"chamber": c, "open": bool(o), "dim_p_plus_h": int(s), "dim_p_cap_h": int(i)}
                for c, o, s, i in self.per_parabolic
            ],
            "spherical_pairs": [
                {"F": [int(j) for j in F], "condition1": bool(c1), "condition2": bool(c2)}
                for F, c1, c2 in self.spherical_pairs
            ],
        }


def certify(name, rs: RestrictedRootSystem, h: Subspace, cd: CartanDecomposition) -> SphericityCertificate:
    cert = SphericityCertificate(name)
    for chamber, par in enumerate_minimal_parabolics(rs):
        ok, (dsum, dcap) = test_open(par, h)
        cert.per_parabolic.append((chamber.label, ok, dsum, dcap))
    for k in range(rs.rank + 1):
        for F in combinations(range(rs.rank), k):
            par = standard_parabolic(rs, F)
            c1, c2 = test_spherical_pair(par, h, cd)
            cert.spherical_pairs.append((F, c1, c2))
    return cert


def _ad_conj(a, mats):
    ai = np.linalg.inv(a)
    return np.array([ai @ m @ a for m in mats])


def default_grid(rs: RestrictedRootSystem, seed=0, per_ray=32, n_random=100):
    """Log-uniform points along each dual-basis ray plus seeded random elements."""
    out = [np.zeros(rs.rank_a)]
    radii = np.geomspace(1e-2, 10.0, per_ray)
    for hj in rs.dual_basis:
        u = hj / max(rs.norm(hj), 1e-300)
        out.extend(r * u for r in radii)
    rng = np.random.default_rng(seed)
    out.extend(rng.normal(size=(n_random, rs.rank_a)) * 2.0)
    return out


def interior_point_search(rs: RestrictedRootSystem, h: Subspace, cd: CartanDecomposition, grid):
    """First ``X`` in the grid with ``Ad(exp(-X)) k + a + h = g``.

    Returns ``(found, X or None, limit_dim)``, where ``limit_dim`` is
    ``dim(m&k + a + n + h)``, the dimension of the limit subspace along rays
    to infinity in the reference chamber.
    """
    grid = list(grid)
    if not grid:
        raise InvalidInput("empty grid")
    g = rs.g
    k_mats = cd.k_part.matrices()
    a_sub = rs.a_space
    base = subspace_sum(a_sub, h)
    found = None
    for x in grid:
        a = expm(rs.a_element(x))
        ka = Subspace.from_matrices(g, _ad_conj(a, k_mats))
        if subspace_sum(ka, base).dim == g.dim:
            found = np.asarray(x, dtype=float)
            break
    ref = rs.chambers[0]
    m_k = subspace_intersect(rs.zero_space, cd.k_part)
    n = rs.root_space_sum(ref.positive_roots)
    limit = span_sum(m_k, a_sub, n, h)
    return found is not None, found, limit.dim
