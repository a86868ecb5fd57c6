"""Machine-readable example spaces Z = G/H and the loader that validates them.

Each entry is a JSON document: the matrix Lie algebra g as a list of basis
matrices (flat row-major lists of exact rational strings), the subalgebra h,
the chosen split abelian a in s, the block structure of the group, spherical
representation data, exponent presets and the expected certification flags
together with their provenance.
"""
from __future__ import annotations

import copy
import json
import os
import re
from fractions import Fraction
from functools import cached_property
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
from scipy.linalg import expm

from .errors import InvalidInput, InvalidPresentation, SchemaError, SpheroError, ValidationError
from .lie_core import LieAlgebraPresentation, Subspace, bracket, cartan_decompose, numerical_rank
from .models import complex_to_real, symplectic_form

SCHEMA_VERSION = "1.0"
SOLVERS = ("group", "triple_generic", "triple_degenerate", "gross_prasad", "sp_chain", "generic")
FLAG_NAMES = ("spherical", "pure", "polar_constructive", "strongly_spherical_evidence")
_PROVENANCE = re.compile(r"^\[(PAPER|TRIVIAL|DERIVED)\b")
_MATRIX_KEYS = ("g", "h", "a")


def catalog_dir() -> Path:
    env = os.environ.get("SPHERODECK_CATALOG_DIR")
    if env:
        return Path(env)
    return Path(str(resources.files("spherodeck") / "data"))


def schema() -> dict:
    with resources.files("spherodeck").joinpath("data/space.schema.json").open() as fh:
        return json.load(fh)


def _canon_entry(v) -> str:
    try:
        return str(Fraction(v)) if isinstance(v, str) else str(Fraction(v).limit_denominator(10**12))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"matrix entry {v!r} is not a rational number") from exc


def _canon_mats(ms):
    return [[_canon_entry(v) for v in m] for m in ms]


def normalize(d: dict) -> str:
    """Canonical text form: rational strings in lowest terms, sorted keys, 2-space indent."""
    d = copy.deepcopy(d)
    for key in _MATRIX_KEYS:
        if key in d:
            d[key] = _canon_mats(d[key])
    reps = d.get("component_reps", {})
    for key in ("K", "H"):
        if key in reps:
            reps[key] = _canon_mats(reps[key])
    return json.dumps(d, indent=2, sort_keys=True) + "\n"


# --- group families -----------------------------------------------------

def _upq_forms(family, size):
    m = re.fullmatch(r"U(\d)(\d)", family)
    p, q = int(m.group(1)), int(m.group(2))
    if 2 * (p + q) != size:
        raise InvalidInput(f"block size {size} does not match {family}")
    jc = complex_to_real(1j * np.eye(p + q))
    jf = complex_to_real(np.diag([1.0] * p + [-1.0] * q).astype(complex))
    return jc, jf


def in_family_algebra(family, x, tol=1e-9) -> bool:
    size = x.shape[0]
    if family == "GL":
        return True
    if family == "SL":
        return abs(np.trace(x)) <= tol * max(1.0, np.linalg.norm(x))
    if family == "Sp":
        om = symplectic_form(size // 2)
        return np.linalg.norm(x.T @ om + om @ x) <= tol * max(1.0, np.linalg.norm(x))
    if family.startswith("U"):
        jc, jf = _upq_forms(family, size)
        s = max(1.0, np.linalg.norm(x))
        return np.linalg.norm(x @ jc - jc @ x) <= tol * s and np.linalg.norm(x.T @ jf + jf @ x) <= tol * s
    raise InvalidInput(f"unknown family {family!r}")


def in_family_group(family, g, tol=1e-8) -> bool:
    size = g.shape[0]
    scale = max(1.0, np.linalg.norm(g) ** 2)
    if family == "GL":
        return abs(np.linalg.det(g)) > 1e-9
    if family == "SL":
        return abs(np.linalg.det(g) - 1.0) <= tol * max(1.0, np.linalg.norm(g) ** size)
    if family == "Sp":
        om = symplectic_form(size // 2)
        return np.linalg.norm(g.T @ om @ g - om) <= tol * scale
    if family.startswith("U"):
        jc, jf = _upq_forms(family, size)
        return np.linalg.norm(g @ jc - jc @ g) <= tol * scale and np.linalg.norm(g.T @ jf @ g - jf) <= tol * scale
    raise InvalidInput(f"unknown family {family!r}")


class SpaceDefinition:
    """A validated catalog entry.  Derived structures are computed lazily."""

    def __init__(self, d: dict):
        self.name = d["name"]
        self.description = d.get("description", "")
        self.n = int(d["n"])
        self.blocks = [(b["family"], int(b["size"])) for b in d["blocks"]]
        self.exact = {k: [[Fraction(v) for v in m] for m in d[k]] for k in _MATRIX_KEYS}
        self.exact_reps = {k: [[Fraction(v) for v in m] for m in d["component_reps"][k]] for k in ("K", "H")}
        self.kah_solver = d["kah_solver"]
        self.spherical_rep_data = copy.deepcopy(d.get("spherical_reps", []))
        self.exponent_presets = copy.deepcopy(d.get("exponent_presets", {}))
        self.expected = copy.deepcopy(d.get("expected", {}))
        self.experimental = bool(d.get("experimental", False))

        self.g = LieAlgebraPresentation(self.name, self.n, self._float("g"))
        self.h = Subspace.from_matrices(self.g, self._float("h"))
        self.a_basis = self._float("a")
        self.k_reps = self._float_reps("K")
        self.h_reps = self._float_reps("H")

    def _float(self, key):
        n = self.n
        return np.array([[float(v) for v in m] for m in self.exact[key]]).reshape(-1, n, n)

    def _float_reps(self, key):
        n = self.n
        return np.array([[float(v) for v in m] for m in self.exact_reps[key]]).reshape(-1, n, n)

    # derived structure
    @cached_property
    def cd(self):
        return cartan_decompose(self.g)

    @cached_property
    def rs(self):
        from .root_system import compute_roots
        return compute_roots(self.g, self.a_basis)

    @cached_property
    def q(self) -> Subspace:
        """kappa-orthocomplement of h; for theta-stable h it is the Frobenius one."""
        return self.h.orthocomplement()

    @cached_property
    def h_k(self) -> Subspace:
        from .lie_core import subspace_intersect
        return subspace_intersect(self.h, self.cd.k_part)

    @property
    def block_sizes(self):
        return [s for _, s in self.blocks]

    def block_slices(self):
        out, off = [], 0
        for _, s in self.blocks:
            out.append(slice(off, off + s))
            off += s
        return out

    def in_group(self, g, tol=1e-8) -> bool:
        g = np.asarray(g, dtype=float)
        if g.shape != (self.n, self.n):
            return False
        mask = np.zeros((self.n, self.n), dtype=bool)
        for sl in self.block_slices():
            mask[sl, sl] = True
        if np.abs(g[~mask]).max(initial=0.0) > tol * max(1.0, np.linalg.norm(g)):
            return False
        return all(in_family_group(f, g[sl, sl], tol) for (f, _), sl in zip(self.blocks, self.block_slices()))

    def in_K(self, k, tol=1e-8) -> bool:
        k = np.asarray(k, dtype=float)
        return self.in_group(k, tol) and np.linalg.norm(k.T @ k - np.eye(self.n)) <= tol

    def in_H(self, h, tol=1e-8) -> bool:
        """h in G normalising the subalgebra h (the variety check used for H)."""
        h = np.asarray(h, dtype=float)
        if not self.in_group(h, tol):
            return False
        hi = np.linalg.inv(h)
        img = [h @ x @ hi for x in self.h.matrices()]
        return all(self.h.member(y, tol=tol * max(1.0, np.linalg.norm(h) * np.linalg.norm(hi))) for y in img)

    def exp_h(self, coords) -> np.ndarray:
        return expm(np.tensordot(np.asarray(coords, dtype=float), self.h.matrices(), axes=1))

    def to_json(self) -> dict:
        def mats(rows):
            return [[str(v) for v in m] for m in rows]

        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "description": self.description,
            "n": self.n,
            "blocks": [{"family": f, "size": s} for f, s in self.blocks],
            "g": mats(self.exact["g"]),
            "h": mats(self.exact["h"]),
            "a": mats(self.exact["a"]),
            "kah_solver": self.kah_solver,
            "component_reps": {k: mats(self.exact_reps[k]) for k in ("K", "H")},
            "spherical_reps": copy.deepcopy(self.spherical_rep_data),
            "exponent_presets": copy.deepcopy(self.exponent_presets),
            "expected": copy.deepcopy(self.expected),
            "experimental": self.experimental,
        }

    def serialize(self) -> str:
        return normalize(self.to_json())

    def __repr__(self):
        return f"SpaceDefinition({self.name!r}, dim g={self.g.dim}, dim h={self.h.dim}, dim a={len(self.a_basis)})"


def _schema_check(d):
    validator = jsonschema.Draft202012Validator(schema())
    errors = sorted(validator.iter_errors(d), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        pointer = "/" + "/".join(str(p) for p in e.absolute_path)
        raise SchemaError(e.message, pointer)
    n = d["n"]
    if sum(b["size"] for b in d["blocks"]) != n:
        raise SchemaError("block sizes do not add up to n", "/blocks")
    for key in _MATRIX_KEYS:
        for i, m in enumerate(d[key]):
            if len(m) != n * n:
                raise SchemaError(f"matrix has {len(m)} entries, expected {n * n}", f"/{key}/{i}")
    for key in ("K", "H"):
        for i, m in enumerate(d["component_reps"][key]):
            if len(m) != n * n:
                raise SchemaError(f"matrix has {len(m)} entries, expected {n * n}", f"/component_reps/{key}/{i}")


def validate(space: SpaceDefinition) -> list:
    """All invariant failures of a constructed space, as messages."""
    problems = []
    g, h = space.g, space.h
    slices = space.block_slices()
    mask = np.zeros((space.n, space.n), dtype=bool)
    for sl in slices:
        mask[sl, sl] = True
    for i, x in enumerate(g.basis):
        if np.abs(x[~mask]).max(initial=0.0) > 1e-12:
            problems.append(f"g basis {i} is not block diagonal")
        for (fam, _), sl in zip(space.blocks, slices):
            if not in_family_algebra(fam, x[sl, sl]):
                problems.append(f"g basis {i} leaves the {fam} algebra")
    h_mats = h.matrices()
    if h.dim != len(space.exact["h"]):
        problems.append("h basis is linearly dependent")
    for i, x in enumerate(space._float("h")):
        if not g.contains_element(x):
            problems.append(f"h basis {i} is not in g")
    for i, x in enumerate(h_mats):
        if not h.member(-x.T):
            problems.append(f"h is not theta-stable (basis {i})")
            break
    for i in range(len(h_mats)):
        for j in range(i + 1, len(h_mats)):
            if not h.member(bracket(h_mats[i], h_mats[j])):
                problems.append("h is not closed under the bracket")
                break
        else:
            continue
        break
    a = space.a_basis
    if numerical_rank(a.reshape(len(a), -1)) != len(a):
        problems.append("a basis is linearly dependent")
    for i, x in enumerate(a):
        if not g.contains_element(x):
            problems.append(f"a basis {i} is not in g")
        if np.linalg.norm(x - x.T) > 1e-9 * max(1.0, np.linalg.norm(x)):
            problems.append(f"a basis {i} is not in s")
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            if np.linalg.norm(bracket(a[i], a[j])) > 1e-9:
                problems.append(f"a basis {i} and {j} do not commute")
    for i, k in enumerate(space.k_reps):
        if not space.in_K(k):
            problems.append(f"K component representative {i} is not in K")
    for i, x in enumerate(space.h_reps):
        if not space.in_H(x):
            problems.append(f"H component representative {i} is not in H")
    nb = len(space.blocks)
    for i, r in enumerate(space.spherical_rep_data):
        for f in r["factors"]:
            if not 0 <= f["block"] < nb:
                problems.append(f"spherical rep {i} refers to block {f['block']}")
    if not problems:
        from .weights import SphericalRep
        for i in range(len(space.spherical_rep_data)):
            try:
                SphericalRep.from_space(space, i)
            except SpheroError as exc:
                problems.append(f"spherical rep {i}: {exc}")
    if space.kah_solver not in SOLVERS:
        problems.append(f"unknown kah_solver {space.kah_solver!r}")
    for key, f in space.expected.items():
        if key not in FLAG_NAMES:
            problems.append(f"unknown expected flag {key!r}")
        if not _PROVENANCE.match(str(f.get("provenance", ""))):
            problems.append(f"expected flag {key!r} lacks a provenance tag")
    try:
        space.cd
    except SpheroError as exc:
        problems.append(str(exc))
    return problems


def load_dict(d: dict) -> SpaceDefinition:
    _schema_check(d)
    try:
        space = SpaceDefinition(d)
    except (InvalidPresentation, InvalidInput) as exc:
        raise ValidationError([str(exc)]) from exc
    problems = validate(space)
    if problems:
        raise ValidationError(problems)
    return space


def list_spaces() -> list:
    return sorted(p.stem for p in catalog_dir().glob("*.json") if not p.name.endswith(".schema.json"))


def resolve(name_or_path) -> Path:
    p = Path(name_or_path)
    if p.suffix == ".json" and p.exists():
        return p
    cand = catalog_dir() / f"{name_or_path}.json"
    if cand.exists():
        return cand
    raise InvalidInput(f"no catalog entry or file named {name_or_path!r}")


def load_space(name_or_path) -> SpaceDefinition:
    path = resolve(name_or_path)
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    return load_dict(d)

