import json

import numpy as np
import pytest

from conftest import SHIPPED, space
from spherodeck import catalog
from spherodeck.catalog import list_spaces, load_dict, load_space, normalize
from spherodeck.decomp import coverage_check
from spherodeck.errors import InvalidInput, SchemaError, ValidationError
from spherodeck.root_system import enumerate_minimal_parabolics
from spherodeck.sphericity import certify


def raw(name):
    return json.loads((catalog.catalog_dir() / f"{name}.json").read_text())


def test_shipped_list():
    assert list_spaces() == sorted(SHIPPED)


def test_group_sl2_dimensions():
    sp = space("group_sl2")
    assert (sp.g.dim, sp.h.dim, len(sp.a_basis)) == (6, 3, 2)


def test_triple_has_eight_minimal_parabolics():
    sp = space("triple_sl2_generic")
    assert len(list(enumerate_minimal_parabolics(sp.rs))) == 8


@pytest.mark.parametrize("name", SHIPPED)
def test_round_trip(name):
    d = raw(name)
    assert load_space(name).serialize() == normalize(d)


@pytest.mark.parametrize("name", SHIPPED)
def test_file_is_normalized(name):
    # the shipped text is already canonical
    path = catalog.catalog_dir() / f"{name}.json"
    assert path.read_text() == normalize(raw(name))


def test_normalize_reduces_fractions():
    d = raw("group_sl2")
    d["g"][0][0] = "2/2"
    assert json.loads(normalize(d))["g"][0][0] == "1"


@pytest.mark.parametrize("name", SHIPPED)
def test_provenance_tags(name):
    for flag, spec in space(name).expected.items():
        assert flag in catalog.FLAG_NAMES
        assert catalog._PROVENANCE.match(spec["provenance"]), spec


def test_non_theta_stable_h():
    d = raw("group_sl2")
    n = d["n"]
    e12 = np.zeros((n, n))
    e12[0, 1] = e12[2, 3] = 1.0
    d["h"] = [[str(int(v)) for v in e12.ravel()]]
    with pytest.raises(ValidationError) as err:
        load_dict(d)
    assert any("theta" in p for p in err.value.problems)


def test_non_subalgebra_h():
    d = raw("group_sl2")
    n = d["n"]
    x, y = np.zeros((n, n)), np.zeros((n, n))
    x[0, 1], x[1, 0] = 1.0, -1.0       # diag so(2) on block 0 only ...
    y[0, 0], y[1, 1] = 1.0, -1.0       # ... plus H on block 0: [x, y] leaves the span
    d["h"] = [[str(int(v)) for v in m.ravel()] for m in (x, y)]
    with pytest.raises(ValidationError):
        load_dict(d)


def test_errors_are_collected():
    d = raw("group_sl2")
    n = d["n"]
    x = np.zeros((n, n))
    x[0, 1] = 1.0
    d["h"] = [[str(int(v)) for v in x.ravel()]]
    d["a"] = d["a"][:1] + [[str(int(v)) for v in x.ravel()]]
    with pytest.raises(ValidationError) as err:
        load_dict(d)
    assert len(err.value.problems) >= 2


def test_schema_error_pointer():
    d = raw("group_sl2")
    del d["kah_solver"]
    with pytest.raises(SchemaError):
        load_dict(d)
    d = raw("group_sl2")
    d["g"][1] = d["g"][1][:-1]
    with pytest.raises(SchemaError) as err:
        load_dict(d)
    assert err.value.pointer == "/g/1"
    d = raw("group_sl2")
    d["blocks"][0]["family"] = "XX"
    with pytest.raises(SchemaError) as err:
        load_dict(d)
    assert err.value.pointer.startswith("/blocks/0")


def test_bad_json_and_missing(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(SchemaError):
        load_space(p)
    with pytest.raises(InvalidInput):
        load_space("no_such_space")


def test_load_from_path(tmp_path):
    p = tmp_path / "copy.json"
    p.write_text(json.dumps(raw("gp_gl2_gl1")))
    assert load_space(str(p)).serialize() == load_space("gp_gl2_gl1").serialize()


def test_catalog_dir_override(tmp_path, monkeypatch):
    (tmp_path / "only_one.json").write_text(json.dumps({**raw("group_sl2"), "name": "only_one"}))
    monkeypatch.setenv("SPHERODECK_CATALOG_DIR", str(tmp_path))
    assert list_spaces() == ["only_one"]
    assert load_space("only_one").name == "only_one"


def test_experimental_entry():
    sp = space("gp_u11_u1")
    assert sp.experimental and sp.kah_solver == "generic"
    assert sp.expected["spherical"]["value"] == "unverified"


@pytest.mark.parametrize("name", SHIPPED)
def test_sphericity_flags_rederived(name):
    sp = space(name)
    cert = certify(sp.name, sp.rs, sp.h, sp.cd)
    got = {"spherical": cert.is_spherical, "pure": cert.is_pure}
    for flag, spec in sp.expected.items():
        if flag in got and isinstance(spec["value"], bool):
            assert got[flag] == spec["value"], (name, flag)


@pytest.mark.parametrize("name", ["group_sl2", "triple_sl2_generic", "triple_sl2_degenerate", "gp_gl2_gl1",
                                  "gp_gl3_gl2", "sp2_chain"])
def test_coverage_flags_rederived(name):
    sp = space(name)
    cov = coverage_check(sp, 200, seed=11)
    got = {"polar_constructive": cov.failure_rate <= 0.01,
           "strongly_spherical_evidence": cov.failure_rate <= 0.01 and cov.coverage == 1.0}
    for flag, spec in sp.expected.items():
        if flag in got:
            assert got[flag] == spec["value"], (name, flag, cov.coverage, cov.failure_rate)


@pytest.mark.parametrize("name", SHIPPED)
def test_component_reps_lie_in_groups(name):
    sp = space(name)
    for k in sp.k_reps:
        assert sp.in_K(k)
    for h in sp.h_reps:
        assert sp.in_H(h)
