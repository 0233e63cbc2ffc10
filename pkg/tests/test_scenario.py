import json

import pytest

from survopt import eoq, horizon
from survopt.scenario import KINDS, SchemaError, build_model, data_path, load_bundled, load_scenario
from survopt.stats import AttributeSummary, SrsSummary, StratifiedPopulation

BUNDLED = {
    "stratified_schools.json": StratifiedPopulation,
    "srs_pop1.json": SrsSummary,
    "srs_pop2.json": SrsSummary,
    "attribute_pop1.json": AttributeSummary,
    "attribute_twophase_pop2.json": AttributeSummary,
    "horizon_example1.json": horizon.HorizonParams,
}


@pytest.mark.parametrize("name, cls", BUNDLED.items())
def test_bundled_datasets_build(name, cls):
    sc = load_bundled(name)
    assert sc.kind in KINDS
    assert isinstance(build_model(sc), cls)


def test_eoq_scenario_shares_transport_cost():
    sc = build_model(load_bundled("eoq_example.json"))
    assert isinstance(sc.crisp, eoq.EoqParams) and isinstance(sc.fuzzy, eoq.FuzzyEoqParams)
    assert sc.crisp.Ct == sc.fuzzy.Ct == 0.5
    assert sc.crisp.Ct_star is None


def test_load_from_mapping_and_file(tmp_path):
    doc = json.loads(data_path("srs_pop1.json").read_text())
    p = tmp_path / "s.json"
    p.write_text(json.dumps(doc))
    assert build_model(load_scenario(p)) == build_model(load_scenario(doc))


@pytest.mark.parametrize(
    "doc, path",
    [
        ([], "$"),
        ({"kind": "nope", "payload": {}}, "$.kind"),
        ({"kind": "srs"}, "$.payload"),
        ({"kind": "srs", "payload": {"N": 10}}, "$.payload"),
        ({"kind": "stratified", "payload": {"strata": 3}}, "$.payload.strata"),
        ({"kind": "stratified", "payload": {"strata": [{"N_h": 1}]}}, "$.payload.strata[0]"),
        ({"kind": "fuzzy-eoq", "payload": {"crisp": {}, "fuzzy": {}}}, "$.payload.ct"),
    ],
)
def test_schema_errors_carry_a_path(doc, path):
    with pytest.raises(SchemaError) as exc:
        build_model(load_scenario(doc))
    assert exc.value.path == path


def test_bad_files(tmp_path):
    with pytest.raises(SchemaError):
        load_scenario(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SchemaError):
        load_scenario(bad)
