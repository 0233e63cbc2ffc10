import math

import numpy as np

from survopt import horizon, validate
from survopt.scenario import build_model, load_bundled


def test_check_threshold_is_inclusive():
    assert validate._check("s", "n", 1.0, 1.0).passed
    assert not validate._check("s", "n", 1.0 + 1e-12, 1.0).passed
    assert not validate._check("s", "n", math.nan, 1.0).passed


def test_brute_force_matches_closed_form_for_mean():
    y = np.array([2.0, 5.0, 1.0, 8.0])
    got = validate.brute_force_mse(list(y), list(y), 2, lambda ys, xs, X: ys)
    assert math.isclose(got, (1 / 2 - 1 / 4) * np.var(y, ddof=1), rel_tol=1e-12)


def test_fuzzy_suite_small():
    checks = validate.fuzzy_suite(0, trials=200)
    assert checks and all(c.passed for c in checks)


def test_component_oracles_cover_every_component():
    P = build_model(load_bundled("horizon_example1.json"))
    st = horizon.cycle_state(2, 0.3, P)
    assert set(validate.component_oracles(st, P)) == set(horizon.COMPONENTS)


def test_verdict_shape():
    checks = [validate._check("s", "a", 0.0, 1.0), validate._check("s", "b", 2.0, 1.0)]
    v = validate.verdict("s", 5, checks)
    assert not v["passed"] and v["failures"] == ["b"]
    assert validate.verdict_json(v).endswith("\n")
    assert "1/2 checks passed" in validate.summary(checks)
