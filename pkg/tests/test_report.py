import json
import math
from pathlib import Path

import numpy as np
import pytest
from jsonschema import Draft202012Validator

from krakos.bounds import cnot_lower_bound
from krakos.errors import InvalidInput
from krakos.fern import FERN, fern_stats
from krakos.gates import CNOT
from krakos.properties import check_chaining, check_stability
from krakos.qmat import haar_random_unitary
from krakos.report import RunReport, dumps_payload, from_dict, to_dict
from krakos.strength import Measure, Metric, OptimizerOptions, k_delta, k_distance

SCHEMA = json.loads((Path(__file__).resolve().parents[1] / "docs" / "report-schema.json").read_text())
VALIDATOR = Draft202012Validator(SCHEMA)
FAST = OptimizerOptions(4, seed=2)


def _numbers(obj):
    """Flatten every numeric leaf of a JSON-like object."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return []
    if isinstance(obj, (int, float)):
        return [float(obj)]
    if isinstance(obj, dict):
        return [x for k in sorted(obj) for x in _numbers(obj[k])]
    return [x for v in obj for x in _numbers(v)]


def _reports():
    u = haar_random_unitary(2, 3)
    yield "kdelta", k_delta(u, opts=FAST)
    yield "kdist", k_distance(u, Metric("spectral", False), FAST)
    yield "chaining", check_chaining(Measure("kdelta"), 2, seed=1, opts=FAST)
    yield "stability", check_stability(Measure("kdelta"), CNOT, "both", FAST)
    yield "bound", cnot_lower_bound(CNOT, opts=FAST)
    yield "fern", fern_stats(FERN, 2000, 100, seed=1, width=20, height=40)[0]


REPORTS = dict(_reports())


@pytest.mark.parametrize("name", sorted(REPORTS))
class TestRoundTrip:
    def test_through_json(self, name):
        doc = to_dict(REPORTS[name])
        again = to_dict(from_dict(json.loads(json.dumps(doc))))
        a, b = _numbers(doc), _numbers(again)
        assert len(a) == len(b)
        assert all(abs(x - y) <= 1e-12 for x, y in zip(a, b))
        assert json.dumps(doc, sort_keys=True) == json.dumps(again, sort_keys=True)

    def test_schema(self, name):
        doc = RunReport(["test"], 0, 0.1, to_dict(REPORTS[name])).to_dict()
        VALIDATOR.validate(doc)


def test_witness_survives_round_trip():
    r = REPORTS["kdelta"]
    back = from_dict(to_dict(r))
    np.testing.assert_allclose(back.witness.amplitudes, r.witness.amplitudes, atol=1e-15)
    assert back.cut == r.cut


def test_schema_rejects_bad_document():
    doc = RunReport(["x"], 0, 0.0, to_dict(REPORTS["kdelta"])).to_dict()
    doc["payload"]["direction"] = "sideways"
    assert not VALIDATOR.is_valid(doc)


def test_run_report_layout():
    doc = json.loads(RunReport(["fern"], 5, 1.25, to_dict(REPORTS["fern"])).to_json())
    assert doc["schema_version"] == "1"
    assert doc["tool"] == "krakos"
    assert doc["seed"] == 5 and doc["wall_time_s"] == 1.25


def test_payload_is_canonical():
    doc = to_dict(REPORTS["bound"])
    shuffled = dict(reversed(list(doc.items())))
    assert dumps_payload(doc) == dumps_payload(shuffled)


def test_unknown_types():
    with pytest.raises(InvalidInput):
        to_dict(object())
    with pytest.raises(InvalidInput):
        from_dict({"type": "nope"})


def test_floats_are_exact():
    r = REPORTS["kdist"]
    assert from_dict(json.loads(json.dumps(to_dict(r)))).value == r.value
    assert math.isfinite(r.residual)
