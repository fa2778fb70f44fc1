import json

import numpy as np
import pytest

from bosonstar.json_handling import (SCHEMA_VERSION, SchemaError, jsonc_loads,
    load_schemas, report_dumps, to_json, update_dict, validate_report)
from bosonstar.miscellaneous import Record


def test_comments():
    assert jsonc_loads('''
        // Run configuration
        {
            "n": /* nodes */ 1024, // inline
            /* several
               lines */
            "fourier_window": [5, 12,], // trailing comma
            // last
        }
        // end
    ''') == {"n": 1024, "fourier_window": [5, 12]}

    with pytest.raises(json.JSONDecodeError):
        jsonc_loads('''{},''')


def test_update_dict():
    config = {"n": 2048, "fourier_window": [5.0, 15.0], "solver": {"tol": 1e-8}}
    update_dict(config, {"n": 1024, "fourier_window.1": 12.0, "solver.tol": 1e-10})
    assert config == {"n": 1024, "fourier_window": [5.0, 12.0], "solver": {"tol": 1e-10}}

    with pytest.raises(KeyError):
        update_dict(config, {"n.x": 1})
    with pytest.raises(KeyError):
        update_dict(config, {"missing.x": 1})


def test_to_json():
    converted = to_json(Record(a=np.float64(1.5), b=np.arange(3), c=(np.int64(2), True),
                               d={1: np.bool_(False)}, e=1+2j))
    assert converted == {"a": 1.5, "b": [0, 1, 2], "c": [2, True], "d": {"1": False},
                         "e": [1.0, 2.0]}
    assert type(converted["a"]) is float
    assert type(converted["c"][0]) is int


def test_report_dumps_is_deterministic():
    a = report_dumps({"b": 0.1, "a": [1/3, np.float64(2/3)]})
    b = report_dumps({"a": [1/3, 2/3], "b": 0.1})
    assert a == b
    assert json.loads(a)["a"][0] == 1/3


def test_schemas():
    schemas = load_schemas()
    assert schemas["schema_version"] == SCHEMA_VERSION
    for kind in ("run_config", "error", "groundstate", "verification", "linearization",
                 "certificate", "evolution", "selftest"):
        assert "schema_version" in schemas["reports"][kind]["required"]


def test_validate_report():
    report = {"schema_version": 1, "error": "DivergenceError", "message": "",
              "command": "solve", "meta": {}}
    assert validate_report("error", report)
    assert validate_report("error", {**report, "message": None})

    with pytest.raises(SchemaError):
        validate_report("error", {k: v for k, v in report.items() if k != "message"})
    with pytest.raises(SchemaError):
        validate_report("error", {**report, "message": 3})
    with pytest.raises(SchemaError):
        validate_report("error", {**report, "schema_version": 2})


def test_validate_numbers():
    schemas = {"schema_version": 1,
               "reports": {"x": {"required": {"iterations": "integer", "residual": "number"}}}}
    assert validate_report("x", {"schema_version": 1, "iterations": np.int64(3), "residual": 1},
                           schemas)
    with pytest.raises(SchemaError):
        validate_report("x", {"schema_version": 1, "iterations": True, "residual": 1.0}, schemas)
    with pytest.raises(SchemaError):
        validate_report("x", {"schema_version": 1, "iterations": 1.5, "residual": 1.0}, schemas)
