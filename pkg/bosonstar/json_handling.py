import json
import os
import re

import numpy as np


SCHEMA_VERSION = 1

_comment_remover = re.compile(r'//[^\n]*|/\*.*?\*/', re.RegexFlag.MULTILINE|re.RegexFlag.DOTALL)
_comma_remover = re.compile(r',\s*([\}\]])')


def _replacer(match):
    return match.group(1)


def remove_comments(jsonc_string):
    jsonc_string = re.sub(_comment_remover, '', jsonc_string)
    jsonc_string = re.sub(_comma_remover, _replacer, jsonc_string)
    return jsonc_string


def jsonc_loads(s, **kwargs):
    s = remove_comments(s)
    return json.loads(s, **kwargs)


def jsonc_load(fp, **kwargs):
    return jsonc_loads(fp.read(), **kwargs)


def update_dict(dic, update):
    """Set values at dotted keys, e.g. {"fourier_window.0": 4.0}"""
    if isinstance(update, dict):
        update = update.items()
    for qualname, value_to_set in update:
        names = qualname.split(".")
        d = dic
        for n in names[:-1]:
            if isinstance(d, dict):
                d = d[n]
            elif isinstance(d, list):
                d = d[int(n)]
            else:
                raise KeyError(qualname)

        n = names[-1]
        if isinstance(d, dict):
            d[n] = value_to_set
        elif isinstance(d, list):
            d[int(n)] = value_to_set
        else:
            raise KeyError(qualname)


def to_json(obj):
    """Convert numpy scalars/arrays, tuples and records to plain JSON types"""
    if isinstance(obj, dict):
        return {str(k): to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_json(el) for el in obj]
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def report_dumps(report, **kwargs):
    """Deterministic serialization: sorted keys, shortest round-trip floats"""
    return json.dumps(to_json(report), sort_keys=True, indent=1, **kwargs)


def report_dump(report, fp, **kwargs):
    fp.write(report_dumps(report, **kwargs))
    fp.write("\n")


def load_schemas():
    path = os.path.join(os.path.dirname(__file__), "schemas.jsonc")
    with open(path, "r") as file:
        return jsonc_load(file)


class SchemaError(ValueError):
    pass


_types = {"number": (int, float), "integer": int, "string": str,
          "boolean": bool, "array": list, "object": dict}


def validate_report(kind, report, schemas=None):
    """Check required keys and their JSON types against the shipped schema"""
    if schemas is None:
        schemas = load_schemas()
    if schemas["schema_version"] != SCHEMA_VERSION:
        raise SchemaError("schema file version {} != {}"
                          .format(schemas["schema_version"], SCHEMA_VERSION))
    schema = schemas["reports"][kind]
    report = to_json(report)
    if report.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError("{}: schema_version must be {}".format(kind, SCHEMA_VERSION))
    for key, type_name in schema["required"].items():
        if key not in report:
            raise SchemaError("{}: missing key {!r}".format(kind, key))
        value = report[key]
        expected = _types[type_name]
        if type_name in ("number", "integer") and isinstance(value, bool):
            raise SchemaError("{}: key {!r} should be a {}".format(kind, key, type_name))
        if value is not None and not isinstance(value, expected):
            raise SchemaError("{}: key {!r} should be a {}".format(kind, key, type_name))
    return True
