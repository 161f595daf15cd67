import glob
import json
import pathlib

import pytest

import lcsbp

ROOT = pathlib.Path(__file__).resolve().parents[2]
jsonschema = pytest.importorskip("jsonschema")
SCHEMA = json.loads((ROOT / "docs" / "spec.schema.json").read_text())


@pytest.mark.parametrize("path", sorted(glob.glob(str(ROOT / "docs" / "examples" / "*.json"))))
def test_examples_pass_schema_and_parser(path):
    doc = json.loads(pathlib.Path(path).read_text())
    jsonschema.validate(doc, SCHEMA)
    spec = lcsbp.load_spec(path)
    # canonical dump is itself a valid document
    jsonschema.validate(json.loads(spec.to_json()), SCHEMA)


@pytest.mark.parametrize(
    "doc",
    [
        {"c": 1, "extra": 0},
        {"lambda": 1},
        {"c": 1, "levy": {"kind": "atoms", "params": {}}},
        {"c": 1, "levy": {"kind": "power_tail", "params": {"alpha": 1.5}}},
    ],
)
def test_schema_and_parser_both_reject(doc):
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(doc, SCHEMA)
    with pytest.raises(ValueError):
        lcsbp.parse_spec(json.dumps(doc))
