import json
from fractions import Fraction

import numpy as np
import pytest
import sympy
from pydantic import ValidationError

from app.errors import InvalidDefinition
from app.models.configuration import LabConfig, load_lab_config
from app.models.models import ComplexDefinition
from app.models.reports import ConvergenceRecord
from app.schema.types import FaceVerdict
from app.schema.validation import (
    build_group,
    load_group_definition,
    validate_complex_definition,
    validate_group_definition,
)
from app.utils.serialization import to_serializable_dict
from app.utils.tracer import ScanTracer


def test_serialization_of_numeric_types():
    payload = {
        'half': Fraction(1, 2),
        'third': sympy.Rational(-1, 3),
        'rows': np.array([[1.0, 2.0]]),
        'count': np.int64(3),
        'flag': np.bool_(True),
        'verdict': FaceVerdict.SIMPLE,
        1: (np.float64(0.5),),
    }
    assert to_serializable_dict(payload) == {
        'half': [1, 2],
        'third': [-1, 3],
        'rows': [[1.0, 2.0]],
        'count': 3,
        'flag': True,
        'verdict': FaceVerdict.SIMPLE.value,
        '1': [0.5],
    }


def test_serialization_of_models_and_matrices():
    record = ConvergenceRecord(word_length=4, stable_windows=2, converged=True)
    assert to_serializable_dict(record)['word_length'] == 4
    assert to_serializable_dict(sympy.Matrix([[1, sympy.Rational(1, 2)]])) == [[[1, 1], [1, 2]]]
    json.dumps(to_serializable_dict({'m': sympy.Matrix([[2]])}))


def test_missing_config_gives_defaults(tmp_path):
    config = load_lab_config(str(tmp_path / 'absent.json'))
    assert config == LabConfig()


def test_yaml_config(tmp_path):
    path = tmp_path / 'lab.yaml'
    path.write_text('tolerances:\n  linear: 1.0e-6\ndomain:\n  len_max: 5\n')
    config = load_lab_config(str(path))
    assert config.tolerances.linear == 1e-6
    assert config.domain.len_max == 5
    assert config.domain_kwargs()['tol'] == 1e-6
    assert config.domain_kwargs(1e-3)['tol'] == 1e-3


def test_config_from_environment(tmp_path, monkeypatch):
    path = tmp_path / 'lab.json'
    path.write_text(json.dumps({'scans': {'seed': 42}}))
    monkeypatch.setenv('HYPERLAB_CONFIG', str(path))
    assert load_lab_config().scans.seed == 42


def test_config_errors(tmp_path):
    bad_suffix = tmp_path / 'lab.toml'
    bad_suffix.write_text('')
    with pytest.raises(ValueError):
        load_lab_config(str(bad_suffix))

    inverted = tmp_path / 'lab.json'
    inverted.write_text(json.dumps({'domain': {'len_start': 4, 'len_max': 2}}))
    with pytest.raises(ValidationError):
        load_lab_config(str(inverted))


def test_shipped_config_loads():
    config = load_lab_config()
    assert config.complexify.tuple_cap >= 2


def test_tracer_writes_json_lines(tmp_path):
    path = tmp_path / 'trace.jsonl'
    tracer = ScanTracer(str(path))
    tracer.trace_scan('s1', 'example1', {'seed': 3, 'lam': 2.0})
    tracer.trace_results('s1', trials=10, hits=1, duration_ms=5.0, witnesses=[[1.0, 1.0, 1.0, 0.0]])
    for handler in tracer.logger.handlers:
        handler.flush()

    start, results = [json.loads(line) for line in path.read_text().splitlines()]
    assert start['action'] == 'scan'
    assert start['params']['seed'] == 3
    assert results['hits'] == 1
    assert results['witnesses'] == [{'x': [1.0, 1.0, 1.0, 0.0]}]
    assert 'timestamp' in results


def test_group_validation_collects_errors(fixtures_dir):
    definition = load_group_definition(fixtures_dir / 'not_lorentz.json')
    result = validate_group_definition(definition)
    assert not result
    assert result.errors[0].startswith('Generator s:')

    definition.base = [2.0, 0.0, 0.0]
    assert len(validate_group_definition(definition).errors) == 2
    with pytest.raises(InvalidDefinition):
        build_group(definition)


def test_complex_validation_names_unknown_faces():
    definition = ComplexDefinition.model_validate({
        'faces': [{'id': 'v', 'dim': 0}, {'id': 'v', 'dim': 0}],
        'morphisms': [{'source': 'v', 'target': 'w'}],
    })
    result = validate_complex_definition(definition)
    assert not result
    assert any('Duplicate face ids: v' in e for e in result.errors)
    assert any('w' in e for e in result.errors)
