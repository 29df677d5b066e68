import json

import pytest
from fastapi.testclient import TestClient

from app.main import app


@pytest.fixture
def client():
    with TestClient(app) as c:
        yield c


def _group(fixtures_dir, name):
    return json.loads((fixtures_dir / name).read_text())


def test_root(client):
    response = client.get('/')
    assert response.status_code == 200
    assert response.json()['message'] == 'Hyperbolic Dirichlet Lab API'


def test_classify(client, fixtures_dir):
    response = client.post('/classify', json={'group': _group(fixtures_dir, 'boost_h2.json')})
    assert response.status_code == 200
    (record,) = response.json()['generators']
    assert record['label'] == 'a'
    assert record['translation_length'] == pytest.approx(1.0)


def test_classify_rejects_non_isometries(client, fixtures_dir):
    response = client.post('/classify', json={'group': _group(fixtures_dir, 'not_lorentz.json')})
    assert response.status_code == 422


def test_domain(client, fixtures_dir):
    response = client.post('/domain', json={'group': _group(fixtures_dir, 'boost_h2.json'), 'len_max': 6})
    assert response.status_code == 200
    body = response.json()
    assert body['convergence']['converged']
    assert sorted(c['word'] for c in body['contributors']) == ['a', 'a^-1']


def test_unconverged_domain_is_a_conflict(client, fixtures_dir):
    response = client.post('/domain', json={'group': _group(fixtures_dir, 'schottky_h2.json'), 'len_max': 1})
    assert response.status_code == 409


def test_simplicity(client, fixtures_dir):
    response = client.post('/simplicity', json={'group': _group(fixtures_dir, 'boost_h2.json'), 'len_max': 6})
    assert response.status_code == 200
    assert response.json()['simplicity']['simple']


def test_example1_validates_lambda(client):
    response = client.post('/example1', json={'lam': 0.5})
    assert response.status_code == 422


def test_example2(client):
    response = client.post('/example2', json={})
    assert response.status_code == 200
    assert response.json()['passed']


def test_example2_on_the_axis(client):
    response = client.post('/example2', json={'base': [1.0, 0.0, 0.0, 0.0]})
    assert response.status_code == 422
