import json
import math

import pytest

import lcsbp


def spec(**kw):
    return lcsbp.parse_spec(json.dumps(kw))


def test_psi_of_quadratic():
    s = spec(sigma=math.sqrt(2.0), c=1)
    assert lcsbp.psi(s, 3.0) == pytest.approx(9.0)


def test_spec_round_trip():
    s = spec(**{"lambda": 0.5, "gamma": -1, "c": 2})
    again = lcsbp.parse_spec(s.to_json())
    assert again.to_json() == s.to_json()
    assert again.lambda_ == 0.5


def test_bad_spec_raises_value_error():
    with pytest.raises(ValueError):
        lcsbp.parse_spec('{"c": 1, "bogus": 2}')


def test_classify_killing_phase_transition():
    reflecting = lcsbp.classify(spec(**{"lambda": 0.5, "c": 2}))
    exit_ = lcsbp.classify(spec(**{"lambda": 1, "c": 2}))
    assert reflecting["z_at_infinity"] == "regular-reflecting"
    assert exit_["z_at_infinity"] == "exit"


def test_extinction_matches_closed_form():
    # Psi = z - lambda, c = 2: P(no explosion from z0) = (1 + z0)^(-lambda)
    s = spec(**{"lambda": 1, "gamma": 1, "c": 2})
    v = lcsbp.extinction_prob(s, 1.0)
    assert v.value == pytest.approx(0.5, abs=1e-8)


def test_deterministic_logistic_path():
    s = spec(c=2)
    (p,) = lcsbp.simulate_zmin(s, 1.0, seed=1, paths=1, t_max=2.0, grid=[0.5, 1.0, 2.0])
    for t, z in zip(p["times"], p["values"]):
        assert z == pytest.approx(1.0 / (1.0 + t), abs=1e-6)


def test_generator_residual_is_tiny():
    s = lcsbp.stable_mechanism(1.5, 1.0)
    assert lcsbp.generator_duality_residual(s, 0.7, 1.3) < 1e-10
