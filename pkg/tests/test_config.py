from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from turingstripes.config import RunConfig, build_system, dump_config, parse_config, strip_comments
from turingstripes.errors import ParseError, RangeError, UnknownKey
from turingstripes.model import designed_example, klausmeier

DOC = """{
  // designed example at the published strength
  "command": "diagram",
  "system": {"preset": "designed_example", "epsilon": 0.4},
  /* parameter plane */
  "params": {"plane": "kappa_alpha", "x": [-0.3, 0.3, 61], "y": [-0.2, 0.4, 61],
             "fixed": {"beta": 0.2, "q": -0.215}},
  "output_dir": "out/fig"
}
"""


def test_parse_example():
    cfg = parse_config(DOC)
    assert cfg.command == "diagram"
    assert cfg.system == "designed_example" and cfg.system_params == {"epsilon": 0.4}
    assert cfg.params["x"] == [-0.3, 0.3, 61]
    assert cfg.params["fixed"]["q"] == -0.215


def test_presets_match_published_values():
    sys = build_system("designed_example", {"epsilon": 0.4})
    ref = designed_example(0.4)
    assert np.array_equal(sys.L, ref.L) and np.array_equal(sys.Q, ref.Q) and np.array_equal(sys.K, ref.K)
    km = build_system("klausmeier", {})
    assert km.d1 == 500.0 and np.allclose(km.L, klausmeier(2.712, 0.45, 500.0).L)


def test_comments_keep_positions():
    text = '{"a": 1, // c\n "b": /* x\n y */ 2}'
    clean = strip_comments(text)
    assert len(clean) == len(text) and clean.count("\n") == text.count("\n")
    assert "//" not in clean and "/*" not in clean
    assert strip_comments('{"u": "http://x"}') == '{"u": "http://x"}'


def test_parse_error_location():
    with pytest.raises(ParseError) as exc:
        parse_config('{\n  "command": "verify",\n  "params": {,}\n}')
    assert exc.value.line == 3


def test_malformed_number():
    with pytest.raises(ParseError):
        parse_config('{"command": "coeffs", "params": {"q_scale": 1.2.3}}')
    with pytest.raises(ParseError):
        parse_config('{"command": "coeffs", "params": {"q_scale": "big"}}')
    with pytest.raises(ParseError):
        parse_config('{"command": "coeffs", "params": {"q_scale": NaN}}')


@pytest.mark.parametrize("doc", [
    '{"command": "verify", "colour": 1}',
    '{"command": "diagram", "params": {"planes": "kappa_alpha"}}',
    '{"command": "diagram", "params": {"fixed": {"gamma": 1}}}',
    '{"command": "verify", "system": {"preset": "klausmeier", "eps": 1}}',
])
def test_unknown_keys(doc):
    with pytest.raises(UnknownKey):
        parse_config(doc)


@pytest.mark.parametrize("doc", [
    '{"command": "diagram", "params": {"x": [0, 1, 1]}}',
    '{"command": "diagram", "params": {"x": [1, 0, 5]}}',
    '{"command": "diagram", "params": {"plane": "k-a"}}',
    '{"command": "diagram", "params": {"fixed": {"theta": 0}}}',
    '{"command": "oracle", "params": {"eps_list": [0.01, 0.02]}}',
    '{"command": "scan", "params": {"a": [2.7, 2.9, 0]}}',
    '{"command": "launch"}',
    '{"command": "verify", "system": "gray_scott"}',
])
def test_range_errors(doc):
    with pytest.raises(RangeError):
        parse_config(doc)


def test_inline_system():
    doc = ('{"command": "coeffs", "system": {"d1": 1.0, "d2": 3.5, "M": [[1, 4], [-0.2, 1]], "polys": ['
           '{"1,0": 3, "0,1": -1, "2,0": 0.4, "0,2": 0.1, "1,2": -1}, '
           '{"1,0": 14, "0,1": -3.5, "2,0": 0.4, "0,2": 0.1, "1,2": 1}]}}')
    cfg = parse_config(doc)
    sys = build_system(cfg.system, cfg.system_params)
    assert np.allclose(sys.Q, designed_example(0.4).Q)


axis = st.tuples(st.floats(-5, 0, allow_nan=False), st.floats(0.1, 5), st.integers(2, 500))


@given(st.sampled_from(["kappa_alpha", "q_alpha", "beta_alphatilde", "epsilon_alpha"]), axis, axis,
       st.floats(-2, 2), st.floats(0.01, 1.0), st.text("abcdefgh/_", min_size=1, max_size=12),
       st.floats(0.01, 1.0))
def test_round_trip(plane, x, y, beta, theta, out, eps):
    cfg = RunConfig("diagram", "designed_example", {"epsilon": eps},
                    {"plane": plane, "x": [x[0], x[0] + x[1], x[2]], "y": [y[0], y[0] + y[1], y[2]],
                     "fixed": {"beta": beta, "theta": theta}}, out)
    assert parse_config(dump_config(cfg)) == cfg
    assert dump_config(parse_config(dump_config(cfg))) == dump_config(cfg)
