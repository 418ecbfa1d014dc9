from __future__ import annotations

import numpy as np

from turingstripes.artifacts import emit_grid, emit_json, emit_plot, emit_polylines, fmt, grid_csv, plot_svg
from turingstripes.boundaries import DiagramGrid, FLAG_NAMES, diagram_grid


def _grid(coeffs, turing, n=5):
    return diagram_grid(coeffs, turing, "kappa_alpha", {"beta": 0.2, "q": -0.215}, (-0.3, 0.3, n), (-0.1, 0.3, n))


def test_fmt():
    assert fmt(0.1) == "0.1" and fmt(1 / 3) == "0.333333333333" and fmt(True) == "1"
    assert fmt(-0.0) == "0" and fmt(float("nan")) == "nan" and fmt(1e-20) == "1e-20"


def test_two_by_two_grid_has_five_lines(coeffs, turing):
    text = grid_csv(_grid(coeffs, turing, 2))
    lines = text.split("\n")
    assert text.endswith("\n") and len(lines) - 1 == 5
    assert lines[0] == "x,y," + ",".join(FLAG_NAMES)
    assert lines[1].startswith("-0.3,-0.1,") and lines[2].startswith("0.3,-0.1,")


def test_emission_is_deterministic(coeffs, turing, tmp_path):
    for k in range(2):
        g = _grid(coeffs, turing, 21)
        emit_grid(g, tmp_path / f"g{k}.csv")
        emit_polylines(g, tmp_path / f"p{k}.csv")
        emit_plot(g, tmp_path / f"s{k}.svg")
        emit_json({"b": 1, "a": [0.1, np.float64(2)]}, tmp_path / f"j{k}.json")
    for stem, ext in (("g", "csv"), ("p", "csv"), ("s", "svg"), ("j", "json")):
        a = (tmp_path / f"{stem}0.{ext}").read_bytes()
        assert a == (tmp_path / f"{stem}1.{ext}").read_bytes()
        assert b"\r" not in a


def test_svg_layers(coeffs, turing):
    svg = plot_svg(_grid(coeffs, turing, 11))
    for name in ("exists", "eckhaus", "hex", "quasihex"):
        assert f'id="layer-{name}"' in svg
    assert 'id="legend"' in svg and "<path" in svg
    assert "href" not in svg


def test_empty_boundary_set():
    flags = {n: np.ones((2, 2), bool) for n in FLAG_NAMES}
    g = DiagramGrid("kappa_alpha", np.array([0.0, 1.0]), np.array([0.0, 1.0]), flags, {})
    svg = plot_svg(g)
    assert "<path" not in svg and 'id="layer-stable"' in svg


def test_extra_flags(coeffs, turing):
    g = _grid(coeffs, turing, 2)
    g.flags["rhomb"] = np.zeros((2, 2), bool)
    assert grid_csv(g, ("rhomb",)).splitlines()[0].endswith(",stable,rhomb")
