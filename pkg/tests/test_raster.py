from __future__ import annotations

import math

import numpy as np
import pytest

from builders import obj, rect, scene
from visblend.raster import DimensionMismatch, luminance, rasterize, rmse


def test_empty_scene_is_white():
    img = rasterize(scene(obj("root")), 32, 32)
    assert img.shape == (32, 32) and np.all(img == 1.0)


def test_full_canvas_black_rectangle():
    s = scene(obj("root", rect(0, 0, 1000, 1000)))
    assert np.all(rasterize(s, 40, 40) == 0.0)


def test_half_canvas():
    s = scene(obj("root", rect(0, 0, 500, 1000)))
    img = rasterize(s, 16, 16)
    assert np.all(img[:, :8] == 0.0) and np.all(img[:, 8:] == 1.0)


def test_deterministic(scenes):
    for sc in scenes.values():
        assert np.array_equal(rasterize(sc, 64, 64), rasterize(sc, 64, 64))


def test_luminance():
    assert luminance((255, 255, 255)) == pytest.approx(1.0)
    assert luminance((0, 0, 0)) == 0.0


def test_resolution_consistency(scenes):
    for sc in scenes.values():
        one = rasterize(sc, 128, 128)
        two = rasterize(sc, 256, 256).reshape(128, 2, 128, 2).mean(axis=(1, 3))
        assert np.abs(one - two).mean() <= 2 / 255


def test_rmse_examples():
    white, black = np.ones((8, 8)), np.zeros((8, 8))
    assert rmse(white, white) == 0.0
    assert rmse(white, black) == 1.0
    half = white.copy()
    half[:4] = 0.0
    assert rmse(white, half) == pytest.approx(math.sqrt(0.5))


def test_rmse_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        rmse(np.ones((4, 4)), np.ones((4, 5)))


def test_bad_dimensions():
    with pytest.raises(ValueError):
        rasterize(scene(obj("root")), 0, 10)
