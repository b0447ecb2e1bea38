import numpy as np
import pytest

from obfuscation_bench import image_io

from conftest import random_image


def test_to_uint8_rounds_half_up():
    arr = np.array([[[0.0, 0.5 / 255, 1.0]]])
    out = image_io.to_uint8(arr)
    assert out.tolist() == [[[0, 1, 255]]]


def test_uint8_round_trip_exact_on_quantized(rng):
    img = image_io.from_uint8(image_io.to_uint8(random_image(rng, 16, 16)))
    assert np.array_equal(image_io.to_uint8(img), image_io.to_uint8(img))
    again = image_io.from_uint8(image_io.to_uint8(img))
    assert np.array_equal(again, img)


def test_png_round_trip(tmp_path, rng):
    img = random_image(rng, 20, 30)
    path = tmp_path / "x.png"
    image_io.save_png(path, img)
    loaded = image_io.load_png(path)
    assert loaded.shape == img.shape
    assert np.abs(loaded - img).max() <= 0.5 / 255 + 1e-9


def test_png_rgba_round_trip(tmp_path, rng):
    rgba = rng.random((12, 12, 4))
    path = tmp_path / "a.png"
    image_io.save_png(path, rgba)
    loaded = image_io.load_png_rgba(path)
    assert loaded.shape == (12, 12, 4)
    assert np.abs(loaded - rgba).max() <= 0.5 / 255 + 1e-9


def test_save_png_deterministic_bytes(tmp_path, rng):
    img = random_image(rng, 16, 16)
    image_io.save_png(tmp_path / "a.png", img)
    image_io.save_png(tmp_path / "b.png", img)
    assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()


def test_save_png_atomic_no_temp_left(tmp_path, rng):
    image_io.save_png(tmp_path / "c.png", random_image(rng, 8, 8))
    assert sorted(p.name for p in tmp_path.iterdir()) == ["c.png"]


def test_load_grayscale_promotes_to_rgb(tmp_path):
    image_io.save_png(tmp_path / "g.png", np.linspace(0, 1, 64).reshape(8, 8))
    loaded = image_io.load_png(tmp_path / "g.png")
    assert loaded.shape == (8, 8, 3)
    assert np.array_equal(loaded[..., 0], loaded[..., 1])
