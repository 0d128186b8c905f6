"""Grid construction, transforms, and trigonometric interpolation."""

import numpy as np
import pytest

from dampedwave.errors import ConfigError
from dampedwave.grid import (
    Grid,
    SpectralField,
    apply_radial_multiplier,
    evaluate_at,
    forward_transform,
    inverse_transform,
)


def test_axes_and_spacing():
    g = Grid(1, 64, 8.0)
    assert g.dx == pytest.approx(16.0 / 64)
    assert g.dxi == pytest.approx(np.pi / 8.0)
    assert g.xi_max == pytest.approx(np.pi * 64 / 16.0)
    x = g.x_axis
    assert x[0] == pytest.approx(-8.0)
    assert np.allclose(np.diff(x), g.dx)
    # frequency axis is symmetric around zero up to the Nyquist mode
    xi = g.xi_axis
    assert xi.min() == pytest.approx(-g.xi_max)
    assert 0.0 in xi


def test_low_frequency_guard():
    # xi_max must clear the kernel branch point at |xi| = 1/2
    with pytest.raises(ConfigError):
        Grid(1, 8, 32.0)


def test_roundtrip_1d():
    g = Grid(1, 128, 10.0)
    rng = np.random.default_rng(3)
    samples = rng.standard_normal(g.shape)
    fld = forward_transform(g, samples)
    back = fld.physical()
    assert np.max(np.abs(back - samples)) < 1e-12


def test_roundtrip_2d():
    g = Grid(2, 32, 6.0)
    rng = np.random.default_rng(4)
    samples = rng.standard_normal(g.shape)
    back = forward_transform(g, samples).physical()
    assert np.max(np.abs(back - samples)) < 1e-12


def test_gaussian_coefficients_match_continuum():
    # unitary convention: Fourier transform of e^{-x^2/2} is e^{-xi^2/2}
    g = Grid(1, 256, 20.0)
    fld = forward_transform(g, np.exp(-0.5 * g.x_axis**2))
    expected = np.exp(-0.5 * g.xi_axis**2)
    assert np.max(np.abs(fld.coeffs - expected)) < 1e-12


def test_parseval_exact():
    g = Grid(1, 128, 9.0)
    rng = np.random.default_rng(5)
    samples = rng.standard_normal(g.shape)
    fld = forward_transform(g, samples)
    phys = float(np.sum(samples**2) * g.dx)
    spec = float(np.sum(np.abs(fld.coeffs) ** 2) * g.dxi)
    assert phys == pytest.approx(spec, rel=1e-13)


def test_real_field_is_conjugate_symmetric():
    g = Grid(2, 16, 5.0)
    rng = np.random.default_rng(6)
    fld = forward_transform(g, rng.standard_normal(g.shape))
    assert fld.is_conjugate_symmetric()
    broken = SpectralField(g, fld.coeffs + 1j * 5e-3)
    assert not broken.is_conjugate_symmetric()


def test_dealias_mask_cuts_top_third():
    g = Grid(1, 64, 8.0)
    kept = int(g.dealias_mask.sum())
    # modes with |k| <= N // 3 survive
    assert kept == 2 * (64 // 3) + 1


def test_apply_radial_multiplier_matches_manual():
    g = Grid(1, 64, 6.0)
    rng = np.random.default_rng(7)
    fld = forward_transform(g, rng.standard_normal(g.shape))
    out = apply_radial_multiplier(fld, lambda r: 1.0 / (1.0 + r * r), zero_mode=1.0)
    manual = fld.coeffs / (1.0 + g.xi2)
    assert np.max(np.abs(out.coeffs - manual)) < 1e-14


def test_evaluate_at_reproduces_lattice():
    g = Grid(1, 64, 7.0)
    rng = np.random.default_rng(8)
    samples = rng.standard_normal(g.shape)
    fld = forward_transform(g, samples)
    pts = g.x_axis.reshape(-1, 1)[5:20]
    vals = evaluate_at(fld, pts)
    assert np.max(np.abs(vals - samples[5:20])) < 1e-11


def test_evaluate_at_off_lattice_band_limited():
    # a pure lattice harmonic is reproduced exactly anywhere in the box
    g = Grid(1, 64, np.pi)
    x = g.x_axis
    samples = np.cos(3.0 * x) + 0.5 * np.sin(7.0 * x)
    fld = forward_transform(g, samples)
    pts = np.linspace(-2.5, 2.5, 41).reshape(-1, 1)
    vals = evaluate_at(fld, pts)
    expected = np.cos(3.0 * pts[:, 0]) + 0.5 * np.sin(7.0 * pts[:, 0])
    assert np.max(np.abs(vals - expected)) < 1e-11


def test_evaluate_at_2d():
    g = Grid(2, 32, np.pi)
    xx = g.x_axis[:, None]
    yy = g.x_axis[None, :]
    samples = np.sin(2.0 * xx) * np.cos(3.0 * yy)
    fld = forward_transform(g, samples)
    pts = np.array([[0.3, -0.7], [1.1, 0.2], [-2.0, 2.5]])
    vals = evaluate_at(fld, pts)
    expected = np.sin(2.0 * pts[:, 0]) * np.cos(3.0 * pts[:, 1])
    assert np.max(np.abs(vals - expected)) < 1e-11


def test_grid_equality_and_caching():
    a = Grid(1, 64, 8.0)
    b = Grid(1, 64, 8.0)
    assert a == b
    assert a.xi2 is a.xi2  # cached property returns one array
