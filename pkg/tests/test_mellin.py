"""Mellin transform, line inversion, strip estimation, decay diagnostics."""
import math
import warnings

import numpy as np
import pytest

from stereounfold import (
    quadratic_density,
    triangle_density,
    uniform_density,
)
from stereounfold.errors import (
    ContourOutsideStrip,
    NotIntegrableOnLine,
    StripViolation,
)
from stereounfold.mellin import (
    MellinImage,
    Strip,
    decay_check,
    estimate_strip,
    inverse_mellin_line,
    invert_on_grid,
    mellin_transform,
)
from stereounfold.densities import custom_density

_CATALOG = [
    ("uniform_pi", uniform_density(np.pi)),
    ("triangle", triangle_density()),
    ("quadratic", quadratic_density()),
]


# ---------------------------------------------------------------- transform

@pytest.mark.parametrize("s,expected", [
    (2.0, np.pi / 2.0),
    (3.5, np.pi ** 2.5 / 3.5),
])
def test_transform_flat_density_closed_form(s, expected):
    f = uniform_density(np.pi)
    assert abs(mellin_transform(f, s) - expected) <= 1e-12 * abs(expected)


def test_transform_triangle_at_two():
    assert abs(mellin_transform(triangle_density(), 2.0) - 1.0) <= 1e-12


def test_transform_numeric_path_truncated_exponential():
    norm = 3.0 / (1.0 - math.exp(-3.0))

    def fn(x):
        x = np.asarray(x, dtype=float)
        return norm * np.exp(-3.0 * x) * (x <= 1.0)

    f = custom_density(fn, support_upper=1.0, mass=1.0,
                       label="truncated exponential")
    expected = (1.0 - 4.0 * math.exp(-3.0)) / (3.0 * (1.0 - math.exp(-3.0)))
    assert abs(mellin_transform(f, 2.0) - expected) <= 1e-8


@pytest.mark.parametrize("s", [0.0, -0.5])
def test_transform_outside_strip_raises(s):
    with pytest.raises(StripViolation):
        mellin_transform(uniform_density(np.pi), s)


@pytest.mark.parametrize("name,f", _CATALOG)
def test_transform_unit_mass_at_one(name, f):
    assert abs(mellin_transform(f, 1.0) - 1.0) <= 1e-10


@pytest.mark.parametrize("s", [1.7, 2.0 + 3.0j])
def test_transform_scaling_equivariance(s):
    # doubling the support scales the image by 2^(s-1)
    a = mellin_transform(uniform_density(2.0 * np.pi), s)
    b = mellin_transform(uniform_density(np.pi), s)
    assert abs(a - 2.0 ** (s - 1.0) * b) <= 1e-10 * abs(a)


# ---------------------------------------------------------------- inversion

def _image_two_level():
    """Image of the density equal to 2 on (1/2, 1), zero elsewhere."""
    def fn(s):
        s = np.asarray(s, dtype=complex)
        return (2.0 - 2.0 ** (1.0 - s)) / s

    return MellinImage(strip=Strip(0.0), kind="closed_form", fn=fn)


def _image_parabola():
    """Image of (3/2)(1 - x²) on (0, 1): 3/(s(s+2))."""
    def fn(s):
        s = np.asarray(s, dtype=complex)
        return 3.0 / (s * (s + 2.0))

    return MellinImage(strip=Strip(0.0), kind="closed_form", fn=fn)


def test_inverse_two_level_density_value():
    assert abs(inverse_mellin_line(_image_two_level(), 1.0, 0.75) - 2.0) \
        <= 1e-5


def test_inverse_parabola_value():
    val = inverse_mellin_line(_image_parabola(), 1.0, 0.5)
    assert abs(val - 1.125) <= 5e-6


def test_inverse_outside_support_is_zero():
    f = uniform_density(np.pi)
    val = inverse_mellin_line(f.image, 1.0, 2.0 * np.pi)
    assert abs(val) <= 1e-5


def test_inverse_contour_outside_strip_raises():
    with pytest.raises(ContourOutsideStrip):
        inverse_mellin_line(_image_parabola(), -0.5, 0.5)


def test_inverse_nonpositive_abscissa_raises():
    with pytest.raises(ValueError):
        inverse_mellin_line(_image_parabola(), 1.0, 0.0)


def test_inverse_nondecaying_image_raises():
    def fn(s):
        s = np.asarray(s, dtype=complex)
        return np.ones_like(s)

    flat = MellinImage(strip=Strip(0.0), kind="closed_form", fn=fn)
    with pytest.raises(NotIntegrableOnLine):
        inverse_mellin_line(flat, 1.0, 0.5)


_ROUNDTRIP_GRIDS = {
    "uniform_pi": np.array([0.1, 0.8, 1.6, 2.4, 3.0]),
    "triangle": np.array([0.15, 0.5, 0.9, 1.1, 1.5, 1.9]),
    "quadratic": np.array([0.1, 0.5, 1.0, 1.5, 1.9]),
}


@pytest.mark.parametrize("name,f", _CATALOG)
def test_inversion_round_trip(name, f):
    xs = _ROUNDTRIP_GRIDS[name]
    values, imres, err, blocks = invert_on_grid(f.image, 1.0, xs, 1e-6)
    target = np.asarray(f.eval(xs), dtype=float)
    assert np.max(np.abs(values - target)) <= 1e-5


@pytest.mark.parametrize("name,f", _CATALOG)
def test_inversion_contour_independence(name, f):
    xs = _ROUNDTRIP_GRIDS[name]
    v1, _, _, _ = invert_on_grid(f.image, 1.0, xs, 1e-6)
    v2, _, _, _ = invert_on_grid(f.image, 1.5, xs, 1e-6)
    assert np.max(np.abs(v1 - v2)) <= 1e-5


# ---------------------------------------------------------------- strips

def test_estimate_strip_uses_declared_exponent():
    s = estimate_strip(uniform_density(np.pi))
    assert s.alpha == 0.0
    assert math.isinf(s.beta)


def test_estimate_strip_probes_power_law():
    class Stub:
        support_upper = 1.0

        def eval(self, x):
            return np.asarray(x, dtype=float) ** -0.5

    s = estimate_strip(Stub())
    assert abs(s.alpha - 0.5) <= 1e-6


def test_estimate_strip_inconclusive_zero_density():
    class Stub:
        support_upper = 1.0

        def eval(self, x):
            return np.zeros_like(np.asarray(x, dtype=float))

    with pytest.warns(UserWarning):
        s = estimate_strip(Stub())
    assert abs(s.alpha - (1.0 - 1e-6)) <= 1e-12


def test_estimate_strip_inconclusive_oscillatory():
    class Stub:
        support_upper = 1.0

        def eval(self, x):
            x = np.asarray(x, dtype=float)
            return np.exp(2.0 * np.sin(3.0 * np.log(x)))

    with pytest.warns(UserWarning):
        s = estimate_strip(Stub())
    assert abs(s.alpha - (1.0 - 1e-6)) <= 1e-12


def test_strip_validation():
    with pytest.raises(ValueError):
        Strip(2.0, 1.0)
    s = Strip(0.0, 2.0)
    assert s.contains(1.0)
    assert not s.contains(0.0)
    assert not s.contains(2.0)


# ---------------------------------------------------------------- decay

def test_decay_check_quadratic_image():
    d = decay_check(_image_parabola(), 1.0)
    assert d.vanishes_at_infinity
    assert d.quadratic_decay
    assert abs(d.fitted_exponent + 2.0) <= 0.1


def test_decay_check_first_order_image():
    d = decay_check(_image_two_level(), 1.0)
    assert d.vanishes_at_infinity
    assert not d.quadratic_decay


def test_decay_check_constant_image():
    def fn(s):
        s = np.asarray(s, dtype=complex)
        return np.ones_like(s)

    flat = MellinImage(strip=Strip(0.0), kind="closed_form", fn=fn)
    d = decay_check(flat, 1.0)
    assert not d.vanishes_at_infinity
    assert not d.quadratic_decay
