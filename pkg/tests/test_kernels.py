"""Body section kernels: sphere, nearly-sphere family, scaling, custom."""
import math

import numpy as np
import pytest
import scipy.special as sp

from stereounfold import (
    custom_kernel,
    nearly_sphere_plane_kernel,
    scale_kernel,
    sphere_line_kernel,
    sphere_plane_kernel,
    uniform_density,
)
from stereounfold.errors import InvalidShapeParameters


# ---------------------------------------------------------------- sphere

def test_sphere_plane_values():
    k = sphere_plane_kernel()
    assert k.mode == "plane"
    assert abs(k.max_section - np.pi) <= 1e-15
    assert abs(k.phi.eval(0.0) - 1.0 / (2.0 * np.pi)) <= 1e-15
    assert abs(k.phi_star.eval(1.0) - 1.0) <= 1e-12
    # mean section area of the unit-diameter sphere
    assert abs(k.phi_star.eval(2.0) - 2.0 * np.pi / 3.0) <= 1e-12
    assert abs(k.singularity_exponent_p - 0.5) <= 1e-15


@pytest.mark.parametrize("s", [0.7, 1.5, 3.0, 2.0 + 4.0j])
def test_sphere_plane_image_closed_form(s):
    k = sphere_plane_kernel()
    expected = np.pi ** (s - 0.5) * sp.gamma(s) / (2.0 * sp.gamma(s + 0.5))
    assert abs(k.phi_star.eval(s) - expected) <= 1e-12 * abs(expected)


def test_sphere_line_values():
    k = sphere_line_kernel()
    assert k.mode == "line"
    assert abs(k.max_section - 2.0) <= 1e-15
    assert abs(k.phi.eval(2.0) - 1.0) <= 1e-15
    assert abs(k.phi.eval(1.0) - 0.5) <= 1e-15
    assert abs(k.phi_star.eval(2.0) - 4.0 / 3.0) <= 1e-12
    assert k.singularity_exponent_p == 0.0


def test_sphere_body_constants():
    # unit-radius sphere: max section π, max chord 2
    kp = sphere_plane_kernel()
    assert abs(kp.body.volume - 4.0 * np.pi / 3.0) <= 1e-12
    assert abs(kp.body.surface - 4.0 * np.pi) <= 1e-12
    assert abs(kp.body.beta - np.pi) <= 1e-12


# ------------------------------------------------------------ near-sphere

def test_nearly_sphere_values():
    k = nearly_sphere_plane_kernel(np.pi, 0.25)
    assert abs(k.phi.eval(0.0) - 0.75 / np.pi) <= 1e-14
    assert abs(k.singularity_exponent_p - 0.25) <= 1e-15
    # phi*(s) = (1-p) σ_m^(s-1) B(s, 1-p)
    for s in (1.0, 2.5, 1.5 + 2.0j):
        expected = 0.75 * np.pi ** (s - 1.0) \
            * sp.gamma(s) * sp.gamma(0.75) / sp.gamma(s + 0.75)
        assert abs(k.phi_star.eval(s) - expected) <= 1e-12 * abs(expected)


def test_nearly_sphere_half_exponent_is_sphere():
    ns = nearly_sphere_plane_kernel(np.pi, 0.5)
    sph = sphere_plane_kernel()
    sigmas = np.array([0.0, 0.5, 1.5, 2.8])
    assert np.max(np.abs(ns.phi.eval(sigmas) - sph.phi.eval(sigmas))) \
        <= 1e-12
    for s in (1.0, 2.0, 3.5):
        assert abs(ns.phi_star.eval(s) - sph.phi_star.eval(s)) <= 1e-10


@pytest.mark.parametrize("sigma_m,p", [
    (np.pi, 0.7),
    (np.pi, 0.0),
    (np.pi, -0.25),
    (0.0, 0.25),
    (-1.0, 0.25),
])
def test_nearly_sphere_invalid_parameters(sigma_m, p):
    with pytest.raises(InvalidShapeParameters):
        nearly_sphere_plane_kernel(sigma_m, p)


# ---------------------------------------------------------------- scaling

def test_scale_plane_values():
    k = sphere_plane_kernel()
    scaled = scale_kernel(k, 2.0, "plane")
    assert abs(scaled.support_upper - 4.0 * np.pi) <= 1e-12
    assert abs(scaled.eval(0.0) - 1.0 / (8.0 * np.pi)) <= 1e-15


def test_scale_line_values():
    k = sphere_line_kernel()
    scaled = scale_kernel(k, 2.0, "line")
    assert abs(scaled.support_upper - 4.0) <= 1e-12
    ls = np.array([0.5, 1.0, 3.0, 4.0])
    assert np.max(np.abs(scaled.eval(ls) - ls / 8.0)) <= 1e-15


def test_scale_identity_at_unit_size():
    k = sphere_line_kernel()
    scaled = scale_kernel(k, 1.0, "line")
    ls = np.array([0.3, 1.0, 1.9])
    assert np.max(np.abs(scaled.eval(ls) - k.phi.eval(ls))) <= 1e-15


@pytest.mark.parametrize("lam", [0.5, 1.0, 3.0])
def test_scaled_plane_density_keeps_unit_mass(lam):
    k = sphere_plane_kernel()
    scaled = scale_kernel(k, lam, "plane")
    upper = scaled.support_upper
    # substitution σ = upper - u² regularizes the inverse-sqrt edge
    u_edge = math.sqrt(upper)
    us, w = np.polynomial.legendre.leggauss(400)
    us = 0.5 * u_edge * (us + 1.0)
    vals = scaled.eval(upper - us ** 2) * 2.0 * us
    mass = float(0.5 * u_edge * np.sum(w * vals))
    assert abs(mass - 1.0) <= 1e-8


@pytest.mark.parametrize("lam", [0.5, 1.0, 3.0])
def test_scaled_line_density_keeps_unit_mass(lam):
    k = sphere_line_kernel()
    scaled = scale_kernel(k, lam, "line")
    upper = scaled.support_upper
    xs, w = np.polynomial.legendre.leggauss(200)
    xs = 0.5 * upper * (xs + 1.0)
    mass = float(0.5 * upper * np.sum(w * scaled.eval(xs)))
    assert abs(mass - 1.0) <= 1e-8


@pytest.mark.parametrize("s", [1.5, 2.0])
@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_scaled_image_power_law(s, lam):
    kp = sphere_plane_kernel()
    sp_img = scale_kernel(kp, lam, "plane").image.eval(s)
    expected = lam ** (2.0 * s - 2.0) * kp.phi_star.eval(s)
    assert abs(sp_img - expected) <= 1e-8 * abs(expected)

    kl = sphere_line_kernel()
    sl_img = scale_kernel(kl, lam, "line").image.eval(s)
    expected = lam ** (s - 1.0) * kl.phi_star.eval(s)
    assert abs(sl_img - expected) <= 1e-8 * abs(expected)


def test_scale_kernel_validation():
    k = sphere_line_kernel()
    with pytest.raises(ValueError):
        scale_kernel(k, 0.0, "line")
    with pytest.raises(ValueError):
        scale_kernel(k, 1.0, "diagonal")


# ---------------------------------------------------------------- custom

def test_custom_kernel_fills_body_constants():
    # flat section density over [0, π]: mean section π/2
    phi = uniform_density(np.pi)
    k = custom_kernel("plane", phi)
    assert k.mode == "plane"
    assert abs(k.max_section - np.pi) <= 1e-12
    # mean-section identity: ∫σ phi dσ = 2πV/M
    mean_sec = np.pi / 2.0
    assert abs(2.0 * np.pi * k.body.volume / k.body.mean_curvature
               - mean_sec) <= 1e-8
    assert abs(k.body.beta - k.body.surface / 4.0) <= 1e-15


def test_custom_kernel_rejects_bad_mode():
    with pytest.raises(ValueError):
        custom_kernel("slice", uniform_density(np.pi))
