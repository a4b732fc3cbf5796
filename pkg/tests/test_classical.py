"""Classical derivative-based inverses: Abel-type, chord derivative,
corpuscle (profile-radius) route, and their degeneracies."""
import math

import numpy as np
import pytest
from scipy.interpolate import CubicSpline

from stereounfold import (
    Histogram,
    abel_solve_plane,
    density_from_histogram,
    derivative_solve_line,
    generalized_abel_solve,
    nearly_sphere_plane_kernel,
    quadratic_density,
    radius_profile_from_area,
    sphere_plane_kernel,
    triangle_density,
    uniform_density,
    wicksell_solve,
)
from stereounfold.densities import custom_density, piecewise_poly_density
from stereounfold.errors import NonSmoothInput, SupportExceedsKernel
from stereounfold.unfold import SizeDistribution
from stereounfold.verify import _forward_batch


def _smooth_area_density():
    """h(σ) = (3/π)(1 - σ/π)² on [0, π]; exact inverse 5λ(1-λ²)^(3/2)."""
    pi = math.pi
    return piecewise_poly_density(
        [(0.0, pi, (3.0 / pi, -6.0 / pi ** 2, 3.0 / pi ** 3))])


def _smooth_inverse(lams):
    lams = np.asarray(lams, dtype=float)
    return 5.0 * lams * (1.0 - lams ** 2) ** 1.5


# ---------------------------------------------------------------- abel

def test_abel_smooth_pair():
    H = abel_solve_plane(_smooth_area_density())
    xs = np.linspace(0.02, 0.98, 33)
    assert np.max(np.abs(H.eval(xs) - _smooth_inverse(xs))) <= 1e-4


def test_abel_vanishes_where_data_does():
    # h(π) = 0 forces H -> 0 at the top size
    H = abel_solve_plane(_smooth_area_density())
    assert abs(H.eval(0.995)) <= 0.01


def test_abel_flat_density_degenerates_to_zero():
    with pytest.warns(UserWarning):
        H = abel_solve_plane(uniform_density(np.pi))
    xs = np.linspace(0.05, 0.95, 11)
    assert np.max(np.abs(H.eval(xs))) == 0.0
    assert not H.normalizable


def test_abel_support_check():
    with pytest.raises(SupportExceedsKernel):
        abel_solve_plane(uniform_density(2.0 * np.pi))


def test_abel_rejects_histograms():
    hist = Histogram(edges=(0.0, 1.0, 2.0, 3.0), counts=(1.0, 2.0, 1.0))
    h = density_from_histogram(hist)
    with pytest.raises(NonSmoothInput):
        abel_solve_plane(h)


# ---------------------------------------------------- generalized route

def test_generalized_reduces_to_abel_at_half_exponent():
    h = _smooth_area_density()
    H_gen = generalized_abel_solve(h, sphere_plane_kernel())
    H_abel = abel_solve_plane(h)
    xs = np.linspace(0.05, 0.95, 19)
    assert np.max(np.abs(H_gen.eval(xs) - H_abel.eval(xs))) <= 1e-6


def test_generalized_rejects_flat_density():
    k = nearly_sphere_plane_kernel(np.pi, 0.25)
    with pytest.raises(NonSmoothInput):
        generalized_abel_solve(uniform_density(2.0), k)


def test_generalized_recovers_smooth_bump():
    k = nearly_sphere_plane_kernel(np.pi, 0.25)
    width = 0.08

    def bump(lam):
        lam = np.asarray(lam, dtype=float)
        inside = (lam > 0.2) & (lam < 0.8)
        return np.where(inside,
                        np.exp(-0.5 * ((lam - 0.5) / width) ** 2), 0.0)

    grid = np.linspace(0.2, 0.8, 1201)
    mass = np.trapezoid(bump(grid), grid)
    H_true = SizeDistribution(
        support=(0.2, 0.8), normalizable=True, normalization=1.0,
        provenance="mellin_plane",
        evaluator=lambda lam: bump(lam) / mass)

    # manufacture the section data by the forward operator, then fit a
    # smooth interpolant so the derivative-based inverse can run on it
    sig_hi = np.pi * 0.8 ** 2
    sig = np.linspace(1e-4, sig_hi * (1.0 - 1e-6), 241)
    hvals = _forward_batch(H_true, k, sig, "plane", 1.0)
    spline = CubicSpline(np.concatenate([[0.0], sig]),
                         np.concatenate([[hvals[0]], hvals]))

    def h_fn(x):
        x = np.asarray(x, dtype=float)
        return np.clip(spline(np.clip(x, 0.0, sig_hi)), 0.0, None) \
            * (x <= sig_hi)

    h = custom_density(h_fn, support_upper=sig_hi)
    H_rec = generalized_abel_solve(h, k)
    xs = np.linspace(0.22, 0.78, 29)
    scale = float(np.max(np.abs(H_true.eval(xs))))
    err = np.max(np.abs(H_rec.eval(xs) - H_true.eval(xs)))
    assert err <= 2e-3 * scale


# --------------------------------------------------------- chord route

def test_derivative_quadratic_closed_form():
    H = derivative_solve_line(quadratic_density(), beta_mode="explicit",
                              beta_value=1.0)
    xs = np.linspace(0.05, 0.95, 19)
    target = 1.5 * (1.0 - xs ** 2) / xs ** 2
    assert np.max(np.abs(H.eval(xs) - target)) <= 1e-8


def test_derivative_triangle_closed_form():
    H = derivative_solve_line(triangle_density(), beta_mode="explicit",
                              beta_value=1.0)
    xs = np.linspace(0.52, 0.98, 24)
    assert np.max(np.abs(H.eval(xs) - 2.0 / xs ** 2)) <= 1e-8
    assert np.max(np.abs(H.eval(np.array([0.2, 0.4])))) == 0.0


def test_derivative_kernel_input_leaves_spike():
    from stereounfold import sphere_line_kernel
    phi = sphere_line_kernel().phi
    with pytest.warns(UserWarning):
        H = derivative_solve_line(phi, beta_mode="explicit", beta_value=1.0)
    xs = np.linspace(0.05, 0.95, 11)
    assert np.max(np.abs(H.eval(xs))) == 0.0


# ------------------------------------------------------ corpuscle route

def test_radius_profile_change_of_variables():
    g = radius_profile_from_area(_smooth_area_density())
    # g(r) = 2πr h(πr²) = 6r(1-r²)²
    assert abs(g.eval(0.5) - 1.6875) <= 1e-12
    rs = np.linspace(0.05, 0.95, 10)
    assert np.max(np.abs(g.eval(rs) - 6.0 * rs * (1.0 - rs ** 2) ** 2)) \
        <= 1e-12


def test_corpuscle_agrees_with_abel():
    h = _smooth_area_density()
    H_w = wicksell_solve(radius_profile_from_area(h))
    H_a = abel_solve_plane(h)
    xs = np.linspace(0.05, 0.95, 19)
    assert np.max(np.abs(H_w.eval(xs) - H_a.eval(xs))) <= 1e-6


def test_corpuscle_rayleigh_pair():
    # profile density 2r·exp(-r²) inverts exactly to H(λ) = 2λ·exp(-λ²)
    def g_fn(r):
        r = np.asarray(r, dtype=float)
        return 2.0 * r * np.exp(-r ** 2)

    g = custom_density(g_fn, support_upper=4.0)
    H = wicksell_solve(g)
    xs = np.linspace(0.05, 3.0, 40)
    vals = np.asarray(H.eval(xs), dtype=float)
    assert np.min(vals) >= -1e-9
    assert abs(H.normalization - 1.0) <= 1e-12
    target = 2.0 * xs * np.exp(-xs ** 2)
    assert np.max(np.abs(vals - target)) <= 5e-4


def test_corpuscle_of_flat_section_data_is_zero():
    g = radius_profile_from_area(uniform_density(np.pi))
    with pytest.warns(UserWarning):
        H = wicksell_solve(g)
    xs = np.linspace(0.05, 0.95, 11)
    assert np.max(np.abs(H.eval(xs))) == 0.0


def test_corpuscle_rejects_histograms():
    hist = Histogram(edges=(0.0, 1.0, 2.0, 3.0), counts=(1.0, 2.0, 1.0))
    g = density_from_histogram(hist)
    with pytest.raises(NonSmoothInput):
        wicksell_solve(g)
