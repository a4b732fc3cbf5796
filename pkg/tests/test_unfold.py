"""Mellin-route solvers: closed forms, error paths, rescaling, models."""
import math

import numpy as np
import pytest
import scipy.integrate as integrate

from stereounfold import (
    model_solution_line,
    model_solution_plane,
    quadratic_density,
    solve_line,
    solve_plane,
    sphere_line_kernel,
    to_length_distribution,
    to_sigma_distribution,
    triangle_density,
    uniform_density,
)
from stereounfold.densities import SupportedDensity, Histogram, \
    density_from_histogram
from stereounfold.errors import (
    ContourOutsideStrip,
    NonIntegrableQuotient,
    NonNormalizableH,
    PreconditionFailed,
    StripViolation,
    SupportExceedsKernel,
    ZeroMellinImage,
)
from stereounfold.kernels import BodyConstants, SectionKernel
from stereounfold.mellin import MellinImage, Strip
from stereounfold.unfold import SizeDistribution


# ---------------------------------------------------------- closed forms

def test_flat_plane_closed_form(plane_flat_pair):
    H, report = plane_flat_pair
    xs = np.linspace(0.02, 0.98, 25)
    target = xs / np.sqrt(1.0 - xs ** 2)
    assert np.max(np.abs(H.eval(xs) - target)) <= 1e-6
    assert H.normalizable
    assert abs(H.normalization - 1.0) <= 1e-9


def test_quadratic_line_closed_form(line_quadratic_pair):
    H, report = line_quadratic_pair
    assert abs(H.eval(0.5) - 4.5) <= 1e-6
    assert not H.normalizable
    assert H.normalization == np.inf


def test_triangle_line_support_detection(line_triangle_pair):
    H, report = line_triangle_pair
    lo, hi = H.support
    assert abs(lo - 0.5) <= 1e-12
    assert abs(hi - 1.0) <= 1e-12
    xs = np.linspace(0.52, 0.98, 20)
    assert np.max(np.abs(H.eval(xs) - 2.0 / xs ** 2)) <= 1e-5


def test_report_fields(line_triangle_pair):
    H, report = line_triangle_pair
    rec = report.preconditions
    assert rec.strip_ok
    assert rec.h_star_integrable
    # the raw quotient of jump-type inputs is only conditionally
    # integrable; the record reports that honestly while the solve
    # proceeds through accelerated summation
    assert isinstance(rec.quotient_integrable, bool)
    assert rec.mu_used > 0.0
    assert report.scale_used == 1.0
    assert report.residual_sup_norm <= 1e-4 * 1.0  # sup|triangle| = 1


def test_contour_choice_agreement(line_quadratic_pair, line_kernel):
    H_default, _ = line_quadratic_pair
    H_shifted, _ = solve_line(quadratic_density(), line_kernel, mu=1.5,
                              beta_mode="explicit", beta_value=1.0)
    xs = np.linspace(0.1, 0.95, 18)
    assert np.max(np.abs(H_default.eval(xs) - H_shifted.eval(xs))) <= 1e-5


def test_scaling_equivariance(plane_flat_pair, plane_kernel):
    # shrinking the section data by 4 in area shrinks sizes by 2:
    # H_c(λ) = 2 H(2λ) with support ending at 1/2
    H0, _ = plane_flat_pair
    Hc, _ = solve_plane(uniform_density(np.pi / 4.0), plane_kernel)
    assert abs(Hc.support[1] - 0.5) <= 1e-3
    xs = np.linspace(0.03, 0.47, 17)
    assert np.max(np.abs(Hc.eval(xs) - 2.0 * H0.eval(2.0 * xs))) <= 1e-5


# ------------------------------------------------------------ error paths

def test_mode_mismatch_rejected(line_kernel, plane_kernel):
    with pytest.raises(PreconditionFailed) as exc:
        solve_plane(uniform_density(np.pi), line_kernel)
    assert exc.value.condition == "kernel_mode"
    with pytest.raises(PreconditionFailed):
        solve_line(triangle_density(), plane_kernel)


def test_support_exceeding_kernel_rejected(plane_kernel):
    with pytest.raises(SupportExceedsKernel):
        solve_plane(uniform_density(2.0 * np.pi), plane_kernel)


def test_contour_outside_strip_rejected(plane_kernel):
    with pytest.raises(ContourOutsideStrip):
        solve_plane(uniform_density(np.pi), plane_kernel, mu=0.0)


def test_bad_alpha_mode_rejected(plane_kernel):
    with pytest.raises(ValueError):
        solve_plane(uniform_density(np.pi), plane_kernel,
                    alpha_mode="bogus")


def test_self_kernel_input_rejected(plane_kernel, line_kernel):
    # h = phi corresponds to a point mass at λ = 1: constant quotient image
    with pytest.raises(NonIntegrableQuotient):
        solve_plane(plane_kernel.phi, plane_kernel)
    with pytest.raises(NonIntegrableQuotient):
        solve_line(line_kernel.phi, line_kernel)


def test_divergent_mass_rejected_in_normalize_mode(line_kernel):
    with pytest.raises(NonNormalizableH):
        solve_line(quadratic_density(), line_kernel)


# ----------------------------------------------------------- open support

def test_eval_is_open_at_endpoints(plane_flat_pair):
    H, _ = plane_flat_pair
    lo, hi = H.support
    assert H.eval(lo) == 0.0
    assert H.eval(hi) == 0.0
    assert 1.0 in tuple(round(m, 12) for m in H.edge_marks)


def test_eval_scalar_matches_array(plane_flat_pair):
    H, _ = plane_flat_pair
    xs = np.array([0.25, 0.5, 0.75])
    arr = H.eval(xs)
    assert arr.shape == (3,)
    for x, v in zip(xs, arr):
        s = H.eval(float(x))
        assert np.isscalar(s) or np.asarray(s).shape == ()
        assert abs(float(s) - v) <= 1e-14


def test_histogram_jumps_warn_about_point_masses(line_kernel):
    hist = Histogram(edges=(0.0, 1.0, 2.0), counts=(3.0, 1.0))
    with pytest.warns(UserWarning):
        h = density_from_histogram(hist)
    H, report = solve_line(h, line_kernel, beta_mode="explicit",
                           beta_value=1.0)
    assert any("point mass" in w for w in report.warnings)


# -------------------------------------------------------------- rescaling

def test_to_sigma_of_flat_distribution():
    H = SizeDistribution(support=(0.0, 1.0), normalizable=True,
                         normalization=1.0, provenance="mellin_plane",
                         evaluator=lambda lam: np.ones_like(
                             np.asarray(lam, dtype=float)))
    dens = to_sigma_distribution(H, np.pi)
    sigmas = np.array([0.2, 1.0, 2.5])
    target = 1.0 / (2.0 * np.sqrt(np.pi * sigmas))
    assert np.max(np.abs(dens.eval(sigmas) - target)) <= 1e-12


def test_to_sigma_round_trip(plane_flat_pair):
    H, _ = plane_flat_pair
    dens = to_sigma_distribution(H, np.pi)
    lams = np.linspace(0.1, 0.9, 9)
    # H(λ) = H₁(σ_m λ²) · 2 σ_m λ
    back = dens.eval(np.pi * lams ** 2) * 2.0 * np.pi * lams
    assert np.max(np.abs(back - H.eval(lams))) <= 1e-8


def test_to_sigma_requires_plane_provenance(line_triangle_pair):
    H, _ = line_triangle_pair
    with pytest.raises(PreconditionFailed) as exc:
        to_sigma_distribution(H, np.pi)
    assert exc.value.condition == "plane_provenance"


def test_to_length_of_triangle_solution(line_triangle_pair):
    H, _ = line_triangle_pair
    dens = to_length_distribution(H, 2.0)
    assert abs(dens.support_upper - 2.0) <= 1e-12
    ls = np.linspace(1.05, 1.95, 10)
    assert np.max(np.abs(dens.eval(ls) - 0.5 * np.asarray(
        H.eval(ls / 2.0), dtype=float))) <= 1e-12
    assert dens.normalizable


def test_to_length_identity_at_unit_max(line_triangle_pair):
    H, _ = line_triangle_pair
    dens = to_length_distribution(H, 1.0)
    xs = np.array([0.6, 0.75, 0.9])
    assert np.max(np.abs(dens.eval(xs)
                         - np.asarray(H.eval(xs), dtype=float))) <= 1e-12


def test_to_length_propagates_divergence_flag(line_quadratic_pair):
    H, _ = line_quadratic_pair
    dens = to_length_distribution(H, 2.0)
    assert not dens.normalizable
    assert dens.mass == np.inf


# --------------------------------------------------------- model solutions

def _forward_plane_sphere(H_fn, sigma, alpha):
    """α ∫ λ H(λ) φ_λ(σ) dλ for the unit sphere, as a compact integral.

    Substituting v = σ/λ² and then v = π - t² gives
    (α/2) (1/√π) ∫_0^√π H(√(σ/(π-t²))) / (π-t²) dt, with no truncation.
    """
    def integrand(t):
        v = np.pi - t * t
        return float(np.real(H_fn(math.sqrt(sigma / v)))) / v

    val, _ = integrate.quad(integrand, 0.0, math.sqrt(np.pi), limit=200)
    return 0.5 * alpha * val / math.sqrt(np.pi)


def _forward_line_sphere(H_fn, ell, beta):
    """β ∫ λ² H(λ) φ_λ(l) dλ = (β l²/2) ∫_0^2 H(l/w) w^(-2) dw."""
    def integrand(w):
        return float(np.real(H_fn(ell / w))) / (w * w)

    val, _ = integrate.quad(integrand, 0.0, 2.0, limit=200)
    return 0.5 * beta * ell * ell * val


def test_model_plane_solution_value(plane_kernel):
    H1 = model_solution_plane(plane_kernel, 1.0)
    alpha = plane_kernel.body.alpha
    assert abs(H1(1.0) - 2.0 / alpha) <= 1e-12


@pytest.mark.parametrize("s", [1.0, 1.5])
@pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
def test_model_plane_forward_is_power_law(plane_kernel, s, sigma):
    Hs = model_solution_plane(plane_kernel, s)
    val = _forward_plane_sphere(Hs, sigma, plane_kernel.body.alpha)
    assert abs(val - sigma ** -s) <= 1e-6


@pytest.mark.parametrize("s", [1.0, 2.0])
def test_model_line_forward_is_power_law(line_kernel, s):
    Hs = model_solution_line(line_kernel, s)
    val = _forward_line_sphere(Hs, 1.0, line_kernel.body.beta)
    assert abs(val - 1.0) <= 1e-6


def test_model_solution_strip_violation(plane_kernel):
    with pytest.raises(StripViolation):
        model_solution_plane(plane_kernel, -0.5)
    with pytest.raises(StripViolation):
        model_solution_line(sphere_line_kernel(), -0.5)


def test_model_solution_zero_image_rejected():
    def zero_fn(s):
        s = np.asarray(s, dtype=complex)
        return np.zeros_like(s)

    phi = uniform_density(1.0)
    dead = SectionKernel(
        shape_id="synthetic-zero", mode="plane", max_section=1.0, phi=phi,
        phi_star=MellinImage(strip=Strip(-1.0), kind="closed_form",
                             fn=zero_fn),
        body=BodyConstants(volume=1.0, surface=1.0, mean_curvature=1.0))
    with pytest.raises(ZeroMellinImage):
        model_solution_plane(dead, 1.0)
