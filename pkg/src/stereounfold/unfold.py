"""Size-distribution recovery through the Mellin transform.

Both section laws become multiplicative under the Mellin transform, so the
size distribution follows by dividing images and inverting along a vertical
contour Re(s) = mu above the singularity exponents:

    plane:  H(λ) = (1/α) · M⁻¹ at 2·mu of s ↦ (h*/phi*)(s/2), evaluated at λ
    line:   H(λ) = (1/(β λ²)) · M⁻¹ at mu of (h*/phi*), evaluated at λ.

The quotient must vanish along the contour (the necessary admissibility
condition); absolute integrability is diagnosed but not required, since the
block-paired contour sum converges on merely oscillatory-decaying tails.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _contour, verify
from ._quadrule import edge_ladder as _edge_ladder
from ._quadrule import interval_rule as _interval_rule
from .errors import (ContourOutsideStrip, NonIntegrableQuotient,
                     NonNormalizableH, PreconditionFailed, StripViolation,
                     SupportExceedsKernel, ZeroMellinImage)
from .mellin import MellinImage, Strip

_ZERO_LEVEL = 1e-8      # relative level separating support from numerical zero
_L1_SLOPE = -1.1        # tail slope granting absolute integrability
_VANISH_SLOPE = -0.05   # tail slope required of the quotient


@dataclass(frozen=True)
class SizeDistribution:
    """Recovered distribution of size factors λ.

    support is the detected interval carrying the mass; eval treats it as
    open, returning 0 at the exact endpoints, where the one-sided limit may
    be infinite and contour evaluation diverges.  normalization is ∫H over
    it (1.0 after normalize mode, np.inf when divergent, None when
    unknown); provenance names the producing solver.  edge_marks lists the
    λ values where H is singular or kinked (the size factors whose section
    range ends at a breakpoint of the input density); forward quadratures
    keep their nodes away from these points.
    """
    support: tuple
    normalizable: bool
    normalization: float
    provenance: str
    evaluator: object
    edge_marks: tuple = ()

    def eval(self, lam):
        """Evaluate H; zero outside the open support interval."""
        arr = np.asarray(lam, dtype=float)
        scalar = arr.shape == ()
        arr = np.atleast_1d(arr).astype(float)
        out = np.zeros_like(arr)
        lo, hi = self.support
        inside = (arr > max(lo, 0.0)) & (arr < hi)
        if np.any(inside):
            out[inside] = self.evaluator(arr[inside])
        return float(out[0]) if scalar else out


@dataclass(frozen=True)
class PreconditionRecord:
    strip_ok: bool
    h_star_integrable: bool
    quotient_integrable: bool
    mu_used: float


@dataclass(frozen=True)
class SolveReport:
    preconditions: PreconditionRecord
    residual_sup_norm: float
    warnings: tuple
    scale_used: float


def _quotient_image(h, kernel, gamma):
    """Image of h*/phi* as a gamma pack when exact, else a callable."""
    himg = h.image
    pimg = kernel.phi_star
    if himg.pack is not None and pimg.pack is not None \
            and len(pimg.pack) == 1:
        qpack = _contour.pack_divide(himg.pack, pimg.pack[0])
        return qpack, None, himg.osc_span + pimg.osc_span

    def qfn(s):
        s = np.asarray(s, dtype=complex)
        return np.asarray(himg.eval(s), dtype=complex) / \
            np.asarray(pimg.eval(s), dtype=complex)

    return None, qfn, himg.osc_span + pimg.osc_span


def _pack_modulus(pack, fn):
    if pack is not None:
        return lambda z: np.abs(_contour.pack_eval(pack, z))
    return lambda z: np.abs(fn(np.asarray(z, dtype=complex)))


def _tail_slope(pack, fn, mu):
    mod = _pack_modulus(pack, fn)
    slope, _ = _contour.modulus_tail_slope(
        lambda nu: mod(mu + 1j * np.asarray(nu)))
    return slope


def _scan_support(raw_eval, lam_bound, tol_abs=0.0, snap_points=()):
    """Locate the interval where the inverted distribution is nonzero.

    Scans a mixed linear/edge-refined grid, thresholds safely above the
    contour engine's absolute tolerance tol_abs, and bisects the boundary
    brackets.  Each interior edge is bisected at a second, much higher
    level as well; when both crossings coincide the edge is a jump and the
    high-level crossing (pinned to the jump, immune to engine noise) wins.
    A detected edge finally snaps to the nearest of snap_points (the λ
    values where the inverse is structurally singular) when one lies
    within 0.3% of the bound: the engine cannot be trusted closer to a
    singular point than that, while the snap is exact.
    """
    grid = np.unique(np.concatenate([
        np.linspace(1e-3, 0.9995, 161),
        1.0 - np.geomspace(1e-4, 0.2, 24),
        np.geomspace(1e-4, 0.05, 12),
    ])) * lam_bound
    if len(snap_points):
        cands = np.asarray(snap_points, dtype=float)
        near = np.min(np.abs(grid[:, None] - cands[None, :]), axis=1)
        grid = np.where(near < 1e-5 * lam_bound, grid * (1.0 + 1e-3), grid)
    signed = raw_eval(grid)
    vals = np.abs(signed)
    peak = float(vals.max())
    if peak <= 0.0:
        return (0.0, lam_bound), grid, signed
    level1 = max(_ZERO_LEVEL * peak, 10.0 * tol_abs)
    level2 = 0.01 * peak

    def bisect(a, b, level, inside_at_b):
        for _ in range(40):
            m = 0.5 * (a + b)
            hit = abs(raw_eval(np.array([m]))[0]) > level
            if hit == inside_at_b:
                b = m
            else:
                a = m
            if b - a < 1e-10 * lam_bound:
                break
        return 0.5 * (a + b)

    def edge(level_idx, inside_at_b):
        """Bisect one boundary at level1 and level2, snapping to jumps."""
        i1, i2 = level_idx
        if i1 is None:
            return None
        e1 = bisect(grid[i1[0]], grid[i1[1]], level1, inside_at_b)
        if i2 is None:
            return e1
        e2 = bisect(grid[i2[0]], grid[i2[1]], level2, inside_at_b)
        return e2 if abs(e1 - e2) < 1e-5 * lam_bound else e1

    def brackets(level, inside_at_b):
        idx = np.nonzero(vals > level)[0]
        if len(idx) == 0:
            return None
        if inside_at_b:
            i = idx[0]
            return (i - 1, i) if i > 0 else None
        i = idx[-1]
        return (i, i + 1) if i < len(grid) - 1 else None

    def snap(x):
        if not len(snap_points):
            return x
        cands = np.asarray(snap_points, dtype=float)
        i = int(np.argmin(np.abs(cands - x)))
        return float(cands[i]) if abs(cands[i] - x) <= 3e-3 * lam_bound \
            else x

    lam_lo = 0.0
    lo = edge((brackets(level1, True), brackets(level2, True)), True)
    if lo is not None:
        lam_lo = snap(lo)
        if lam_lo < 2e-3 * lam_bound:
            lam_lo = 0.0
    lam_hi = lam_bound
    hi = edge((brackets(level1, False), brackets(level2, False)), False)
    # only trim when clearly interior; edge blow-ups keep the full bound
    if hi is not None:
        hi = snap(hi)
        if hi < lam_bound * (1.0 - 5e-3):
            lam_hi = hi
    return (float(lam_lo), float(lam_hi)), grid, signed


def _negative_lobe(grid, vals, marks, lam_bound):
    """True when the scanned inverse is negative away from singular marks.

    Near-mark values are contour-engine artifacts (the inversion has no
    value at a singular point), so they are excluded as evidence.
    """
    far = np.ones(len(grid), dtype=bool)
    if marks:
        cands = np.asarray(marks, dtype=float)
        far = np.min(np.abs(grid[:, None] - cands[None, :]),
                     axis=1) > 2e-3 * lam_bound
    if not np.any(far):
        return False
    v = vals[far]
    return bool(v.min() < -1e-5 * max(float(np.abs(v).max()), 1e-300))


def _breakpoint_images(h, kernel, mode):
    """λ values where the recovered H is structurally singular.

    A size factor λ contributes sections up to λ²σ_m (plane) or chords up
    to λl_m (line), so a breakpoint x_b of a piecewise input density pins
    a singular point of H at λ_b = √(x_b/σ_m), respectively x_b/l_m.
    Smooth inputs (segments is None) yield no marks.
    """
    segs = getattr(h, "segments", None)
    if not segs:
        return ()
    xs = sorted({s[0] for s in segs} | {s[1] for s in segs})
    cmax = kernel.max_section
    out = []
    for x in xs:
        if x <= 0.0:
            continue
        out.append(math.sqrt(x / cmax) if mode == "plane" else x / cmax)
    return tuple(out)


def solve_plane(h, kernel, mu=None, alpha_mode="normalize", alpha_value=None,
                tol=1e-6, residual_grid=64):
    """Recover H from a plane-section area density h.

    mu defaults to gamma+1 where gamma is the larger origin-singularity
    exponent of h and phi.  alpha_mode 'normalize' rescales so ∫H = 1 and
    reports the implied α; 'explicit' uses alpha_value as α.  Returns
    (SizeDistribution, SolveReport).
    """
    if kernel.mode != "plane":
        raise PreconditionFailed("solve_plane needs a plane kernel",
                                 condition="kernel_mode")
    sigma_m = kernel.max_section
    if h.support_upper > sigma_m * (1.0 + 1e-12):
        raise SupportExceedsKernel(
            f"section support {h.support_upper:g} exceeds the kernel "
            f"maximum {sigma_m:g}")
    gamma = max(h.origin_exponent, kernel.phi.origin_exponent)
    if mu is None:
        mu = gamma + 1.0
    if mu <= gamma:
        raise ContourOutsideStrip(
            f"mu={mu:g} must exceed the singularity exponent {gamma:g}")
    if alpha_mode not in ("normalize", "explicit"):
        raise ValueError("alpha_mode must be 'normalize' or 'explicit'")
    if alpha_mode == "explicit" and (alpha_value is None or alpha_value <= 0):
        raise ValueError("explicit alpha_mode needs a positive alpha_value")

    warn = []
    qpack, qfn, osc = _quotient_image(h, kernel, gamma)

    slope_h = _tail_slope(h.image.pack, h.image.eval, mu)
    h_l1 = slope_h <= _L1_SLOPE
    if not h_l1:
        warn.append("transform of h is not absolutely integrable on the "
                    "contour; relying on oscillatory cancellation")
    # the inversion runs on s -> quotient(s/2) along Re(s) = 2 mu
    atoms = ()
    if qpack is not None:
        q2pack, atoms = _contour.pack_split_deltas(
            _contour.pack_half_argument(qpack))
        if atoms and not q2pack:
            locs = ", ".join(f"{m:.4g} at {p:.6g}" for m, p in atoms)
            raise NonIntegrableQuotient(
                "h is the section image of discrete sizes: the population "
                f"is purely atomic ({locs}), not a density")
        q2fn = None
        slope_q = _tail_slope(q2pack, None, 2.0 * mu)
    else:
        q2pack = None

        def q2fn(s):
            return qfn(np.asarray(s, dtype=complex) / 2.0)

        slope_q = _tail_slope(None, q2fn, 2.0 * mu)
    if slope_q > _VANISH_SLOPE:
        raise NonIntegrableQuotient(
            f"h*/phi* does not vanish along Re(s)={2 * mu:g} (fitted slope "
            f"{slope_q:.3f}); h is not a section image for this kernel")
    q_l1 = slope_q <= _L1_SLOPE
    if not q_l1:
        warn.append("image quotient decays slower than |s|^-1.1; "
                    "accelerated oscillatory summation engaged")

    tol_eng = 0.1 * tol

    def raw_eval(lams):
        lams = np.asarray(lams, dtype=float)
        if q2pack is not None:
            if not q2pack:
                return np.zeros(lams.shape)
            vals, _, _, _ = _contour.invert_pack_points(
                q2pack, 2.0 * mu, lams, tol_eng)
        else:
            vals, _, _, _ = _contour.invert_callable_points(
                q2fn, 2.0 * mu, lams, tol_eng, osc_span=0.5 * osc + 2.0)
        return vals

    lam_bound = math.sqrt(h.support_upper / sigma_m)
    marks = _breakpoint_images(h, kernel, "plane")
    if atoms:
        marks = tuple(sorted(set(marks) | {pos for _, pos in atoms}))
    support, grid, raw_on_grid = _scan_support(
        raw_eval, lam_bound, tol_eng, snap_points=marks)
    if _negative_lobe(grid, raw_on_grid, marks, lam_bound):
        warn.append("recovered distribution has a negative lobe; "
                    "the input may be inconsistent or noisy")

    # mass of the raw inverse is the quotient at s = 1/2 when analytic there
    atom_mass = sum(m for m, _ in atoms)
    if gamma < 0.5:
        if q2pack is not None:
            # the original quotient still carries the point-mass part
            mass_raw = float(np.real(_contour.pack_eval(qpack, 0.5)))
        else:
            mass_raw = float(np.real(qfn(np.array([0.5 + 0j]))[0]))
    else:
        mass_raw = _raw_mass_quadrature(raw_eval, support, kernel) + atom_mass
    if atoms:
        locs = ", ".join(f"{m:.4g} at {p:.6g}" for m, p in atoms)
        warn.append("jumps in the section data induce point masses in the "
                    f"size distribution ({locs}); they are counted in the "
                    "normalization but excluded from the returned density")
    normalizable = math.isfinite(mass_raw) and mass_raw > 0.0

    if alpha_mode == "normalize":
        if not normalizable:
            raise NonNormalizableH(
                f"raw solution mass {mass_raw:g} cannot be normalized")
        scale = 1.0 / mass_raw
        scale_used = mass_raw          # the α that makes ∫H = 1
        normalization = 1.0
    else:
        scale = 1.0 / alpha_value
        scale_used = alpha_value
        normalization = mass_raw / alpha_value if normalizable else np.inf
        if not normalizable:
            warn.append("solution is not normalizable; ∫H diverges")

    H = SizeDistribution(
        support=support, normalizable=normalizable,
        normalization=normalization, provenance="mellin_plane",
        evaluator=lambda lams: scale * raw_eval(lams),
        edge_marks=marks)

    rep = verify.residual(H, h, kernel, "plane", grid_size=residual_grid)
    tgt_peak = max(abs(v) for v in rep.target_values)
    if rep.sup_norm > max(100.0 * tol, 1e-4 * tgt_peak):
        warn.append(f"forward residual sup-norm {rep.sup_norm:.3e} exceeds "
                    "the solve tolerance")
    report = SolveReport(
        preconditions=PreconditionRecord(
            strip_ok=True, h_star_integrable=h_l1, quotient_integrable=q_l1,
            mu_used=float(mu)),
        residual_sup_norm=rep.sup_norm, warnings=tuple(warn),
        scale_used=float(scale_used))
    return H, report


def _raw_mass_quadrature(raw_eval, support, kernel=None):
    """∫ raw over the detected support with singularity-aware edge handling.

    Both endpoints get flattening substitutions (the upper one matched to
    the kernel's edge exponent, so blow-ups like (hi-λ)^(p-1) integrate
    cleanly) plus the engine standoff with its extrapolated sliver, since
    contour evaluation is unreliable within the standoff of a singular
    support edge.  kernel None means a derivative-based evaluator with no
    edge exponent: the default substitutions still flatten inverse square
    roots.
    """
    lo, hi = support
    lo = max(lo, 0.0)
    if hi <= lo:
        return 0.0
    delta = min(verify._edge_standoff(kernel) * hi, 0.02 * (hi - lo))
    p = kernel.singularity_exponent_p if kernel is not None else 0.0
    m_up = verify._endpoint_power(kernel)
    lam, w = _interval_rule(lo, hi, 2.0, m_up,
                            delta if lo > 0.0 else 0.0, delta,
                            kappa_up=_edge_ladder(m_up, p))
    return float(np.sum(w * np.asarray(raw_eval(lam), dtype=float)))


def solve_line(h, kernel, mu=None, beta_mode="normalize", beta_value=None,
               tol=1e-6, residual_grid=64):
    """Recover H from a line-chord length density h.

    H(λ) = (1/(β λ²)) · M⁻¹ at mu of h*/phi*.  beta_mode 'normalize'
    rescales so ∫H = 1; 'explicit' uses beta_value.  A raw inverse w with
    w(0+) > 0 makes ∫H diverge like 1/λ; normalize mode rejects that, while
    explicit mode returns the distribution flagged non-normalizable.
    Returns (SizeDistribution, SolveReport).
    """
    if kernel.mode != "line":
        raise PreconditionFailed("solve_line needs a line kernel",
                                 condition="kernel_mode")
    l_m = kernel.max_section
    if h.support_upper > l_m * (1.0 + 1e-12):
        raise SupportExceedsKernel(
            f"chord support {h.support_upper:g} exceeds the kernel "
            f"maximum {l_m:g}")
    gamma = max(h.origin_exponent, kernel.phi.origin_exponent)
    if mu is None:
        mu = gamma + 1.0
    if mu <= gamma:
        raise ContourOutsideStrip(
            f"mu={mu:g} must exceed the singularity exponent {gamma:g}")
    if beta_mode not in ("normalize", "explicit"):
        raise ValueError("beta_mode must be 'normalize' or 'explicit'")
    if beta_mode == "explicit" and (beta_value is None or beta_value <= 0):
        raise ValueError("explicit beta_mode needs a positive beta_value")

    warn = []
    qpack, qfn, osc = _quotient_image(h, kernel, gamma)
    atoms = ()
    if qpack is not None:
        qpack, atoms = _contour.pack_split_deltas(qpack)
        if atoms and not qpack:
            locs = ", ".join(f"{m:.4g} at {p:.6g}" for m, p in atoms)
            raise NonIntegrableQuotient(
                "h is the chord image of discrete sizes: the population "
                f"is purely atomic ({locs}), not a density")
    slope_h = _tail_slope(h.image.pack, h.image.eval, mu)
    h_l1 = slope_h <= _L1_SLOPE
    if not h_l1:
        warn.append("transform of h is not absolutely integrable on the "
                    "contour; relying on oscillatory cancellation")
    slope_q = _tail_slope(qpack, qfn, mu)
    if slope_q > _VANISH_SLOPE:
        raise NonIntegrableQuotient(
            f"h*/phi* does not vanish along Re(s)={mu:g} (fitted slope "
            f"{slope_q:.3f}); h is not a chord image for this kernel")
    q_l1 = slope_q <= _L1_SLOPE
    if not q_l1:
        warn.append("image quotient decays slower than |s|^-1.1; "
                    "accelerated oscillatory summation engaged")

    tol_eng = 0.1 * tol

    def raw_w(lams):
        lams = np.asarray(lams, dtype=float)
        if qpack is not None:
            if not qpack:
                return np.zeros(lams.shape)
            vals, _, _, _ = _contour.invert_pack_points(
                qpack, mu, lams, tol_eng)
        else:
            vals, _, _, _ = _contour.invert_callable_points(
                qfn, mu, lams, tol_eng, osc_span=osc + 2.0)
        return vals

    lam_bound = h.support_upper / l_m
    marks = _breakpoint_images(h, kernel, "line")
    if atoms:
        marks = tuple(sorted(set(marks) | {pos for _, pos in atoms}))
    support, grid, w_on_grid = _scan_support(
        raw_w, lam_bound, tol_eng, snap_points=marks)
    w_peak = float(np.abs(w_on_grid).max())
    if _negative_lobe(grid, w_on_grid, marks, lam_bound):
        warn.append("recovered distribution has a negative lobe; "
                    "the input may be inconsistent or noisy")

    # w(0+) > 0 forces H ~ w(0+)/λ² near zero: not normalizable
    probe = float(np.abs(raw_w(np.array([1e-5 * lam_bound]))[0]))
    normalizable = probe <= 1e-6 * max(w_peak, 1e-300)
    atom_mass = sum(m / p ** 2 for m, p in atoms)
    if atoms:
        locs = ", ".join(f"{m / p ** 2:.4g} at {p:.6g}" for m, p in atoms)
        warn.append("jumps in the chord data induce point masses in the "
                    f"size distribution ({locs}); they are counted in the "
                    "normalization but excluded from the returned density")
    mass_raw = np.inf
    if normalizable:
        mass_raw = _raw_mass_quadrature(
            lambda lams: raw_w(lams) / lams ** 2,
            (max(support[0], 1e-6 * lam_bound), support[1]),
            kernel) + atom_mass
        normalizable = math.isfinite(mass_raw) and mass_raw > 0.0

    if beta_mode == "normalize":
        if not normalizable:
            raise NonNormalizableH(
                "raw solution does not vanish at small sizes; ∫H diverges "
                "and cannot be normalized (use an explicit β instead)")
        scale = 1.0 / mass_raw
        scale_used = mass_raw
        normalization = 1.0
    else:
        scale = 1.0 / beta_value
        scale_used = beta_value
        normalization = mass_raw / beta_value if normalizable else np.inf
        if not normalizable:
            warn.append("solution is not normalizable; ∫H diverges at "
                        "small sizes")

    H = SizeDistribution(
        support=support, normalizable=normalizable,
        normalization=normalization, provenance="mellin_line",
        evaluator=lambda lams: scale * raw_w(lams) / lams ** 2,
        edge_marks=marks)

    rep = verify.residual(H, h, kernel, "line", grid_size=residual_grid)
    tgt_peak = max(abs(v) for v in rep.target_values)
    if rep.sup_norm > max(100.0 * tol, 1e-4 * tgt_peak):
        warn.append(f"forward residual sup-norm {rep.sup_norm:.3e} exceeds "
                    "the solve tolerance")
    report = SolveReport(
        preconditions=PreconditionRecord(
            strip_ok=True, h_star_integrable=h_l1, quotient_integrable=q_l1,
            mu_used=float(mu)),
        residual_sup_norm=rep.sup_norm, warnings=tuple(warn),
        scale_used=float(scale_used))
    return H, report


_PLANE_PROVENANCE = ("mellin_plane", "abel_plane", "generalized_abel_plane",
                     "wicksell_plane", "closed_form", "tabulated")


def to_sigma_distribution(H, sigma_m):
    """Rescale a plane-solve H(λ) to the density of maximal section areas.

    H₁(σ) = H(√(σ/σ_m)) / (2 √(σ_m σ)) on [σ_m λ_lo², σ_m λ_hi²]; the mass
    equals ∫H, so normalization carries over.
    """
    if H.provenance not in _PLANE_PROVENANCE:
        raise PreconditionFailed(
            f"σ-rescaling needs a plane-solve distribution, got provenance "
            f"'{H.provenance}'", condition="plane_provenance")
    lo, hi = H.support
    sig_hi = sigma_m * hi * hi

    def ev(sig):
        sig = np.asarray(sig, dtype=float)
        out = np.zeros_like(sig)
        pos = sig > 0
        lam = np.sqrt(sig[pos] / sigma_m)
        out[pos] = np.asarray(H.eval(lam), dtype=float) / \
            (2.0 * np.sqrt(sigma_m * sig[pos]))
        return out

    mass = H.normalization if H.normalization is not None else np.nan
    gamma = 0.5 if lo <= 0.0 else 0.0

    def image_fn(s):
        from .mellin import _quadrature_image
        s = np.asarray(s, dtype=complex)
        if s.shape == ():
            return _quadrature_image(dens, complex(s), 1e-9)
        return np.array([_quadrature_image(dens, complex(v), 1e-9)
                         for v in s.ravel()]).reshape(s.shape)

    img = MellinImage(strip=Strip(gamma), kind="numeric", fn=image_fn,
                      osc_span=abs(math.log(max(sig_hi, 1e-12))) + 6.0)
    from .densities import SupportedDensity
    dens = SupportedDensity(
        support_upper=sig_hi, origin_exponent=gamma, mass=float(mass),
        representation="closed_form", image=img, evaluator=ev,
        label="section-area density", normalizable=H.normalizable)
    return dens


def to_length_distribution(H, l_m):
    """Rescale a line-solve H(λ) to the density of maximal chord lengths.

    H₁(l) = H(l/l_m)/l_m on [l_m λ_lo, l_m λ_hi]; a non-normalizable H
    stays non-normalizable (mass np.inf).
    """
    lo, hi = H.support
    len_hi = l_m * hi

    def ev(ell):
        ell = np.asarray(ell, dtype=float)
        return np.asarray(H.eval(ell / l_m), dtype=float) / l_m

    if H.normalizable and H.normalization is not None:
        mass = float(H.normalization)
    else:
        mass = np.inf
    if lo > 0.0:
        gamma = 0.0
    else:
        # probe the origin exponent of H itself
        ls = np.array([1e-2, 1e-3, 1e-4]) * hi
        vals = np.asarray(H.eval(ls), dtype=float)
        if np.all(vals > 0):
            gamma = -float(np.polyfit(np.log(ls), np.log(vals), 1)[0])
            gamma = max(gamma, 0.0)
        else:
            gamma = 0.0

    def image_fn(s):
        from .mellin import _quadrature_image
        s = np.asarray(s, dtype=complex)
        if s.shape == ():
            return _quadrature_image(dens, complex(s), 1e-9)
        return np.array([_quadrature_image(dens, complex(v), 1e-9)
                         for v in s.ravel()]).reshape(s.shape)

    img = MellinImage(strip=Strip(gamma), kind="numeric", fn=image_fn,
                      osc_span=abs(math.log(max(len_hi, 1e-12))) + 6.0)
    from .densities import SupportedDensity
    dens = SupportedDensity(
        support_upper=len_hi, origin_exponent=gamma, mass=mass,
        representation="closed_form", image=img, evaluator=ev,
        label="chord-length density", normalizable=H.normalizable)
    return dens


def model_solution_plane(kernel, s):
    """Power-law distribution whose plane image is exactly σ^(-s).

    H_s(λ) = 2 λ^(-2s) / (α phi*(s)); requires Re(s) inside the strip of
    phi* and phi*(s) ≠ 0.  Returns a complex-valued callable.
    """
    s = complex(s)
    if not kernel.phi_star.strip.contains(s.real):
        raise StripViolation(
            f"Re(s)={s.real:g} outside the kernel image strip")
    ps = complex(kernel.phi_star.eval(s))
    if not (abs(ps) > 0 and math.isfinite(abs(ps))):
        raise ZeroMellinImage(f"phi*({s}) = {ps}")
    alpha = kernel.body.alpha
    coeff = 2.0 / (alpha * ps)

    def H_s(lam):
        lam = np.asarray(lam, dtype=complex)
        return coeff * lam ** (-2.0 * s)

    return H_s


def model_solution_line(kernel, s):
    """Power-law distribution whose line image is exactly l^(-s).

    H_s(λ) = λ^(-s-2) / (β phi*(s)).
    """
    s = complex(s)
    if not kernel.phi_star.strip.contains(s.real):
        raise StripViolation(
            f"Re(s)={s.real:g} outside the kernel image strip")
    ps = complex(kernel.phi_star.eval(s))
    if not (abs(ps) > 0 and math.isfinite(abs(ps))):
        raise ZeroMellinImage(f"phi*({s}) = {ps}")
    beta = kernel.body.beta
    coeff = 1.0 / (beta * ps)

    def H_s(lam):
        lam = np.asarray(lam, dtype=complex)
        return coeff * lam ** (-s - 2.0)

    return H_s
