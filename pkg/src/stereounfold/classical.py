"""Classical derivative-based inverses, used to cross-check the transform
solvers on smooth inputs.

All four solvers differentiate the observed density, so they require input
smoothness (piecewise-constant data is rejected) and they lose the jump
information a histogram carries: an input whose variation sits entirely at
support jumps differentiates to zero in the interior.
"""
import math
import warnings

import numpy as np

from .errors import NonSmoothInput, SupportExceedsKernel
from .unfold import SizeDistribution, _raw_mass_quadrature
from .verify import _forward_batch

_GLN, _GLW = np.polynomial.legendre.leggauss(24)

_ZERO_LEVEL = 1e-8


def _panel(a, b):
    half = 0.5 * (b - a)
    return a + half * (_GLN + 1.0), np.full_like(_GLN, half) * _GLW


def _segment_derivative(segments):
    """Exact derivative of a piecewise polynomial, vectorized."""
    pieces = [(lo, hi, np.polynomial.polynomial.polyder(np.asarray(cf)))
              for lo, hi, cf in segments]

    def dv(x):
        out = np.zeros_like(x)
        for lo, hi, dcf in pieces:
            m = (x >= lo) & (x <= hi)
            if np.any(m) and len(dcf):
                out[m] = np.polynomial.polynomial.polyval(x[m], dcf)
        return out

    return dv


def _numeric_derivative(f, lo, hi):
    """Vectorized three-level Richardson derivative on the open (lo, hi)."""
    span = hi - lo

    def dv(x):
        h = np.minimum(0.02 * span,
                       0.45 * np.minimum(hi - x, x - lo))
        h = np.maximum(h, 1e-9 * span)
        d1 = (f(x + h) - f(x - h)) / (2.0 * h)
        d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h
        d4 = (f(x + 0.25 * h) - f(x - 0.25 * h)) / (0.5 * h)
        r1 = (4.0 * d2 - d1) / 3.0
        r2 = (4.0 * d4 - d2) / 3.0
        return (16.0 * r2 - r1) / 15.0

    return dv


def _derivative_of(h):
    if h.representation == "piecewise_constant":
        raise NonSmoothInput(
            "derivative-based inversion needs a smooth section density; "
            "histogram data must go through the transform solver")
    if h.segments is not None:
        return _segment_derivative(h.segments)
    return _numeric_derivative(lambda x: np.asarray(h.eval(x), dtype=float),
                               0.0, h.support_upper)


def _detect_support(raw_eval, R):
    grid = R * np.unique(np.concatenate([
        np.linspace(1e-3, 0.999, 141),
        np.geomspace(1e-4, 0.05, 10)]))
    vals = raw_eval(grid)
    peak = float(np.abs(vals).max())
    if peak <= 0.0:
        return (0.0, R), peak
    inside = np.abs(vals) > _ZERO_LEVEL * peak
    idx = np.nonzero(inside)[0]
    lo = 0.0 if idx[0] == 0 else float(grid[idx[0] - 1])
    hi = R if idx[-1] == len(grid) - 1 else float(grid[idx[-1] + 1])
    return (lo, hi), peak


def _finalize(raw_eval, R, provenance, mode_scale, scale_value, zero_note):
    """Common tail: support detection, zero handling, normalization."""
    support, peak = _detect_support(raw_eval, R)
    if peak <= 0.0:
        warnings.warn(zero_note)
        return SizeDistribution(
            support=(0.0, R), normalizable=False, normalization=0.0,
            provenance=provenance,
            evaluator=lambda lams: np.zeros_like(lams))
    mass = _raw_mass_quadrature(raw_eval, support)
    if mode_scale == "normalize":
        if not (math.isfinite(mass) and abs(mass) > 0):
            warnings.warn(zero_note)
            return SizeDistribution(
                support=support, normalizable=False, normalization=0.0,
                provenance=provenance,
                evaluator=lambda lams: np.zeros_like(lams))
        if mass < 0:
            warnings.warn("recovered distribution integrated negative; "
                          "sign flipped during normalization")
        scale = 1.0 / mass
        normalization = 1.0
    else:
        scale = scale_value
        normalization = mass * scale_value
    return SizeDistribution(
        support=support, normalizable=True, normalization=normalization,
        provenance=provenance,
        evaluator=lambda lams: scale * raw_eval(lams))


def abel_solve_plane(h, alpha_mode="normalize", alpha_value=None):
    """Classical inverse for spherical plane sections (σ_m = π).

    H(λ) = -(4√π/α) λ ∫_{πλ²}^{c} h'(σ) (σ - πλ²)^(-1/2) dσ.

    An h that is flat in the interior (all variation at jumps)
    differentiates to zero: the solver returns the zero function with a
    warning rather than inventing mass.
    """
    if h.support_upper > math.pi * (1.0 + 1e-12):
        raise SupportExceedsKernel(
            f"section support {h.support_upper:g} exceeds π")
    dv = _derivative_of(h)
    c = h.support_upper
    R = math.sqrt(c / math.pi)
    if alpha_mode == "explicit":
        if alpha_value is None or alpha_value <= 0:
            raise ValueError("explicit alpha_mode needs a positive "
                             "alpha_value")
        alpha = alpha_value
    else:
        alpha = 1.0

    def raw_eval(lams):
        lams = np.asarray(lams, dtype=float)
        out = np.zeros_like(lams)
        for i, lam in enumerate(lams):
            a = math.pi * lam * lam
            if a >= c:
                continue
            T = math.sqrt(c - a)
            acc = 0.0
            # σ = a + t² removes the inverse square root
            for pa, pb in ((0.0, 0.3 * T), (0.3 * T, T)):
                t, w = _panel(pa, pb)
                acc += 2.0 * float(np.sum(w * dv(a + t * t)))
            out[i] = -(4.0 * math.sqrt(math.pi) / alpha) * lam * acc
        return out

    return _finalize(
        raw_eval, R, "abel_plane", alpha_mode,
        1.0 if alpha_mode == "explicit" else None,
        "interior derivative of h vanishes; classical inverse returns the "
        "zero function (input variation sits at support jumps)")


def generalized_abel_solve(h, kernel, alpha_mode="normalize",
                           alpha_value=None):
    """Inverse for nearly spherical plane kernels with edge exponent p.

    The kernel factor (σ_m - σ/λ²)^(-p) makes the forward map a
    generalized convolution whose inverse carries the conjugate power:

        H(λ) ∝ λ^(2-2p) ∫_{σ_m λ²}^{c} h'(σ) (σ - σ_m λ²)^(p-1) dσ.

    The overall constant is calibrated against the forward operator by
    least squares, which also fixes the sign; at p = 1/2 the formula
    reduces to abel_solve_plane.  A flat-interior h (zero derivative)
    is rejected: unlike the sphere case the calibration is then
    degenerate and no scale reproduces the data.
    """
    p = kernel.singularity_exponent_p
    if not (0.0 < p <= 0.5):
        raise NonSmoothInput(
            f"generalized inverse needs an edge exponent in (0, 1/2], "
            f"got p={p:g}")
    sigma_m = kernel.max_section
    if h.support_upper > sigma_m * (1.0 + 1e-12):
        raise SupportExceedsKernel(
            f"section support {h.support_upper:g} exceeds the kernel "
            f"maximum {sigma_m:g}")
    dv = _derivative_of(h)
    c = h.support_upper
    R = math.sqrt(c / sigma_m)

    def shape_eval(lams):
        lams = np.asarray(lams, dtype=float)
        out = np.zeros_like(lams)
        for i, lam in enumerate(lams):
            a = sigma_m * lam * lam
            if a >= c:
                continue
            # σ = a + t^(1/p) flattens (σ-a)^(p-1) exactly
            T = (c - a) ** p
            acc = 0.0
            for pa, pb in ((0.0, T / 8.0), (T / 8.0, T / 2.0),
                           (T / 2.0, T)):
                t, w = _panel(pa, pb)
                acc += float(np.sum(w * dv(a + t ** (1.0 / p)))) / p
            out[i] = -(lam ** (2.0 - 2.0 * p)) * acc
        return out

    support, peak = _detect_support(shape_eval, R)
    hx = c * (np.arange(32) + 0.5) / 32
    hvals = np.asarray(h.eval(hx), dtype=float)
    if peak <= 1e-12 * float(np.abs(hvals).max()) * R:
        raise NonSmoothInput(
            "interior derivative of h vanishes, so the generalized inverse "
            "is degenerate; the input's variation sits at support jumps")

    shape_dist = SizeDistribution(
        support=support, normalizable=True, normalization=None,
        provenance="generalized_abel_plane", evaluator=shape_eval)
    # calibrate the constant against the forward operator at unit intensity
    # (fixes sign and scale: forward(raw, alpha=1) reproduces h)
    fwd = _forward_batch(shape_dist, kernel, hx, "plane", 1.0)
    denom = float(np.sum(fwd * fwd))
    cal = float(np.sum(fwd * hvals)) / denom if denom > 0 else 1.0

    def raw_eval(lams):
        return cal * shape_eval(np.asarray(lams, dtype=float))

    if alpha_mode == "explicit":
        if alpha_value is None or alpha_value <= 0:
            raise ValueError("explicit alpha_mode needs a positive "
                             "alpha_value")
        # (α, H) solves the data iff α·H = raw, so H = raw/α
        mass = _raw_mass_quadrature(raw_eval, support)
        return SizeDistribution(
            support=support, normalizable=True,
            normalization=mass / alpha_value,
            provenance="generalized_abel_plane",
            evaluator=lambda lams: raw_eval(lams) / alpha_value)
    return _finalize(
        raw_eval, R, "generalized_abel_plane", "normalize", None,
        "interior derivative of h vanishes; nothing to invert")


def derivative_solve_line(h, beta_mode="normalize", beta_value=None):
    """Chord-length inverse for the spherical line kernel (l_m = 2).

    From h(l) = (β l / 2) ∫_{l/2} H, differentiation gives

        H(λ) = (1/β) · (h(2λ) - 2λ h'(2λ)) / λ².

    A section density that does not vanish at its upper support end leaves
    a point mass at λ = c/2 that no density can represent; this is
    diagnosed with a warning (distributional spike).
    """
    dv = _derivative_of(h)
    c = h.support_upper
    if c > 2.0 * (1.0 + 1e-12):
        raise SupportExceedsKernel(f"chord support {c:g} exceeds 2")
    R = c / 2.0
    if beta_mode not in ("normalize", "explicit"):
        raise ValueError("beta_mode must be 'normalize' or 'explicit'")
    if beta_mode == "explicit":
        if beta_value is None or beta_value <= 0:
            raise ValueError("explicit beta_mode needs a positive "
                             "beta_value")
        beta = beta_value
    else:
        beta = 1.0

    # jump at the upper end -> point mass at λ = c/2
    edge = float(h.eval(c * (1.0 - 1e-7)))
    hx = c * (np.arange(64) + 0.5) / 64
    peak_h = float(np.abs(np.asarray(h.eval(hx), dtype=float)).max())
    if abs(edge) > 1e-6 * max(peak_h, 1e-300):
        warnings.warn(
            f"h does not vanish at its upper end; the size distribution "
            f"carries a point mass (distributional spike) at λ = {R:g} "
            "that the returned density omits")

    def raw_eval(lams):
        lams = np.asarray(lams, dtype=float)
        out = np.zeros_like(lams)
        m = (lams > 0) & (2.0 * lams < c)
        lm = lams[m]
        hv = np.asarray(h.eval(2.0 * lm), dtype=float)
        dh = dv(2.0 * lm)
        out[m] = (hv - 2.0 * lm * dh) / (beta * lm * lm)
        return out

    return _finalize(
        raw_eval, R, "derivative_line", beta_mode, 1.0,
        "interior derivative map of h vanishes; classical inverse returns "
        "the zero function")


def radius_profile_from_area(h):
    """Profile-radius density g(r) = 2πr·h(πr²) from a section-area density.

    Exact change of variables σ = πr²; polynomial pieces in σ map to
    polynomial pieces in r, so exact images and derivatives survive.
    """
    from .densities import custom_density, piecewise_poly_density
    R = math.sqrt(h.support_upper / math.pi)
    if h.segments is not None:
        rseg = []
        for lo, hi, cf in h.segments:
            # h piece Σ c_k σ^k -> g piece Σ 2π^(k+1) c_k r^(2k+1)
            rcf = [0.0] * (2 * len(cf))
            for k, ck in enumerate(cf):
                rcf[2 * k + 1] = 2.0 * math.pi ** (k + 1) * ck
            rseg.append((math.sqrt(lo / math.pi), math.sqrt(hi / math.pi),
                         tuple(rcf)))
        return piecewise_poly_density(rseg, label="profile radii",
                                      representation=h.representation)

    def ev(r):
        r = np.asarray(r, dtype=float)
        return 2.0 * math.pi * r * np.asarray(h.eval(math.pi * r * r),
                                              dtype=float)

    return custom_density(ev, R, origin_exponent=0.0, mass=h.mass,
                          label="profile radii",
                          representation=h.representation)


def wicksell_solve(g, R=None, alpha_mode="normalize", alpha_value=None):
    """Corpuscle inverse: sphere-radius density from profile-radius density.

    For spheres, writing the plane problem in equivalent radii r (σ = πr²),
    the profile-radius density g(r) inverts as

        H(λ) = -(2λ/(πα)) ∫_λ^R (d/dr)(g(r)/r) (r² - λ²)^(-1/2) dr.

    A positive density of small profiles (g > 0 near r = 0) is a necessary
    admissibility feature of true sectioning data; its absence is
    diagnosed, not fatal (it only signals that small spheres are missing).
    """
    if g.representation == "piecewise_constant":
        raise NonSmoothInput(
            "corpuscle inversion needs a smooth profile density")
    if R is None:
        R = g.support_upper
    probe = np.asarray(g.eval(R * np.array([1e-3, 3e-3, 1e-2])), dtype=float)
    gx = R * (np.arange(64) + 0.5) / 64
    gpeak = float(np.abs(np.asarray(g.eval(gx), dtype=float)).max())
    if probe.max() <= 1e-10 * max(gpeak, 1e-300):
        warnings.warn(
            "profile density vanishes near r = 0; true sectioning data of "
            "a nontrivial size distribution always produces small profiles")
    if alpha_mode == "explicit":
        if alpha_value is None or alpha_value <= 0:
            raise ValueError("explicit alpha_mode needs a positive "
                             "alpha_value")
        alpha = alpha_value
    else:
        alpha = 1.0

    gfun = lambda x: np.asarray(g.eval(x), dtype=float)
    if g.segments is not None:
        seg_dv = _segment_derivative(g.segments)

        def Gp(r):
            return (seg_dv(r) * r - gfun(r)) / (r * r)
    else:
        Gp = _numeric_derivative(lambda r: gfun(r) / r, 0.0, R)

    def raw_eval(lams):
        lams = np.asarray(lams, dtype=float)
        out = np.zeros_like(lams)
        for i, lam in enumerate(lams):
            if lam >= R:
                continue
            U = math.sqrt(R * R - lam * lam)
            acc = 0.0
            # r = sqrt(λ²+u²) removes the inverse square root
            for pa, pb in ((0.0, 0.3 * U), (0.3 * U, U)):
                u, w = _panel(pa, pb)
                r = np.sqrt(lam * lam + u * u)
                acc += float(np.sum(w * Gp(r) / r))
            out[i] = -(2.0 * lam / (math.pi * alpha)) * acc
        return out

    return _finalize(
        raw_eval, R, "wicksell_plane", alpha_mode,
        1.0 if alpha_mode == "explicit" else None,
        "derivative of the profile density vanishes; corpuscle inverse "
        "returns the zero function")
