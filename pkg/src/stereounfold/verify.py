"""Forward section operators and residual verification.

For a size distribution H over scale factors λ and a section kernel phi,
the observable section densities are

    plane:  h(σ) = α ∫_{√(σ/σ_m)}  phi(σ/λ²) H(λ) / λ dλ
    line:   h(l) = β ∫_{l/l_m}     λ phi(l/λ) H(λ) dλ

with α = 1/∫λH and β = 1/∫λ²H whenever h is a probability density.  The
quadratures remove the kernel edge singularity (σ_m - σ/λ²)^(-p) with the
substitution λ = λ0 + t^(1/(1-p)) and flatten H's own support edges with
λ = hi - t^m, m = max(2, 1/p), so integrable endpoint blow-ups of solved
distributions cost no accuracy.  Numerically inverted H cannot be
evaluated arbitrarily close to its support edges (the contour engine
loses convergence there), so edge panels stand off and the skipped sliver
is covered by the extrapolation rule of the quadrature module.
"""
import math
from dataclasses import dataclass

import numpy as np

from ._quadrule import panel as _panel
from ._quadrule import log_panels as _log_panels
from ._quadrule import edge_block as _edge_block
from ._quadrule import edge_ladder as _edge_ladder
from ._quadrule import interval_rule as _interval_rule


def _endpoint_power(kernel):
    """Upper-end substitution power matched to the kernel edge exponent."""
    p = kernel.singularity_exponent_p if kernel is not None else 0.0
    return 2.0 if p <= 0.0 else max(2.0, 1.0 / p)


def _edge_standoff(kernel):
    """Relative standoff from H's support edges for engine-backed evals.

    Jump-type images (p = 0 kernels) decay slowest along the contour, so
    their inversions need the widest berth; p > 0 images decay strictly
    faster, but their inversions still collapse in narrow bands within a
    few 1e-7 of the scale from the edge, so the berth stays at 1e-6.
    The skipped sliver is bridged by the ladder-matched extrapolation
    rule, which keeps the cut from dominating the quadrature error.
    """
    p = kernel.singularity_exponent_p if kernel is not None else 0.0
    return 1e-4 if p <= 0.0 else 1e-6


def _size_moment(H, q, kernel=None):
    """∫ λ^q H(λ) dλ over the support, endpoint singularities guarded."""
    lo, hi = H.support
    lo = max(lo, 0.0)
    if hi <= lo:
        return 0.0
    delta = min(_edge_standoff(kernel) * hi, 0.02 * (hi - lo))
    p = kernel.singularity_exponent_p if kernel is not None else 0.0
    m_up = _endpoint_power(kernel)
    lam, w = _interval_rule(lo, hi, 2.0, m_up,
                            delta if lo > 0.0 else 0.0, delta,
                            kappa_up=_edge_ladder(m_up, p))
    vals = np.asarray(H.eval(lam), dtype=float)
    return float(np.sum(w * lam ** q * vals))


def _ordinate_nodes(lam0, p, lam_lo, lam_hi, delta_rel):
    """Quadrature nodes/weights in λ for one forward-map ordinate.

    The λ-integral runs over [max(λ0, lam_lo), lam_hi] where λ0 is the
    kernel cutoff (√(σ/σ_m) or l/l_m).  Near λ0 the kernel behaves like
    (λ-λ0)^(-p); the substitution λ = λ0 + t^(1/(1-p)) removes that edge
    singularity (and tames it when the support edge lam_lo clips it).  A
    singularity-free lower limit gets geometric panels instead, which
    resolve power-law factors of H such as 1/λ².  Panels touching H's own
    support edges stand off by delta_rel of the scale with extrapolation
    slivers, because engine-backed H is unreliable inside that berth.
    """
    hi = lam_hi
    lo = max(lam0, lam_lo, 0.0)
    if lo >= hi * (1.0 - 1e-14):
        return np.empty(0), np.empty(0)
    mid = lo + 0.35 * (hi - lo)
    delta = min(delta_rel * hi, 0.02 * (mid - lo))
    nodes, weights = [], []
    edge_binds = lam_lo > 0.0 and lam_lo >= lam0
    if edge_binds:
        # extrapolation sliver over [lam_lo, lam_lo + delta]
        for coeff, dpos in ((1.6, 1.25 * delta), (-0.6, 2.5 * delta)):
            nodes.append(np.array([lam_lo + dpos]))
            weights.append(np.array([coeff * delta]))
    if p > 0.0 and lam0 > 0.0:
        expo = 1.0 / (1.0 - p)
        T = (mid - lam0) ** (1.0 - p)
        start = lo + delta if edge_binds else lo
        t_start = (start - lam0) ** (1.0 - p) if start > lam0 else 0.0
        if t_start == 0.0:
            spans = ((0.0, T / 8.0), (T / 8.0, T / 2.0), (T / 2.0, T))
        else:
            n = int(np.clip(math.ceil(math.log(T / t_start) / 1.2), 2, 14))
            edges = np.geomspace(t_start, T, n + 1)
            spans = tuple(zip(edges[:-1], edges[1:]))
        for pa, pb in spans:
            t, w = _panel(pa, pb)
            nodes.append(lam0 + t ** expo)
            weights.append(w * expo * t ** (expo - 1.0))
    else:
        if edge_binds:
            start = lo + delta
        else:
            start = lo if lo > 0.0 else 1e-8 * hi
        if start < mid:
            _log_panels(start, mid, nodes, weights)
    m_up = 2.0 if p <= 0.0 else max(2.0, 1.0 / p)
    _edge_block(hi, -1.0, m_up, hi - mid,
                min(delta_rel * hi, 0.02 * (hi - mid)), nodes, weights,
                kappa=_edge_ladder(m_up, p))
    return np.concatenate(nodes), np.concatenate(weights)


def _forward_batch(H, kernel, xs, mode, scale):
    """Forward images at many ordinates with a single batched H evaluation."""
    lam_lo, lam_hi = H.support
    p = kernel.singularity_exponent_p
    cmax = kernel.max_section
    delta_rel = _edge_standoff(kernel)
    per = []
    for x in xs:
        if mode == "plane":
            lam0 = math.sqrt(max(x, 0.0) / cmax)
        else:
            lam0 = x / cmax
        per.append(_ordinate_nodes(lam0, p, lam_lo, lam_hi, delta_rel))
    counts = [len(n) for n, _ in per]
    if sum(counts) == 0:
        return np.zeros(len(xs))
    all_lam = np.concatenate([n for n, _ in per if len(n)])
    hvals = np.asarray(H.eval(all_lam), dtype=float)
    out = np.zeros(len(xs))
    pos = 0
    phi = kernel.phi
    for i, ((lam, w), x) in enumerate(zip(per, xs)):
        n = counts[i]
        if n == 0:
            continue
        hv = hvals[pos:pos + n]
        pos += n
        if mode == "plane":
            integrand = phi.eval(x / lam ** 2) * hv / lam
        else:
            integrand = lam * phi.eval(x / lam) * hv
        out[i] = scale * float(np.sum(w * integrand))
    return out


def forward_plane(H, kernel, sigma, alpha=None):
    """Plane-section area density induced by H at area σ.

    alpha defaults to the probability normalization 1/∫λH.
    """
    if kernel.mode != "plane":
        raise ValueError("forward_plane needs a plane kernel")
    if sigma < 0:
        raise ValueError("section area must be nonnegative")
    if alpha is None:
        m1 = _size_moment(H, 1.0, kernel)
        alpha = 1.0 / m1 if m1 > 0 else 0.0
    return float(_forward_batch(H, kernel, np.array([sigma]), "plane",
                                alpha)[0])


def forward_line(H, kernel, ell, beta=None):
    """Chord-length density induced by H at length l.

    beta defaults to the probability normalization 1/∫λ²H.
    """
    if kernel.mode != "line":
        raise ValueError("forward_line needs a line kernel")
    if ell < 0:
        raise ValueError("chord length must be nonnegative")
    if beta is None:
        m2 = _size_moment(H, 2.0, kernel)
        beta = 1.0 / m2 if m2 > 0 else 0.0
    return float(_forward_batch(H, kernel, np.array([ell]), "line",
                                beta)[0])


@dataclass(frozen=True)
class ResidualReport:
    sup_norm: float
    l1_norm: float
    grid: tuple
    forward_values: tuple
    target_values: tuple
    scale_used: float


def residual(H, h, kernel, mode, grid_size=200):
    """Forward-map H and compare against the observed density h.

    The intensity scale is the probability normalization 1/∫λ^q H
    (q = 1 plane, q = 2 line), which reproduces any consistent explicit
    scale because both sides are probability densities.  The grid is the
    midpoint grid over the support of h; an ordinate whose kernel cutoff
    falls exactly on a singular point of H is nudged off it, since the
    inversion engine has no value there.
    """
    if mode not in ("plane", "line"):
        raise ValueError("mode must be 'plane' or 'line'")
    c = h.support_upper
    grid = c * (np.arange(grid_size) + 0.5) / grid_size
    marks = np.asarray(getattr(H, "edge_marks", ()) or (), dtype=float)
    if len(marks):
        cmax = kernel.max_section
        lam0 = np.sqrt(grid / cmax) if mode == "plane" else grid / cmax
        near = np.min(np.abs(lam0[:, None] - marks[None, :]), axis=1)
        grid = np.where(near < 1e-5 * H.support[1], grid * (1.0 + 1e-3),
                        grid)
    q = 1.0 if mode == "plane" else 2.0
    m = _size_moment(H, q, kernel)
    scale = 1.0 / m if m > 1e-300 else 0.0
    fwd = _forward_batch(H, kernel, grid, mode, scale)
    tgt = np.asarray(h.eval(grid), dtype=float)
    diff = np.abs(fwd - tgt)
    return ResidualReport(
        sup_norm=float(diff.max()),
        l1_norm=float(diff.mean() * c),
        grid=tuple(grid), forward_values=tuple(fwd),
        target_values=tuple(tgt), scale_used=scale)


@dataclass(frozen=True)
class MomentCheck:
    plane_mean_ok: bool
    line_mean_ok: bool
    deviations: dict


def moment_identities(kernel, tol=1e-8):
    """Check the mean-section identities of the kernel by quadrature.

    plane: ∫σ phi dσ = 2πV/M;  line: ∫l phi dl = 4V/F.  The identity for
    the other mode is vacuously true with deviation None.
    """
    cmax = kernel.max_section
    p = kernel.singularity_exponent_p
    nodes, weights = [], []
    mid = 0.6 * cmax
    for pa, pb in ((0.0, 0.5 * mid), (0.5 * mid, mid)):
        x, w = _panel(pa, pb)
        nodes.append(x)
        weights.append(w)
    if p > 0.0:
        expo = 1.0 / (1.0 - p)
        T = (cmax - mid) ** (1.0 - p)
        for pa, pb in ((0.0, T / 8.0), (T / 8.0, T / 2.0), (T / 2.0, T)):
            t, w = _panel(pa, pb)
            nodes.append(cmax - t ** expo)
            weights.append(w * expo * t ** (expo - 1.0))
    else:
        T = math.sqrt(cmax - mid)
        for pa, pb in ((0.0, 0.5 * T), (0.5 * T, T)):
            t, w = _panel(pa, pb)
            nodes.append(cmax - t * t)
            weights.append(w * 2.0 * t)
    x = np.concatenate(nodes)
    w = np.concatenate(weights)
    mean_sec = float(np.sum(w * x * kernel.phi.eval(x)))
    body = kernel.body
    devs = {"plane": None, "line": None}
    if kernel.mode == "plane":
        target = 2.0 * math.pi * body.volume / body.mean_curvature
        devs["plane"] = abs(mean_sec - target) / abs(target)
        plane_ok = devs["plane"] <= tol
        line_ok = True
    else:
        target = 4.0 * body.volume / body.surface
        devs["line"] = abs(mean_sec - target) / abs(target)
        line_ok = devs["line"] <= tol
        plane_ok = True
    return MomentCheck(plane_mean_ok=plane_ok, line_mean_ok=line_ok,
                       deviations=devs)


@dataclass(frozen=True)
class CorrectnessReport:
    limit_is_zero: bool
    limit_estimate: float
    integral_finite: bool
    integral_estimate: float
    notes: tuple


def correctness_conditions(h, size_bound):
    """Admissibility of an observed plane-section density h.

    A density of the form h(σ) = K[H](σ) must satisfy, with R = size_bound
    and r the equivalent radius σ = πr²,

      (a)  λ ∫_λ^R r h(πr²) (r²-λ²)^(-1/2) dr → 0 as λ → R⁻,
      (b)  ∫_0^R h(πr²) dr < ∞.

    (a) is tested by extrapolating λ_k = R(1-2^-k); (b) by geometric-octave
    refinement toward r = 0: increments that stop decaying flag divergence.
    """
    R = float(size_bound)
    notes = []
    lams = R * (1.0 - 2.0 ** -np.arange(2.0, 12.0))
    tvals = []
    for lam in lams:
        U = math.sqrt(R * R - lam * lam)
        acc = 0.0
        for pa, pb in ((0.0, 0.3 * U), (0.3 * U, U)):
            u, w = _panel(pa, pb)
            acc += float(np.sum(
                w * np.asarray(h.eval(math.pi * (lam ** 2 + u ** 2)),
                               dtype=float)))
        tvals.append(lam * acc)
    tvals = np.array(tvals)
    est = tvals[-1]
    for k in range(len(tvals) - 2):
        d2 = tvals[k + 2] - 2.0 * tvals[k + 1] + tvals[k]
        if abs(d2) > 1e-300:
            est = tvals[k + 2] - (tvals[k + 2] - tvals[k + 1]) ** 2 / d2
    scale = max(1e-8, 1e-4 * float(np.max(np.abs(tvals))))
    limit_zero = bool(abs(est) <= scale)
    if not limit_zero:
        notes.append("edge limit does not vanish; h is not a section image "
                     "of a distribution bounded by the given size")

    incs = []
    for j in range(30):
        a = R * 2.0 ** -(j + 1)
        b = R * 2.0 ** -j
        x, w = _panel(a, b)
        incs.append(float(np.sum(
            w * np.asarray(h.eval(math.pi * x * x), dtype=float))))
    incs = np.array(incs)
    ratios = []
    for j in range(len(incs) - 1):
        if incs[j] > 1e-300:
            ratios.append(incs[j + 1] / incs[j])
    tail = np.array(ratios[-8:]) if ratios else np.array([0.0])
    rbar = float(tail.mean())
    finite = bool(rbar < 0.95)
    total = float(incs.sum())
    if finite and 0.0 < rbar < 1.0:
        total += incs[-1] * rbar / (1.0 - rbar)
    else:
        notes.append("equivalent-radius integral does not converge; "
                     "h cannot arise from a normalizable size distribution")
    return CorrectnessReport(
        limit_is_zero=limit_zero, limit_estimate=float(est),
        integral_finite=finite, integral_estimate=total,
        notes=tuple(notes))
