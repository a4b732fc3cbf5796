"""Monte Carlo sectioning: draw plane-section areas or line-chord lengths
from a population with size distribution H.

A size-λ body is hit by an isotropic plane with probability ∝ λ (its
caliper) and by a line with probability ∝ λ² (its projected area), so the
size of the sectioned body is drawn from the weighted density

    plane:  λ H(λ) / ∫λH        line:  λ² H(λ) / ∫λ²H

and the section ordinate given the size follows the scaled kernel.  For the
sphere family the conditional sampling is an exact closed-form inverse CDF:

    plane:  σ = σ_m λ² (1 - (1-u)^(1/(1-p)))      (p = 1/2 for the sphere)
    line:   l = l_m λ √u.

Streams are drawn in fixed 65536-sample chunks, each from its own
counter-keyed generator, so results are reproducible for a given seed
regardless of chunking or thread count.
"""
import math
from dataclasses import dataclass

import numpy as np

from .densities import Histogram
from .errors import NonNormalizableH, WeightingDiverges

_CHUNK = 65536
_CDF_CELLS = 2048


@dataclass(frozen=True)
class SimConfig:
    """Sectioning experiment: mode 'plane' or 'line', the population H,
    the body kernel, sample count, RNG seed, and histogram bin count."""
    mode: str
    distribution: object
    kernel: object
    n_samples: int
    seed: int
    bins: int = 100

    def __post_init__(self):
        if self.mode not in ("plane", "line"):
            raise ValueError("mode must be 'plane' or 'line'")
        if self.n_samples < 1:
            raise ValueError("n_samples must be positive")
        if self.bins < 1:
            raise ValueError("bins must be positive")
        if getattr(self.distribution, "normalizable", True) is False:
            raise NonNormalizableH(
                "sampling draws sizes from a probability population, so "
                "the size distribution must be normalizable")


def _weighted_size_sampler(H, q):
    """Inverse CDF of the size-weighted density ∝ λ^q H(λ).

    Tabulates interval masses on a cosine-clustered grid; within a cell the
    draw is uniform, so the sampled CDF matches the true one exactly at
    every cell edge.  Raises WeightingDiverges when the weighted mass is
    not summable near λ = 0.
    """
    lo, hi = H.support
    lo = max(lo, 0.0)
    if hi <= lo:
        raise WeightingDiverges("size distribution carries no support")
    if lo <= 0.0:
        # guard the open end: divergence check at shrinking probes
        probes = hi * np.array([1e-3, 1e-4, 1e-5])
        v = probes ** q * np.asarray(H.eval(probes), dtype=float)
        if v[-1] > 1.5 * v[0] and v[-1] > 0:
            raise WeightingDiverges(
                f"λ^{q:g}·H(λ) grows toward λ=0; the size-weighted "
                "sampling density is not normalizable")
        lo = hi * 1e-7
    # cosine clustering resolves edge blow-ups of solved distributions
    theta = np.linspace(0.0, math.pi, _CDF_CELLS + 1)
    edges = lo + (hi - lo) * 0.5 * (1.0 - np.cos(theta))
    gl_t, gl_w = np.polynomial.legendre.leggauss(8)
    a = edges[:-1]
    b = edges[1:]
    half = 0.5 * (b - a)
    nodes = a[:, None] + half[:, None] * (gl_t[None, :] + 1.0)
    flat = nodes.ravel()
    hv = np.asarray(H.eval(flat), dtype=float).reshape(nodes.shape)
    masses = np.sum(gl_w[None, :] * nodes ** q * hv, axis=1) * half
    masses = np.clip(masses, 0.0, None)
    total = float(masses.sum())
    if not (math.isfinite(total) and total > 0.0):
        raise WeightingDiverges(
            f"size-weighted mass ∫λ^{q:g} H dλ = {total} is unusable")
    cum = np.concatenate(([0.0], np.cumsum(masses))) / total

    def draw(u):
        idx = np.clip(np.searchsorted(cum, u, side="right") - 1,
                      0, _CDF_CELLS - 1)
        c0 = cum[idx]
        c1 = cum[idx + 1]
        frac = np.where(c1 > c0, (u - c0) / np.maximum(c1 - c0, 1e-300), 0.5)
        return edges[idx] + frac * (edges[idx + 1] - edges[idx])

    return draw


def _section_sampler(kernel, mode):
    """Inverse CDF u ↦ section ordinate for a unit-size body."""
    p = kernel.singularity_exponent_p
    cmax = kernel.max_section
    if mode == "plane" and p > 0.0:
        expo = 1.0 / (1.0 - p)

        def draw(u):
            return cmax * (1.0 - (1.0 - u) ** expo)

        return draw
    if mode == "line" and kernel.shape_id == "sphere":

        def draw(u):
            return cmax * np.sqrt(u)

        return draw
    # generic kernel: tabulated CDF of phi, inverted by monotone interp
    xs = np.linspace(0.0, cmax, 4097)
    pv = np.asarray(kernel.phi.eval(xs), dtype=float)
    cdf = np.concatenate(([0.0], np.cumsum(
        0.5 * (pv[1:] + pv[:-1]) * np.diff(xs))))
    cdf /= cdf[-1]

    def draw(u):
        return np.interp(u, cdf, xs)

    return draw


def draw_sections(config):
    """Raw section ordinates (areas or lengths) as a float array."""
    H = config.distribution
    kernel = config.kernel
    q = 1.0 if config.mode == "plane" else 2.0
    size_draw = _weighted_size_sampler(H, q)
    sec_draw = _section_sampler(kernel, config.mode)
    power = 2.0 if config.mode == "plane" else 1.0
    n = config.n_samples
    out = np.empty(n)
    pos = 0
    chunk_idx = 0
    while pos < n:
        m = min(_CHUNK, n - pos)
        key = np.array([config.seed, chunk_idx], dtype=np.uint64)
        rng = np.random.Generator(np.random.Philox(key=key))
        u = rng.random((2, m))
        lam = size_draw(u[0])
        out[pos:pos + m] = lam ** power * sec_draw(u[1])
        pos += m
        chunk_idx += 1
    return out


def simulate_sections(config):
    """Run the sectioning experiment and bin the ordinates.

    Bin edges are uniform over [0, upper] with the analytic upper bound
    σ_m λ_hi² (plane) or l_m λ_hi (line).
    """
    samples = draw_sections(config)
    lam_hi = config.distribution.support[1]
    power = 2.0 if config.mode == "plane" else 1.0
    upper = config.kernel.max_section * lam_hi ** power
    edges = np.linspace(0.0, upper, config.bins + 1)
    counts, _ = np.histogram(np.clip(samples, 0.0, upper), bins=edges)
    return Histogram(edges=tuple(edges), counts=tuple(float(c)
                                                      for c in counts))


def ks_statistic(samples, cdf):
    """Kolmogorov–Smirnov distance between samples and a CDF callable."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    F = np.asarray(cdf(x), dtype=float)
    emp_hi = np.arange(1, n + 1) / n
    emp_lo = np.arange(0, n) / n
    return float(max(np.max(np.abs(emp_hi - F)),
                     np.max(np.abs(F - emp_lo))))
