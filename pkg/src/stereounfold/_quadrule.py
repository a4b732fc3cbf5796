"""Gauss-Legendre panel rules for integrands with power-law support edges.

Every helper returns or appends (nodes, weights) pairs for plain
integration in the original variable: the weights already carry any
substitution Jacobian, so a consumer approximates ∫ f by sum(w * f(node)).

An integrable edge factor (λ - a)^e with e > -1 is flattened by the
substitution λ = a + t^m once m ≥ 1/(1 + e); panels are then laid in t,
where the flattened integrand is polynomial-like for the structural edge
exponents of solved distributions.

Numerically inverted integrands cannot be trusted arbitrarily close to a
support edge (the contour engine loses convergence there), so a rule can
stand off by `delta` and replace the skipped edge sliver [0, t_c] in
t-space by a two-point extrapolation,

    ∫_0^tc g dt ≈ α tc g(1.25 tc) + β tc g(2.5 tc),

with α, β solved so the rule is exact for g ∈ span{t^κ1, t^κ2}.  The
defaults (κ1, κ2) = (0, 1) give the classic (1.6, -0.6) pair; a caller
that knows the flattened integrand's actual exponent ladder (for example
{0, m, 2m, ...} when λ = anchor - t^m flattens an (anchor-λ)^(1/m - 1)
factor times an analytic one) should pass its two leading exponents so
the dominant sliver term is captured exactly.  Absent ladder terms t^k
then contribute O(tc^(k+1)) with a rule-dependent constant.
"""
import math

import numpy as np

GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def panel(a, b):
    """Gauss-Legendre nodes and weights on [a, b]."""
    half = 0.5 * (b - a)
    return a + half * (GL_NODES + 1.0), half * GL_WEIGHTS


def log_panels(a, b, nodes, weights, max_panels=14):
    """Geometric panels on [a, b] with 0 < a < b: power-law safe."""
    n = int(np.clip(math.ceil(math.log(b / a) / 1.2), 2, max_panels))
    edges = np.geomspace(a, b, n + 1)
    for pa, pb in zip(edges[:-1], edges[1:]):
        x, w = panel(pa, pb)
        nodes.append(x)
        weights.append(w)


def _t_spans(t_c, T):
    """Panel edges on [t_c, T] in the flattened variable."""
    cuts = [t_c] + [e for e in (T / 8.0, T / 2.0) if e > 1.4 * t_c] + [T]
    return zip(cuts[:-1], cuts[1:])


def sliver_coefficients(kappa):
    """Weights (α, β) of the two-point sliver rule exact on {t^κ1, t^κ2}.

    The rule α tc g(1.25 tc) + β tc g(2.5 tc) matches ∫_0^tc t^κ dt for
    both exponents; the tc powers cancel, leaving a 2x2 linear system in
    the abscissa ratios alone.
    """
    k1, k2 = float(kappa[0]), float(kappa[1])
    a, b = 1.25, 2.5
    det = a ** k1 * b ** k2 - b ** k1 * a ** k2
    alpha = (b ** k2 / (k1 + 1.0) - b ** k1 / (k2 + 1.0)) / det
    beta = (a ** k1 / (k2 + 1.0) - a ** k2 / (k1 + 1.0)) / det
    return alpha, beta


def edge_block(anchor, sign, m, width, delta, nodes, weights,
               kappa=(0.0, 1.0)):
    """Panels for ∫ f dλ over the width-long stretch at a support edge.

    anchor is the edge position; sign +1 covers [anchor, anchor + width]
    (a lower edge), sign -1 covers [anchor - width, anchor] (an upper
    edge).  The substitution is λ = anchor + sign t^m.  No node lands
    within `delta` of the edge; the skipped sliver is replaced by the
    two-point extrapolation rule, exact on the kappa exponent pair, when
    delta > 0.
    """
    if width <= 0.0:
        return
    m = float(m)
    T = width ** (1.0 / m)
    t_c = 0.0
    if delta > 0.0:
        t_c = min(delta ** (1.0 / m), 0.25 * T)
        alpha, beta = sliver_coefficients(kappa)
        for coeff, tpos in ((alpha, 1.25 * t_c), (beta, 2.5 * t_c)):
            nodes.append(np.array([anchor + sign * tpos ** m]))
            weights.append(np.array([coeff * t_c * m * tpos ** (m - 1.0)]))
    for pa, pb in _t_spans(t_c, T):
        t, w = panel(pa, pb)
        nodes.append(anchor + sign * t ** m)
        weights.append(w * m * t ** (m - 1.0))


def edge_ladder(m, p):
    """Two leading flattened-ladder exponents at an H-support upper edge.

    Solved distributions behave like (edge-λ)^(p-1) times an analytic
    factor when the kernel's edge exponent p is positive; under
    λ = edge - t^m the sliver integrand then runs on the exponent ladder
    mp-1, mp-1+m, ...  For p ≤ 0 the edge is a jump or an inverse square
    root, whose leading behaviours stay within span{1, t}.
    """
    if p <= 0.0:
        return 0.0, 1.0
    base = m * p - 1.0
    return base, base + m


def interval_rule(lo, hi, m_lo, m_up, delta_lo, delta_up,
                  kappa_lo=(0.0, 1.0), kappa_up=(0.0, 1.0)):
    """Nodes and weights for ∫_lo^hi f dλ with guarded edges.

    Each half of the interval is handled by edge_block with its own
    substitution power, standoff, and sliver exactness pair.
    """
    if hi <= lo:
        return np.empty(0), np.empty(0)
    mid = 0.5 * (lo + hi)
    nodes, weights = [], []
    edge_block(lo, 1.0, m_lo, mid - lo, delta_lo, nodes, weights,
               kappa=kappa_lo)
    edge_block(hi, -1.0, m_up, hi - mid, delta_up, nodes, weights,
               kappa=kappa_up)
    return np.concatenate(nodes), np.concatenate(weights)
