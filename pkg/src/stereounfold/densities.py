"""Densities with bounded support [0, c] and their exact Mellin images.

Every constructor returns a SupportedDensity whose image is carried as a
gamma pack whenever one exists: powers, piecewise polynomials (through the
telescoped edge decomposition x^k (b^s - a^s)-type terms), and beta-type
factors x^a (c-x)^q, which cover the section kernels and the worked section
densities.  Arbitrary callables fall back to a numeric image.
"""
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from ._contour import PackComponent
from .errors import EmptyHistogram, NegativeCount
from .mellin import MellinImage, Strip

_MIN_BINS = 3


@dataclass(frozen=True)
class SupportedDensity:
    """Nonnegative density on [0, support_upper] with its Mellin image.

    origin_exponent gamma is the smallest g with f(x) = O(x^(-g)) near 0;
    the fundamental strip is (gamma, +∞).  mass is ∫f (np.inf marks a
    non-normalizable object produced by rescaling a divergent solution).
    representation is one of 'closed_form', 'piecewise_constant',
    'piecewise_linear'; smoothness-gated solvers reject
    'piecewise_constant'.  segments, when present, holds exact polynomial
    pieces [(x0, x1, coeffs)] with coeffs in increasing-power order.
    """
    support_upper: float
    origin_exponent: float
    mass: float
    representation: str
    image: MellinImage
    evaluator: object
    label: str = ""
    segments: tuple = None
    normalizable: bool = True

    def eval(self, x):
        """Evaluate the density; zero outside [0, support_upper]."""
        arr = np.asarray(x, dtype=float)
        scalar = arr.shape == ()
        arr = np.atleast_1d(arr)
        out = np.zeros_like(arr)
        inside = (arr >= 0) & (arr <= self.support_upper)
        if np.any(inside):
            out[inside] = self.evaluator(arr[inside])
        return float(out[0]) if scalar else out


def _poly_eval_factory(segments):
    edges_lo = np.array([s[0] for s in segments])
    edges_hi = np.array([s[1] for s in segments])
    coeff_list = [np.asarray(s[2], dtype=float) for s in segments]

    def ev(x):
        out = np.zeros_like(x)
        for lo, hi, cf in zip(edges_lo, edges_hi, coeff_list):
            m = (x >= lo) & (x <= hi)
            if np.any(m):
                out[m] = np.polynomial.polynomial.polyval(x[m], cf)
        return out

    return ev


def _segments_to_pack(segments):
    """Exact image of a piecewise polynomial.

    ∫_a^b x^(s-1) x^k dx = (b^(s+k) - a^(s+k)) / (s+k); each boundary power
    becomes one single-frequency component C e^{s τ} Γ(s+k)/Γ(s+k+1).
    """
    acc = {}
    for lo, hi, coeffs in segments:
        for k, ck in enumerate(coeffs):
            if ck == 0.0:
                continue
            for edge, sign in ((hi, 1.0), (lo, -1.0)):
                if edge <= 0.0:
                    continue
                key = (round(math.log(edge), 14), k)
                acc[key] = acc.get(key, 0.0) + sign * ck * edge ** k
    comps = []
    for (tau, k), coeff in sorted(acc.items()):
        if abs(coeff) < 1e-15:
            continue
        comps.append(PackComponent(
            const=complex(coeff), shift=tau,
            terms=((1.0, float(k), 1), (1.0, float(k) + 1.0, -1))))
    return tuple(comps)


def piecewise_poly_density(segments, mass=None, label="",
                           representation=None):
    """Density given by exact polynomial pieces [(x0, x1, coeffs)].

    When mass is given the pieces are rescaled so ∫f = mass.  The Mellin
    image is exact (telescoped edge pack).
    """
    segments = tuple((float(a), float(b), tuple(float(c) for c in cs))
                     for a, b, cs in segments)
    raw_mass = 0.0
    for lo, hi, cf in segments:
        for k, ck in enumerate(cf):
            raw_mass += ck * (hi ** (k + 1) - lo ** (k + 1)) / (k + 1)
    scale = 1.0 if mass is None else mass / raw_mass
    if scale != 1.0:
        segments = tuple((a, b, tuple(scale * c for c in cs))
                         for a, b, cs in segments)
        raw_mass *= scale
    upper = max(s[1] for s in segments)
    pack = _segments_to_pack(segments)
    max_deg = max(len(s[2]) for s in segments) - 1
    if representation is None:
        representation = ("piecewise_linear" if max_deg <= 1
                          else "closed_form")
    # |component| ~ C e^{mu tau} / nu  near the contour mu_ref = 1
    K = sum(abs(c.const) * math.exp(c.shift) for c in pack) + 1e-30
    img = MellinImage(strip=Strip(0.0), kind="piecewise_exact", pack=pack,
                      decay_bound=(1.5 * K, 1.0),
                      osc_span=abs(math.log(upper)) + 6.0)
    return SupportedDensity(
        support_upper=upper, origin_exponent=0.0, mass=raw_mass,
        representation=representation, image=img,
        evaluator=_poly_eval_factory(segments), label=label,
        segments=segments)


def uniform_density(c):
    """Uniform density 1/c on [0, c]; image c^(s-1)/s."""
    return piecewise_poly_density(
        [(0.0, float(c), (1.0 / float(c),))],
        label=f"uniform:{c:g}", representation="closed_form")


def triangle_density():
    """Triangle density 1-|x-1| on [0, 2]; image (2^(1+s)-2)/(s(s+1))."""
    return piecewise_poly_density(
        [(0.0, 1.0, (0.0, 1.0)), (1.0, 2.0, (2.0, -1.0))],
        label="triangle", representation="closed_form")


def quadratic_density():
    """Quadratic density (3/8)(2-x)^2 on [0, 2]; image 3·2^s/(s(s+1)(s+2))."""
    return piecewise_poly_density(
        [(0.0, 2.0, (1.5, -1.5, 0.375))],
        label="quadratic", representation="closed_form")


def beta_power_density(c, a0, q, mass=1.0, label=""):
    """Density ∝ x^a0 (c-x)^q on [0, c] with exact beta-function image.

    ∫_0^c x^(s+a0-1) (c-x)^q dx = c^(s+a0+q) B(s+a0, q+1), a single
    gamma-pack component.  Requires q > -1 and a0 > -1.
    """
    c = float(c)
    a0 = float(a0)
    q = float(q)
    if q <= -1.0 or a0 <= -1.0:
        raise ValueError("beta power density needs q > -1 and a0 > -1")
    lnB = gammaln(a0 + 1.0) + gammaln(q + 1.0) - gammaln(a0 + q + 2.0)
    norm = mass / (c ** (a0 + q + 1.0) * math.exp(lnB))
    Cconst = norm * c ** (a0 + q) * math.exp(gammaln(q + 1.0))
    pack = (PackComponent(
        const=complex(Cconst), shift=math.log(c),
        terms=((1.0, a0, 1), (1.0, a0 + q + 1.0, -1))),)
    gamma = -a0
    # |B(mu+a0+i nu, q+1)| ~ Gamma(q+1) |nu|^(-(q+1)); spot-check slack 1.01
    mu_ref = gamma + 1.0
    K = abs(Cconst) * math.exp(mu_ref * math.log(c)) * 1.4
    img = MellinImage(strip=Strip(gamma), kind="closed_form", pack=pack,
                      decay_bound=(K, q + 1.0) if q + 1.0 <= 1.0 else None,
                      osc_span=abs(math.log(c)) + 6.0)

    def ev(x):
        out = np.zeros_like(x)
        m = (x > 0) & (x < c)
        xm = x[m]
        out[m] = norm * xm ** a0 * (c - xm) ** q
        if a0 == 0.0:
            out[x == 0.0] = norm * c ** q
        if q == 0.0:
            out[x == c] = norm * c ** a0
        return out

    return SupportedDensity(
        support_upper=c, origin_exponent=gamma, mass=mass,
        representation="closed_form", image=img, evaluator=ev, label=label)


def custom_density(fn, support_upper, origin_exponent=0.0, mass=None,
                   label="", representation="closed_form"):
    """Density from an arbitrary callable; Mellin image by quadrature."""
    upper = float(support_upper)

    holder = {}

    def ev(x):
        return np.asarray(fn(x), dtype=float)

    def image_fn(s):
        from .mellin import _quadrature_image
        dens = holder["density"]
        s = np.asarray(s, dtype=complex)
        if s.shape == ():
            return _quadrature_image(dens, complex(s), 1e-10)
        return np.array([_quadrature_image(dens, complex(v), 1e-10)
                         for v in s.ravel()]).reshape(s.shape)

    img = MellinImage(strip=Strip(float(origin_exponent)), kind="numeric",
                      fn=image_fn,
                      osc_span=abs(math.log(upper)) + 6.0)
    if mass is None:
        xs, w = np.polynomial.legendre.leggauss(200)
        xs = 0.5 * upper * (xs + 1.0)
        mass = float(0.5 * upper * np.sum(w * ev(xs)))
    dens = SupportedDensity(
        support_upper=upper, origin_exponent=float(origin_exponent),
        mass=float(mass), representation=representation, image=img,
        evaluator=ev, label=label)
    holder["density"] = dens
    return dens


@dataclass(frozen=True)
class Histogram:
    """Counts over contiguous ascending bin edges."""
    edges: tuple
    counts: tuple

    def __post_init__(self):
        edges = tuple(float(e) for e in self.edges)
        counts = tuple(float(c) for c in self.counts)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "counts", counts)
        if len(edges) != len(counts) + 1:
            raise ValueError("need len(edges) == len(counts) + 1")
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError("edges must be strictly ascending")
        if edges[0] < 0:
            raise ValueError("edges must be nonnegative")
        for c in counts:
            if c < 0:
                raise NegativeCount(f"negative count {c}")

    @property
    def total(self):
        return sum(self.counts)


def density_from_histogram(hist, support_upper=None):
    """Piecewise-constant probability density from a histogram.

    Normalizes counts to unit mass.  The exact image telescopes into one
    single-frequency component per height change:
        F(s) = (1/s) Σ_j (h_{j-1} - h_j) e_j^s      (h outside the range = 0),
    so flat regions cost nothing.  Fewer than three populated bins leaves
    the deconvolution underdetermined and only draws a warning.
    """
    total = hist.total
    if total <= 0:
        raise EmptyHistogram("histogram has no counts")
    populated = sum(1 for c in hist.counts if c > 0)
    if populated < _MIN_BINS:
        warnings.warn(
            f"only {populated} populated bins; the recovered distribution "
            "is underdetermined")
    edges = np.asarray(hist.edges)
    widths = np.diff(edges)
    heights = np.asarray(hist.counts) / (total * widths)
    upper = float(edges[-1]) if support_upper is None else float(support_upper)
    if upper < edges[-1] - 1e-12:
        raise ValueError("support_upper below the last histogram edge")

    hpad = np.concatenate(([0.0], heights, [0.0]))
    comps = []
    for j in range(len(edges)):
        coeff = hpad[j] - hpad[j + 1]
        if abs(coeff) < 1e-300 or edges[j] <= 0.0:
            continue
        comps.append(PackComponent(
            const=complex(coeff), shift=math.log(edges[j]),
            terms=((1.0, 0.0, 1), (1.0, 1.0, -1))))
    K = sum(abs(c.const) * math.exp(c.shift) for c in comps) + 1e-30
    img = MellinImage(strip=Strip(0.0), kind="piecewise_exact",
                      pack=tuple(comps), decay_bound=(1.5 * K, 1.0),
                      osc_span=abs(math.log(max(edges[-1], 1e-12))) + 6.0)

    def ev(x):
        idx = np.searchsorted(edges, x, side="right") - 1
        idx = np.clip(idx, 0, len(heights) - 1)
        out = heights[idx].astype(float)
        out[(x < edges[0]) | (x > edges[-1])] = 0.0
        return out

    segs = tuple((float(a), float(b), (float(hgt),))
                 for a, b, hgt in zip(edges[:-1], edges[1:], heights))
    return SupportedDensity(
        support_upper=upper, origin_exponent=0.0, mass=1.0,
        representation="piecewise_constant", image=img, evaluator=ev,
        label="histogram", segments=segs)


def read_histogram_csv(path):
    """Read `edge_low,edge_high,count` rows; bins must be contiguous."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        expected = ["edge_low", "edge_high", "count"]
        if [h.strip() for h in header] != expected:
            raise ValueError(f"expected header {','.join(expected)}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            lo, hi, cnt = line.split(",")
            rows.append((float(lo), float(hi), float(cnt)))
    if not rows:
        raise EmptyHistogram("no histogram rows")
    edges = [rows[0][0]]
    counts = []
    for lo, hi, cnt in rows:
        if abs(lo - edges[-1]) > 1e-9 * max(1.0, abs(hi)):
            raise ValueError("histogram bins are not contiguous")
        edges.append(hi)
        counts.append(cnt)
    return Histogram(edges=tuple(edges), counts=tuple(counts))


def write_histogram_csv(path, hist):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("edge_low,edge_high,count\n")
        for lo, hi, cnt in zip(hist.edges, hist.edges[1:], hist.counts):
            fh.write(f"{lo:.17g},{hi:.17g},{cnt:.17g}\n")


def read_histogram_json(path):
    """Read {"edges": [...], "counts": [...]}."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if "edges" not in data or "counts" not in data:
        raise ValueError("histogram JSON needs 'edges' and 'counts'")
    return Histogram(edges=tuple(data["edges"]), counts=tuple(data["counts"]))


def write_histogram_json(path, hist):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"edges": list(hist.edges), "counts": list(hist.counts)},
                  fh, indent=2)
        fh.write("\n")


def read_histogram(path):
    if str(path).endswith(".json"):
        return read_histogram_json(path)
    return read_histogram_csv(path)
