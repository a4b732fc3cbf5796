"""Section kernels: the density of plane-section areas or line-chord lengths
of a single convex body of unit size, plus the body constants that fix the
normalizations.

For a body at size λ the plane-section area density rescales as
phi(sigma/λ²)/λ² and the chord-length density as phi(l/λ)/λ; both laws are
exposed through scale_kernel.  The shape catalog:

  sphere (plane):        phi(σ) = 1/(2 sqrt(π(π-σ))) on [0, π]
  sphere (line):         phi(l) = l/2 on [0, 2]
  nearly-sphere (plane): phi(σ) = (1-p) σ_m^(p-1) (σ_m-σ)^(-p) on [0, σ_m]

with p ∈ (0, 1/2] the strength of the edge singularity (p = 1/2 with
σ_m = π is the sphere).  Body constants satisfy the mean-section identities
∫σ phi dσ = 2πV/M (plane) and ∫l phi dl = 4V/F (line).
"""
import math
from dataclasses import dataclass

import numpy as np

from ._contour import PackComponent
from .densities import (SupportedDensity, beta_power_density, custom_density,
                        piecewise_poly_density)
from .errors import InvalidShapeParameters
from .mellin import MellinImage, Strip


@dataclass(frozen=True)
class BodyConstants:
    """Geometric constants of the unit-size body.

    volume V, surface F, mean-curvature integral M, and the induced
    normalizations alpha (plane-section intensity scale) and beta = F/4
    (line-chord intensity scale).
    """
    volume: float
    surface: float
    mean_curvature: float
    alpha: float = 1.0

    @property
    def beta(self):
        return self.surface / 4.0


@dataclass(frozen=True)
class SectionKernel:
    """Single-body section density phi with its exact Mellin image phi*.

    mode is 'plane' (section areas) or 'line' (chord lengths);
    max_section is sigma_m or l_m; singularity_exponent_p is the exponent
    of the (max_section - x)^(-p) edge singularity, 0 when none.
    """
    shape_id: str
    mode: str
    max_section: float
    phi: SupportedDensity
    phi_star: MellinImage
    body: BodyConstants
    singularity_exponent_p: float = 0.0


def sphere_plane_kernel():
    """Plane-section area kernel of the unit sphere.

    phi*(s) = π^(s-1/2) Γ(s) / (2 Γ(s+1/2)).
    """
    phi = beta_power_density(math.pi, 0.0, -0.5, label="sphere plane kernel")
    body = BodyConstants(volume=4.0 * math.pi / 3.0, surface=4.0 * math.pi,
                         mean_curvature=4.0 * math.pi)
    return SectionKernel(shape_id="sphere", mode="plane",
                         max_section=math.pi, phi=phi, phi_star=phi.image,
                         body=body, singularity_exponent_p=0.5)


def sphere_line_kernel():
    """Chord-length kernel of the unit sphere: phi(l) = l/2 on [0, 2].

    phi*(s) = 2^s / (s+1).
    """
    phi = piecewise_poly_density([(0.0, 2.0, (0.0, 0.5))],
                                 label="sphere line kernel",
                                 representation="closed_form")
    body = BodyConstants(volume=4.0 * math.pi / 3.0, surface=4.0 * math.pi,
                         mean_curvature=4.0 * math.pi)
    return SectionKernel(shape_id="sphere", mode="line", max_section=2.0,
                         phi=phi, phi_star=phi.image, body=body,
                         singularity_exponent_p=0.0)


def nearly_sphere_plane_kernel(sigma_m, p):
    """Plane kernel of a nearly spherical body with edge exponent p.

    phi(σ) = (1-p) σ_m^(p-1) (σ_m-σ)^(-p),
    phi*(s) = (1-p) σ_m^(s-1) B(s, 1-p).

    Body constants are built from the sphere of the same maximal section
    together with the mean-section identity, which pins M through
    ∫σ phi dσ = σ_m/(2-p) = 2πV/M.
    """
    if not (0.0 < p <= 0.5):
        raise InvalidShapeParameters(f"p={p} outside (0, 1/2]")
    if sigma_m <= 0.0:
        raise InvalidShapeParameters(f"sigma_m={sigma_m} must be positive")
    phi = beta_power_density(sigma_m, 0.0, -p,
                             label=f"nearly-sphere:{sigma_m:g},{p:g}")
    volume = (4.0 / 3.0) * math.sqrt(sigma_m ** 3 / math.pi)
    surface = 4.0 * sigma_m
    mean_curv = 2.0 * math.pi * volume * (2.0 - p) / sigma_m
    body = BodyConstants(volume=volume, surface=surface,
                         mean_curvature=mean_curv)
    return SectionKernel(shape_id=f"nearly-sphere:{sigma_m:g},{p:g}",
                         mode="plane", max_section=sigma_m, phi=phi,
                         phi_star=phi.image, body=body,
                         singularity_exponent_p=p)


def custom_kernel(mode, phi, body=None, singularity_exponent_p=0.0,
                  shape_id="custom"):
    """Kernel from a user-supplied section density of a unit-size body.

    When body constants are omitted they are filled in from the
    mean-section identity around a volume-matched sphere.
    """
    if mode not in ("plane", "line"):
        raise ValueError("mode must be 'plane' or 'line'")
    cmax = phi.support_upper
    if body is None:
        xs, w = np.polynomial.legendre.leggauss(200)
        xs = 0.5 * cmax * (xs + 1.0)
        mean_sec = float(0.5 * cmax * np.sum(w * xs * phi.eval(xs)))
        if mode == "plane":
            volume = (4.0 / 3.0) * math.sqrt(cmax ** 3 / math.pi)
            surface = 4.0 * cmax
            mean_curv = 2.0 * math.pi * volume / mean_sec
        else:
            volume = math.pi * cmax ** 3 / 6.0
            surface = 4.0 * volume / mean_sec
            mean_curv = 2.0 * math.pi * cmax / 2.0
        body = BodyConstants(volume=volume, surface=surface,
                             mean_curvature=mean_curv)
    return SectionKernel(shape_id=shape_id, mode=mode, max_section=cmax,
                         phi=phi, phi_star=phi.image, body=body,
                         singularity_exponent_p=float(singularity_exponent_p))


def scale_kernel(kernel, lam, mode):
    """Section density of the same body at size λ.

    plane: σ ↦ phi(σ/λ²)/λ² on [0, σ_m λ²], image λ^(2s-2) phi*(s);
    line:  l ↦ phi(l/λ)/λ on [0, l_m λ], image λ^(s-1) phi*(s).
    """
    if lam <= 0.0:
        raise ValueError("lambda must be positive")
    if mode not in ("plane", "line"):
        raise ValueError("mode must be 'plane' or 'line'")
    power = 2.0 if mode == "plane" else 1.0
    lam = float(lam)
    phi = kernel.phi
    upper = phi.support_upper * lam ** power
    lnl = math.log(lam)

    if phi.image.pack is not None:
        pack = tuple(PackComponent(
            const=c.const * lam ** (-power), shift=c.shift + power * lnl,
            terms=c.terms) for c in phi.image.pack)
        img = MellinImage(strip=phi.image.strip, kind=phi.image.kind,
                          pack=pack,
                          osc_span=phi.image.osc_span + power * abs(lnl))
    else:
        base = phi.image.eval

        def scaled_fn(s):
            s = np.asarray(s, dtype=complex)
            return np.exp((power * s - power) * lnl) * base(s)

        img = MellinImage(strip=phi.image.strip, kind="numeric",
                          fn=scaled_fn,
                          osc_span=phi.image.osc_span + power * abs(lnl))

    def ev(x):
        return phi.eval(x / lam ** power) / lam ** power

    return SupportedDensity(
        support_upper=upper, origin_exponent=phi.origin_exponent,
        mass=phi.mass, representation=phi.representation, image=img,
        evaluator=ev, label=f"{phi.label}@lambda={lam:g}")
