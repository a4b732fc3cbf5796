"""Named catalog of densities, distributions, and kernels, plus file
loaders, shared by the CLI and the tests.

Density specs:  uniform:C | triangle | quadratic | path to a histogram
                CSV (edge_low,edge_high,count) or JSON ({edges, counts}).
Distribution specs:  sex1 | sex2 | path to a CSV with columns lambda,H.
Kernel specs:   sphere | nearly-sphere:SIGMA_M,P | custom:FILE where FILE
                is JSON with {"x": [...], "phi": [...]} and optional
                "singularity_exponent_p", "volume", "surface",
                "mean_curvature".
"""
import json
import math
import os

import numpy as np

from .densities import (Histogram, density_from_histogram,
                        piecewise_poly_density, quadratic_density,
                        read_histogram, triangle_density, uniform_density)
from .errors import InvalidShapeParameters
from .kernels import (BodyConstants, custom_kernel,
                      nearly_sphere_plane_kernel, sphere_line_kernel,
                      sphere_plane_kernel)
from .unfold import SizeDistribution


def _parse_number(text):
    text = text.strip().lower()
    if text == "pi":
        return math.pi
    if text == "2pi":
        return 2.0 * math.pi
    return float(text)


def named_density(spec):
    """Resolve a density spec: registry name or histogram file path."""
    if spec.startswith("uniform:"):
        return uniform_density(_parse_number(spec.split(":", 1)[1]))
    if spec == "triangle":
        return triangle_density()
    if spec == "quadratic":
        return quadratic_density()
    if os.path.exists(spec):
        return density_from_histogram(read_histogram(spec))
    raise ValueError(
        f"unknown density '{spec}': expected uniform:C, triangle, "
        "quadratic, or a histogram file path")


def sex1_distribution():
    """λ/√(1-λ²) on [0, 1): the size distribution whose spherical plane
    sections are uniformly distributed in area.  Unit mass."""

    def ev(lam):
        lam = np.asarray(lam, dtype=float)
        out = np.zeros_like(lam)
        m = (lam > 0) & (lam < 1.0)
        out[m] = lam[m] / np.sqrt(1.0 - lam[m] ** 2)
        return out

    return SizeDistribution(support=(0.0, 1.0), normalizable=True,
                            normalization=1.0, provenance="closed_form",
                            evaluator=ev)


def sex2_distribution():
    """1/λ² on [1/2, 1]: the size distribution whose spherical chords are
    triangle-distributed.  Unit mass (the β = 1 convention doubles it)."""

    def ev(lam):
        lam = np.asarray(lam, dtype=float)
        out = np.zeros_like(lam)
        m = (lam >= 0.5) & (lam <= 1.0)
        out[m] = 1.0 / lam[m] ** 2
        return out

    return SizeDistribution(support=(0.5, 1.0), normalizable=True,
                            normalization=1.0, provenance="closed_form",
                            evaluator=ev)


def distribution_from_csv(path):
    """Size distribution from a CSV with header lambda,H (linear interp)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if [h.strip() for h in header] != ["lambda", "H"]:
            raise ValueError("expected CSV header 'lambda,H'")
        data = np.loadtxt(fh, delimiter=",")
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 2:
        raise ValueError("need at least two lambda,H rows")
    lam = data[:, 0]
    hv = data[:, 1]
    if np.any(np.diff(lam) <= 0):
        raise ValueError("lambda column must be strictly increasing")
    if np.any(hv < 0):
        raise ValueError("H column must be nonnegative")
    mass = float(np.sum(0.5 * (hv[1:] + hv[:-1]) * np.diff(lam)))

    def ev(x):
        return np.interp(x, lam, hv, left=0.0, right=0.0)

    return SizeDistribution(
        support=(float(lam[0]), float(lam[-1])),
        normalizable=mass > 0 and math.isfinite(mass),
        normalization=mass, provenance="tabulated", evaluator=ev)


def named_distribution(spec):
    """Resolve a distribution spec: registry name or lambda,H CSV path."""
    if spec == "sex1":
        return sex1_distribution()
    if spec == "sex2":
        return sex2_distribution()
    if os.path.exists(spec):
        return distribution_from_csv(spec)
    raise ValueError(
        f"unknown distribution '{spec}': expected sex1, sex2, or a "
        "lambda,H CSV path")


def _kernel_from_file(path, mode):
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if "x" not in data or "phi" not in data:
        raise ValueError("custom kernel JSON needs 'x' and 'phi' arrays")
    x = np.asarray(data["x"], dtype=float)
    y = np.asarray(data["phi"], dtype=float)
    if len(x) != len(y) or len(x) < 2:
        raise ValueError("'x' and 'phi' must be equal-length, length >= 2")
    if np.any(np.diff(x) <= 0):
        raise ValueError("'x' must be strictly increasing")
    if np.any(y < 0):
        raise ValueError("'phi' must be nonnegative")
    segments = []
    for i in range(len(x) - 1):
        c1 = (y[i + 1] - y[i]) / (x[i + 1] - x[i])
        c0 = y[i] - c1 * x[i]
        segments.append((x[i], x[i + 1], (c0, c1)))
    phi = piecewise_poly_density(segments, mass=1.0,
                                 label=f"custom:{os.path.basename(path)}",
                                 representation="piecewise_linear")
    body = None
    if all(k in data for k in ("volume", "surface", "mean_curvature")):
        body = BodyConstants(volume=float(data["volume"]),
                             surface=float(data["surface"]),
                             mean_curvature=float(data["mean_curvature"]))
    return custom_kernel(
        mode, phi, body=body,
        singularity_exponent_p=float(data.get("singularity_exponent_p",
                                              0.0)),
        shape_id=f"custom:{os.path.basename(path)}")


def parse_kernel(spec, mode):
    """Resolve a kernel spec for the given sectioning mode."""
    if mode not in ("plane", "line"):
        raise ValueError("mode must be 'plane' or 'line'")
    if spec == "sphere":
        return sphere_plane_kernel() if mode == "plane" \
            else sphere_line_kernel()
    if spec.startswith("nearly-sphere:"):
        if mode != "plane":
            raise InvalidShapeParameters(
                "the nearly-sphere kernel is defined for plane sections")
        params = spec.split(":", 1)[1].split(",")
        if len(params) != 2:
            raise ValueError(
                "nearly-sphere kernel needs 'nearly-sphere:SIGMA_M,P'")
        return nearly_sphere_plane_kernel(_parse_number(params[0]),
                                          _parse_number(params[1]))
    if spec.startswith("custom:"):
        return _kernel_from_file(spec.split(":", 1)[1], mode)
    raise ValueError(
        f"unknown kernel '{spec}': expected sphere, "
        "nearly-sphere:SIGMA_M,P, or custom:FILE")
