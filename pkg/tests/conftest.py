"""Shared fixtures: kernels and the four reference solves, computed once.

Also registers a terminal-summary hook that prints one PASS/FAIL line per
acceptance criterion after the run (criteria live in test_acceptance.py,
named test_cNN_*).
"""
import re

import numpy as np
import pytest

from stereounfold import (
    nearly_sphere_plane_kernel,
    quadratic_density,
    solve_line,
    solve_plane,
    sphere_line_kernel,
    sphere_plane_kernel,
    triangle_density,
    uniform_density,
)


@pytest.fixture(scope="session")
def plane_kernel():
    return sphere_plane_kernel()


@pytest.fixture(scope="session")
def line_kernel():
    return sphere_line_kernel()


@pytest.fixture(scope="session")
def ns_kernel():
    return nearly_sphere_plane_kernel(np.pi, 0.25)


@pytest.fixture(scope="session")
def plane_flat_pair(plane_kernel):
    """solve_plane on the flat section-area density over [0, π].

    Closed form of the recovered distribution: H(λ) = λ/√(1-λ²) on (0, 1).
    """
    return solve_plane(uniform_density(np.pi), plane_kernel)


@pytest.fixture(scope="session")
def line_triangle_pair(line_kernel):
    """solve_line on the triangular chord density, explicit β = 1.

    Closed form: H(λ) = 2/λ² on [1/2, 1] (finite mass 2).
    """
    return solve_line(triangle_density(), line_kernel,
                      beta_mode="explicit", beta_value=1.0)


@pytest.fixture(scope="session")
def line_quadratic_pair(line_kernel):
    """solve_line on the quadratic chord density, explicit β = 1.

    Closed form: H(λ) = (3/(2λ²))(1-λ²) on (0, 1), non-normalizable.
    """
    return solve_line(quadratic_density(), line_kernel,
                      beta_mode="explicit", beta_value=1.0)


@pytest.fixture(scope="session")
def ns_flat_pair(ns_kernel):
    """solve_plane on the flat density over [0, 2] with the near-sphere
    kernel (σ_m = π, p = 1/4)."""
    return solve_plane(uniform_density(2.0), ns_kernel)


_CRITERION_LABELS = {
    1: "plane solve of flat section density vs closed form, timed",
    2: "plane solve of half-support flat density vs closed form",
    3: "line solve of quadratic chord density + divergence flag",
    4: "near-sphere kernel solves vs closed-form family",
    5: "flat-density degeneracy: classical zero vs transform nonzero",
    6: "manufactured smooth pairs: transform vs classical solvers",
    7: "forward-residual gate on deterministic solver outputs",
    8: "catalog transform round-trips and contour independence",
    9: "sphere section-moment identities",
    10: "sectioning simulation: KS gate and pipeline closure",
}

_CRITERION_RE = re.compile(r"test_c(\d\d)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    stats = terminalreporter.stats
    outcomes = {}
    for category in ("passed", "failed", "error", "xfailed", "xpassed",
                     "skipped"):
        for rep in stats.get(category, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_c" not in nodeid:
                continue
            m = _CRITERION_RE.search(nodeid.split("::")[-1])
            if m is None:
                continue
            outcomes.setdefault(int(m.group(1)), set()).add(category)
    if not outcomes:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for num in sorted(outcomes):
        cats = outcomes[num]
        if "failed" in cats or "error" in cats or "xpassed" in cats:
            verdict = "FAIL"
        elif cats == {"xfailed"}:
            verdict = "FAIL (expected: documented defect)"
        elif "xfailed" in cats:
            verdict = "PASS (defective literal target fails as expected)"
        elif "passed" not in cats:
            verdict = "SKIPPED"
        else:
            verdict = "PASS"
        label = _CRITERION_LABELS.get(num, "")
        terminalreporter.write_line(
            f"criterion {num:2d}: {verdict:<45s} {label}")
