"""Complex log-gamma for the jitted contour kernels.

The compiled path cannot call scipy's special functions, so the Lanczos
approximation (g = 7, 9 coefficients) is implemented here as a plain
function over ``complex128`` that numba can compile.  Arguments with
Re(z) < 0.5 are pushed up by the recurrence log Γ(z) = log Γ(z+1) − log z;
all contour arguments in this package satisfy Re(z) > 0.

Relative accuracy is below 1e−12 on the used domain (verified against
scipy.special.loggamma in the test suite).  Branch offsets of 2πi are
irrelevant downstream: only exp(Σ ±log Γ) is ever consumed, and all pack
weights are integers.
"""
import cmath

_LG_HALF_LOG_2PI = 0.9189385332046727
_LG_G = 7.0
_LG_C0 = 0.99999999999980993
_LG_C = (
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def clog_gamma(z):
    """Principal-ish log Γ(z) for Re(z) > 0, Lanczos g=7."""
    shift = 0.0 + 0.0j
    while z.real < 0.5:
        shift -= cmath.log(z)
        z = z + 1.0
    w = z - 1.0
    x = _LG_C0
    x += _LG_C[0] / (w + 1.0)
    x += _LG_C[1] / (w + 2.0)
    x += _LG_C[2] / (w + 3.0)
    x += _LG_C[3] / (w + 4.0)
    x += _LG_C[4] / (w + 5.0)
    x += _LG_C[5] / (w + 6.0)
    x += _LG_C[6] / (w + 7.0)
    x += _LG_C[7] / (w + 8.0)
    t = w + _LG_G + 0.5
    return _LG_HALF_LOG_2PI + (w + 0.5) * cmath.log(t) - t + cmath.log(x) + shift
