"""Acceleration backend selection.

The hot numerical kernels (contour block sums, epsilon acceleration, section
sampling) exist twice: a numba ``@njit`` build and a pure-numpy build with
identical semantics.  Selection order:

* ``STEREO_UNFOLD_NUMBA=0`` forces the numpy path;
* otherwise numba is used when importable;
* ``STEREO_UNFOLD_THREADS`` caps the numba worker count.
"""
import os

_flag = os.environ.get("STEREO_UNFOLD_NUMBA", "1").strip().lower()
_want_numba = _flag not in ("0", "false", "no", "off")

HAVE_NUMBA = False
if _want_numba:
    try:
        import numba  # noqa: F401
        HAVE_NUMBA = True
    except ImportError:
        HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA


def thread_cap():
    """Worker count from STEREO_UNFOLD_THREADS, or None when unset."""
    raw = os.environ.get("STEREO_UNFOLD_THREADS")
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        return None
    return max(1, n)


def apply_thread_cap():
    """Clamp numba's thread pool to the configured cap, if any."""
    if not USE_NUMBA:
        return
    cap = thread_cap()
    if cap is None:
        return
    import numba
    numba.set_num_threads(min(cap, numba.config.NUMBA_NUM_THREADS))
