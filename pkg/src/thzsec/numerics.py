"""Self-contained 1-D numerics: adaptive Gauss-Kronrod quadrature and
golden-section maximisation.

The quadrature drives the single-scatter gain integral; the golden-section
search drives the steering optimisation.  Both work on plain callables; the
quadrature expects a vectorised integrand (ndarray in, ndarray out) so that
whole refinement rounds cost a single numpy call.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

__all__ = ["QuadratureError", "adaptive_gauss_kronrod", "golden_section_max"]


class QuadratureError(RuntimeError):
    """Adaptive refinement ran out of panels before meeting the tolerance."""


# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
# Abscissa magnitudes; even indices are the Kronrod-only nodes, odd the
# embedded Gauss nodes.
_XK = np.array(
    [
        0.991455371120813,
        0.949107912342759,
        0.864864423359769,
        0.741531185599394,
        0.586087235467691,
        0.405845151377397,
        0.207784955007898,
        0.0,
    ]
)
_WK = np.array(
    [
        0.022935322010529,
        0.063092092629979,
        0.104790010322250,
        0.140653259715525,
        0.169004726639267,
        0.190350578064785,
        0.204432940075298,
        0.209482141084728,
    ]
)
_WG = np.array(
    [
        0.129484966168870,
        0.279705391489277,
        0.381830050505119,
        0.417959183673469,
    ]
)

# Full symmetric node/weight arrays (15 Kronrod nodes; Gauss weights are
# zero at Kronrod-only nodes).
_NODES = np.concatenate([-_XK[:7], _XK[::-1]])
_WEIGHTS_K = np.concatenate([_WK[:7], _WK[::-1]])
_wg_full = np.zeros(8)
_wg_full[1::2] = _WG  # Gauss nodes sit at the odd Kronrod indices plus the centre
_WEIGHTS_G = np.concatenate([_wg_full[:7], _wg_full[::-1]])


def _panel_estimates(f, lo: np.ndarray, hi: np.ndarray):
    """Kronrod/Gauss estimates for a batch of panels in one integrand call."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    # shape (n_panels, 15)
    pts = mid[:, None] + half[:, None] * _NODES[None, :]
    vals = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
    ik = half * (vals @ _WEIGHTS_K)
    ig = half * (vals @ _WEIGHTS_G)
    return ik, np.abs(ik - ig)


def adaptive_gauss_kronrod(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-30,
    max_panels: int = 2048,
) -> float:
    """Integrate a vectorised integrand over [a, b] by adaptive bisection.

    Each refinement round re-evaluates every out-of-budget panel with the
    (G7, K15) pair; a panel's error estimate is |K15 - G7|.  The local error
    budget is the global budget prorated by panel width.
    """
    if b <= a:
        return 0.0
    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    ik, err = _panel_estimates(f, lo, hi)
    for _ in range(64):
        total = float(ik.sum())
        budget = max(rel_tol * abs(total), abs_tol)
        local = budget * (hi - lo) / (b - a)
        bad = err > local
        if not bad.any():
            return total
        if len(lo) + int(bad.sum()) > max_panels:
            raise QuadratureError(
                f"exceeded {max_panels} panels (error {float(err.sum()):.3e}, "
                f"budget {budget:.3e})"
            )
        mid = 0.5 * (lo[bad] + hi[bad])
        new_lo = np.concatenate([lo[~bad], lo[bad], mid])
        new_hi = np.concatenate([hi[~bad], mid, hi[bad]])
        keep_ik, keep_err = ik[~bad], err[~bad]
        split_ik, split_err = _panel_estimates(
            f, np.concatenate([lo[bad], mid]), np.concatenate([mid, hi[bad]])
        )
        lo, hi = new_lo, new_hi
        ik = np.concatenate([keep_ik, split_ik])
        err = np.concatenate([keep_err, split_err])
    raise QuadratureError("refinement did not converge in 64 rounds")


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(
    f: Callable[[float], float],
    a: float,
    b: float,
    xtol: float = 1e-6,
    max_iter: int = 200,
) -> tuple[float, float]:
    """Locate the maximum of a unimodal f on [a, b].

    Returns (x, f(x)) for the best point seen, endpoints included.
    """
    if b < a:
        a, b = b, a
    best_x, best_f = a, f(a)
    fb_end = f(b)
    if fb_end > best_f:
        best_x, best_f = b, fb_end
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
        if abs(b - a) < xtol:
            break
    for x, fx in ((c, fc), (d, fd)):
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f
