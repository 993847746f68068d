"""NumPy reference implementation of the per-step pointwise kernels.

These are the hot inner loops of the spectral stepper, kept signature-
compatible with the Cython twins in _speedups.pyx. All arrays are
C-contiguous float64 2-D with matching shapes; outputs are written in place.
"""

from __future__ import annotations

import numpy as np


def saturating_stage(m, c, d, cx, cy, a, delta, beta, r, rm, rc, rd, fx, fy):
    """Reaction triple and chemotactic flux for the saturating nonlinearity.

    rm = m_+ (1 - m_+^(a-1));  rc = delta d - c + beta m;
    rd = r m_+^2/(1+m_+) (1 - d);  (fx, fy) = m_+/(1+m_+) * (cx, cy).
    """
    mp = np.maximum(m, 0.0)
    if a == 3.0:
        np.multiply(mp, mp, out=rm)
    elif a == 2.0:
        rm[...] = mp
    else:
        np.power(mp, a - 1.0, out=rm)
    np.subtract(1.0, rm, out=rm)
    np.multiply(rm, mp, out=rm)

    np.multiply(d, delta, out=rc)
    np.subtract(rc, c, out=rc)
    rc += beta * m

    sat = mp / (1.0 + mp)
    np.subtract(1.0, d, out=rd)
    rd *= sat
    rd *= mp
    rd *= r

    np.multiply(sat, cx, out=fx)
    np.multiply(sat, cy, out=fy)


def combine_fields(m0, c0, d0, rm, rc, rd, div, chi, h, m1, c1, d1):
    """One explicit stage update: u1 = u0 + h * rhs, with rhs_m = rm - chi*div."""
    np.multiply(div, -chi, out=m1)
    m1 += rm
    m1 *= h
    m1 += m0
    np.multiply(rc, h, out=c1)
    c1 += c0
    np.multiply(rd, h, out=d1)
    d1 += d0


def field_minmax(m, c, d):
    """(min, max) of each field plus a finiteness flag, in one logical scan."""
    mn_m = float(np.min(m))
    mx_m = float(np.max(m))
    mn_c = float(np.min(c))
    mx_c = float(np.max(c))
    mn_d = float(np.min(d))
    mx_d = float(np.max(d))
    finite = bool(np.isfinite(mn_m) and np.isfinite(mx_m)
                  and np.isfinite(mn_c) and np.isfinite(mx_c)
                  and np.isfinite(mn_d) and np.isfinite(mx_d))
    return mn_m, mx_m, mn_c, mx_c, mn_d, mx_d, finite
