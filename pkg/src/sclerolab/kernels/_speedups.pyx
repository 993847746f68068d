# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Cython implementation of the per-step pointwise kernels.

Signature-compatible with kernels._reference; see that module for the math.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fmax, fmin, isfinite, pow

cnp.import_array()


def saturating_stage(double[:, ::1] m, double[:, ::1] c, double[:, ::1] d,
                     double[:, ::1] cx, double[:, ::1] cy,
                     double a, double delta, double beta, double r,
                     double[:, ::1] rm, double[:, ::1] rc, double[:, ::1] rd,
                     double[:, ::1] fx, double[:, ::1] fy):
    cdef Py_ssize_t i, j, nx = m.shape[0], ny = m.shape[1]
    cdef double mp, sat, pw
    cdef bint cubic = a == 3.0, quad = a == 2.0
    for i in range(nx):
        for j in range(ny):
            mp = fmax(m[i, j], 0.0)
            if cubic:
                pw = mp * mp
            elif quad:
                pw = mp
            else:
                pw = pow(mp, a - 1.0)
            rm[i, j] = mp * (1.0 - pw)
            rc[i, j] = delta * d[i, j] - c[i, j] + beta * m[i, j]
            sat = mp / (1.0 + mp)
            rd[i, j] = r * sat * mp * (1.0 - d[i, j])
            fx[i, j] = sat * cx[i, j]
            fy[i, j] = sat * cy[i, j]


def combine_fields(double[:, ::1] m0, double[:, ::1] c0, double[:, ::1] d0,
                   double[:, ::1] rm, double[:, ::1] rc, double[:, ::1] rd,
                   double[:, ::1] div, double chi, double h,
                   double[:, ::1] m1, double[:, ::1] c1, double[:, ::1] d1):
    cdef Py_ssize_t i, j, nx = m0.shape[0], ny = m0.shape[1]
    for i in range(nx):
        for j in range(ny):
            m1[i, j] = m0[i, j] + h * (rm[i, j] - chi * div[i, j])
            c1[i, j] = c0[i, j] + h * rc[i, j]
            d1[i, j] = d0[i, j] + h * rd[i, j]


def field_minmax(double[:, ::1] m, double[:, ::1] c, double[:, ::1] d):
    cdef Py_ssize_t i, j, nx = m.shape[0], ny = m.shape[1]
    cdef double mn_m = m[0, 0], mx_m = m[0, 0]
    cdef double mn_c = c[0, 0], mx_c = c[0, 0]
    cdef double mn_d = d[0, 0], mx_d = d[0, 0]
    cdef bint finite = True
    cdef double vm, vc, vd
    for i in range(nx):
        for j in range(ny):
            vm = m[i, j]
            vc = c[i, j]
            vd = d[i, j]
            if not (isfinite(vm) and isfinite(vc) and isfinite(vd)):
                finite = False
            mn_m = fmin(mn_m, vm)
            mx_m = fmax(mx_m, vm)
            mn_c = fmin(mn_c, vc)
            mx_c = fmax(mx_c, vc)
            mn_d = fmin(mn_d, vd)
            mx_d = fmax(mx_d, vd)
    return mn_m, mx_m, mn_c, mx_c, mn_d, mx_d, bool(finite)
