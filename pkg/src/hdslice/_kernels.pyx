# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: one-sided Jacobi rotations and Sturm-chain sweeps.

Mirrors ``_kernels_py`` function for function; see that module for the
reference semantics.
"""
from libc.math cimport sqrt, fabs
from libc.complex cimport cabs, conj


cdef extern from "complex.h":
    double complex cexp(double complex)


def jacobi_rows(double complex[:, ::1] R, double complex[:, ::1] Jt,
                double tol, int max_sweeps):
    cdef Py_ssize_t n = R.shape[0], t = R.shape[1]
    cdef Py_ssize_t p, q, k
    cdef double alpha, beta, g_abs, zeta, tt, c, s
    cdef double complex gamma, ph, rp, rq
    cdef int sweep, rotated
    for sweep in range(max_sweeps):
        rotated = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0
                for k in range(t):
                    alpha += R[p, k].real * R[p, k].real + R[p, k].imag * R[p, k].imag
                    beta += R[q, k].real * R[q, k].real + R[q, k].imag * R[q, k].imag
                    gamma += R[p, k] * conj(R[q, k])
                g_abs = cabs(gamma)
                if alpha == 0.0 or beta == 0.0 or g_abs <= tol * sqrt(alpha * beta):
                    continue
                rotated = 1
                ph = gamma / g_abs
                zeta = (beta - alpha) / (2.0 * g_abs)
                if zeta >= 0:
                    tt = 1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                else:
                    tt = -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                c = 1.0 / sqrt(1.0 + tt * tt)
                s = c * tt
                for k in range(t):
                    rp = R[p, k]
                    rq = ph * R[q, k]
                    R[p, k] = c * rp - s * rq
                    R[q, k] = s * rp + c * rq
                for k in range(n):
                    rp = Jt[p, k]
                    rq = conj(ph) * Jt[q, k]
                    Jt[p, k] = c * rp - s * rq
                    Jt[q, k] = s * rp + c * rq
        if not rotated:
            return sweep + 1
    return -1


cpdef double polyval(double[::1] c, double x):
    cdef Py_ssize_t i
    cdef double acc = 0.0
    for i in range(c.shape[0] - 1, -1, -1):
        acc = acc * x + c[i]
    return acc


cdef int _variations(double[:, ::1] seq, long[::1] degs, double x):
    cdef Py_ssize_t j, i
    cdef double v, prev = 0.0
    cdef int changes = 0
    for j in range(seq.shape[0]):
        v = 0.0
        for i in range(degs[j], -1, -1):
            v = v * x + seq[j, i]
        if v == 0.0:
            continue
        if prev != 0.0 and (v > 0) != (prev > 0):
            changes += 1
        prev = v
    return changes


def sign_variations(double[:, ::1] seq, long[::1] degs, double x):
    return _variations(seq, degs, x)


def isolate_roots(double[:, ::1] seq, long[::1] degs, double a, double b,
                  double min_width):
    cdef list out = []
    cdef list stack = [(a, b, _variations(seq, degs, a), _variations(seq, degs, b))]
    cdef double lo, hi, mid
    cdef int va, vb, vm
    while stack:
        lo, hi, va, vb = stack.pop()
        if va - vb <= 0:
            continue
        if va - vb == 1 or hi - lo <= min_width:
            out.append((lo, hi, va - vb))
            continue
        mid = 0.5 * (lo + hi)
        vm = _variations(seq, degs, mid)
        stack.append((mid, hi, vm, vb))
        stack.append((lo, mid, va, vm))
    out.sort()
    return out


def bisect_single(double[:, ::1] seq, long[::1] degs, double a, double b,
                  int iters):
    cdef double mid
    cdef int va = _variations(seq, degs, a), vm
    cdef int it
    for it in range(iters):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        vm = _variations(seq, degs, mid)
        if va - vm >= 1:
            b = mid
        else:
            a = mid
            va = vm
    return a, b
