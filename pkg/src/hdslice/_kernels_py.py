"""Pure-Python reference versions of the compiled kernels.

Used when the extension is not built, or when ``HDSLICE_PURE_PYTHON`` is set.
Semantics must match ``_kernels.pyx`` exactly (same sweep order, same
tie-breaking), so that both backends give identical counts.
"""
import math

import numpy as np


def jacobi_rows(R, Jt, tol, max_sweeps):
    """Orthogonalise the rows of ``R`` in place by complex Jacobi rotations.

    Every rotation applied to a pair of rows of ``R`` is applied to the same
    rows of ``Jt`` with conjugated phase, so that ``Jt.T`` accumulates the
    left unitary factor. Returns the number of sweeps, or -1 when
    ``max_sweeps`` is exhausted without convergence.
    """
    n = R.shape[0]
    for sweep in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                rp, rq = R[p], R[q]
                alpha = float(np.vdot(rp, rp).real)
                beta = float(np.vdot(rq, rq).real)
                gamma = complex(np.sum(rp * rq.conj()))
                g_abs = abs(gamma)
                if alpha == 0.0 or beta == 0.0 or g_abs <= tol * math.sqrt(alpha * beta):
                    continue
                rotated = True
                ph = gamma / g_abs
                zeta = (beta - alpha) / (2.0 * g_abs)
                if zeta >= 0:
                    tt = 1.0 / (zeta + math.sqrt(1.0 + zeta * zeta))
                else:
                    tt = -1.0 / (-zeta + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + tt * tt)
                s = c * tt
                a_row = rp.copy()
                b_row = ph * rq
                R[p] = c * a_row - s * b_row
                R[q] = s * a_row + c * b_row
                a_row = Jt[p].copy()
                b_row = ph.conjugate() * Jt[q]
                Jt[p] = c * a_row - s * b_row
                Jt[q] = s * a_row + c * b_row
        if not rotated:
            return sweep + 1
    return -1


def polyval(c, x):
    acc = 0.0
    for coef in reversed(c):
        acc = acc * x + coef
    return acc


def sign_variations(seq, degs, x):
    changes = 0
    prev = 0.0
    for row, d in zip(seq, degs):
        v = polyval(row[: d + 1], x)
        if v == 0.0:
            continue
        if prev != 0.0 and (v > 0) != (prev > 0):
            changes += 1
        prev = v
    return changes


def isolate_roots(seq, degs, a, b, min_width):
    out = []
    stack = [(a, b, sign_variations(seq, degs, a), sign_variations(seq, degs, b))]
    while stack:
        lo, hi, va, vb = stack.pop()
        if va - vb <= 0:
            continue
        if va - vb == 1 or hi - lo <= min_width:
            out.append((lo, hi, va - vb))
            continue
        mid = 0.5 * (lo + hi)
        vm = sign_variations(seq, degs, mid)
        stack.append((mid, hi, vm, vb))
        stack.append((lo, mid, va, vm))
    out.sort()
    return out


def bisect_single(seq, degs, a, b, iters):
    va = sign_variations(seq, degs, a)
    for _ in range(iters):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        vm = sign_variations(seq, degs, mid)
        if va - vm >= 1:
            b = mid
        else:
            a, va = mid, vm
    return a, b
