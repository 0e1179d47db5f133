# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: built-in problem evaluators, the steady-state
generation step and nondominated filtering.

Must stay operation-for-operation identical to ``_pykernels`` so that both
backends produce bitwise-identical runs.
"""

import numpy as np

from libc.math cimport sqrt, sin, cos, exp, pow, fabs, floor, M_PI, INFINITY, isinf

cdef double NORM_EPS = 1e-12

# problem ids, mirrored in _pykernels.PROBLEM_IDS
DEF P_ZDT1 = 0
DEF P_ZDT3 = 1
DEF P_MZDT1 = 2
DEF P_GLT1 = 3
DEF P_GLT3 = 4
DEF P_SCH1 = 5
DEF P_F1 = 6
DEF P_DTLZ1 = 7
DEF P_DTLZ2 = 8
DEF P_DTLZ5 = 9
DEF P_DTLZ7 = 10
DEF P_IDTLZ1 = 11
DEF P_IDTLZ2 = 12
DEF P_VNT2 = 13
DEF P_F2 = 14
DEF P_HC = 15
DEF P_RI = 16

# scalarizer modes, mirrored in _pykernels.MODES
DEF M_PSNORM = 0
DEF M_WS = 1
DEF M_TCH = 2
DEF M_PBI = 3
DEF M_ATCH = 4
DEF M_MTCH = 5
DEF M_RTCH = 6
DEF M_LP = 7
DEF M_MSF = 8
DEF M_PTCH = 9
DEF M_PS = 10

DEF MZDT1_M = 0.5


cdef inline double _sgn(double v) nogil:
    if v > 0:
        return 1.0
    if v < 0:
        return -1.0
    return 0.0


cdef int _eval(int pid, double[::1] x, double[::1] f) except -1:
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i
    cdef double g, s, h, t, a, b, c1, c2, c3, x1, x2, x3, x4
    cdef double rb, tau, th, rk, E
    if pid == P_ZDT1 or pid == P_ZDT3 or pid == P_MZDT1:
        s = 0.0
        for i in range(1, n):
            s += x[i]
        g = 1.0 + 9.0 * s / (n - 1)
        t = x[0] / g
        if pid == P_ZDT1:
            h = 1.0 - sqrt(t)
        elif pid == P_ZDT3:
            h = 1.0 - sqrt(t) - t * sin(10.0 * M_PI * x[0])
        else:
            h = 1.0 - pow(t, 1.0 / MZDT1_M)
        f[0] = x[0]
        f[1] = g * h
    elif pid == P_GLT1 or pid == P_GLT3:
        g = 0.0
        a = sin(2.0 * M_PI * x[0])
        for i in range(1, n):
            t = x[i] - a
            g += t * t
        f[0] = (1.0 + g) * x[0]
        if pid == P_GLT1:
            f[1] = (1.0 + g) * (2.0 - x[0] - _sgn(cos(2.0 * M_PI * x[0])))
        elif x[0] <= 0.05:
            f[1] = (1.0 + g) * (1.0 - 19.0 * x[0])
        else:
            f[1] = (1.0 + g) * (1.0 / 19.0 - x[0] / 19.0)
    elif pid == P_SCH1:
        t = x[0] - 2.0
        f[0] = x[0] * x[0]
        f[1] = t * t
    elif pid == P_F1:
        s = 0.0
        for i in range(1, n):
            s += x[i]
        g = 1.0 + 9.0 * s / (n - 1)
        f[0] = g * (1.0 - 1.0 / (1.0 + exp(-10.0 * x[0])))
        f[1] = x[0]
    elif pid == P_DTLZ1 or pid == P_IDTLZ1:
        s = 0.0
        for i in range(2, n):
            t = x[i] - 0.5
            s += t * t - cos(20.0 * M_PI * t)
        g = 100.0 * ((n - 2) + s)
        f[0] = 0.5 * x[0] * x[1] * (1.0 + g)
        f[1] = 0.5 * x[0] * (1.0 - x[1]) * (1.0 + g)
        f[2] = 0.5 * (1.0 - x[0]) * (1.0 + g)
        if pid == P_IDTLZ1:
            for i in range(3):
                f[i] = 0.5 * (1.0 + g) - f[i]
    elif pid == P_DTLZ2 or pid == P_IDTLZ2 or pid == P_DTLZ5:
        g = 0.0
        for i in range(2, n):
            t = x[i] - 0.5
            g += t * t
        a = 0.5 * M_PI * x[0]
        if pid == P_DTLZ5:
            b = M_PI / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * x[1])
        else:
            b = 0.5 * M_PI * x[1]
        f[0] = (1.0 + g) * cos(a) * cos(b)
        f[1] = (1.0 + g) * cos(a) * sin(b)
        f[2] = (1.0 + g) * sin(a)
        if pid == P_IDTLZ2:
            for i in range(3):
                f[i] = (1.0 + g) - f[i]
    elif pid == P_DTLZ7:
        s = 0.0
        for i in range(2, n):
            s += x[i]
        g = 1.0 + 9.0 * s / (n - 2)
        h = 3.0
        for i in range(2):
            h -= x[i] / (1.0 + g) * (1.0 + sin(3.0 * M_PI * x[i]))
        f[0] = x[0]
        f[1] = x[1]
        f[2] = (1.0 + g) * h
    elif pid == P_VNT2:
        x1 = x[0]
        x2 = x[1]
        a = x1 - 2.0
        b = x2 + 1.0
        f[0] = a * a / 2.0 + b * b / 13.0 + 3.0
        a = x1 + x2 - 3.0
        b = -x1 + x2 + 2.0
        f[1] = a * a / 36.0 + b * b / 8.0 - 17.0
        a = x1 + 2.0 * x2 - 1.0
        b = 2.0 * x2 - x1
        f[2] = a * a / 175.0 + b * b / 17.0 - 13.0
    elif pid == P_F2:
        g = 0.0
        for i in range(2, n):
            t = x[i] - 0.5
            g += t * t
        a = 0.5 * M_PI * x[0]
        b = 0.5 * M_PI * x[1]
        c1 = cos(a) * cos(b)
        c2 = cos(a) * sin(b)
        c3 = sin(b)
        t = (1.0 + g) - (1.0 + g) * c1
        f[0] = pow(t if t > 0.0 else 0.0, 1.8)
        t = (1.0 + g) - (1.0 + g) * c2
        f[1] = pow(t if t > 0.0 else 0.0, 1.8)
        t = (1.0 + g) - (1.0 + g) * c3
        f[2] = pow(t if t > 0.0 else 0.0, 1.8)
    elif pid == P_HC:
        x1 = x[0]
        x2 = x[1]
        E = 700000.0
        rb = 4500.0 / (x1 * x2)
        tau = 1800.0 / x2
        th = 562000.0 / (E * x1 * x2 * x2)
        rk = E * x1 * x1 / 100.0
        f[0] = x1 + 120.0 * x2
        s = 0.0
        t = 1.0 - rb / 700.0
        if t < 0.0:
            s -= t
        t = 1.0 - tau / 450.0
        if t < 0.0:
            s -= t
        t = 1.0 - th / 1.5
        if t < 0.0:
            s -= t
        t = 1.0 - rb / rk
        if t < 0.0:
            s -= t
        f[1] = s
    elif pid == P_RI:
        x1 = x[0]
        x2 = x[1]
        x3 = x[2]
        x4 = x[3]
        f[0] = (0.692 + 0.477 * x1 - 0.687 * x2 - 0.08 * x3 - 0.065 * x4
                - 0.167 * x1 * x1 - 0.0129 * x1 * x2 + 0.0796 * x2 * x2
                - 0.0634 * x1 * x3 - 0.0257 * x2 * x3 + 0.0877 * x3 * x3
                - 0.0521 * x1 * x4 + 0.00156 * x2 * x4 + 0.00198 * x3 * x4
                + 0.0184 * x4 * x4)
        f[1] = (0.153 - 0.322 * x1 + 0.396 * x2 + 0.424 * x3 + 0.0226 * x4
                + 0.175 * x1 * x1 + 0.0185 * x1 * x2 - 0.0701 * x2 * x2
                - 0.251 * x1 * x3 + 0.179 * x2 * x3 + 0.015 * x3 * x3
                + 0.0134 * x1 * x4 + 0.0296 * x2 * x4 + 0.0752 * x3 * x4
                + 0.0192 * x4 * x4)
        f[2] = (0.37 - 0.205 * x1 + 0.0307 * x2 + 0.108 * x3 + 1.019 * x4
                - 0.135 * x1 * x1 + 0.0141 * x1 * x2 + 0.0998 * x2 * x2
                + 0.208 * x1 * x3 - 0.0301 * x2 * x3 - 0.226 * x3 * x3
                + 0.353 * x1 * x4 - 0.0497 * x3 * x4 - 0.423 * x4 * x4
                + 0.202 * x1 * x1 * x2 - 0.281 * x1 * x1 * x3
                - 0.342 * x1 * x2 * x2 - 0.245 * x2 * x2 * x3
                + 0.281 * x2 * x3 * x3 - 0.184 * x1 * x4 * x4
                - 0.281 * x1 * x2 * x3)
    else:
        raise ValueError(f"unknown built-in problem id {pid}")
    return 0


def evaluate(int pid, double[::1] x, double[::1] out):
    """Evaluate built-in problem ``pid`` at ``x`` into ``out``."""
    _eval(pid, x, out)


def evaluate_batch(int pid, double[:, ::1] X, Py_ssize_t m):
    cdef Py_ssize_t k
    F = np.empty((X.shape[0], m))
    cdef double[:, ::1] Fv = F
    for k in range(X.shape[0]):
        _eval(pid, X[k], Fv[k])
    return F


cdef double _scalar(int mode, double[::1] f, double[::1] a, double[::1] r,
                    double[::1] zs, double[::1] zn, double theta, double rho,
                    double p, double beta) nogil:
    cdef Py_ssize_t m = f.shape[0]
    cdef Py_ssize_t i
    cdef double v, best, lo, d, s, nw, d1, d2
    if mode == M_PSNORM:
        best = -INFINITY
        for i in range(m):
            d = zn[i] - zs[i]
            if d < NORM_EPS:
                d = NORM_EPS
            v = ((f[i] - zs[i]) / d - a[i]) / r[i]
            if v > best:
                best = v
        return best
    if mode == M_PS:
        best = -INFINITY
        for i in range(m):
            v = (f[i] - a[i]) / r[i]
            if v > best:
                best = v
        return best
    if mode == M_WS:
        s = 0.0
        for i in range(m):
            s += a[i] * f[i]
        return s
    if mode == M_TCH:
        best = -INFINITY
        for i in range(m):
            v = a[i] * (f[i] - zs[i])
            if v > best:
                best = v
        return best
    if mode == M_MTCH or mode == M_PTCH:
        best = -INFINITY
        for i in range(m):
            v = (f[i] - zs[i]) / a[i]
            if v > best:
                best = v
        return best
    if mode == M_ATCH:
        best = -INFINITY
        s = 0.0
        for i in range(m):
            d = fabs(f[i] - zs[i])
            v = a[i] * d
            if v > best:
                best = v
            s += d
        return best + rho * s
    if mode == M_RTCH:
        lo = INFINITY
        for i in range(m):
            v = a[i] * (zn[i] - f[i])
            if v < lo:
                lo = v
        return -lo
    if mode == M_PBI:
        s = 0.0
        nw = 0.0
        for i in range(m):
            s += (f[i] - zs[i]) * a[i]
            nw += a[i] * a[i]
        d1 = fabs(s) / sqrt(nw)
        s = 0.0
        for i in range(m):
            d = f[i] - (zs[i] + d1 * a[i])
            s += d * d
        d2 = sqrt(s)
        return d1 + theta * d2
    if mode == M_LP:
        if isinf(p):
            best = -INFINITY
            for i in range(m):
                v = fabs(f[i] - zs[i]) / a[i]
                if v > best:
                    best = v
            return best
        s = 0.0
        for i in range(m):
            v = fabs(f[i] - zs[i]) / a[i]
            if p == 1.0:
                s += v
            else:
                s += pow(v, p)
        if p == 1.0:
            return s
        return pow(s, 1.0 / p)
    if mode == M_MSF:
        best = -INFINITY
        lo = INFINITY
        for i in range(m):
            v = (f[i] - zs[i]) / a[i]
            if v > best:
                best = v
            if v < lo:
                lo = v
        if beta == 0.0:
            return best
        if lo <= 0.0:
            return INFINITY
        return pow(best, 1.0 + beta) / pow(lo, beta)
    return INFINITY


def scalarize(int mode, double[::1] f, double[::1] a, double[::1] r,
              double[::1] zs, double[::1] zn, double theta=5.0, double rho=0.01,
              double p=2.0, double beta=1.0):
    return _scalar(mode, f, a, r, zs, zn, theta, rho, p, beta)


cdef bint _weakly_dominated(double[:, ::1] F, double[::1] f, double[::1] zs,
                            double[::1] zn) nogil:
    # member i weakly dominates f up to the scalarizer's resolution per axis
    cdef Py_ssize_t i, j
    cdef bint dom
    cdef double span
    for i in range(F.shape[0]):
        dom = True
        for j in range(F.shape[1]):
            span = zn[j] - zs[j]
            if span < NORM_EPS:
                span = NORM_EPS
            if F[i, j] > f[j] + NORM_EPS * span:
                dom = False
                break
        if dom:
            return True
    return False


cdef void _nadir(double[:, ::1] F, double[::1] zn) nogil:
    cdef Py_ssize_t N = F.shape[0]
    cdef Py_ssize_t m = F.shape[1]
    cdef Py_ssize_t i, j
    for j in range(m):
        zn[j] = F[0, j]
    for i in range(1, N):
        for j in range(m):
            if F[i, j] > zn[j]:
                zn[j] = F[i, j]


def run_generation(double[:, ::1] X, double[:, ::1] F, double[:, ::1] A,
                   Py_ssize_t[:, ::1] B, double[::1] zs, double[::1] zn,
                   double[::1] lower, double[::1] upper,
                   double[::1] u_pool, double[:, ::1] u_par, double[:, ::1] u_cr,
                   double[:, ::1] u_pm, double[:, ::1] u_sig, double[::1] u_rep,
                   double delta, int nrep, double SF, double CR, double pm,
                   double eta, int mode, double[::1] r, double theta, double rho,
                   double p, double beta, int pid, object evaluator,
                   Py_ssize_t[::1] rep_count, int nadir_rule=0):
    """One generation of the steady-state loop, in place.

    Comparisons normalize with the population nadir ``zn`` (``nadir_rule``
    0), the nadir of the population together with ``y`` (1), or the latter
    only when no member weakly dominates ``y`` (2).

    Offspring ``i`` uses pool ``B[i]`` when ``u_pool[i] <= delta`` and the
    whole population otherwise. It consumes ``len(pool)`` entries of
    ``u_rep`` for the random replacement order.
    """
    cdef Py_ssize_t N = X.shape[0]
    cdef Py_ssize_t n = X.shape[1]
    cdef Py_ssize_t m = F.shape[1]
    cdef Py_ssize_t T = B.shape[1]
    cdef Py_ssize_t i, k, s, k1, k2, v1, v2, j, idx, tmp, off = 0
    cdef int c
    cdef double u, sigma, expo = 1.0 / (1.0 + eta)
    y_arr = np.empty(n)
    fy_arr = np.empty(m)
    perm_arr = np.empty(N, dtype=np.intp)
    cdef double[::1] y = y_arr
    cdef double[::1] fy = fy_arr
    cdef Py_ssize_t[::1] perm = perm_arr
    zc_arr = np.empty(m)
    cdef double[::1] zc = zc_arr

    _nadir(F, zn)
    for i in range(N):
        if u_pool[i] <= delta:
            s = T
            for k in range(T):
                perm[k] = B[i, k]
        else:
            s = N
            for k in range(N):
                perm[k] = k
        k1 = <Py_ssize_t>(u_par[i, 0] * s)
        if k1 >= s:
            k1 = s - 1
        k2 = <Py_ssize_t>(u_par[i, 1] * (s - 1))
        if k2 >= s - 1:
            k2 = s - 2
        if k2 >= k1:
            k2 += 1
        v1 = perm[k1]
        v2 = perm[k2]

        for k in range(n):
            if u_cr[i, k] < CR:
                y[k] = X[i, k] + SF * (X[v1, k] - X[v2, k])
            else:
                y[k] = X[i, k]
            if u_pm[i, k] < pm:
                u = u_sig[i, k]
                if u < 0.5:
                    sigma = pow(2.0 * u, expo) - 1.0
                else:
                    sigma = 1.0 - pow(2.0 - 2.0 * u, expo)
                y[k] = y[k] + sigma * (upper[k] - lower[k])
            if y[k] < lower[k]:
                y[k] = lower[k]
            elif y[k] > upper[k]:
                y[k] = upper[k]

        if pid >= 0:
            _eval(pid, y, fy)
        else:
            out = np.asarray(evaluator(np.array(y_arr)), dtype=float)
            for k in range(m):
                fy[k] = out[k]

        for k in range(m):
            if fy[k] < zs[k]:
                zs[k] = fy[k]
            zc[k] = zn[k]
        if nadir_rule == 1 or (nadir_rule == 2 and not _weakly_dominated(F, fy, zs, zn)):
            for k in range(m):
                if fy[k] > zc[k]:
                    zc[k] = fy[k]

        c = 0
        for k in range(s):
            if c >= nrep:
                break
            j = k + <Py_ssize_t>(u_rep[off + k] * (s - k))
            if j >= s:
                j = s - 1
            tmp = perm[k]
            perm[k] = perm[j]
            perm[j] = tmp
            idx = perm[k]
            if (_scalar(mode, fy, A[idx], r, zs, zc, theta, rho, p, beta)
                    <= _scalar(mode, F[idx], A[idx], r, zs, zc, theta, rho, p, beta)):
                X[idx, :] = y
                F[idx, :] = fy
                c += 1
        off += s
        rep_count[i] = c
        if c > 0:
            _nadir(F, zn)
    return off


cdef void _staircase3(double[:, ::1] P, Py_ssize_t[::1] order, unsigned char[::1] mask):
    # sweep in lexicographic order keeping the (f2, f3) staircase of accepted points:
    # keys ascending, values strictly decreasing
    cdef Py_ssize_t n = P.shape[0]
    cdef Py_ssize_t k, a, lo, hi, mid, i, j, cnt = 0, d
    cdef double p2, p3
    key_arr = np.empty(n)
    val_arr = np.empty(n)
    cdef double[::1] K = key_arr
    cdef double[::1] V = val_arr
    for k in range(n):
        a = order[k]
        p2 = P[a, 1]
        p3 = P[a, 2]
        # first index with K > p2
        lo = 0
        hi = cnt
        while lo < hi:
            mid = (lo + hi) // 2
            if K[mid] <= p2:
                lo = mid + 1
            else:
                hi = mid
        if lo > 0 and V[lo - 1] <= p3:
            continue
        mask[a] = 1
        # first index with K >= p2
        i = lo
        while i > 0 and K[i - 1] == p2:
            i -= 1
        j = i
        while j < cnt and V[j] >= p3:
            j += 1
        d = j - i
        if d == 0:
            for mid in range(cnt, i, -1):
                K[mid] = K[mid - 1]
                V[mid] = V[mid - 1]
            cnt += 1
        elif d > 1:
            for mid in range(j, cnt):
                K[mid - d + 1] = K[mid]
                V[mid - d + 1] = V[mid]
            cnt -= d - 1
        K[i] = p2
        V[i] = p3


def nondominated_mask(double[:, ::1] P):
    """Mask of nondominated rows; equal rows keep their first occurrence."""
    cdef Py_ssize_t n = P.shape[0]
    cdef Py_ssize_t m = P.shape[1]
    cdef Py_ssize_t a, b, k, j, q, na = 0, last = -1
    cdef double best
    cdef bint dom
    keys = tuple(np.asarray(P)[:, j] for j in range(m - 1, -1, -1))
    order_arr = np.lexsort(keys).astype(np.intp)
    cdef Py_ssize_t[::1] order = order_arr
    mask_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] mask = mask_arr
    arch_arr = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] arch = arch_arr
    if n == 0:
        return mask_arr.astype(bool)
    if m == 2:
        best = INFINITY
        for k in range(n):
            a = order[k]
            if P[a, 1] < best:
                mask[a] = 1
                best = P[a, 1]
        return mask_arr.astype(bool)
    if m == 3:
        _staircase3(P, order, mask)
        return mask_arr.astype(bool)
    for k in range(n):
        a = order[k]
        dom = False
        if last >= 0:
            dom = True
            for j in range(m):
                if P[last, j] > P[a, j]:
                    dom = False
                    break
        if not dom:
            for q in range(na):
                b = arch[q]
                dom = True
                for j in range(m):
                    if P[b, j] > P[a, j]:
                        dom = False
                        break
                if dom:
                    last = b
                    break
        if not dom:
            arch[na] = a
            na += 1
            mask[a] = 1
    return mask_arr.astype(bool)


def farthest_point_indices(double[:, ::1] P, Py_ssize_t count, Py_ssize_t start):
    """Greedy farthest-point selection order starting at row ``start``."""
    cdef Py_ssize_t n = P.shape[0]
    cdef Py_ssize_t m = P.shape[1]
    cdef Py_ssize_t i, j, k, t_idx, nxt = start
    cdef double s, t, best
    d_arr = np.full(n, INFINITY)
    cdef double[::1] d = d_arr
    out_arr = np.empty(count, dtype=np.intp)
    cdef Py_ssize_t[::1] out = out_arr
    for k in range(count):
        out[k] = nxt
        best = -1.0
        j = nxt
        for i in range(n):
            s = 0.0
            for t_idx in range(m):
                t = P[i, t_idx] - P[j, t_idx]
                s += t * t
            if s < d[i]:
                d[i] = s
            if d[i] > best:
                best = d[i]
                nxt = i
    return out_arr
