"""Pure-Python fallback for the compiled kernels.

Every routine mirrors ``_kernels.pyx`` operation for operation (sequential
sums, ``t * t`` rather than powers) so both backends agree bitwise.
"""

from __future__ import annotations

import bisect
import math

import numpy as np

NORM_EPS = 1e-12

PROBLEM_IDS = {
    "zdt1": 0,
    "zdt3": 1,
    "mzdt1": 2,
    "glt1": 3,
    "glt3": 4,
    "sch1": 5,
    "f1": 6,
    "dtlz1": 7,
    "dtlz2": 8,
    "dtlz5": 9,
    "dtlz7": 10,
    "idtlz1": 11,
    "idtlz2": 12,
    "vnt2": 13,
    "f2": 14,
    "hc": 15,
    "ri": 16,
}

MODES = {
    "PSnorm": 0,
    "WS": 1,
    "TCH": 2,
    "PBI": 3,
    "aTCH": 4,
    "mTCH": 5,
    "rTCH": 6,
    "Lp": 7,
    "MSF": 8,
    "pTCH": 9,
    "PS": 10,
}

MZDT1_M = 0.5
_PI = math.pi


def _sgn(v: float) -> float:
    if v > 0:
        return 1.0
    if v < 0:
        return -1.0
    return 0.0


def _eval(pid: int, x: list[float]) -> list[float]:
    n = len(x)
    sin, cos = math.sin, math.cos
    if pid in (0, 1, 2):
        s = 0.0
        for i in range(1, n):
            s += x[i]
        g = 1.0 + 9.0 * s / (n - 1)
        t = x[0] / g
        if pid == 0:
            h = 1.0 - math.sqrt(t)
        elif pid == 1:
            h = 1.0 - math.sqrt(t) - t * sin(10.0 * _PI * x[0])
        else:
            h = 1.0 - math.pow(t, 1.0 / MZDT1_M)
        return [x[0], g * h]
    if pid in (3, 4):
        g = 0.0
        a = sin(2.0 * _PI * x[0])
        for i in range(1, n):
            t = x[i] - a
            g += t * t
        f1 = (1.0 + g) * x[0]
        if pid == 3:
            f2 = (1.0 + g) * (2.0 - x[0] - _sgn(cos(2.0 * _PI * x[0])))
        elif x[0] <= 0.05:
            f2 = (1.0 + g) * (1.0 - 19.0 * x[0])
        else:
            f2 = (1.0 + g) * (1.0 / 19.0 - x[0] / 19.0)
        return [f1, f2]
    if pid == 5:
        t = x[0] - 2.0
        return [x[0] * x[0], t * t]
    if pid == 6:
        s = 0.0
        for i in range(1, n):
            s += x[i]
        g = 1.0 + 9.0 * s / (n - 1)
        return [g * (1.0 - 1.0 / (1.0 + math.exp(-10.0 * x[0]))), x[0]]
    if pid in (7, 11):
        s = 0.0
        for i in range(2, n):
            t = x[i] - 0.5
            s += t * t - cos(20.0 * _PI * t)
        g = 100.0 * ((n - 2) + s)
        f = [
            0.5 * x[0] * x[1] * (1.0 + g),
            0.5 * x[0] * (1.0 - x[1]) * (1.0 + g),
            0.5 * (1.0 - x[0]) * (1.0 + g),
        ]
        if pid == 11:
            f = [0.5 * (1.0 + g) - v for v in f]
        return f
    if pid in (8, 9, 12):
        g = 0.0
        for i in range(2, n):
            t = x[i] - 0.5
            g += t * t
        a = 0.5 * _PI * x[0]
        if pid == 9:
            b = _PI / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * x[1])
        else:
            b = 0.5 * _PI * x[1]
        f = [(1.0 + g) * cos(a) * cos(b), (1.0 + g) * cos(a) * sin(b), (1.0 + g) * sin(a)]
        if pid == 12:
            f = [(1.0 + g) - v for v in f]
        return f
    if pid == 10:
        s = 0.0
        for i in range(2, n):
            s += x[i]
        g = 1.0 + 9.0 * s / (n - 2)
        h = 3.0
        for i in range(2):
            h -= x[i] / (1.0 + g) * (1.0 + sin(3.0 * _PI * x[i]))
        return [x[0], x[1], (1.0 + g) * h]
    if pid == 13:
        x1, x2 = x[0], x[1]
        a = x1 - 2.0
        b = x2 + 1.0
        f1 = a * a / 2.0 + b * b / 13.0 + 3.0
        a = x1 + x2 - 3.0
        b = -x1 + x2 + 2.0
        f2 = a * a / 36.0 + b * b / 8.0 - 17.0
        a = x1 + 2.0 * x2 - 1.0
        b = 2.0 * x2 - x1
        f3 = a * a / 175.0 + b * b / 17.0 - 13.0
        return [f1, f2, f3]
    if pid == 14:
        g = 0.0
        for i in range(2, n):
            t = x[i] - 0.5
            g += t * t
        a = 0.5 * _PI * x[0]
        b = 0.5 * _PI * x[1]
        out = []
        for c in (cos(a) * cos(b), cos(a) * sin(b), sin(b)):
            t = (1.0 + g) - (1.0 + g) * c
            out.append(math.pow(t if t > 0.0 else 0.0, 1.8))
        return out
    if pid == 15:
        x1, x2 = x[0], x[1]
        E = 700000.0
        rb = 4500.0 / (x1 * x2)
        tau = 1800.0 / x2
        th = 562000.0 / (E * x1 * x2 * x2)
        rk = E * x1 * x1 / 100.0
        s = 0.0
        for t in (1.0 - rb / 700.0, 1.0 - tau / 450.0, 1.0 - th / 1.5, 1.0 - rb / rk):
            if t < 0.0:
                s -= t
        return [x1 + 120.0 * x2, s]
    if pid == 16:
        x1, x2, x3, x4 = x[0], x[1], x[2], x[3]
        f1 = (0.692 + 0.477 * x1 - 0.687 * x2 - 0.08 * x3 - 0.065 * x4
              - 0.167 * x1 * x1 - 0.0129 * x1 * x2 + 0.0796 * x2 * x2
              - 0.0634 * x1 * x3 - 0.0257 * x2 * x3 + 0.0877 * x3 * x3
              - 0.0521 * x1 * x4 + 0.00156 * x2 * x4 + 0.00198 * x3 * x4
              + 0.0184 * x4 * x4)
        f2 = (0.153 - 0.322 * x1 + 0.396 * x2 + 0.424 * x3 + 0.0226 * x4
              + 0.175 * x1 * x1 + 0.0185 * x1 * x2 - 0.0701 * x2 * x2
              - 0.251 * x1 * x3 + 0.179 * x2 * x3 + 0.015 * x3 * x3
              + 0.0134 * x1 * x4 + 0.0296 * x2 * x4 + 0.0752 * x3 * x4
              + 0.0192 * x4 * x4)
        f3 = (0.37 - 0.205 * x1 + 0.0307 * x2 + 0.108 * x3 + 1.019 * x4
              - 0.135 * x1 * x1 + 0.0141 * x1 * x2 + 0.0998 * x2 * x2
              + 0.208 * x1 * x3 - 0.0301 * x2 * x3 - 0.226 * x3 * x3
              + 0.353 * x1 * x4 - 0.0497 * x3 * x4 - 0.423 * x4 * x4
              + 0.202 * x1 * x1 * x2 - 0.281 * x1 * x1 * x3
              - 0.342 * x1 * x2 * x2 - 0.245 * x2 * x2 * x3
              + 0.281 * x2 * x3 * x3 - 0.184 * x1 * x4 * x4
              - 0.281 * x1 * x2 * x3)
        return [f1, f2, f3]
    raise ValueError(f"unknown built-in problem id {pid}")


def evaluate(pid: int, x, out) -> None:
    out[:] = _eval(pid, np.asarray(x, dtype=float).tolist())


def evaluate_batch(pid: int, X, m: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return np.array([_eval(pid, row) for row in X.tolist()], dtype=float).reshape(len(X), m)


def _scalar(mode, f, a, r, zs, zn, theta, rho, p, beta) -> float:
    m = len(f)
    if mode == 0:
        best = -math.inf
        for i in range(m):
            d = zn[i] - zs[i]
            if d < NORM_EPS:
                d = NORM_EPS
            v = ((f[i] - zs[i]) / d - a[i]) / r[i]
            if v > best:
                best = v
        return best
    if mode == 10:
        best = -math.inf
        for i in range(m):
            v = (f[i] - a[i]) / r[i]
            if v > best:
                best = v
        return best
    if mode == 1:
        s = 0.0
        for i in range(m):
            s += a[i] * f[i]
        return s
    if mode == 2:
        best = -math.inf
        for i in range(m):
            v = a[i] * (f[i] - zs[i])
            if v > best:
                best = v
        return best
    if mode in (5, 9):
        best = -math.inf
        for i in range(m):
            v = (f[i] - zs[i]) / a[i]
            if v > best:
                best = v
        return best
    if mode == 4:
        best = -math.inf
        s = 0.0
        for i in range(m):
            d = abs(f[i] - zs[i])
            v = a[i] * d
            if v > best:
                best = v
            s += d
        return best + rho * s
    if mode == 6:
        lo = math.inf
        for i in range(m):
            v = a[i] * (zn[i] - f[i])
            if v < lo:
                lo = v
        return -lo
    if mode == 3:
        s = 0.0
        nw = 0.0
        for i in range(m):
            s += (f[i] - zs[i]) * a[i]
            nw += a[i] * a[i]
        d1 = abs(s) / math.sqrt(nw)
        s = 0.0
        for i in range(m):
            d = f[i] - (zs[i] + d1 * a[i])
            s += d * d
        return d1 + theta * math.sqrt(s)
    if mode == 7:
        if math.isinf(p):
            best = -math.inf
            for i in range(m):
                v = abs(f[i] - zs[i]) / a[i]
                if v > best:
                    best = v
            return best
        s = 0.0
        for i in range(m):
            v = abs(f[i] - zs[i]) / a[i]
            s += v if p == 1.0 else math.pow(v, p)
        return s if p == 1.0 else math.pow(s, 1.0 / p)
    if mode == 8:
        best = -math.inf
        lo = math.inf
        for i in range(m):
            v = (f[i] - zs[i]) / a[i]
            if v > best:
                best = v
            if v < lo:
                lo = v
        if beta == 0.0:
            return best
        if lo <= 0.0:
            return math.inf
        return math.pow(best, 1.0 + beta) / math.pow(lo, beta)
    return math.inf


def scalarize(mode, f, a, r, zs, zn, theta=5.0, rho=0.01, p=2.0, beta=1.0) -> float:
    tl = lambda v: np.asarray(v, dtype=float).tolist()  # noqa: E731
    return _scalar(mode, tl(f), tl(a), tl(r), tl(zs), tl(zn), theta, rho, p, beta)


def _weakly_dominated(F: list[list[float]], f: list[float], zs: list[float],
                      zn: list[float]) -> bool:
    # member weakly dominates f up to the scalarizer's resolution per axis
    tol = [NORM_EPS * max(b - a, NORM_EPS) for a, b in zip(zs, zn)]
    for row in F:
        if all(a <= b + t for a, b, t in zip(row, f, tol)):
            return True
    return False


def _nadir(F: list[list[float]], zn: list[float]) -> None:
    zn[:] = F[0]
    for row in F[1:]:
        for j, v in enumerate(row):
            if v > zn[j]:
                zn[j] = v


def run_generation(X, F, A, B, zs, zn, lower, upper, u_pool, u_par, u_cr, u_pm, u_sig,
                   u_rep, delta, nrep, SF, CR, pm, eta, mode, r, theta, rho, p, beta,
                   pid, evaluator, rep_count, nadir_rule=0) -> int:
    """Same contract as the compiled ``run_generation``; arrays updated in place."""
    Xl, Fl, Al, Bl = X.tolist(), F.tolist(), A.tolist(), B.tolist()
    zsl, znl = zs.tolist(), zn.tolist()
    lo, up, rl = lower.tolist(), upper.tolist(), r.tolist()
    upool, upar = u_pool.tolist(), u_par.tolist()
    ucr, upm, usig, urep = u_cr.tolist(), u_pm.tolist(), u_sig.tolist(), u_rep.tolist()
    N, n = len(Xl), len(lo)
    T = len(Bl[0])
    expo = 1.0 / (1.0 + eta)
    off = 0

    _nadir(Fl, znl)
    for i in range(N):
        perm = list(Bl[i]) if upool[i] <= delta else list(range(N))
        s = T if upool[i] <= delta else N
        k1 = int(upar[i][0] * s)
        if k1 >= s:
            k1 = s - 1
        k2 = int(upar[i][1] * (s - 1))
        if k2 >= s - 1:
            k2 = s - 2
        if k2 >= k1:
            k2 += 1
        xi, xv1, xv2 = Xl[i], Xl[perm[k1]], Xl[perm[k2]]

        y = [0.0] * n
        for k in range(n):
            if ucr[i][k] < CR:
                yk = xi[k] + SF * (xv1[k] - xv2[k])
            else:
                yk = xi[k]
            if upm[i][k] < pm:
                u = usig[i][k]
                if u < 0.5:
                    sigma = math.pow(2.0 * u, expo) - 1.0
                else:
                    sigma = 1.0 - math.pow(2.0 - 2.0 * u, expo)
                yk = yk + sigma * (up[k] - lo[k])
            if yk < lo[k]:
                yk = lo[k]
            elif yk > up[k]:
                yk = up[k]
            y[k] = yk

        if pid >= 0:
            fy = _eval(pid, y)
        else:
            fy = np.asarray(evaluator(np.array(y)), dtype=float).tolist()

        zc = [0.0] * len(fy)
        for k in range(len(fy)):
            if fy[k] < zsl[k]:
                zsl[k] = fy[k]
            zc[k] = znl[k]
        if nadir_rule == 1 or (nadir_rule == 2 and not _weakly_dominated(Fl, fy, zsl, znl)):
            for k in range(len(fy)):
                if fy[k] > zc[k]:
                    zc[k] = fy[k]

        c = 0
        for k in range(s):
            if c >= nrep:
                break
            j = k + int(urep[off + k] * (s - k))
            if j >= s:
                j = s - 1
            perm[k], perm[j] = perm[j], perm[k]
            idx = perm[k]
            a = Al[idx]
            if (_scalar(mode, fy, a, rl, zsl, zc, theta, rho, p, beta)
                    <= _scalar(mode, Fl[idx], a, rl, zsl, zc, theta, rho, p, beta)):
                Xl[idx] = list(y)
                Fl[idx] = list(fy)
                c += 1
        off += s
        rep_count[i] = c
        if c > 0:
            _nadir(Fl, znl)

    X[:] = Xl
    F[:] = Fl
    zs[:] = zsl
    zn[:] = znl
    return off


def _staircase3(P, order, mask) -> None:
    K: list[float] = []
    V: list[float] = []
    for a in order.tolist():
        p2, p3 = float(P[a, 1]), float(P[a, 2])
        lo = bisect.bisect_right(K, p2)
        if lo > 0 and V[lo - 1] <= p3:
            continue
        mask[a] = True
        i = bisect.bisect_left(K, p2)
        j = i
        while j < len(K) and V[j] >= p3:
            j += 1
        K[i:j] = [p2]
        V[i:j] = [p3]


def nondominated_mask(P) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    n, m = P.shape
    mask = np.zeros(n, dtype=bool)
    if n == 0:
        return mask
    order = np.lexsort(tuple(P[:, j] for j in range(m - 1, -1, -1)))
    if m == 2:
        best = math.inf
        for a in order.tolist():
            if P[a, 1] < best:
                mask[a] = True
                best = P[a, 1]
        return mask
    if m == 3:
        _staircase3(P, order, mask)
        return mask
    arch = np.empty((0, m))
    for a in order.tolist():
        if len(arch) and np.any(np.all(arch <= P[a], axis=1)):
            continue
        arch = np.vstack([arch, P[a]])
        mask[a] = True
    return mask


def farthest_point_indices(P, count: int, start: int) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    out = np.empty(count, dtype=np.intp)
    d = np.full(len(P), np.inf)
    nxt = start
    for k in range(count):
        out[k] = nxt
        d = np.minimum(d, ((P - P[nxt]) ** 2).sum(axis=1))
        nxt = int(np.argmax(d))
    return out
