"""Bessel functions of order 0 and 1 and Ferrers-Legendre functions.

Bessel values use Miller's backward recurrence (with Neumann series for the
second kind) below ``x = 25`` and Hankel's asymptotic expansion above it.
Legendre values on the cut use the three-term recurrence for integer
degree and the hypergeometric expansion about ``x = 1`` otherwise.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import digamma

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061
_ASYMPTOTIC_CUT = 25.0


def _miller(x):
    """J0, J1, Y0, Y1 for a 1-d array of 0 < x <= ~25."""
    n = 2 * int(math.ceil((1.5 * float(np.max(x)) + 25.0) / 2.0))
    j_next = np.zeros_like(x)          # J_{k+1}
    j_cur = np.full_like(x, 1e-30)     # J_k, starting at k = n
    norm = np.zeros_like(x)            # 2 * sum_{m>=1} J_{2m}
    y0_sum = np.zeros_like(x)          # sum_{m>=1} (-1)^m J_{2m} / m
    y1_sum = np.zeros_like(x)          # sum_{m>=1} (-1)^m (J_{2m-1} - J_{2m+1}) / m
    j1 = None
    for k in range(n, 0, -1):
        if k % 2 == 0:
            m = k // 2
            norm += 2.0 * j_cur
            y0_sum += (-1) ** m * j_cur / m
        else:
            m_up = (k + 1) // 2
            coef = (-1) ** m_up / m_up
            m_dn = (k - 1) // 2
            if m_dn >= 1:
                coef -= (-1) ** m_dn / m_dn
            y1_sum += coef * j_cur
        if k == 1:
            j1 = j_cur.copy()
        j_prev = (2.0 * k / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        big = np.abs(j_cur) > 1e250
        if np.any(big):
            scale = np.where(big, 1e-250, 1.0)
            j_next *= scale
            j_cur *= scale
            norm *= scale
            y0_sum *= scale
            y1_sum *= scale
            if j1 is not None:
                j1 *= scale
    j0 = j_cur
    total = j0 + norm
    j0 = j0 / total
    j1 = j1 / total
    y0_sum = y0_sum / total
    y1_sum = y1_sum / total
    lg = np.log(x / 2.0) + EULER_GAMMA
    y0 = (2.0 / math.pi) * (lg * j0 - 2.0 * y0_sum)
    y1 = (2.0 / math.pi) * (lg * j1 - j0 / x + y1_sum)
    return j0, j1, y0, y1


def _hankel_pq(nu, x, terms=30):
    mu = 4.0 * nu * nu
    p = np.ones_like(x)
    q = np.zeros_like(x)
    a = np.ones_like(x)
    for k in range(1, terms + 1):
        a = a * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        if k % 2 == 0:
            p += (-1) ** (k // 2) * a
        else:
            q += (-1) ** ((k - 1) // 2) * a
    return p, q


def _asymptotic(x):
    amp = np.sqrt(2.0 / (math.pi * x))
    cx, sx = np.cos(x), np.sin(x)
    r = 1.0 / math.sqrt(2.0)
    # chi0 = x - pi/4, chi1 = x - 3 pi/4, expanded to avoid rounding in x - const
    c0, s0 = r * (cx + sx), r * (sx - cx)
    c1, s1 = r * (sx - cx), -r * (sx + cx)
    p0, q0 = _hankel_pq(0.0, x)
    p1, q1 = _hankel_pq(1.0, x)
    j0 = amp * (p0 * c0 - q0 * s0)
    y0 = amp * (p0 * s0 + q0 * c0)
    j1 = amp * (p1 * c1 - q1 * s1)
    y1 = amp * (p1 * s1 + q1 * c1)
    return j0, j1, y0, y1


def bessel_j0y0(x):
    """Return ``(J0, Y0, J1, Y1)`` at ``x > 0`` (scalar or array).

    Raises
    ------
    DomainError
        For ``x <= 0``, where Y0 and Y1 are singular.
    """
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(xa > 0)) or np.any(~np.isfinite(xa)):
        raise DomainError("Bessel functions of the second kind need finite x > 0")
    out = [np.empty_like(xa) for _ in range(4)]
    small = xa < _ASYMPTOTIC_CUT
    for mask, fn in ((small, _miller), (~small, _asymptotic)):
        if np.any(mask):
            j0, j1, y0, y1 = fn(xa[mask])
            out[0][mask], out[1][mask], out[2][mask], out[3][mask] = j0, y0, j1, y1
    if scalar:
        return tuple(float(o[0]) for o in out)
    return tuple(out)


def hankel_phase(x):
    """Continuous argument of J0(x) + i Y0(x), increasing from -pi/2 at 0+."""
    j0, y0, _, _ = bessel_j0y0(x)
    raw = np.arctan2(y0, j0)
    xa = np.asarray(x, dtype=float)
    approx = xa - math.pi / 4 + 1.0 / (8.0 * np.maximum(xa, 1e-300))
    k = np.where(xa > 2.0, np.round((approx - raw) / (2 * math.pi)), 0.0)
    return raw + 2 * math.pi * k


# --------------------------------------------------------------------------
# Ferrers functions of the first and second kind on (-1, 1)


def _check_cut(x):
    xa = np.asarray(x, dtype=float)
    if np.any(~(np.abs(xa) < 1.0)):
        raise DomainError("Ferrers functions are evaluated on the open cut -1 < x < 1")
    return xa


def legendre_pq_all(nmax, x):
    """P_n(x), Q_n(x) for n = 0..nmax by forward recurrence.

    Returns arrays of shape ``(nmax + 1,) + shape(x)``.
    """
    xa = _check_cut(x)
    p = np.empty((nmax + 1,) + xa.shape)
    q = np.empty_like(p)
    p[0] = 1.0
    q[0] = np.arctanh(xa)
    if nmax >= 1:
        p[1] = xa
        q[1] = xa * q[0] - 1.0
    for n in range(1, nmax):
        p[n + 1] = ((2 * n + 1) * xa * p[n] - n * p[n - 1]) / (n + 1)
        q[n + 1] = ((2 * n + 1) * xa * q[n] - n * q[n - 1]) / (n + 1)
    return p, q


def _pq_integer(n, xa):
    p_prev, q_prev = np.ones_like(xa), np.arctanh(xa)
    if n == 0:
        return p_prev, q_prev
    p_cur, q_cur = xa.copy(), xa * q_prev - 1.0
    for k in range(1, n):
        p_prev, p_cur = p_cur, ((2 * k + 1) * xa * p_cur - k * p_prev) / (k + 1)
        q_prev, q_cur = q_cur, ((2 * k + 1) * xa * q_cur - k * q_prev) / (k + 1)
    return p_cur, q_cur


def _pq_series(nu, xa, max_terms=4000):
    """Hypergeometric expansion about x = 1, valid for x > -1 (used for x >= -0.6)."""
    z = (1.0 - xa) / 2.0
    a, b = -nu, nu + 1.0
    term = np.ones_like(xa)
    f = np.ones_like(xa)
    s = np.zeros_like(xa)
    h = 0.0
    for k in range(max_terms):
        # term_k -> term_{k+1}
        h += 1.0 / (a + k) + 1.0 / (b + k) - 2.0 / (1.0 + k)
        term = term * (a + k) * (b + k) / ((k + 1.0) ** 2) * z
        f += term
        s += term * h
        if k > 5 and np.all(np.abs(term) * (1.0 + abs(h)) < 1e-17 * np.maximum(1.0, np.abs(f))):
            break
    p = f
    q = -0.5 * (f * np.log(z) + s) - (EULER_GAMMA + digamma(nu + 1.0)) * f
    return p, q


def legendre_pq(degree, x):
    """Ferrers functions ``(P_nu(x), Q_nu(x))`` of real degree ``nu >= 0``.

    Integer degrees (within 1e-9) use the exact recurrence from ``P_0 = 1``,
    ``Q_0 = artanh x``.  Other degrees use the hypergeometric expansion about
    ``x = 1`` together with the reflection ``x -> -x`` for ``x < -0.6``.
    """
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(_check_cut(x)).astype(float)
    nu = float(degree)
    if nu < 0:
        raise DomainError("degree must be non-negative")
    n = round(nu)
    if abs(nu - n) < 1e-9:
        p, q = _pq_integer(int(n), xa)
    else:
        p = np.empty_like(xa)
        q = np.empty_like(xa)
        right = xa >= -0.6
        if np.any(right):
            p[right], q[right] = _pq_series(nu, xa[right])
        if np.any(~right):
            pr, qr = _pq_series(nu, -xa[~right])
            cn, sn = math.cos(nu * math.pi), math.sin(nu * math.pi)
            p[~right] = cn * pr - (2.0 / math.pi) * sn * qr
            q[~right] = -cn * qr - 0.5 * math.pi * sn * pr
    if scalar:
        return float(p[0]), float(q[0])
    return p, q
