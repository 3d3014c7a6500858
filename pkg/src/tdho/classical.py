"""Fundamental solutions c(t, t0), s(t, t0) of u'' + kappa(t) u = 0.

``c`` and ``s`` have Cauchy data (1, 0) and (0, 1) at ``t0``.  Together with
their time derivatives they form the unimodular matrix

    [[c, s], [c_dot, s_dot]]

that maps initial position/momentum to their values at ``t``.  Besides the
numbers themselves the module tracks zero counts (the Maslov-type index used
to continue s**(-1/2) and c**(-1/2) through their zeros).
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import (CausticError, ContractError, DegenerateZeroWarning,
                     NumericError, SingularityError)
from .profiles import FrequencyProfile

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class FundamentalPair:
    """Values of (c, s, c_dot, s_dot) at ``(t, t0)``.

    ``index_s`` and ``index_c`` hold the zero counts of s(., t0) and
    c(., t0) between ``t0`` and ``t`` when the producer knows them, and are
    ``None`` otherwise.
    """

    t0: float
    t: float
    c: float
    s: float
    c_dot: float
    s_dot: float
    index_s: int | None = None
    index_c: int | None = None

    @property
    def wronskian(self):
        return self.c * self.s_dot - self.c_dot * self.s

    @property
    def matrix(self):
        return np.array([[self.c, self.s], [self.c_dot, self.s_dot]])

    def reversed(self):
        """The pair at ``(t0, t)``, i.e. the inverse flow map.

        Uses the inverse of a unit-determinant matrix, which encodes
        s(t0, t) = -s(t, t0) and c(t0, t) = s_dot(t, t0).
        """
        w = self.wronskian
        return FundamentalPair(self.t, self.t0, self.s_dot / w, -self.s / w,
                               -self.c_dot / w, self.c / w)

    def flow(self, q0, p0):
        """Classical phase-space point at ``t`` from Cauchy data at ``t0``."""
        return (self.c * q0 + self.s * p0, self.c_dot * q0 + self.s_dot * p0)


def identity_pair(t0):
    return FundamentalPair(t0, t0, 1.0, 0.0, 0.0, 1.0, 0, 0)


def _rhs(profile):
    kappa = profile.kappa

    def f(t, y):
        k = float(kappa(t))
        return [y[2], y[3], -k * y[0], -k * y[1]]

    return f


def _atol(tol):
    return tol * 1e-3


def solve_fundamental(profile: FrequencyProfile, t0, t, tol=DEFAULT_TOL) -> FundamentalPair:
    """Integrate the fundamental pair from ``t0`` to ``t``.

    Parameters
    ----------
    profile : FrequencyProfile
    t0, t : float
        Times strictly inside ``profile.interval``.
    tol : float
        Relative tolerance of the adaptive 8(5,3) Runge-Kutta integrator.

    Returns
    -------
    FundamentalPair
        With ``index_s``/``index_c`` filled from event detection.

    Raises
    ------
    DomainError
        If a time lies outside the open interval.
    SingularityError
        If the step size collapses (e.g. approaching a singular endpoint).
    """
    t0 = float(t0)
    t = float(t)
    profile.check_time(t0, "t0")
    profile.check_time(t, "t")
    if tol <= 0:
        raise ContractError("tol must be positive")
    if t == t0:
        return identity_pair(t0)

    def ev_c(_, y):
        return y[0]

    def ev_s(_, y):
        return y[1]

    sol = solve_ivp(_rhs(profile), (t0, t), [1.0, 0.0, 0.0, 1.0], method="DOP853",
                    rtol=tol, atol=_atol(tol), events=(ev_c, ev_s))
    if sol.status != 0:
        last = float(sol.t[-1]) if sol.t.size else t0
        raise SingularityError(f"integration from {t0} stalled at t={last}: {sol.message}",
                               last_time=last)
    c, s, cd, sd = (float(v) for v in sol.y[:, -1])
    span = abs(t - t0)
    zc = [x for x in sol.t_events[0] if abs(x - t) > 1e-13 * (1 + span)]
    zs = [x for x in sol.t_events[1]
          if abs(x - t0) > 1e-9 * (1 + span) and abs(x - t) > 1e-13 * (1 + span)]
    if t > t0:
        m_s, m_c = len(zs), len(zc)
    else:
        m_s, m_c = -len(zs) - 1, -len(zc)
    return FundamentalPair(t0, t, c, s, cd, sd, m_s, m_c)


class ClassicalFlow:
    """Dense-output fundamental pair anchored at ``t0``.

    The integration range grows on demand in both directions, so repeated
    evaluations (quadrature nodes, plotting grids) reuse the same solve.
    Evaluation is thread safe; extension is serialised by a lock.
    """

    def __init__(self, profile: FrequencyProfile, t0, tol=DEFAULT_TOL):
        profile.check_time(t0, "t0")
        self.profile = profile
        self.t0 = float(t0)
        self.tol = tol
        self._fwd = []  # list of (t_start, t_end, OdeSolution), increasing
        self._bwd = []  # list of (t_end, t_start, OdeSolution), decreasing
        self._hi = self.t0
        self._lo = self.t0
        self._y_hi = np.array([1.0, 0.0, 0.0, 1.0])
        self._y_lo = self._y_hi.copy()
        self._lock = threading.Lock()

    def _extend(self, target):
        f = _rhs(self.profile)
        with self._lock:
            if self._lo <= target <= self._hi:
                return
            if target > self._hi:
                a, y = self._hi, self._y_hi
            else:
                a, y = self._lo, self._y_lo
            sol = solve_ivp(f, (a, target), y, method="DOP853", rtol=self.tol,
                            atol=_atol(self.tol), dense_output=True)
            if sol.status != 0:
                last = float(sol.t[-1])
                raise SingularityError(f"integration from {self.t0} stalled at t={last}: "
                                       f"{sol.message}", last_time=last)
            if target > self._hi:
                self._fwd.append((a, target, sol.sol))
                self._hi, self._y_hi = target, sol.y[:, -1].copy()
            else:
                self._bwd.append((target, a, sol.sol))
                self._lo, self._y_lo = target, sol.y[:, -1].copy()

    def _ensure(self, t):
        self.profile.check_time(t)
        if t > self._hi:
            lo, hi = self.profile.interval
            grow = max(1.0, 0.5 * (t - self.t0))
            tgt = t + grow
            if self.profile.grid is not None:
                hi = min(hi, self.profile.grid[1])
            if not tgt < hi:
                tgt = t
            self._extend(tgt)
        elif t < self._lo:
            lo, hi = self.profile.interval
            grow = max(1.0, 0.5 * (self.t0 - t))
            tgt = t - grow
            if self.profile.grid is not None:
                lo = max(lo, self.profile.grid[0])
            if not tgt > lo:
                tgt = t
            self._extend(tgt)

    def state(self, t):
        """Return the array ``[c, s, c_dot, s_dot]`` at time ``t``."""
        t = float(t)
        if t == self.t0:
            return np.array([1.0, 0.0, 0.0, 1.0])
        self._ensure(t)
        segs = self._fwd if t > self.t0 else self._bwd
        for a, b, sol in segs:
            if a <= t <= b:
                return sol(t)
        raise NumericError(f"dense output does not cover t={t}")  # pragma: no cover

    def __call__(self, t) -> FundamentalPair:
        c, s, cd, sd = (float(v) for v in self.state(t))
        return FundamentalPair(self.t0, float(t), c, s, cd, sd)

    def sample(self, ts):
        """Vectorised states, shape ``(4, len(ts))``."""
        return np.column_stack([self.state(x) for x in np.atleast_1d(ts)])


def closed_form_constant(kappa0, t0, t) -> FundamentalPair:
    """Exact pair for constant ``kappa0`` (trigonometric, linear or hyperbolic).

    Zero counts are filled in analytically.
    """
    dt = float(t) - float(t0)
    if kappa0 > 0:
        w = math.sqrt(kappa0)
        x = w * dt
        c, s, cd, sd = math.cos(x), math.sin(x) / w, -w * math.sin(x), math.cos(x)
        m_s = math.floor(x / math.pi) if dt != 0 else 0
        m_c = math.floor(x / math.pi + 0.5)
    elif kappa0 < 0:
        w = math.sqrt(-kappa0)
        x = w * dt
        c, s, cd, sd = math.cosh(x), math.sinh(x) / w, w * math.sinh(x), math.cosh(x)
        m_s, m_c = (0 if dt >= 0 else -1), 0
    else:
        c, s, cd, sd = 1.0, dt, 0.0, 1.0
        m_s, m_c = (0 if dt >= 0 else -1), 0
    return FundamentalPair(float(t0), float(t), c, s, cd, sd, m_s, m_c)


def compose_pair(p21: FundamentalPair, p10: FundamentalPair, rtol=1e-12) -> FundamentalPair:
    """Chain ``(t2 <- t1)`` after ``(t1 <- t0)`` by a 2x2 matrix product."""
    if abs(p21.t0 - p10.t) > rtol * (1.0 + abs(p10.t)):
        raise ContractError(f"cannot compose: intermediate times {p21.t0} and {p10.t} differ")
    m = p21.matrix @ p10.matrix
    return FundamentalPair(p10.t0, p21.t, float(m[0, 0]), float(m[0, 1]),
                           float(m[1, 0]), float(m[1, 1]))


def branch_power(u_value, index, epsilon) -> complex:
    """``exp(i*epsilon*pi*index) * |u|**epsilon``.

    This continues ``u**epsilon`` through the zeros of a solution ``u``.
    """
    if u_value == 0 and epsilon < 0:
        raise CausticError("negative power of a vanishing solution; use the caustic kernel")
    return complex(np.exp(1j * epsilon * math.pi * index)) * abs(u_value) ** epsilon


def locate_zeros(ts, us, func=None, xtol=1e-13):
    """Zeros of a sampled scalar function.

    Parameters
    ----------
    ts, us : array_like
        Increasing sample times and the sampled values.
    func : callable, optional
        If given, sign changes are refined with Brent's method; otherwise the
        zero is placed by linear interpolation.

    Returns
    -------
    list of float
        Zero locations in increasing order.  A sample that is exactly zero
        without a sign change across it is reported once, with a
        :class:`DegenerateZeroWarning`.
    """
    ts = np.asarray(ts, dtype=float)
    us = np.asarray(us, dtype=float)
    sg = np.sign(us)
    zeros = []
    i, n = 0, len(ts)
    while i < n:
        if sg[i] == 0:
            j = i
            while j + 1 < n and sg[j + 1] == 0:
                j += 1
            left = sg[i - 1] if i > 0 else 0
            right = sg[j + 1] if j + 1 < n else 0
            if left != 0 and left == right:
                warnings.warn(f"solution touches zero without a sign change near t={ts[i]}",
                              DegenerateZeroWarning, stacklevel=2)
            zeros.append(float(ts[i]))
            i = j + 1
            continue
        if i + 1 < n and sg[i + 1] != 0 and sg[i] != sg[i + 1]:
            a, b = ts[i], ts[i + 1]
            if func is not None:
                z = brentq(func, a, b, xtol=xtol)
            else:
                z = a - us[i] * (b - a) / (us[i + 1] - us[i])
            zeros.append(float(z))
        i += 1
    return zeros


def index_of(ts, us, t0, t, func=None) -> int:
    """Zero-count index of a sampled solution between ``t0`` and ``t``.

    Counts zeros in ``(t0, t]`` for ``t >= t0`` and returns minus the count
    in ``(t, t0]`` otherwise, so that the index vanishes at ``t = t0`` and
    increases by one at each zero.
    """
    zs = locate_zeros(ts, us, func)
    span = 1e-12 * (1.0 + abs(t) + abs(t0))
    if t >= t0:
        return sum(1 for z in zs if t0 + span < z <= t + span)
    return -sum(1 for z in zs if t + span < z <= t0 + span)


def maslov_indices(profile: FrequencyProfile, t0, t, tol=DEFAULT_TOL):
    """Return ``(index_s, index_c)`` for the fundamental pair at ``(t, t0)``."""
    m = profile.model
    if m is not None and m.kappa0 is not None:
        p = closed_form_constant(m.kappa0, t0, t)
    else:
        p = solve_fundamental(profile, t0, t, tol)
    return p.index_s, p.index_c


def with_indices(pair: FundamentalPair, index_s, index_c) -> FundamentalPair:
    return replace(pair, index_s=index_s, index_c=index_c)


def sample_grid(flow: ClassicalFlow, t0, t, per_unit=None):
    """Times between ``t0`` and ``t`` fine enough to resolve every zero.

    The spacing is a fraction of the local half period estimated from
    ``kappa``; used for sample-based zero counting.
    """
    lo, hi = sorted((float(t0), float(t)))
    if hi == lo:
        return np.array([lo])
    probe = np.linspace(lo, hi, 201)
    kmax = float(np.max(np.abs(flow.profile.kappa(probe[1:-1])))) if probe.size > 2 else 1.0
    rate = math.sqrt(max(kmax, 1.0))
    n = int(math.ceil((hi - lo) * rate * (per_unit or 20))) + 2
    return np.linspace(lo, hi, max(n, 3))


