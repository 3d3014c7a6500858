"""Ermakov-Pinney solutions rho'' + kappa rho = rho**-3 and their use.

Every positive solution is ``rho = sqrt(a11 c^2 + 2 a12 c s + a22 s^2)`` for a
unit-determinant positive form over a fundamental pair.  Conversely any such
``rho`` rebuilds the pair through the accumulated phase
``Phi(t0 -> t) = int_{t0}^{t} rho^-2``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .classical import ClassicalFlow, FundamentalPair
from .errors import ContractError, DomainError, NumericError
from .profiles import FrequencyProfile

EP_FLOW_TOL = 1e-12
PHASE_TOL = 1e-12


@dataclass(frozen=True)
class EPQuadraticForm:
    """Positive definite symmetric form with unit determinant.

    Use :meth:`normalized` to scale an arbitrary positive form; the applied
    factor is kept in ``scale``.
    """

    a11: float
    a12: float
    a22: float
    scale: float = 1.0

    def __post_init__(self):
        det = self.a11 * self.a22 - self.a12**2
        if not (self.a11 > 0 and det > 0):
            raise ContractError(f"form ({self.a11}, {self.a12}, {self.a22}) is not positive definite")
        if abs(det - 1.0) > 1e-12:
            raise ContractError(f"form determinant is {det}, expected 1; use normalized()")

    @classmethod
    def normalized(cls, a11, a12, a22):
        det = a11 * a22 - a12**2
        if not (a11 > 0 and det > 0):
            raise ContractError(f"form ({a11}, {a12}, {a22}) is not positive definite")
        f = 1.0 / math.sqrt(det)
        return cls(a11 * f, a12 * f, a22 * f, scale=f)

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 1.0)

    @property
    def det(self):
        return self.a11 * self.a22 - self.a12**2

    def in_basis(self, n):
        """Coefficients of rho^2 in another solution basis.

        If ``(u1, u2) = (c, s) @ n`` then ``rho^2 = b11 u1^2 + 2 b12 u1 u2 +
        b22 u2^2`` with ``B = n^-1 A n^-T`` and the Wronskian of the basis is
        ``det n``.  Returns ``(b11, b12, b22, wronskian)``.
        """
        n = np.asarray(n, dtype=float)
        a = np.array([[self.a11, self.a12], [self.a12, self.a22]])
        ni = np.linalg.inv(n)
        b = ni @ a @ ni.T
        return float(b[0, 0]), float(b[0, 1]), float(b[1, 1]), float(np.linalg.det(n))


class EPSolution:
    """A positive Ermakov-Pinney solution with its derivative.

    Parameters
    ----------
    profile : FrequencyProfile
    t0 : float
        Anchor time (for forms: where c and s have their Cauchy data; for
        closed forms: the origin of the phase panels).
    rho_fn : callable
        ``t -> (rho, rho_dot)``.
    form : EPQuadraticForm or None
        ``None`` marks a model-supplied closed form.
    panel : float
        Width of the cached phase panels.
    """

    def __init__(self, profile: FrequencyProfile, t0, rho_fn: Callable, form=None,
                 label="", panel=1.0, phase_tol=PHASE_TOL):
        profile.check_time(t0, "t0")
        self.profile = profile
        self.t0 = float(t0)
        self.form = form
        self.label = label or ("closed-form" if form is None else "form")
        self._rho_fn = rho_fn
        self.panel = float(panel)
        self.phase_tol = phase_tol
        self._edges = {0: 0.0}
        self._lock = threading.Lock()

    def values(self, t):
        self.profile.check_time(t)
        r, rd = self._rho_fn(float(t))
        if not r > 0:
            raise NumericError(f"EP solution is not positive at t={t}")
        return float(r), float(rd)

    def rho(self, t):
        return self.values(t)[0]

    def rho_dot(self, t):
        return self.values(t)[1]

    # phase bookkeeping -------------------------------------------------
    def _quad(self, a, b):
        if a == b:
            return 0.0
        val, err = quad(lambda x: self.values(x)[0] ** -2, a, b, epsabs=0.0,
                        epsrel=self.phase_tol, limit=500)
        if not math.isfinite(val) or err > max(100 * self.phase_tol * abs(val), 1e-13):
            raise NumericError(f"phase quadrature on [{a}, {b}] reached only {err:.2e}")
        return val

    def _edge_value(self, k):
        with self._lock:
            if k in self._edges:
                return self._edges[k]
        step = 1 if k > 0 else -1
        # fill sequentially outward from the nearest known edge
        j = max((e for e in self._edges if e * step >= 0 and abs(e) <= abs(k)), key=abs)
        val = self._edges[j]
        while j != k:
            a = self.t0 + j * self.panel
            b = self.t0 + (j + step) * self.panel
            val = val + self._quad(a, b)
            j += step
            with self._lock:
                self._edges.setdefault(j, val)
                val = self._edges[j]
        return val

    def phase_from_anchor(self, t):
        t = float(t)
        self.profile.check_time(t)
        k = math.trunc((t - self.t0) / self.panel)
        edge = self.t0 + k * self.panel
        return self._edge_value(k) + self._quad(edge, t)


def ep_from_fundamental(form: EPQuadraticForm, profile: FrequencyProfile, t0,
                        tol=EP_FLOW_TOL, flow=None) -> EPSolution:
    """Build ``rho = sqrt(a11 c^2 + 2 a12 c s + a22 s^2)`` anchored at ``t0``.

    ``rho_dot`` is differentiated analytically using ``c_dot`` and ``s_dot``.
    A custom ``flow`` (callable ``t -> (c, s, c_dot, s_dot)``) may replace
    the default dense ODE solution.
    """
    if not isinstance(form, EPQuadraticForm):
        raise ContractError("form must be an EPQuadraticForm")
    fl = flow if flow is not None else ClassicalFlow(profile, t0, tol)

    def rho_fn(t):
        st = fl.state(t) if hasattr(fl, "state") else fl(t)
        c, s, cd, sd = st
        r2 = form.a11 * c * c + 2.0 * form.a12 * c * s + form.a22 * s * s
        r = math.sqrt(r2)
        rd = (form.a11 * c * cd + form.a12 * (cd * s + c * sd) + form.a22 * s * sd) / r
        return r, rd

    return EPSolution(profile, t0, rho_fn, form=form,
                      label=f"form({form.a11:g},{form.a12:g},{form.a22:g})")


def closed_form_ep(profile: FrequencyProfile, rho_fn, anchor, label="closed-form",
                   panel=1.0) -> EPSolution:
    """Wrap a model-supplied ``t -> (rho, rho_dot)``."""
    return EPSolution(profile, anchor, rho_fn, form=None, label=label, panel=panel)


def phase_integral(ep: EPSolution, t0, t) -> float:
    """``int_{t0}^{t} rho^-2``, additive through the cached panels."""
    ep.profile.check_time(t0, "t0")
    ep.profile.check_time(t, "t")
    if t == t0:
        return 0.0
    return ep.phase_from_anchor(t) - ep.phase_from_anchor(t0)


def indices_from_phase(phase, rho0, rho_dot0):
    """Zero counts of s(., t0) and c(., t0) implied by the accumulated phase.

    s vanishes where the phase is a multiple of pi; c vanishes where
    ``phase + arctan(rho0 rho_dot0)`` is an odd multiple of pi/2.
    """
    m_s = math.floor(phase / math.pi) if phase != 0 else 0
    delta = math.atan(rho0 * rho_dot0)
    m_c = math.floor((phase + delta) / math.pi + 0.5)
    return m_s, m_c


def fundamental_from_ep(ep: EPSolution, t0, t) -> FundamentalPair:
    """Rebuild the fundamental pair at ``(t, t0)`` from ``rho`` alone.

    ``c`` and ``s`` follow from the phase formulas; ``s_dot`` equals
    ``c(t0, t)`` written in the same variables, and ``c_dot`` is the exact
    time derivative of the ``c`` formula.  Zero counts come from the phase.
    """
    r0, rd0 = ep.values(t0)
    r, rd = ep.values(t)
    phi = phase_integral(ep, t0, t)
    cp, sp = math.cos(phi), math.sin(phi)
    c = (r / r0) * cp - r * rd0 * sp
    s = r * r0 * sp
    s_dot = (r0 / r) * cp + r0 * rd * sp
    c_dot = (rd / r0) * cp - sp / (r * r0) - rd * rd0 * sp - (rd0 / r) * cp
    m_s, m_c = indices_from_phase(phi, r0, rd0)
    return FundamentalPair(float(t0), float(t), c, s, c_dot, s_dot, m_s, m_c)


def _fd_second(f, t, h0, lo, hi):
    """Richardson-extrapolated central derivative of ``f`` with step search."""
    best = None
    prev = None
    h = h0
    for _ in range(8):
        if not (lo < t - h and t + h < hi):
            h /= 2
            continue
        d1 = (f(t + h) - f(t - h)) / (2 * h)
        d2 = (f(t + h / 2) - f(t - h / 2)) / h
        r = (4 * d2 - d1) / 3
        if prev is not None:
            diff = abs(r - prev)
            if best is None or diff < best[0]:
                best = (diff, r)
        prev = r
        h /= 2
    if best is None:
        if prev is None:
            raise DomainError(f"t={t} is within one difference step of an endpoint")
        return prev
    return best[1]


def ep_residual(ep: EPSolution, t, h=None) -> float:
    """``rho'' + kappa rho - rho^-3`` with ``rho''`` from differences of ``rho_dot``.

    The step starts at ``h`` (default a tenth of the local oscillation scale)
    and is halved repeatedly; the most self-consistent Richardson estimate is
    used.
    """
    t = float(t)
    ep.profile.check_time(t)
    lo, hi = ep.profile.interval
    k = float(ep.profile.kappa(t))
    if h is None:
        h = 0.1 / math.sqrt(max(abs(k), 1.0))
        edge = min(t - lo, hi - t)
        h = min(h, edge / 4)
    if not (lo < t - 2 * h * 1e-3 and t + 2 * h * 1e-3 < hi):
        raise DomainError(f"t={t} is within one difference step of an endpoint")
    r = ep.rho(t)
    rdd = _fd_second(ep.rho_dot, t, h, lo, hi)
    return rdd + k * r - r**-3


def locate_s_zeros(ep: EPSolution, t0, window, xtol=1e-13):
    """Times in the half-open ``window = (a, b]`` where s(t, t0) vanishes.

    These are the solutions of ``Phi(t0 -> t) = k pi``; since the phase is
    strictly increasing, each ``k`` is bracketed and solved separately.
    """
    a, b = float(window[0]), float(window[1])
    if not a < b:
        raise ContractError("window must satisfy a < b")
    lo, hi = ep.profile.interval
    if not (lo <= a and b < hi):
        raise DomainError(f"window {window} is not inside {ep.profile.interval}")
    a_in = a if ep.profile.contains(a) else None
    phi_b = phase_integral(ep, t0, b)
    if a_in is None:
        # open left end at the interval boundary: approach it
        a_eval = a + 1e-9 * max(1.0, b - a)
        phi_a = phase_integral(ep, t0, a_eval)
    else:
        a_eval, phi_a = a, phase_integral(ep, t0, a)
    slack = 1e-12 * max(1.0, abs(phi_b))
    k_lo = math.floor(phi_a / math.pi) + 1
    k_hi = math.floor((phi_b + slack) / math.pi)
    zeros = []
    for k in range(k_lo, k_hi + 1):
        target = k * math.pi
        if phi_b <= target:
            zeros.append(b)
            continue
        zeros.append(brentq(lambda x: phase_integral(ep, t0, x) - target, a_eval, b,
                            xtol=xtol, rtol=4 * np.finfo(float).eps))
    return zeros
