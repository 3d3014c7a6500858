"""Catalogue of frequency models with exact solutions.

Closed forms exist for constant profiles (trigonometric / linear /
hyperbolic), for the T^3 Gowdy modes (Bessel functions of order zero) and for
the S^1 x S^2 / S^3 Gowdy modes (Ferrers functions of degree
``nu = (sqrt(1 + 4 omega^2) - 1) / 2``).  The Mathieu profile is handled
through its period monodromy.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import profiles
from .classical import (DEFAULT_TOL, FundamentalPair, closed_form_constant,
                        solve_fundamental)
from .ermakov import EPSolution, closed_form_ep, indices_from_phase, phase_integral
from .errors import ContractError, DomainError, NotFoundError, UnsupportedError
from .profiles import FrequencyProfile, ModelSpec
from .specfun import bessel_j0y0, legendre_pq, legendre_pq_all

__all__ = ["ModelSpec", "MonodromyResult", "closed_form_pair", "bessel_j0y0", "legendre_pq",
           "mathieu_monodromy", "characteristic_value", "canonical_ep", "canonical_ep_solution",
           "gowdy_s_degree", "pair_for", "has_closed_form"]


def _model_of(model):
    if isinstance(model, FrequencyProfile):
        if model.model is None:
            raise UnsupportedError("profile has no closed-form model attached")
        return model.model
    return model


def has_closed_form(model) -> bool:
    m = model.model if isinstance(model, FrequencyProfile) else model
    return m is not None and m.kind != "mathieu"


def gowdy_s_degree(omega):
    """Ferrers degree ``(omega' - 1)/2`` with ``omega' = sqrt(1 + 4 omega^2)``.

    Values within 1e-9 of an integer are snapped to it (field modes have
    ``omega^2 = l(l+1)`` and hence integer degree ``l``).
    """
    nu = 0.5 * (math.sqrt(1.0 + 4.0 * omega * omega) - 1.0)
    n = round(nu)
    return float(n) if abs(nu - n) < 1e-9 else nu


def _pair_from_basis(u1_0, u1d_0, u2_0, u2d_0, u1, u1d, u2, u2d, w):
    s = (u1_0 * u2 - u2_0 * u1) / w
    sd = (u1_0 * u2d - u2_0 * u1d) / w
    c = (u2d_0 * u1 - u1d_0 * u2) / w
    cd = (u2d_0 * u1d - u1d_0 * u2d) / w
    return c, s, cd, sd


# -- T^3 Gowdy: u = sqrt(t) Z0(omega t), Wronskian of (J, Y) basis is 2/pi

def _t3_basis(omega, t):
    t = np.asarray(t, dtype=float)
    j0, y0, j1, y1 = bessel_j0y0(omega * t)
    rt = np.sqrt(t)
    u1, u2 = rt * j0, rt * y0
    u1d = j0 / (2 * rt) - omega * rt * j1
    u2d = y0 / (2 * rt) - omega * rt * y1
    return u1, u1d, u2, u2d


def gowdy_t3_pair_arrays(omega, t0, t):
    """Vectorised (over ``omega``) T^3 closed form; returns c, s, c_dot, s_dot."""
    a = _t3_basis(omega, t0)
    b = _t3_basis(omega, t)
    return _pair_from_basis(*a, *b, 2.0 / math.pi)


# -- S Gowdy: u = sqrt(sin t) F_nu(cos t), Wronskian of (P, Q) basis is -1

def _s_basis_from_values(nu, t, p, q, p1, q1):
    st = math.sin(t)
    rt = math.sqrt(st)
    ct = math.cos(t)
    u1, u2 = rt * p, rt * q
    u1d = ((nu + 1) * p1 - (nu + 0.5) * ct * p) / rt
    u2d = ((nu + 1) * q1 - (nu + 0.5) * ct * q) / rt
    return u1, u1d, u2, u2d


def _s_basis(nu, t):
    x = math.cos(t)
    p, q = legendre_pq(nu, x)
    p1, q1 = legendre_pq(nu + 1, x)
    return _s_basis_from_values(nu, t, p, q, p1, q1)


def gowdy_s_pair_arrays(ells, t0, t):
    """Closed-form pairs for integer degrees ``ells`` (arrays), via one recurrence."""
    ells = np.asarray(ells, dtype=int)
    nmax = int(ells.max()) + 1
    p, q = legendre_pq_all(nmax, np.array([math.cos(t0), math.cos(t)]))
    nu = ells.astype(float)
    out0 = _s_basis_from_values(nu, t0, p[ells, 0], q[ells, 0], p[ells + 1, 0], q[ells + 1, 0])
    out1 = _s_basis_from_values(nu, t, p[ells, 1], q[ells, 1], p[ells + 1, 1], q[ells + 1, 1])
    return _pair_from_basis(*out0, *out1, -1.0)


def closed_form_pair(model, t0, t) -> FundamentalPair:
    """Exact fundamental pair for models that have one.

    Parameters
    ----------
    model : ModelSpec or FrequencyProfile
    t0, t : float

    Raises
    ------
    UnsupportedError
        For the Mathieu profile, whose solutions are obtained by integration.
    """
    m = _model_of(model)
    prof = m.profile()
    prof.check_time(t0, "t0")
    prof.check_time(t, "t")
    if m.kappa0 is not None:
        return closed_form_constant(m.kappa0, t0, t)
    if m.kind == "gowdy_t3":
        c, s, cd, sd = gowdy_t3_pair_arrays(m.get("omega"), t0, t)
    elif m.kind == "gowdy_s":
        nu = gowdy_s_degree(m.get("omega"))
        c, s, cd, sd = _pair_from_basis(*_s_basis(nu, t0), *_s_basis(nu, t), -1.0)
    else:
        raise UnsupportedError("the Mathieu profile has no closed-form pair; use solve_fundamental")
    if t == t0:
        c, s, cd, sd = 1.0, 0.0, 0.0, 1.0
    return FundamentalPair(float(t0), float(t), float(c), float(s), float(cd), float(sd))


# --------------------------------------------------------------------------
# canonical Ermakov-Pinney solutions


def canonical_ep(model, t, choice="figure"):
    """Closed-form ``(rho, rho_dot)`` for the catalogued models.

    * constant ``kappa0 > 0``: ``rho = kappa0**-1/4``;
    * ``gowdy_t3``: ``rho^2 = (pi t / 2)(J0^2 + Y0^2)`` at ``omega t``;
    * ``gowdy_s``: ``rho^2 = sin t (P^2 + Q^2)`` (``choice="figure"``) or
      ``rho^2 = (sin t / 2)(pi P^2 + (4/pi) Q^2)`` (``choice="mode"``), the
      latter tending to ``1/omega`` for large degree.

    Raises
    ------
    UnsupportedError
        For free, tachyonic and Mathieu profiles.
    """
    m = _model_of(model)
    t = float(t)
    m.profile().check_time(t)
    if m.kappa0 is not None:
        if m.kappa0 > 0:
            return m.kappa0 ** -0.25, 0.0
        raise UnsupportedError(f"no canonical Ermakov-Pinney solution for {m.kind}")
    if m.kind == "gowdy_t3":
        w = m.get("omega")
        j0, y0, j1, y1 = bessel_j0y0(w * t)
        r2 = 0.5 * math.pi * t * (j0 * j0 + y0 * y0)
        dr2 = 0.5 * math.pi * (j0 * j0 + y0 * y0) - math.pi * t * w * (j0 * j1 + y0 * y1)
        r = math.sqrt(r2)
        return r, dr2 / (2 * r)
    if m.kind == "gowdy_s":
        nu = gowdy_s_degree(m.get("omega"))
        u1, u1d, u2, u2d = _s_basis(nu, t)
        if choice == "figure":
            w1, w2 = 1.0, 1.0
        elif choice == "mode":
            w1, w2 = 0.5 * math.pi, 2.0 / math.pi
        else:
            raise ContractError(f"unknown choice {choice!r}")
        r2 = w1 * u1 * u1 + w2 * u2 * u2
        r = math.sqrt(r2)
        return r, (w1 * u1 * u1d + w2 * u2 * u2d) / r
    raise UnsupportedError(f"no canonical Ermakov-Pinney solution for {m.kind}")


def canonical_ep_solution(model, anchor, choice="figure") -> EPSolution:
    m = _model_of(model)
    prof = m.profile()
    return closed_form_ep(prof, lambda t: canonical_ep(m, t, choice), anchor,
                          label=f"canonical {m.kind}")


def pair_for(profile: FrequencyProfile, t0, t, tol=DEFAULT_TOL, indices=True) -> FundamentalPair:
    """Fundamental pair by the cheapest exact route, with zero counts.

    Constant models use their closed form; Gowdy models use the closed form
    with zero counts from the canonical phase; anything else is integrated.
    """
    m = profile.model
    if m is None or m.kind == "mathieu":
        return solve_fundamental(profile, t0, t, tol)
    if m.kappa0 is not None:
        return closed_form_constant(m.kappa0, t0, t)
    p = closed_form_pair(m, t0, t)
    if not indices:
        return p
    ep = canonical_ep_solution(m, t0)
    phi = phase_integral(ep, t0, t)
    r0, rd0 = ep.values(t0)
    m_s, m_c = indices_from_phase(phi, r0, rd0)
    return FundamentalPair(p.t0, p.t, p.c, p.s, p.c_dot, p.s_dot, m_s, m_c)


# --------------------------------------------------------------------------
# Mathieu profile


@dataclass(frozen=True)
class MonodromyResult:
    """Period-pi monodromy of the Mathieu profile.

    ``exponent`` solves ``2 cos(pi r) = trace`` on the principal branch
    (``0 <= Re r <= 1``); it is complex in the unstable bands.
    """

    trace: float
    exponent: complex
    stable: bool
    det: float


def mathieu_monodromy(a, b, tol=1e-12) -> MonodromyResult:
    p = solve_fundamental(profiles.mathieu(a, b), 0.0, math.pi, tol)
    tr = p.c + p.s_dot
    r = cmath.acos(tr / 2.0) / math.pi
    return MonodromyResult(trace=tr, exponent=r, stable=abs(tr) <= 2.0, det=p.wronskian)


def characteristic_value(r, b, bracket, xtol=1e-12, tol=1e-12):
    """Value of ``a`` for which the Mathieu exponent equals the integer ``r``.

    For ``b = 0`` the answer is ``r**2`` exactly.  Otherwise
    ``trace(a) - 2 cos(pi r)`` is root-bracketed in ``bracket``.

    Raises
    ------
    NotFoundError
        If the bracket shows no sign change.
    """
    if b == 0:
        return float(r) ** 2
    target = 2.0 * math.cos(math.pi * r)

    def g(a):
        return mathieu_monodromy(a, b, tol).trace - target

    lo, hi = float(bracket[0]), float(bracket[1])
    glo, ghi = g(lo), g(hi)
    if glo == 0:
        return lo
    if ghi == 0:
        return hi
    if glo * ghi > 0:
        raise NotFoundError(f"no sign change of trace - 2cos(pi r) on [{lo}, {hi}]")
    return brentq(g, lo, hi, xtol=xtol)


def check_positive_time(t):
    if not t > 0:
        raise DomainError("time must be positive for Gowdy models")
