"""Bogoliubov coefficients and transition amplitudes between oscillator levels.

Amplitudes ``<phi_n2^w2 | U(t, t0) phi_n1^w1>`` are read off as Taylor
coefficients of a Gaussian generating function: each Hermite function is
``N_n n! [x^n] exp(-w q^2/2 + 2 sqrt(w) q x - x^2)``, so the double integral
against the kernel collapses to ``exp(x^T B x)`` for a symmetric 2x2 ``B``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .classical import FundamentalPair
from .errors import CausticError, ContractError, NumericError
from .propagator import _is_caustic, kernel_caustic, kernel_value


# Amplitudes are smooth through caustics, so near-zero s from an integrator
# (|s| ~ its tolerance) is routed through the caustic formula, which is exact
# there and avoids the 1/s cancellations of the regular one.
AMPLITUDE_CAUSTIC_TOL = 1e-9


def _check_omega(*omegas):
    for w in omegas:
        if not (w > 0 and math.isfinite(w)):
            raise ContractError(f"reference frequency must be positive, got {w}")


def _check_levels(*ns):
    for n in ns:
        if int(n) != n or n < 0:
            raise ContractError(f"level must be a non-negative integer, got {n}")


@dataclass(frozen=True)
class BogoliubovPair:
    """Mixing coefficients ``a -> A a + B a*`` for reference frequency ``omega``."""

    A: complex
    B: complex
    t: float
    t0: float
    omega: float

    @property
    def defect(self):
        """``|A|^2 - |B|^2 - 1``."""
        return abs(self.A) ** 2 - abs(self.B) ** 2 - 1.0


def bogoliubov(pair: FundamentalPair, omega) -> BogoliubovPair:
    _check_omega(omega)
    c, s, cd, sd = pair.c, pair.s, pair.c_dot, pair.s_dot
    a = 0.5 * complex(c + sd, cd / omega - omega * s)
    b = 0.5 * complex(c - sd, cd / omega + omega * s)
    return BogoliubovPair(a, b, pair.t, pair.t0, float(omega))


@dataclass(frozen=True)
class LambdaMatrix:
    """Symmetric quadratic form of the amplitude integral in ``(q0, q)``."""

    l11: complex
    l12: complex
    l22: complex

    @property
    def det(self):
        return self.l11 * self.l22 - self.l12 * self.l12

    @property
    def matrix(self):
        return np.array([[self.l11, self.l12], [self.l12, self.l22]])

    def inverse(self):
        d = self.det
        if d == 0:
            raise NumericError("singular quadratic form")
        return np.array([[self.l22, -self.l12], [-self.l12, self.l11]]) / d


def lambda_matrix(pair: FundamentalPair, omega1, omega2) -> LambdaMatrix:
    """Form for initial frequency ``omega1`` and final frequency ``omega2``.

    Raises
    ------
    CausticError
        If ``s(t, t0) = 0``.
    """
    _check_omega(omega1, omega2)
    if _is_caustic(pair):
        raise CausticError(f"s(t, t0) vanishes at t={pair.t}")
    s = pair.s
    return LambdaMatrix(complex(omega1, -pair.c / s), 1j / s, complex(omega2, -pair.s_dot / s))


def lambda_det_closed(pair: FundamentalPair, omega1, omega2) -> complex:
    """Determinant written through the pair and its reverse."""
    s = pair.s
    back = pair.reversed()
    return complex(omega1 * omega2 - pair.c_dot / s, -(omega1 * back.c + omega2 * pair.c) / s)


def _powers_over_factorial(b, nmax):
    """``[b^p / p! for p in 0..nmax]``, built multiplicatively."""
    out = [1.0 + 0j] * (nmax + 1)
    for p in range(1, nmax + 1):
        out[p] = out[p - 1] * b / p
    return out


def taylor_coeff(b11, b12, b22, n1, n2) -> complex:
    """Coefficient of ``x1^n1 x2^n2`` in ``exp(b11 x1^2 + 2 b12 x1 x2 + b22 x2^2)``.

    Summed over the power ``j`` of the cross term; no division by ``b12``
    occurs, so the degenerate cases are covered.  Vanishes for odd ``n1+n2``.
    """
    _check_levels(n1, n2)
    n1, n2 = int(n1), int(n2)
    if (n1 + n2) % 2:
        return 0j
    f11 = _powers_over_factorial(complex(b11), n1 // 2)
    f22 = _powers_over_factorial(complex(b22), n2 // 2)
    f12 = _powers_over_factorial(2 * complex(b12), min(n1, n2))
    total = 0j
    for j in range(n1 % 2, min(n1, n2) + 1, 2):
        total += f12[j] * f11[(n1 - j) // 2] * f22[(n2 - j) // 2]
    return total


def taylor_coeff_grouped(b11, b12, b22, n1, n2) -> complex:
    """Same coefficient through the grouped multinomial sum.

    Requires ``b12 != 0``; used as a cross-check of :func:`taylor_coeff`.
    """
    _check_levels(n1, n2)
    n1, n2 = int(n1), int(n2)
    if (n1 + n2) % 2:
        return 0j
    if b12 == 0:
        raise ContractError("grouped form needs b12 != 0")
    h = (n1 - n2) // 2
    ratio = b11 * b22 / (4 * b12 * b12)
    total = 0j
    for m in range(max(0, -h), n2 // 2 + 1):
        total += ratio**m / (math.factorial(m) * math.factorial(m + h) * math.factorial(n2 - 2 * m))
    return complex(b11) ** h * (2 * b12) ** n2 * total


def _level_norm(omega, n):
    """``log(N_n n!)`` with ``N_n = omega^(1/4) / sqrt(2^n n! sqrt(pi))``."""
    return 0.25 * math.log(omega) - 0.5 * (n * math.log(2) + 0.5 * math.log(math.pi)) \
        + 0.5 * math.lgamma(n + 1)


@dataclass(frozen=True)
class _Generating:
    """Amplitude data ``pref * [x1^n1 x2^n2] exp(x^T B x)``."""

    pref: complex
    b11: complex
    b12: complex
    b22: complex

    def entry(self, n1, n2, omega1, omega2):
        if (n1 + n2) % 2:
            return 0j
        coeff = taylor_coeff(self.b11, self.b12, self.b22, n1, n2)
        if coeff == 0:
            return 0j
        lg = _level_norm(omega1, n1) + _level_norm(omega2, n2)
        return self.pref * coeff * math.exp(lg)


def _generating(pair: FundamentalPair, index_s, omega1, omega2, index_c=None) -> _Generating:
    _check_omega(omega1, omega2)
    r1, r2 = math.sqrt(omega1), math.sqrt(omega2)
    if _is_caustic(pair, AMPLITUDE_CAUSTIC_TOL):
        kv = kernel_caustic(pair, index_c)
        c = pair.c
        a = omega2 + omega1 / (c * c) - 1j * pair.c_dot / c
        v1, v2 = r1 / c, r2
        pref = kv.amplitude * cmath.sqrt(2 * math.pi / a)
        return _Generating(pref, 2 * v1 * v1 / a - 1, 2 * v1 * v2 / a, 2 * v2 * v2 / a - 1)
    kv = kernel_value(pair, index_s)
    lam = lambda_matrix(pair, omega1, omega2)
    inv = lam.inverse()
    pref = kv.amplitude * 2 * math.pi / cmath.sqrt(lam.det)
    return _Generating(pref, 2 * omega1 * inv[0, 0] - 1, 2 * r1 * r2 * inv[0, 1],
                       2 * omega2 * inv[1, 1] - 1)


def amplitude(pair: FundamentalPair, index_s, omega1, n1, omega2, n2, index_c=None) -> complex:
    """``<phi_n2^omega2 | U(t, t0) phi_n1^omega1>``.

    Regular times use the generating-function formula with the principal
    branch of ``sqrt(det Lambda)`` and the indexed branch of ``s^(-1/2)``;
    at zeros of s the delta kernel gives a one-dimensional Gaussian instead.
    """
    _check_levels(n1, n2)
    return _generating(pair, index_s, omega1, omega2, index_c).entry(int(n1), int(n2), omega1, omega2)


@dataclass
class AmplitudeTable:
    """Amplitudes for ``n1 <= n1max`` and ``n2 <= n2max``."""

    omega1: float
    omega2: float
    t0: float
    t: float
    entries: dict = field(default_factory=dict)

    def row_norm(self, n1):
        return math.fsum(abs(v) ** 2 for (a, _), v in self.entries.items() if a == n1)

    def as_array(self):
        n1max = max(k[0] for k in self.entries)
        n2max = max(k[1] for k in self.entries)
        out = np.zeros((n1max + 1, n2max + 1), dtype=complex)
        for (a, b), v in self.entries.items():
            out[a, b] = v
        return out


def amplitude_table(pair: FundamentalPair, index_s, omega1, n1max, omega2, n2max,
                    index_c=None) -> AmplitudeTable:
    gen = _generating(pair, index_s, omega1, omega2, index_c)
    tab = AmplitudeTable(float(omega1), float(omega2), pair.t0, pair.t)
    for a in range(n1max + 1):
        for b in range(n2max + 1):
            tab.entries[(a, b)] = gen.entry(a, b, omega1, omega2)
    return tab


def vacuum_persistence(pair: FundamentalPair, index_s, omega, index_c=None) -> complex:
    """``<phi_0 | U(t, t0) phi_0>`` at reference frequency ``omega``."""
    return amplitude(pair, index_s, omega, 0, omega, 0, index_c)


def decay_ratio(pair: FundamentalPair, omega) -> complex:
    """``-B(t0, t) / A(t0, t)``, the squeezing parameter of the evolved vacuum."""
    back = bogoliubov(pair.reversed(), omega)
    return -back.B / back.A


def vacuum_decay_coeffs(pair: FundamentalPair, index_s, omega, nmax=64, index_c=None):
    """``<phi_2n | U(t, t0) phi_0>`` for ``n = 0..nmax``.

    Uses ``sqrt((2n)!)/(2^n n!) r^n`` times the persistence amplitude, with
    ``r = 2 omega (Lambda^-1)_22 - 1`` at regular times (``-B/A`` at caustics,
    where the two agree by continuity).
    """
    _check_levels(nmax)
    base = vacuum_persistence(pair, index_s, omega, index_c)
    if _is_caustic(pair, AMPLITUDE_CAUSTIC_TOL):
        r = decay_ratio(pair, omega)
    else:
        r = 2 * omega * lambda_matrix(pair, omega, omega).inverse()[1, 1] - 1
    out = []
    term = base
    for n in range(nmax + 1):
        if n:
            term = term * r * math.sqrt((2 * n) * (2 * n - 1)) / (2 * n)
        out.append(term)
    return out


def vacuum_phase_near_start(pair: FundamentalPair, omega) -> float:
    """Phase of the persistence amplitude for ``t`` close to ``t0``.

    ``-1/2 arctan((omega s - c_dot/omega) / (c + s_dot))``; valid while
    ``c + s_dot > 0``.
    """
    _check_omega(omega)
    return -0.5 * math.atan((omega * pair.s - pair.c_dot / omega) / (pair.c + pair.s_dot))


# ---------------------------------------------------------------------------
# independent quadrature oracle


def hermite_function(n, omega, q):
    """Normalised oscillator eigenfunction ``phi_n^omega(q)`` by stable recurrence."""
    _check_levels(n)
    _check_omega(omega)
    x = math.sqrt(omega) * np.asarray(q, dtype=float)
    prev = np.zeros_like(x)
    cur = omega**0.25 * math.pi**-0.25 * np.exp(-0.5 * x * x)
    for k in range(int(n)):
        prev, cur = cur, math.sqrt(2.0 / (k + 1)) * x * cur - math.sqrt(k / (k + 1)) * prev
    return cur


def _hermite_scalar(n, omega, q):
    x = math.sqrt(omega) * q
    prev, cur = 0.0, omega**0.25 * math.pi**-0.25 * math.exp(-0.5 * x * x)
    for k in range(n):
        prev, cur = cur, math.sqrt(2.0 / (k + 1)) * x * cur - math.sqrt(k / (k + 1)) * prev
    return cur


def amplitude_oracle(pair: FundamentalPair, index_s, omega1, n1, omega2, n2, tol=1e-8,
                     index_c=None) -> complex:
    """Amplitude by direct adaptive quadrature of the kernel against Hermite functions.

    Nested one-dimensional Gauss-Kronrod integrals on boxes sized from the
    level widths; at caustics a single integral of the delta rule is used.
    ``tol`` is an absolute error target.

    Raises
    ------
    ContractError
        For levels above 8.
    NumericError
        If the error estimate exceeds ``tol``.
    """
    _check_levels(n1, n2)
    _check_omega(omega1, omega2)
    n1, n2 = int(n1), int(n2)
    if n1 > 8 or n2 > 8:
        raise ContractError("the quadrature oracle supports levels up to 8")
    l1 = (math.sqrt(2 * n1 + 1) + 7.0) / math.sqrt(omega1)
    l2 = (math.sqrt(2 * n2 + 1) + 7.0) / math.sqrt(omega2)
    kv = kernel_value(pair, index_s, index_c)
    errs = []

    def cquad(f, a, b, eps):
        with warnings.catch_warnings():
            # roundoff-level tails trigger warnings; the error estimate is checked below
            warnings.simplefilter("ignore", IntegrationWarning)
            val, err = quad(f, a, b, epsabs=eps, epsrel=0.0, limit=400, complex_func=True)
        errs.append(abs(complex(err).real) + abs(complex(err).imag))
        return val

    if kv.regime == "caustic":
        k = kv.collapsed()
        d = k.delta_scale
        lq = min(l2, l1 / abs(d))

        def g(q):
            return (_hermite_scalar(n2, omega2, q) * k.amplitude
                    * cmath.exp(0.5j * k.quad_tt * q * q) * _hermite_scalar(n1, omega1, d * q))
        val = cquad(g, -lq, lq, tol / 4)
    else:
        amp, a_tt, a_00, a_x = kv.amplitude, kv.quad_tt, kv.quad_00, kv.quad_cross

        def inner(q):
            h2 = _hermite_scalar(n2, omega2, q) * amp * cmath.exp(0.5j * a_tt * q * q)

            def f(q0):
                return h2 * cmath.exp(0.5j * (a_00 * q0 + 2 * a_x * q) * q0) \
                    * _hermite_scalar(n1, omega1, q0)
            return cquad(f, -l1, l1, tol / (8 * l2))
        val = cquad(inner, -l2, l2, tol / 4)
    achieved = max(errs) if errs else 0.0
    if achieved > tol:
        raise NumericError(f"oracle quadrature error estimate {achieved:.2e} exceeds {tol:.1e}")
    return val


__all__ = ["BogoliubovPair", "LambdaMatrix", "AmplitudeTable", "bogoliubov", "lambda_matrix",
           "lambda_det_closed", "taylor_coeff", "taylor_coeff_grouped", "amplitude",
           "amplitude_table", "vacuum_persistence", "decay_ratio", "vacuum_decay_coeffs",
           "vacuum_phase_near_start", "hermite_function", "amplitude_oracle"]
