"""Exact quantum propagator of the time-dependent oscillator.

Away from zeros of s(t, t0) the kernel is a complex Gaussian in (q, q0)
built from the classical pair; at a zero it collapses to a rescaled delta
function.  Delta kernels are never sampled: they are kept symbolically in
:class:`KernelValue` and applied exactly to Gaussian packets.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad

from .classical import ClassicalFlow, FundamentalPair, branch_power, solve_fundamental
from .ermakov import EPSolution, phase_integral
from .errors import CausticError, ContractError, DomainError, NumericError
from .profiles import FrequencyProfile

INV_SQRT_2PI_I = cmath.exp(-0.25j * math.pi) / math.sqrt(2.0 * math.pi)
CAUSTIC_TOL = 1e-13


@dataclass(frozen=True)
class KernelValue:
    """Kernel in the form ``amplitude * exp((i/2)(qtt q^2 + q00 q0^2 + 2 qc q q0))``.

    In the caustic regime the expression is further multiplied by
    ``delta(q0 - delta_scale * q)``.
    """

    regime: str
    amplitude: complex
    quad_tt: complex
    quad_00: complex = 0.0
    quad_cross: complex = 0.0
    delta_scale: float | None = None

    def __call__(self, q, q0):
        if self.regime != "regular":
            raise CausticError("a caustic kernel is a distribution and cannot be sampled")
        q = np.asarray(q)
        q0 = np.asarray(q0)
        return self.amplitude * np.exp(0.5j * (self.quad_tt * q * q + self.quad_00 * q0 * q0
                                               + 2.0 * self.quad_cross * q * q0))

    def collapsed(self):
        """Caustic record with the ``q0`` dependence substituted away."""
        if self.regime == "regular":
            return self
        d = self.delta_scale
        return KernelValue("caustic", self.amplitude,
                           self.quad_tt + self.quad_00 * d * d + 2.0 * self.quad_cross * d,
                           0.0, 0.0, d)

    def shifted(self, phase):
        """Multiply the amplitude by ``exp(-i * phase)``."""
        return replace(self, amplitude=self.amplitude * cmath.exp(-1j * phase))


def _is_caustic(pair, tol=CAUSTIC_TOL):
    return abs(pair.s) <= tol * max(1.0, abs(pair.c), abs(pair.s_dot))


def _index(value, fallback, name):
    if value is not None:
        return int(value)
    if fallback is None:
        raise ContractError(f"{name} is required (the pair carries no zero count)")
    return int(fallback)


def kernel_value(pair: FundamentalPair, index_s=None, index_c=None) -> KernelValue:
    """Regular or caustic kernel record for the pair at ``(t, t0)``."""
    if _is_caustic(pair):
        return kernel_caustic(pair, index_c)
    m = _index(index_s, pair.index_s, "index_s")
    s = pair.s
    amp = INV_SQRT_2PI_I * branch_power(s, m, -0.5)
    return KernelValue("regular", amp, pair.s_dot / s, pair.c / s, -1.0 / s)


def kernel(pair: FundamentalPair, index_s, q, q0):
    """Propagator value ``K(q, t; q0, t0)`` where ``s(t, t0) != 0``.

    Parameters
    ----------
    pair : FundamentalPair
    index_s : int or None
        Zero count of s(., t0) between t0 and t; ``None`` uses ``pair.index_s``.
    q, q0 : float or array

    Raises
    ------
    CausticError
        If s vanishes; use :func:`kernel_caustic`.
    """
    if _is_caustic(pair):
        raise CausticError(f"s(t, t0) vanishes at t={pair.t}; use kernel_caustic")
    return kernel_value(pair, index_s)(q, q0)


def kernel_caustic(pair: FundamentalPair, index_c=None) -> KernelValue:
    """Delta-type kernel at a zero of s.

    ``K = c^(-1/2) exp(i c_dot q^2 / (2c)) delta(q0 - q/c)``, with the branch
    of ``c^(-1/2)`` fixed by the zero count of c.  The phase is quadratic in
    ``q``; this is what the exact evolution of packets (and continuity with
    the regular kernel) requires.
    """
    if not _is_caustic(pair, 1e-8):
        raise ContractError(f"kernel_caustic called with s={pair.s} != 0")
    if pair.c == 0:
        raise NumericError("s and c vanish together, contradicting the unit Wronskian")
    m = _index(index_c, pair.index_c, "index_c")
    return KernelValue("caustic", branch_power(pair.c, m, -0.5), pair.c_dot / pair.c,
                       0.0, 0.0, 1.0 / pair.c)


def _theta_integral(theta, t0, t):
    if callable(theta):
        val, err = quad(theta, t0, t, epsabs=1e-13, epsrel=1e-12, limit=200)
        if err > 1e-9 * max(1.0, abs(val)):
            raise NumericError(f"theta quadrature error {err:.2e}")
        return val
    return float(theta) * (t - t0)


def kernel_shifted(base: KernelValue, theta, t0, t) -> KernelValue:
    """Kernel of the Hamiltonian shifted by ``theta(t)`` times the identity.

    ``theta`` is a callable or a constant; the amplitude picks up
    ``exp(-i int_{t0}^{t} theta)``.
    """
    return base.shifted(_theta_integral(theta, t0, t))


def check_ccr(alpha, beta, tol=1e-12):
    alpha, beta = complex(alpha), complex(beta)
    val = alpha * beta.conjugate() - beta * alpha.conjugate()
    if abs(val - 1j) > tol * max(1.0, abs(alpha) * abs(beta)):
        raise ContractError(f"alpha conj(beta) - beta conj(alpha) = {val}, expected i")
    return alpha, beta


def kernel_measure_rep(base: KernelValue, alpha, beta, inverse=False) -> KernelValue:
    """Kernel with respect to the Gaussian measure of covariance ``|alpha|^2``.

    Multiplies by ``sqrt(2 pi) |alpha| exp(i beta q0^2/(2 alpha) - i conj(beta) q^2/(2 conj(alpha)))``
    (or divides, with ``inverse=True``).
    """
    alpha, beta = check_ccr(alpha, beta)
    sgn = -1.0 if inverse else 1.0
    fac = math.sqrt(2 * math.pi) * abs(alpha)
    amp = base.amplitude * (fac if not inverse else 1.0 / fac)
    return replace(base, amplitude=amp,
                   quad_00=base.quad_00 + sgn * beta / alpha,
                   quad_tt=base.quad_tt - sgn * beta.conjugate() / alpha.conjugate())


def _gauss(a, b=0.0):
    """``int exp(-a x^2/2 + b x) dx`` for ``Re a > 0``."""
    if not a.real > 0:
        raise NumericError(f"divergent Gaussian integral (Re a = {a.real})")
    return cmath.sqrt(2 * math.pi / a) * cmath.exp(b * b / (2 * a))


def measure_vacuum_element(kv: KernelValue, alpha) -> complex:
    """``<1 | K 1>`` in ``L^2`` of the Gaussian measure with variance ``|alpha|^2``.

    ``kv`` must already be in the measure representation.
    """
    w = 1.0 / abs(alpha) ** 2
    norm = 1.0 / (2 * math.pi * abs(alpha) ** 2)
    if kv.regime == "regular":
        m22 = w - 1j * kv.quad_00
        m11 = w - 1j * kv.quad_tt
        m12 = -1j * kv.quad_cross
        inner = _gauss(m22)
        outer = _gauss(m11 - m12 * m12 / m22)
        return norm * kv.amplitude * inner * outer
    k = kv.collapsed()
    d = k.delta_scale
    return norm * k.amplitude * _gauss(w + w * d * d - 1j * k.quad_tt)


@dataclass(frozen=True)
class GaussianPacket:
    """``psi(q) = exp(-a q^2 / 2 + b q + log_norm)`` with ``Re a > 0``."""

    a: complex
    b: complex = 0.0
    log_norm: complex = 0.0

    def __post_init__(self):
        if not complex(self.a).real > 0:
            raise ContractError("a Gaussian packet needs Re(a) > 0")

    @classmethod
    def ground(cls, omega=1.0):
        return cls(complex(omega), 0j, complex(0.25 * math.log(omega / math.pi)))

    @classmethod
    def coherent(cls, omega, q_mean, p_mean):
        """Minimum-uncertainty packet of width ``1/sqrt(2 omega)`` centred at (q, p)."""
        b = omega * q_mean + 1j * p_mean
        ln = 0.25 * math.log(omega / math.pi) - 0.5 * omega * q_mean**2 - 0.5j * q_mean * p_mean
        return cls(complex(omega), complex(b), complex(ln))

    def __call__(self, q):
        q = np.asarray(q)
        return np.exp(-0.5 * self.a * q * q + self.b * q + self.log_norm)

    @property
    def norm_squared(self):
        ar = self.a.real
        return math.sqrt(math.pi / ar) * math.exp(self.b.real**2 / ar + 2 * self.log_norm.real)

    @property
    def norm(self):
        return math.sqrt(self.norm_squared)

    def overlap(self, other) -> complex:
        """``<self | other>``."""
        a = self.a.conjugate() + other.a
        b = self.b.conjugate() + other.b
        return _gauss(a, b) * cmath.exp(self.log_norm.conjugate() + other.log_norm)

    def mean_position(self):
        return self.b.real / self.a.real

    def shifted(self, phase):
        return replace(self, log_norm=self.log_norm - 1j * phase)


def evolve_gaussian(pair: FundamentalPair, index_s, packet: GaussianPacket,
                    index_c=None) -> GaussianPacket:
    """Apply the exact propagator to a Gaussian packet.

    Regular times use the closed-form Gaussian integral against the kernel;
    caustic times apply ``psi -> c^(-1/2) exp(i c_dot q^2/(2c)) psi(q/c)``.
    """
    a, b, ln = complex(packet.a), complex(packet.b), complex(packet.log_norm)
    c, s, cd, sd = pair.c, pair.s, pair.c_dot, pair.s_dot
    if _is_caustic(pair):
        m = _index(index_c, pair.index_c, "index_c")
        a2 = a / (c * c) - 1j * cd / c
        b2 = b / c
        ln2 = ln - 0.5j * math.pi * m - 0.5 * math.log(abs(c))
        return GaussianPacket(a2, b2, ln2)
    m = _index(index_s, pair.index_s, "index_s")
    den = c + 1j * s * a
    alpha = a - 1j * c / s
    a2 = (sd * a - 1j * cd) / den
    b2 = b / den
    ln2 = (ln + b * b / (2 * alpha) - 0.25j * math.pi - 0.5j * math.pi * m
           - 0.5 * math.log(abs(s)) - 0.5 * cmath.log(alpha))
    return GaussianPacket(a2, b2, ln2)


def factorized_kernel_value(ep: EPSolution, t0, t) -> KernelValue:
    """Kernel assembled from the three-factor decomposition built on ``rho``.

    The inner factor is the unit-frequency (Feynman-Soriau) kernel at the
    accumulated phase ``Phi``; the outer factors are the dilation/chirp maps
    at ``t0`` and ``t``.  The delta functions are composed analytically.
    """
    r0, rd0 = ep.values(t0)
    r, rd = ep.values(t)
    phi = phase_integral(ep, t0, t)
    k = round(phi / math.pi)
    outer = (r * r0) ** -0.5
    if abs(phi - k * math.pi) <= 1e-12 * max(1.0, abs(phi)):
        # inner kernel cos(kpi)^(-1/2) delta(y - x / cos(k pi)); index of cos is k
        sign = -1.0 if k % 2 else 1.0
        amp = outer * r0 * cmath.exp(-0.5j * math.pi * k)
        return KernelValue("caustic", amp, rd / r, -rd0 / r0, 0.0, sign * r0 / r)
    sn, cs = math.sin(phi), math.cos(phi)
    amp = outer * INV_SQRT_2PI_I * branch_power(sn, math.floor(phi / math.pi), -0.5)
    cot = cs / sn
    return KernelValue("regular", amp, rd / r + cot / r**2, -rd0 / r0 + cot / r0**2,
                       -1.0 / (r * r0 * sn))


def kernel_via_factorization(ep: EPSolution, t0, t, q, q0):
    """Propagator value through the factorised route (regular times only)."""
    kv = factorized_kernel_value(ep, t0, t)
    if kv.regime != "regular":
        raise CausticError("caustic time; use factorized_kernel_value for the delta record")
    return kv(q, q0)


def feynman_soriau(upsilon, x, y):
    """Unit-frequency oscillator kernel after elapsed time ``upsilon``."""
    sn, cs = math.sin(upsilon), math.cos(upsilon)
    amp = INV_SQRT_2PI_I * branch_power(sn, math.floor(upsilon / math.pi), -0.5)
    return amp * np.exp(0.5j / sn * ((np.asarray(x) ** 2 + np.asarray(y) ** 2) * cs
                                      - 2 * np.asarray(x) * np.asarray(y)))


def pde_residual(profile: FrequencyProfile, t0, q_grid, t_grid, q0=0.5, h=1e-3,
                 tol=1e-12, richardson=True, return_grid=False):
    """Max over the grid of ``|i dK/dt + (1/2) d2K/dq2 - (1/2) q^2 kappa K|``.

    Derivatives are central differences with step ``h`` in both variables.
    With ``richardson=True`` (default) the steps ``h`` and ``h/2`` are
    combined, removing the ``O(h^2)`` truncation term; otherwise the plain
    second-order stencil is used.  The classical data come from one dense
    integration.

    Raises
    ------
    DomainError
        If a grid time lies within the stencil of a caustic or an endpoint.
    """
    flow = ClassicalFlow(profile, t0, tol)
    q = np.asarray(q_grid, dtype=float)
    res = np.empty((len(t_grid), len(q)))
    steps = (h, h / 2) if richardson else (h,)
    for i, t in enumerate(t_grid):
        t = float(t)
        for x in (t - h, t + h):
            profile.check_time(x)
        ref = solve_fundamental(profile, t0, t, tol)
        p0 = flow(t)
        near = [flow(t - h), flow(t + h)]
        if {np.sign(p.s) for p in near + [p0]} != {np.sign(p0.s)} or abs(p0.s) < 10 * h:
            raise DomainError(f"t={t} is within the difference stencil of a caustic")
        m = ref.index_s
        k0 = kernel_value(p0, m)
        kq = k0(q, q0)
        ests = []
        for st in steps:
            kp = kernel_value(flow(t + st), m)(q, q0)
            km = kernel_value(flow(t - st), m)(q, q0)
            dt = (kp - km) / (2 * st)
            dqq = (k0(q + st, q0) - 2 * kq + k0(q - st, q0)) / (st * st)
            ests.append((dt, dqq))
        if richardson:
            dt = (4 * ests[1][0] - ests[0][0]) / 3
            dqq = (4 * ests[1][1] - ests[0][1]) / 3
        else:
            dt, dqq = ests[0]
        kap = float(profile.kappa(t))
        res[i] = np.abs(1j * dt + 0.5 * dqq - 0.5 * q * q * kap * kq)
    if return_grid:
        return float(res.max()), res
    return float(res.max())
