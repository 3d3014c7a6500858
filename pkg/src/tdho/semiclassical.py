"""Lewis-invariant eigenstates and the coherent-like family built on ``rho``.

A state is the triple ``(ep, z, t0)``: the image at ``t0`` of the unit
frequency coherent state of label ``z`` under the dilation/chirp fixed by
``rho(t0)`` and ``rho_dot(t0)``.  Evolution only rotates the label by the
accumulated phase, so every observable is available in closed form.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .ermakov import EPSolution, phase_integral
from .errors import ContractError, DomainError
from .models import pair_for
from .propagator import GaussianPacket
from .transitions import hermite_function, vacuum_decay_coeffs

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class SemiclassicalState:
    ep: EPSolution
    z: complex
    t0: float

    @classmethod
    def from_cauchy(cls, ep: EPSolution, t0, q, p):
        """State whose mean follows the classical solution with data ``(q, p)`` at ``t0``."""
        r0, rd0 = ep.values(t0)
        x = q / (SQRT2 * r0)
        y = r0 * (p / SQRT2 - rd0 * x)
        return cls(ep, complex(x, y), float(t0))

    def cauchy_data(self):
        r0, rd0 = self.ep.values(self.t0)
        x, y = self.z.real, self.z.imag
        return SQRT2 * r0 * x, SQRT2 * (rd0 * x + y / r0)


@dataclass(frozen=True)
class UncertaintyRecord:
    t: float
    dq: float
    dp: float

    @property
    def product(self):
        return self.dq * self.dp


def lewis_eigenfunction(ep: EPSolution, t0, n, q):
    """Eigenfunction of the invariant with eigenvalue ``n + 1/2`` at ``t0``."""
    if int(n) != n or n < 0:
        raise ContractError("n must be a non-negative integer")
    r, rd = ep.values(t0)
    q = np.asarray(q, dtype=float)
    return r**-0.5 * hermite_function(int(n), 1.0, q / r) * np.exp(0.5j * rd / r * q * q)


def evolve_label(ep: EPSolution, z, t0, t):
    """Rotated label and global phase factor after evolving from ``t0`` to ``t``."""
    phi = phase_integral(ep, t0, t)
    return cmath.exp(-1j * phi) * complex(z), cmath.exp(-0.5j * phi)


def expectations(state: SemiclassicalState, t):
    """Position and momentum means at time ``t``."""
    zt, _ = evolve_label(state.ep, state.z, state.t0, t)
    r, rd = state.ep.values(t)
    return SQRT2 * r * zt.real, SQRT2 * (complex(rd, -1.0 / r) * zt).real


def uncertainties(ep: EPSolution, t) -> UncertaintyRecord:
    """Position and momentum spreads; the same for every label and anchor."""
    r, rd = ep.values(t)
    return UncertaintyRecord(float(t), r / SQRT2, abs(complex(rd, -1.0 / r)) / SQRT2)


def state_packet(state: SemiclassicalState, t) -> GaussianPacket:
    """The evolved state at ``t`` written as a Gaussian packet (global phase included)."""
    zt, glob = evolve_label(state.ep, state.z, state.t0, t)
    r, rd = state.ep.values(t)
    a = complex(1.0 / r**2, -rd / r)
    b = SQRT2 * zt / r
    ln = (-0.25 * math.log(math.pi) - 0.5 * math.log(r) - 0.5 * zt * zt - 0.5 * abs(zt) ** 2
          + cmath.log(glob))
    return GaussianPacket(a, b, ln)


@dataclass(frozen=True)
class BackwardVacuumRecord:
    t1: float
    persistence: float
    retained_mass: float
    coeffs: tuple


def backward_vacuum_profile(profile, omega, t1_list, t2, nmax=64, tol=1e-10):
    """Vacuum at ``t2`` evolved back to each ``t1``: overlaps with even levels.

    ``persistence`` is ``|<phi_0|U(t1, t2) phi_0>|``; ``retained_mass`` is the
    probability captured by levels ``0, 2, ..., 2 nmax``.
    """
    out = []
    for t1 in t1_list:
        t1 = float(t1)
        if not profile.contains(t1):
            raise DomainError(f"t1={t1} is outside {profile.interval}")
        if t1 == t2:
            coeffs = (1.0 + 0j,) + (0j,) * nmax
        else:
            pair = pair_for(profile, t2, t1, tol)
            coeffs = tuple(vacuum_decay_coeffs(pair, None, omega, nmax))
        mass = math.fsum(abs(c) ** 2 for c in coeffs)
        out.append(BackwardVacuumRecord(t1, abs(coeffs[0]), mass, coeffs))
    return out


__all__ = ["SemiclassicalState", "UncertaintyRecord", "BackwardVacuumRecord",
           "lewis_eigenfunction", "evolve_label", "expectations", "uncertainties",
           "state_packet", "backward_vacuum_profile"]
