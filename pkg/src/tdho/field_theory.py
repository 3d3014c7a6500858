"""Fields as countable families of decoupled oscillators.

A :class:`ModeFamily` supplies ``kappa_l(t)`` for every mode; a
:class:`RepresentationSeq` fixes the Gaussian representation of each mode
through ``(alpha_l, beta_l)`` with ``alpha conj(beta) - beta conj(alpha) = i``.
Sweeps over modes use vectorised closed forms evaluated in fixed chunks, so
partial sums do not depend on the number of workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial
from typing import Callable

import numpy as np
from scipy import stats

from . import profiles
from ._parallel import chunked_map
from .classical import FundamentalPair
from .ermakov import EPSolution, fundamental_from_ep
from .errors import ContractError, DivergenceError, DomainError, UnsupportedError
from .models import (_s_basis_from_values, gowdy_s_pair_arrays, gowdy_t3_pair_arrays,
                     pair_for)
from .propagator import (check_ccr, kernel_measure_rep, kernel_shifted, kernel_value,
                         measure_vacuum_element)
from .specfun import bessel_j0y0, legendre_pq_all

FAMILY_KINDS = ("minkowski", "gowdy_t3", "gowdy_s", "tachyonic", "finite")


@dataclass(frozen=True)
class ModeFamily:
    """Mode family.

    ``minkowski``, ``gowdy_t3`` and ``tachyonic`` are labelled by nonzero
    integers (modes ``l`` and ``-l`` coincide, so each positive ``l`` carries
    multiplicity 2); ``gowdy_s`` by positive integers; ``finite`` by
    ``1..len(kappas)`` with one constant ``kappa`` per mode.
    """

    kind: str
    kappas: tuple = ()

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ContractError(f"unknown family {self.kind!r}; expected one of {FAMILY_KINDS}")
        if self.kind == "finite":
            if not self.kappas or any(not k > 0 for k in self.kappas):
                raise ContractError("a finite family needs a non-empty list of positive kappas")

    @property
    def multiplicity(self):
        return 2 if self.kind in ("minkowski", "gowdy_t3", "tachyonic") else 1

    @property
    def size(self):
        return len(self.kappas) if self.kind == "finite" else None

    @property
    def interval(self):
        if self.kind == "gowdy_t3":
            return (0.0, math.inf)
        if self.kind == "gowdy_s":
            return (0.0, math.pi)
        return (-math.inf, math.inf)

    def check_mode(self, ell):
        if int(ell) != ell or ell == 0:
            raise DomainError(f"mode {ell} is not a nonzero integer")
        if self.kind in ("gowdy_s", "finite") and ell < 0:
            raise DomainError(f"mode {ell} is not a positive integer")
        if self.kind == "finite" and ell > len(self.kappas):
            raise DomainError(f"mode {ell} exceeds the family size {len(self.kappas)}")
        return int(ell)

    def check_times(self, *ts):
        lo, hi = self.interval
        for t in ts:
            if not lo < t < hi:
                raise DomainError(f"time {t} is outside {self.interval}")

    def frequency(self, ell):
        """Reference frequency used by the standard representation."""
        ell = self.check_mode(ell)
        if self.kind == "finite":
            return math.sqrt(self.kappas[ell - 1])
        return float(abs(ell))

    def kappa(self, ell, t):
        ell = self.check_mode(ell)
        return float(self.profile(ell).kappa(t))

    def profile(self, ell):
        ell = abs(self.check_mode(ell))
        if self.kind == "minkowski":
            return profiles.constant(float(ell * ell))
        if self.kind == "tachyonic":
            return profiles.tachyonic(float(ell))
        if self.kind == "gowdy_t3":
            return profiles.gowdy_t3(float(ell))
        if self.kind == "gowdy_s":
            return profiles.gowdy_s(math.sqrt(ell * (ell + 1.0)))
        return profiles.constant(float(self.kappas[ell - 1]))

    def pair(self, ell, t0, t) -> FundamentalPair:
        """Fundamental pair of mode ``ell`` from the closed forms."""
        ell = abs(self.check_mode(ell))
        self.check_times(t0, t)
        if t == t0:
            return FundamentalPair(float(t0), float(t), 1.0, 0.0, 0.0, 1.0)
        c, s, cd, sd = _pair_arrays(self.kind, self.kappas, t0, t, np.array([ell]))
        return FundamentalPair(float(t0), float(t), float(c[0]), float(s[0]), float(cd[0]),
                               float(sd[0]))

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "finite":
            d["kappas"] = list(self.kappas)
        return d


def _pair_arrays(kind, kappas, t0, t, ells):
    """Vectorised ``(c, s, c_dot, s_dot)`` over positive mode labels."""
    ells = np.asarray(ells)
    if kind in ("minkowski", "finite"):
        w = ells.astype(float) if kind == "minkowski" else np.sqrt(np.asarray(kappas)[ells - 1])
        x = w * (t - t0)
        return np.cos(x), np.sin(x) / w, -w * np.sin(x), np.cos(x)
    if kind == "tachyonic":
        w = ells.astype(float)
        x = w * (t - t0)
        return np.cosh(x), np.sinh(x) / w, w * np.sinh(x), np.cosh(x)
    if kind == "gowdy_t3":
        return gowdy_t3_pair_arrays(ells.astype(float), t0, t)
    return gowdy_s_pair_arrays(ells, t0, t)


@dataclass(frozen=True)
class RepresentationSeq:
    """``alpha_l`` and ``beta_l`` of the Gaussian representation.

    ``standard`` is ``alpha = exp(i gamma)/sqrt(2 w)``,
    ``beta = -i sqrt(w/2) exp(i gamma)`` with ``w`` the family's reference
    frequency; ``gamma`` is an optional callable ``l -> phase``.  ``custom``
    takes callables for ``alpha`` and ``beta``.
    """

    kind: str = "standard"
    gamma: Callable | None = None
    alpha_fn: Callable | None = None
    beta_fn: Callable | None = None

    def coefficients(self, family: ModeFamily, ell):
        if self.kind == "standard":
            w = family.frequency(ell)
            ph = np.exp(1j * self.gamma(ell)) if self.gamma is not None else 1.0
            return complex(ph / math.sqrt(2 * w)), complex(-1j * math.sqrt(w / 2) * ph)
        if self.kind == "custom":
            a, b = check_ccr(self.alpha_fn(ell), self.beta_fn(ell))
            return a, b
        raise ContractError(f"unknown representation {self.kind!r}")

    def arrays(self, family: ModeFamily, ells):
        ells = np.asarray(ells)
        if self.kind == "standard" and self.gamma is None:
            w = (ells.astype(float) if family.kind != "finite"
                 else np.sqrt(np.asarray(family.kappas)[ells - 1]))
            return (1.0 / np.sqrt(2 * w) + 0j), (-1j * np.sqrt(w / 2))
        ab = [self.coefficients(family, int(e)) for e in ells]
        return (np.array([x[0] for x in ab], dtype=complex),
                np.array([x[1] for x in ab], dtype=complex))


STANDARD = RepresentationSeq()


def bogoliubov_from_pair(c, s, cd, sd, alpha, beta):
    """Mode coefficients ``(A, B)`` from the pair and the representation (vectorised)."""
    ac, bc = np.conj(alpha), np.conj(beta)
    a = 1j * (sd * ac * beta - c * bc * alpha + cd * np.abs(alpha) ** 2 - s * np.abs(beta) ** 2)
    b = 1j * ((sd - c) * ac * bc + cd * ac * ac - s * bc * bc)
    return a, b


def mode_bogoliubov(family: ModeFamily, rep: RepresentationSeq, ell, t0, t):
    """``(A_l, B_l)`` at ``(t, t0)``."""
    p = family.pair(ell, t0, t)
    alpha, beta = rep.coefficients(family, ell)
    a, b = bogoliubov_from_pair(p.c, p.s, p.c_dot, p.s_dot, alpha, beta)
    return complex(a), complex(b)


def _bogoliubov_chunk(kind, kappas, rep, t0, t, ells):
    fam = ModeFamily(kind, kappas)
    c, s, cd, sd = _pair_arrays(kind, kappas, t0, t, ells)
    alpha, beta = rep.arrays(fam, ells)
    a, b = bogoliubov_from_pair(c, s, cd, sd, alpha, beta)
    return np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)


def mode_bogoliubov_sweep(family: ModeFamily, rep: RepresentationSeq, t0, t, lmax, workers=None):
    """``(ells, A, B)`` for the positive labels ``1..lmax``."""
    family.check_times(t0, t)
    if family.kind == "finite":
        lmax = min(lmax, len(family.kappas))
    ells = np.arange(1, int(lmax) + 1)
    if t == t0:
        return ells, np.ones(len(ells), dtype=complex), np.zeros(len(ells), dtype=complex)
    fn = partial(_bogoliubov_chunk, family.kind, family.kappas, rep, float(t0), float(t))
    a, b = chunked_map(fn, ells, workers)
    return ells, a, b


# ---------------------------------------------------------------------------
# square summability of B


@dataclass
class TailFit:
    exponent: float
    lower: float
    upper: float
    points: int


@dataclass
class TruncationReport:
    """Partial sums of ``sum |B_l|^2`` along a schedule and a tail-decay verdict."""

    L_values: list
    partial_sums: list
    fit: TailFit | None
    verdict: str
    max_defect: float
    terms: np.ndarray = field(repr=False, default=None)

    @property
    def fitted_decay(self):
        return self.fit.exponent if self.fit else math.inf

    def to_dict(self):
        return {
            "L_values": [int(x) for x in self.L_values],
            "partial_sums": [float(x) for x in self.partial_sums],
            "fitted_decay": None if self.fit is None else float(self.fit.exponent),
            "confidence_interval": None if self.fit is None else [float(self.fit.lower),
                                                                   float(self.fit.upper)],
            "verdict": self.verdict,
            "max_unitarity_defect": float(self.max_defect),
        }


ZERO_FLOOR = 1e-28


def fit_tail(ells, terms, bins=12, level=0.95, start_fraction=0.05) -> TailFit | None:
    """Fit ``terms ~ C l^(-p)`` on the tail by regression of log-spaced bin means.

    Averaging over logarithmic bins removes the oscillation of individual
    terms; the confidence interval comes from the regression standard error.
    Returns ``None`` when every term is below the zero floor.
    """
    ells = np.asarray(ells, dtype=float)
    terms = np.asarray(terms, dtype=float)
    if np.all(terms < ZERO_FLOOR):
        return None
    lo = max(1.0, start_fraction * ells[-1])
    edges = np.unique(np.round(np.geomspace(lo, ells[-1] + 1, bins + 1)))
    xs, ys = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        m = (ells >= a) & (ells < b)
        if np.any(m):
            mean = terms[m].mean()
            if mean > ZERO_FLOOR:
                xs.append(math.log(ells[m].mean()))
                ys.append(math.log(mean))
    if len(xs) < 3:
        raise DomainError("not enough tail bins for a decay fit; raise L")
    res = stats.linregress(xs, ys)
    tq = stats.t.ppf(0.5 + level / 2, len(xs) - 2)
    p = -res.slope
    return TailFit(float(p), float(p - tq * res.stderr), float(p + tq * res.stderr), len(xs))


def verdict_of(fit: TailFit | None):
    if fit is None:
        return "convergent"
    if fit.lower > 1.0:
        return "convergent"
    if fit.upper < 1.0:
        return "divergent"
    return "inconclusive"


def unitarity_test(family: ModeFamily, rep: RepresentationSeq, t0, t, L_schedule,
                   workers=None) -> TruncationReport:
    """Partial sums of ``|B_l|^2`` (with multiplicity) and a tail verdict."""
    sched = [int(x) for x in L_schedule]
    if not sched or any(b <= a for a, b in zip(sched, sched[1:])) or sched[0] < 1:
        raise ContractError("L_schedule must be an increasing list of positive integers")
    ells, a, b = mode_bogoliubov_sweep(family, rep, t0, t, sched[-1], workers)
    terms = family.multiplicity * np.abs(b) ** 2
    # relative to |A|^2 so that growing modes are judged fairly
    defect = (float(np.max(np.abs(np.abs(a) ** 2 - np.abs(b) ** 2 - 1.0) / np.abs(a) ** 2))
              if len(a) else 0.0)
    partial = [float(math.fsum(terms[:L])) for L in sched]
    if family.kind == "finite":
        fit, verdict = None, "convergent"
    else:
        fit = fit_tail(ells, terms)
        verdict = verdict_of(fit)
    return TruncationReport(sched, partial, fit, verdict, defect, terms)


@dataclass
class VacuumAmplitude:
    value: float
    tail_bound: float
    L: int


def vacuum_amplitude_magnitude(family: ModeFamily, rep: RepresentationSeq, t0, t, L,
                               workers=None) -> VacuumAmplitude:
    """``prod_l |A_l(t0, t)|^(-1/2)`` over ``|l| <= L`` with a tail bound.

    ``|A|^2 = 1 + |B|^2`` gives ``-log`` of the omitted factors at most
    ``(1/4) sum_{l > L} |B_l|^2``, which is bounded with the fitted decay
    (using the lower confidence limit of the exponent).

    Raises
    ------
    DivergenceError
        When the square-summability verdict is not convergent.
    """
    rep_ = unitarity_test(family, rep, t0, t, [L], workers)
    if rep_.verdict != "convergent":
        raise DivergenceError(f"sum |B_l|^2 is {rep_.verdict}; the vacuum amplitude is not defined")
    # |A_l(t0, t)| = |A_l(t, t0)|
    log_mag = -0.25 * math.fsum(np.log1p(rep_.terms / family.multiplicity) * family.multiplicity)
    if rep_.fit is None or family.kind == "finite":
        tail = 0.0
    else:
        p = rep_.fit.lower
        ells = np.arange(1, L + 1)
        k = max(1, L // 2)
        # constant from the last half of the terms, tail integral of C x^-p beyond L
        c = float(np.max(rep_.terms[k - 1:] * ells[k - 1:] ** p))
        tail = 0.25 * c * L ** (1 - p) / (p - 1)
    value = math.exp(log_mag)
    return VacuumAmplitude(value, value * (1 - math.exp(-tail)), int(L))


# ---------------------------------------------------------------------------
# field propagator factor and phases


def field_kernel_factor(family: ModeFamily, rep: RepresentationSeq, ell, t0, t, q=None, q0=None,
                        theta=0.0):
    """Mode factor of the field kernel in the measure representation.

    Returns the :class:`KernelValue` record when ``q`` is ``None`` and its
    value at ``(q, q0)`` otherwise.  ``theta`` is a callable or constant
    added to the mode Hamiltonian.
    """
    family.check_times(t0, t)
    # zero counts are needed for the branch of the amplitude
    p = pair_for(family.profile(ell), t0, t)
    alpha, beta = rep.coefficients(family, ell)
    kv = kernel_shifted(kernel_measure_rep(kernel_value(p), alpha, beta), theta, t0, t)
    if q is None:
        return kv
    return kv(q, q0)


def mode_vacuum_element(family: ModeFamily, rep: RepresentationSeq, ell, t0, t, theta=0.0):
    """``<1 | K_l 1>`` for one mode of the field kernel."""
    kv = field_kernel_factor(family, rep, ell, t0, t, theta=theta)
    alpha, _ = rep.coefficients(family, ell)
    return measure_vacuum_element(kv, alpha)


def normal_order_theta(family: ModeFamily, ell):
    return -0.5 * family.frequency(ell)


# ---------------------------------------------------------------------------
# canonical Ermakov-Pinney data per mode


def _canonical_rho_arrays(kind, kappas, t, ells):
    """``(rho, rho_dot)`` of the mode-wise canonical choice at ``t`` (vectorised)."""
    ells = np.asarray(ells)
    if kind in ("minkowski", "finite"):
        w = ells.astype(float) if kind == "minkowski" else np.sqrt(np.asarray(kappas)[ells - 1])
        return w**-0.5, np.zeros_like(w)
    if kind == "gowdy_t3":
        w = ells.astype(float)
        j0, y0, j1, y1 = bessel_j0y0(w * t)
        r2 = 0.5 * math.pi * t * (j0 * j0 + y0 * y0)
        dr2 = 0.5 * math.pi * (j0 * j0 + y0 * y0) - math.pi * t * w * (j0 * j1 + y0 * y1)
        r = np.sqrt(r2)
        return r, dr2 / (2 * r)
    if kind == "gowdy_s":
        nmax = int(ells.max()) + 1
        p, q = legendre_pq_all(nmax, np.array([math.cos(t)]))
        u1, u1d, u2, u2d = _s_basis_from_values(ells.astype(float), t, p[ells, 0], q[ells, 0],
                                                p[ells + 1, 0], q[ells + 1, 0])
        w1, w2 = 0.5 * math.pi, 2.0 / math.pi
        r = np.sqrt(w1 * u1 * u1 + w2 * u2 * u2)
        return r, (w1 * u1 * u1d + w2 * u2 * u2d) / r
    raise UnsupportedError(f"no canonical Ermakov-Pinney choice for the {kind} family")


@dataclass
class ModeEPData:
    """Per-mode ``rho`` data at ``t0`` and ``t`` with the rotation angle."""

    ells: np.ndarray
    rho0: np.ndarray
    rho_dot0: np.ndarray
    rho: np.ndarray
    rho_dot: np.ndarray
    sin_phase: np.ndarray
    cos_phase: np.ndarray


def _ep_chunk(kind, kappas, t0, t, ells):
    r0, rd0 = _canonical_rho_arrays(kind, kappas, t0, ells)
    r, rd = _canonical_rho_arrays(kind, kappas, t, ells)
    c, s, _, _ = _pair_arrays(kind, kappas, t0, t, ells)
    # sin and cos of the accumulated phase from the pair (no unwrapping needed)
    sn = s / (r * r0)
    cs = (r0 / r) * (c + r * rd0 * sn)
    return r0, rd0, r, rd, sn, cs


def mode_ep_data(family: ModeFamily, t0, t, lmax, ep_seq=None, workers=None) -> ModeEPData:
    """Canonical (or user supplied) ``rho_l`` data for ``l = 1..lmax``.

    ``ep_seq`` may map a mode label to an :class:`EPSolution`; labels it
    does not cover use the canonical choice.
    """
    family.check_times(t0, t)
    if family.kind == "finite":
        lmax = min(lmax, len(family.kappas))
    ells = np.arange(1, int(lmax) + 1)
    if ep_seq is None:
        fn = partial(_ep_chunk, family.kind, family.kappas, float(t0), float(t))
        arrs = chunked_map(fn, ells, workers)
        return ModeEPData(ells, *arrs)
    rows = []
    for ell in ells:
        ep = ep_seq.get(int(ell)) if hasattr(ep_seq, "get") else ep_seq(int(ell))
        if ep is None:
            rows.append([a[0] for a in _ep_chunk(family.kind, family.kappas, t0, t,
                                                 np.array([ell]))])
            continue
        if not isinstance(ep, EPSolution):
            raise ContractError("ep_seq entries must be EPSolution objects")
        r0, rd0 = ep.values(t0)
        r, rd = ep.values(t)
        p = fundamental_from_ep(ep, t0, t)
        sn = p.s / (r * r0)
        rows.append([r0, rd0, r, rd, sn, (r0 / r) * (p.c + r * rd0 * sn)])
    arr = np.array(rows, dtype=float).T
    return ModeEPData(ells, *arr)


@dataclass
class ObstructionReport:
    ells: np.ndarray
    uniT_terms: np.ndarray
    uniR_terms: np.ndarray
    uniT_partial: float
    uniR_partial: float
    rho_scaled_last: float
    rho_limit_one: bool
    uniR_max: float
    uniR_tends_to_zero: bool

    def to_dict(self):
        return {
            "L": int(self.ells[-1]),
            "uniT_partial_sum": float(self.uniT_partial),
            "uniR_partial_sum": float(self.uniR_partial),
            "uniR_max_term": float(self.uniR_max),
            "uniR_terms_tend_to_zero": bool(self.uniR_tends_to_zero),
            "rho_times_sqrt_l_at_L": float(self.rho_scaled_last),
            "rho_tends_to_one": bool(self.rho_limit_one),
        }


def factorization_obstruction(family: ModeFamily, rep: RepresentationSeq, t0, t, L,
                              ep_seq=None, workers=None) -> ObstructionReport:
    """Summands of the dilation (at ``t``) and rotation implementability series.

    ``uniT`` term: ``|alpha beta (rho - 1/rho) - alpha^2 rho_dot|^2``;
    ``uniR`` term: ``|(alpha^2 + beta^2) sin Phi|^2``.  Terms are per label;
    partial sums carry the family multiplicity.  ``uniR_tends_to_zero`` compares the largest term
    of the last quarter of modes with that of the first quarter.
    """
    d = mode_ep_data(family, t0, t, L, ep_seq, workers)
    alpha, beta = rep.arrays(family, d.ells)
    m = family.multiplicity
    ut = np.abs(alpha * beta * (d.rho - 1 / d.rho) - alpha**2 * d.rho_dot) ** 2
    ur = np.abs((alpha**2 + beta**2) * d.sin_phase) ** 2
    n = len(d.ells)
    q = max(1, n // 4)
    tends = bool(np.max(ur[-q:]) < 0.5 * np.max(ur[:q])) if n >= 8 else True
    scaled = float(d.rho[-1] * math.sqrt(family.frequency(int(d.ells[-1]))))
    return ObstructionReport(d.ells, ut, ur, m * math.fsum(ut), m * math.fsum(ur), scaled,
                             bool(abs(d.rho[-1] - 1) < 0.05), float(np.max(ur)), tends)


# ---------------------------------------------------------------------------
# three-block factorisation


@dataclass(frozen=True)
class BlockMap:
    """``X^-1 a X = p a + q a*`` for one mode."""

    p: complex
    q: complex

    @property
    def matrix(self):
        return np.array([[self.p, self.q], [np.conj(self.q), np.conj(self.p)]])

    @classmethod
    def from_matrix(cls, m):
        return cls(complex(m[0, 0]), complex(m[0, 1]))

    def then(self, other: "BlockMap") -> "BlockMap":
        """Map of the product operator ``self * other``."""
        return BlockMap.from_matrix(self.matrix @ other.matrix)

    @property
    def defect(self):
        return abs(self.p) ** 2 - abs(self.q) ** 2 - 1.0


@dataclass(frozen=True)
class AppendixFactors:
    ell: int
    D: BlockMap
    S: BlockMap
    R: BlockMap

    def composed(self) -> BlockMap:
        """Map of the evolution rebuilt from the blocks: ``D S R`` as a product."""
        return self.D.then(self.S).then(self.R)


def block_maps(alpha, beta, r0, rd0, r, rd, sn, cs):
    """The three per-mode block maps from ``rho`` data (scalars)."""
    ac, bc = np.conj(alpha), np.conj(beta)
    aa = abs(alpha) ** 2
    dlog = rd / r - rd0 / r0
    d = BlockMap(1 + 1j * aa * dlog, 1j * ac * ac * dlog)
    ratio = r / r0 - r0 / r
    s = BlockMap(1j * (beta * ac * r0 / r - alpha * bc * r / r0 + aa * rd0 / r0 * ratio),
                 1j * ac * (ac * rd0 / r0 - bc) * ratio)
    k = rd0 * rd0 + 1 / r0**2
    rr = BlockMap(cs + 1j * ((alpha * bc + beta * ac) * rd0 * r0 - aa * k
                             - abs(beta) ** 2 * r0 * r0) * sn,
                  1j * (2 * ac * bc * rd0 * r0 - ac * ac * k - bc * bc * r0 * r0) * sn)
    return d, s, rr


def appendix_factors(family: ModeFamily, rep: RepresentationSeq, ell, t0, t,
                     ep: EPSolution | None = None) -> AppendixFactors:
    """Dilation, squeeze and rotation blocks of one mode at ``(t, t0)``."""
    ell = family.check_mode(ell)
    family.check_times(t0, t)
    pos = abs(ell)
    if ep is None:
        d = mode_ep_data(family, t0, t, pos)
        i = pos - 1
        vals = (d.rho0[i], d.rho_dot0[i], d.rho[i], d.rho_dot[i], d.sin_phase[i], d.cos_phase[i])
    else:
        dd = mode_ep_data(family, t0, t, pos, ep_seq={pos: ep})
        vals = tuple(x[-1] for x in (dd.rho0, dd.rho_dot0, dd.rho, dd.rho_dot, dd.sin_phase,
                                     dd.cos_phase))
    alpha, beta = rep.coefficients(family, ell)
    return AppendixFactors(ell, *block_maps(alpha, beta, *[float(v) for v in vals]))


# ---------------------------------------------------------------------------
# coherent states of the field


def field_coherent_variances(family: ModeFamily, rep: RepresentationSeq, ell, t0, t):
    """``(dQ_l, dP_l)`` in the evolved coherent states (independent of the label)."""
    a, b = mode_bogoliubov(family, rep, ell, t0, t)
    alpha, beta = rep.coefficients(family, ell)
    return (abs(alpha * a + np.conj(alpha) * np.conj(b)),
            abs(beta * a + np.conj(beta) * np.conj(b)))


def field_coherent_means(family: ModeFamily, rep: RepresentationSeq, ell, z, t0, t):
    """Mean field and momentum of mode ``ell`` for label ``z_l = z``."""
    p = family.pair(ell, t0, t)
    alpha, beta = rep.coefficients(family, ell)
    q0, p0 = 2 * (alpha * z).real, 2 * (beta * z).real
    return p.flow(q0, p0)


def t3_constraint_check(z_seq) -> float:
    """``sum_l l |z_l|^2`` for a finitely supported label sequence ``{l: z_l}``."""
    items = z_seq.items() if hasattr(z_seq, "items") else z_seq
    terms = []
    for ell, z in items:
        if int(ell) != ell or ell == 0:
            raise DomainError(f"label {ell} is not a nonzero integer")
        terms.append(int(ell) * abs(complex(z)) ** 2)
    return math.fsum(terms)


__all__ = ["ModeFamily", "RepresentationSeq", "STANDARD", "TruncationReport", "TailFit",
           "VacuumAmplitude", "ObstructionReport", "BlockMap", "AppendixFactors", "ModeEPData",
           "bogoliubov_from_pair", "mode_bogoliubov", "mode_bogoliubov_sweep", "fit_tail",
           "unitarity_test", "vacuum_amplitude_magnitude", "field_kernel_factor",
           "mode_vacuum_element", "normal_order_theta", "mode_ep_data",
           "factorization_obstruction", "block_maps", "appendix_factors",
           "field_coherent_variances", "field_coherent_means", "t3_constraint_check"]
