"""Frequency profiles kappa(t) for the oscillator equation u'' + kappa(t) u = 0.

A profile couples a real function with the open interval on which it is
defined.  Closed-form models carry a :class:`ModelSpec` so that downstream
code can look up exact solutions; tabulated profiles interpolate a grid with
a monotone cubic rule.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ContractError, DomainError

MODEL_KINDS = ("constant", "free", "tachyonic", "mathieu", "gowdy_t3", "gowdy_s")


@dataclass(frozen=True)
class ModelSpec:
    """A named frequency model with its parameters.

    Parameters
    ----------
    kind : str
        One of ``constant``, ``free``, ``tachyonic``, ``mathieu``,
        ``gowdy_t3``, ``gowdy_s``.
    params : tuple of (name, value)
        Sorted parameter pairs; use the factory functions below rather than
        building this by hand.
    """

    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ContractError(f"unknown model kind {self.kind!r}")

    def get(self, name, default=None):
        return dict(self.params).get(name, default)

    @property
    def interval(self):
        if self.kind == "gowdy_t3":
            return (0.0, math.inf)
        if self.kind == "gowdy_s":
            return (0.0, math.pi)
        return (-math.inf, math.inf)

    @property
    def kappa0(self):
        """Constant value of kappa for the constant-type kinds."""
        if self.kind == "constant":
            return self.get("kappa0")
        if self.kind == "free":
            return 0.0
        if self.kind == "tachyonic":
            return -self.get("omega") ** 2
        return None

    def kappa(self, t):
        t = np.asarray(t, dtype=float)
        k = self.kind
        if k in ("constant", "free", "tachyonic"):
            return np.full_like(t, self.kappa0)
        if k == "mathieu":
            return self.get("a") - 2.0 * self.get("b") * np.cos(2.0 * t)
        if k == "gowdy_t3":
            return self.get("omega") ** 2 + 0.25 / t**2
        # gowdy_s
        return self.get("omega") ** 2 + 0.25 * (1.0 + 1.0 / np.sin(t) ** 2)

    def profile(self) -> "FrequencyProfile":
        return FrequencyProfile(kappa=self.kappa, interval=self.interval,
                                kind=self.kind, model=self)

    def to_dict(self):
        d = {"kind": self.kind}
        d.update(dict(self.params))
        return d


def _spec(kind, **params):
    return ModelSpec(kind, tuple(sorted((k, float(v)) for k, v in params.items())))


@dataclass(frozen=True)
class FrequencyProfile:
    """kappa(t) on an open interval.

    Attributes
    ----------
    kappa : callable
        Vectorised map from times to real frequencies squared.
    interval : (float, float)
        Open interval ``(t_minus, t_plus)``; endpoints may be infinite.
    kind : str
        Model kind, ``"table"`` or ``"callable"``.
    model : ModelSpec or None
        Set for closed-form models.
    """

    kappa: Callable
    interval: tuple
    kind: str = "callable"
    model: ModelSpec | None = None
    grid: tuple | None = field(default=None, compare=False)

    def check_time(self, t, what="t"):
        lo, hi = self.interval
        if not (lo < t < hi) or not math.isfinite(t):
            raise DomainError(f"{what}={t!r} is not inside the open interval {self.interval}")
        if self.grid is not None and not (self.grid[0] <= t <= self.grid[1]):
            raise DomainError(f"{what}={t!r} lies outside the tabulated grid {self.grid}")

    def contains(self, t):
        try:
            self.check_time(t)
        except DomainError:
            return False
        return True

    def __call__(self, t):
        return self.kappa(t)

    def label(self):
        if self.model is not None:
            inner = ", ".join(f"{k}={v:g}" for k, v in self.model.params)
            return f"{self.kind}({inner})"
        return self.kind


def constant(kappa0) -> FrequencyProfile:
    """Time-independent oscillator; ``kappa0`` may be of either sign."""
    return _spec("constant", kappa0=kappa0).profile()


def free() -> FrequencyProfile:
    return _spec("free").profile()


def tachyonic(omega) -> FrequencyProfile:
    return _spec("tachyonic", omega=omega).profile()


def mathieu(a, b) -> FrequencyProfile:
    """kappa(t) = a - 2 b cos(2t) on the real line."""
    return _spec("mathieu", a=a, b=b).profile()


def gowdy_t3(omega) -> FrequencyProfile:
    """kappa(t) = omega^2 + 1/(4 t^2) on (0, inf)."""
    if omega <= 0:
        raise ContractError("gowdy_t3 requires omega > 0")
    return _spec("gowdy_t3", omega=omega).profile()


def gowdy_s(omega) -> FrequencyProfile:
    """kappa(t) = omega^2 + (1 + csc^2 t)/4 on (0, pi)."""
    if omega < 0:
        raise ContractError("gowdy_s requires omega >= 0")
    return _spec("gowdy_s", omega=omega).profile()


def model(kind, **params) -> FrequencyProfile:
    factories = {"constant": constant, "free": free, "tachyonic": tachyonic,
                 "mathieu": mathieu, "gowdy_t3": gowdy_t3, "gowdy_s": gowdy_s}
    if kind not in factories:
        raise ContractError(f"unknown model kind {kind!r}")
    return factories[kind](**params)


def tabulated(ts, kappas, interval=None) -> FrequencyProfile:
    """Profile interpolated from samples with a monotone cubic (PCHIP) rule.

    The grid must be strictly increasing.  Queries are allowed on the closed
    grid range intersected with the open ``interval`` (which defaults to the
    grid range itself, so the first and last nodes are excluded).
    """
    ts = np.asarray(ts, dtype=float)
    ks = np.asarray(kappas, dtype=float)
    if ts.ndim != 1 or ts.shape != ks.shape or ts.size < 2:
        raise ContractError("table needs two equal-length columns with at least two rows")
    if np.any(np.diff(ts) <= 0):
        raise ContractError("table times must be strictly increasing")
    if not np.all(np.isfinite(ks)):
        raise ContractError("table kappa values must be finite")
    interp = PchipInterpolator(ts, ks, extrapolate=False)
    if interval is None:
        interval = (float(ts[0]), float(ts[-1]))
    return FrequencyProfile(kappa=lambda t: interp(np.asarray(t, dtype=float)),
                            interval=tuple(interval), kind="table",
                            grid=(float(ts[0]), float(ts[-1])))


def read_table(path):
    """Read a two-column ``t,kappa`` CSV (header optional)."""
    ts, ks = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                t, k = float(row[0]), float(row[1])
            except ValueError:
                continue  # header
            ts.append(t)
            ks.append(k)
    return tabulated(ts, ks)


def from_json(doc, base_dir=None) -> FrequencyProfile:
    """Build a profile from a JSON-like mapping.

    ``{"kind": "mathieu", "a": 2, "b": 0.3}``; tables use ``{"kind": "table",
    "file": "k.csv"}`` or inline ``"t"``/``"kappa"`` arrays.  An optional
    ``"interval"`` narrows the natural interval of the model.
    """
    doc = dict(doc)
    kind = doc.pop("kind", None)
    interval = doc.pop("interval", None)
    if kind == "table":
        if "file" in doc:
            import os
            path = doc["file"]
            if base_dir is not None and not os.path.isabs(path):
                path = os.path.join(base_dir, path)
            prof = read_table(path)
        else:
            prof = tabulated(doc["t"], doc["kappa"])
        if interval is not None:
            prof = FrequencyProfile(prof.kappa, tuple(interval), "table", None, prof.grid)
        return prof
    prof = model(kind, **doc)
    if interval is not None:
        lo, hi = prof.interval
        ilo, ihi = float(interval[0]), float(interval[1])
        if ilo < lo or ihi > hi or ilo >= ihi:
            raise ContractError(f"interval {interval} is not inside {prof.interval}")
        prof = FrequencyProfile(prof.kappa, (ilo, ihi), prof.kind, prof.model)
    return prof
