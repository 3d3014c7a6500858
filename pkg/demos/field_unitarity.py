"""Field quantisation on three mode families: is the evolution unitarily implementable?

Run with ``python demos/field_unitarity.py``.  Sums of |B_l|^2 converge for
the Gowdy families and diverge for the tachyonic one.
"""

from tdho.field_theory import (STANDARD, ModeFamily, appendix_factors,
                               factorization_obstruction, mode_bogoliubov,
                               unitarity_test)

cases = [
    ("gowdy_t3", 1.0, 2.0, [250, 500, 1000, 2000]),
    ("gowdy_s", 0.5, 1.0, [250, 500, 1000, 2000]),
    ("tachyonic", 0.0, 0.3, [25, 50, 100]),
]
for kind, t0, t, sched in cases:
    rep = unitarity_test(ModeFamily(kind), STANDARD, t0, t, sched)
    ci = "n/a" if rep.fit is None else f"[{rep.fit.lower:.2f}, {rep.fit.upper:.2f}]"
    print(f"{kind:10s} partial sums {[f'{x:.4g}' for x in rep.partial_sums]}")
    print(f"{'':10s} decay exponent {rep.fitted_decay:.2f} CI {ci} -> {rep.verdict}")

# Splitting each mode into dilation, squeeze and rotation blocks: the rotation
# series does not shrink with l even though the full evolution is implementable.
fam = ModeFamily("gowdy_s")
obs = factorization_obstruction(fam, STANDARD, 0.5, 1.0, 500)
print(f"\ngowdy_s rotation series partial sum to l=500: {obs.uniR_partial:.4g}"
      f" (terms tend to zero: {obs.uniR_tends_to_zero})")
f = appendix_factors(fam, STANDARD, 50, 0.5, 1.0)
a, b = mode_bogoliubov(fam, STANDARD, 50, 0.5, 1.0)
c = f.composed()
print(f"l=50: product of the three blocks matches (A, B) to {max(abs(c.p - a), abs(c.q - b)):.1e}")
