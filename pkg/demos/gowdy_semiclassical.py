"""Gowdy T^3 mode: Ermakov-Pinney width, coherent state and uncertainty product.

Run with ``python demos/gowdy_semiclassical.py``.
"""

import math

from tdho import profiles
from tdho.models import canonical_ep_solution, closed_form_pair
from tdho.semiclassical import SemiclassicalState, expectations, uncertainties

prof = profiles.gowdy_t3(1.0)
t0 = 1.0
ep = canonical_ep_solution(prof.model, t0)

state = SemiclassicalState.from_cauchy(ep, t0, q=0.4, p=-0.2)
print("coherent state built on the canonical width, followed in time:")
print("   t      <q>          classical q   dQ*dP        0.5*sqrt(1+(rho*rho')^2)")
for t in (1.0, 2.0, 5.0, 10.0, 30.0):
    pair = closed_form_pair(prof.model, t0, t)
    q_cl = pair.c * 0.4 + pair.s * (-0.2)
    q_mean, _ = expectations(state, t)
    u = uncertainties(ep, t)
    r, rd = ep.values(t)
    bound = 0.5 * math.sqrt(1 + (r * rd) ** 2)
    print(f"  {t:5.1f}  {q_mean:+.9f}  {q_cl:+.9f}  {u.product:.9f}  {bound:.9f}")

# Late times: the width settles to omega**-1/2 and the state approaches minimum uncertainty.
r, rd = ep.values(200.0)
print(f"\nrho(200) = {r:.6f}, rho*rho' = {r * rd:.2e}")
