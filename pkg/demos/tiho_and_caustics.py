"""Constant-frequency oscillator: kernel, amplitudes and the caustic crossing.

Run with ``python demos/tiho_and_caustics.py``.
"""

import math

from tdho import profiles
from tdho.classical import closed_form_constant, maslov_indices, solve_fundamental
from tdho.propagator import kernel_value
from tdho.transitions import amplitude

omega = 2.0
prof = profiles.constant(omega**2)

# Integrated and closed-form pairs agree, and the Wronskian stays at one.
exact = closed_form_constant(omega**2, 0.0, 1.3)
numeric = solve_fundamental(prof, 0.0, 1.3)
print(f"pair at t=1.3: c={numeric.c:.12f} (exact {exact.c:.12f}), W-1={numeric.wronskian - 1:.1e}")

# Zeros of s are caustics; the kernel switches to its delta form there.
print("\nkernel regime and zero counts across the first caustics (omega t = k pi):")
for t in (1.0, 2.0, 3.5):
    m_s, m_c = maslov_indices(prof, 0.0, t)
    kv = kernel_value(solve_fundamental(prof, 0.0, t), m_s, m_c)
    print(f"  t={t:6.4f}  zeros of s before t={m_s}  regime={kv.regime}  amplitude={kv.amplitude:.6f}")
# at the caustic itself the closed form gives s = 0 to rounding
for t in (math.pi / 2, math.pi):
    kv = kernel_value(closed_form_constant(omega**2, 0.0, t), index_c=0)
    print(f"  t={t:6.4f}  regime={kv.regime}")

# Energy levels of a constant oscillator only pick up a phase.
print("\n<n|U(t)|n> against exp(-i omega (n + 1/2) t):")
t = 0.9
pair = closed_form_constant(omega**2, 0.0, t)
for n in range(4):
    a = amplitude(pair, 0, omega, n, omega, n)
    ref = complex(math.cos(omega * (n + 0.5) * t), -math.sin(omega * (n + 0.5) * t))
    print(f"  n={n}  amplitude={a:.10f}  |diff|={abs(a - ref):.1e}")

# A frequency jump: evolve with omega, then measure the vacuum of a different oscillator.
jump = closed_form_constant(omega**2, 0.0, 0.0)
print(f"\n|<0_3|0_2>| after a sudden jump 2 -> 3: {abs(amplitude(jump, 0, omega, 0, 3.0, 0)):.12f}"
      f" (exact {math.sqrt(2 * math.sqrt(6) / 5):.12f})")
