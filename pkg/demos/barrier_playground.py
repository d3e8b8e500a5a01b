"""Push the scalar barrier inequality until it breaks.

The controlled quantity v obeys dv/dt <= g(t) (eps + v + v^M) with the
integral of g capped by a budget B. Whenever eps is below an explicit
threshold the trajectory can never climb past 3 eps e^B; above the
threshold all bets are off. This script integrates the saturated
equation dv/dt = g (eps + v + v^M), first comfortably below threshold,
then just above, then runs a bisection to locate the transition and
compares it with the closed form.
"""

import math

from lpns import BarrierConfig, barrier_ode, epsilon_threshold

print("threshold (3 e^B)^(-M/(M-1)) for small eps:")
print("  M \\ B      1          2          4")
for m in (2.0, 3.0, 5.0):
    row = "  ".join(f"{epsilon_threshold(b, m):9.3e}" for b in (1.0, 2.0, 4.0))
    print(f"  {m:3.1f}   {row}")
print()

B, M, T = 2.0, 3.0, 1.0
thr = epsilon_threshold(B, M)

for label, eps in (("below", 0.5 * thr), ("above", 2.0 * thr)):
    res = barrier_ode(BarrierConfig(epsilon=eps, script_b=B, m_power=M,
                                    t_final=T))
    peak = max(res.values)
    print(f"eps {label} threshold ({eps:.3e}):")
    print(f"  hypothesis holds: {res.hypothesis_ok}   "
          f"stayed under ceiling: {res.conclusion_ok}")
    print(f"  peak {peak:.6e}  vs ceiling {res.ceiling:.6e}"
          f"  (margin {res.margin:+.3e})")
print()

# The threshold clause flips exactly at the closed form; bisect on it.
lo, hi = thr / 4, thr * 4
for _ in range(60):
    mid = 0.5 * (lo + hi)
    ok = barrier_ode(BarrierConfig(epsilon=mid, script_b=B, m_power=M,
                                   t_final=0.01), dt=0.01).hypothesis_ok
    lo, hi = (mid, hi) if ok else (lo, mid)
found = 0.5 * (lo + hi)
print(f"bisected transition: {found:.15e}")
print(f"closed form:         {thr:.15e}")
print(f"agree to {abs(found - thr) / thr:.1e} relative")
print()

# Push eps hard enough and the saturated equation genuinely diverges.
res = barrier_ode(BarrierConfig(epsilon=40.0, script_b=B, m_power=M,
                                t_final=T), dt=1e-4)
if res.blown_up:
    print(f"eps=40: finite-time divergence at t ~ {res.blow_up_time:.4f}")
else:
    print(f"eps=40: peak {max(res.values):.3e}")
