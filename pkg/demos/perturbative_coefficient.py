"""
Short-time expansion and the coefficient C
==========================================

Between two measurements the decaying amplitude loses a fraction C tau^2,
with C half the summed squared couplings.  For a Lorentzian band C saturates
as the cutoff grows; for a flat band it grows linearly, which is why no Zeno
effect survives the Markovian limit.
"""

import math

import zenotransfer as zt

p = zt.PhysParams.aligned(0.0, 1.0, 3.0)
C = zt.compute_c(zt.discretize(p))
print("C =", C.c_value, " closed form:", 2 * 3 / 4 * 2 / math.pi * math.atan(50))

# one step: 1 - C tau^2 against the exact |a(tau)|
for s in (0.3, 0.1, 0.03, 0.01):
    tau = s / math.sqrt(3.0)
    print(f"tau sqrt(Gamma Lambda) = {s:5.2f}: (1 - C tau^2) / |a(tau)| = "
          f"{(1 - C.c_value * tau**2) / abs(zt.a_of_t(tau, 0.0, 1.0, 3.0)):.6f}")

# at fixed t the state approaches the initial one linearly in tau
for tau in (4e-3, 2e-3, 1e-3):
    d, b = zt.psi_n_perturbative(0.6, 0.8, C, tau, round(0.5 / tau))
    print(f"tau = {tau:.0e}: |Psi_n - Psi_0| = {math.hypot(abs(d - 0.6), abs(b - 0.8)):.3e}")

lor = zt.c_divergence_scan(1.0, 1.0, [30.0, 300.0, 3000.0], "lorentzian", bandwidth=3.0)
flat = zt.c_divergence_scan(1.0, 1.0, [10.0, 20.0, 40.0], "flat")
print("Lorentzian C(e_max):", lor.c_values)
print("flat C(e_max):      ", flat.c_values, " slope", flat.slope)
