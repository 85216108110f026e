"""
The dark state
==============

For equal level energies and a constant coupling ratio gamma, the combination
cos(beta)|1> - sin(beta)|2> does not couple to the reservoir.  It survives every
method unchanged, measured or not.
"""

import numpy as np

import zenotransfer as zt

p = zt.PhysParams(0.4, 0.4, 4.0, 1.0, 3.0)  # gamma = 2
ang = zt.mixing_angle(p.coupling_ratio)
dark = zt.DotAmplitudes(ang.cos_beta, -ang.sin_beta)
print("cos(beta) =", ang.cos_beta, " sin(beta) =", ang.sin_beta)

# the discretized Hamiltonian annihilates it up to rounding
res = zt.discretize(p, 1001)
print("|H psi - E psi| on the discrete reservoir:", zt.dark_state_residual(res, p.coupling_ratio))

proto = zt.MeasurementProtocol.from_x(0.2, 6.0, 3.0)
runs = {
    "pseudomode": zt.run_protocol(p, proto, dark),
    "oracle": zt.run_protocol_oracle(p, proto, dark, 1001),
    "unmeasured": zt.run_unmeasured(p, np.linspace(0, 6, 13), dark),
}
for name, tr in runs.items():
    print(f"{name:11s} P1 - cos^2(beta) = {np.max(np.abs(tr.p1 - ang.cos_beta**2)):.1e}, "
          f"null-record probability at the end = {tr.null_prob[-1]:.12f}")

# any other start keeps only its dark component in the long run
start = zt.DotAmplitudes(1.0, 0.0)
print("from |1>: long-time P1 =", zt.run_unmeasured(p, [0.0, 40.0], start).p1[-1],
      " dark projection:", zt.asymptotic_conditional_occupation(p.coupling_ratio, start))
