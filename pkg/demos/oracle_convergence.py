"""
Brute-force reservoir against the pseudomode engine
===================================================

The Lorentzian reservoir is replaced by N discrete levels on [-e_max, e_max].
A dense eigendecomposition gives the exact evolution of that finite system,
so its conditional occupation should approach the pseudomode result as the
discretization is refined.
"""

import numpy as np

import zenotransfer as zt

p = zt.PhysParams.aligned(0.0, 1.0, 3.0)
start = zt.DotAmplitudes(1.0, 0.0)
proto = zt.MeasurementProtocol.from_x(0.2, 6.0, 3.0)
engine = zt.run_protocol(p, proto, start)

# growing e_max at fixed level density: the cutoff error shrinks quickly
for n, e_max in [(251, 37.5), (501, 75.0), (1001, 150.0)]:
    res = zt.discretize(p, n, e_max)
    oracle = zt.run_protocol_oracle(p, proto, start, n, e_max)
    print(f"N = {n:5d}, e_max = {e_max:6.1f}: sum-rule deficit {res.sum_rule_deficit():.2e}, "
          f"max |dP1| = {oracle.max_abs_diff(engine):.2e}")

# the discrete spectrum recurs after 2 pi / spacing; longer runs are refused
res = zt.discretize(p, 1001, 150.0)
print("recurrence time for N = 1001:", res.recurrence_time)
try:
    zt.run_protocol_oracle(p, zt.MeasurementProtocol.from_x(0.2, 40.0, 3.0), start, 1001, 150.0)
except zt.ParameterError as err:
    print("refused:", err)
