"""
Scaling in x = bandwidth * tau
==============================

The conditional occupation of dot 1 depends on the bandwidth and the
measurement interval only through their product x.  Here the closed-form
scaling curve is compared with stepwise runs at three bandwidths.
"""

import numpy as np

import zenotransfer as zt

start = zt.DotAmplitudes(1.0, 0.0)
t_max = 6.0  # in units of 1/Gamma

# scaling curve for each x, then stepwise runs at finite bandwidth
for x in (2.0, 0.2, 0.02):
    print(f"x = {x}")
    for lam in (3.0, 20.0, 1000.0):
        p = zt.PhysParams.aligned(0.0, 1.0, lam)
        step = zt.run_protocol(p, zt.MeasurementProtocol.from_x(x, t_max, lam), start)
        curve = zt.scaling_trace(p, x, step.times, start)
        err = np.max(np.abs(step.p1 - curve.p1))
        print(f"  lambda = {lam:7g}: {step.times.size - 1:6d} measurements, "
              f"max |dP1| vs scaling = {err:.2e}")

# P1 at t = 1 for x = 2, straight from the formula
a = zt.a_bar_scaling(1.0, 1.0, 2.0)
print("a_bar(t=1, x=2) =", a, " P1 =", zt.p1_conditional(a, start))

# with an energy offset E = c * lambda the exponent becomes complex
t = np.linspace(0, t_max, 7)
print("c = 3, x -> inf:", np.round(zt.a_bar_scaling(t, 1.0, np.inf, 3.0), 4))
