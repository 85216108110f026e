"""
Frozen and unaffected limits
============================

Small x freezes the electron in dot 1 (Zeno regime).  Large x at a wide band
leaves the conditional dynamics as if nothing were measured.
"""

import numpy as np

import zenotransfer as zt

start = zt.DotAmplitudes(1.0, 0.0)

# x = 1e-3 at lambda = 3: thousands of null results, P1 stays at 1
p = zt.PhysParams.aligned(0.0, 1.0, 3.0)
frozen = zt.run_protocol(p, zt.MeasurementProtocol.from_x(1e-3, 3.0, 3.0), start)
print("Zeno: min P1 =", frozen.p1.min(), "after", frozen.times.size - 1, "measurements")
print("      probability of the whole null record =", frozen.null_prob[-1])

# x = 50 at lambda = 1000: measured and unmeasured traces coincide
wide = zt.PhysParams.aligned(0.0, 1.0, 1e3)
measured = zt.run_protocol(wide, zt.MeasurementProtocol.from_x(50.0, 6.0, 1e3), start)
free = zt.run_unmeasured(wide, measured.times, start)
print("Markov: max |P1 measured - P1 free| =", np.max(np.abs(measured.p1 - free.p1)))

# without measurement the conditional occupation relaxes to 1/2 for equal widths
late = zt.run_unmeasured(p, [0.0, 20.0], start)
print("long time P1 =", late.p1[-1],
      " projection onto the dark state gives", zt.asymptotic_conditional_occupation(1.0, start))

# unequal widths: gamma = 2 moves the limit to 1/(1 + gamma^2)
p2 = zt.PhysParams(0.0, 0.0, 4.0, 1.0, 3.0)
late2 = zt.run_unmeasured(p2, [0.0, 30.0], start)
print("gamma = 2: P1 =", late2.p1[-1], " expected", 1 / (1 + 2.0**2))
