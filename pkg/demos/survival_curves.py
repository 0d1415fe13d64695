"""Survival curves under dependent censoring: a worked ten-subject example.

The Kaplan-Meier estimator treats censoring as uninformative. When the
censoring times are positively associated with the survival times, that
assumption makes KM too optimistic: subjects censored early were also likely
to die early, and KM quietly assumes they behave like everyone still at risk.

The copula-graphic estimator fixes this by positing an Archimedean copula
between survival and censoring time. Under the independence copula it *is*
Kaplan-Meier; under a Clayton copula with increasing theta the curve is pulled
progressively lower.
"""

import numpy as np

from cgesurv import CopulaSpec, cge, km

# ten subjects observed at times 1..10; 0 marks a censored record
time = np.arange(1.0, 11.0)
event = np.array([1, 0, 0, 1, 0, 1, 1, 0, 1, 1], dtype=bool)

curves = {
    "Kaplan-Meier": km(time, event),
    "CGE, independence": cge(time, event, CopulaSpec.independence()),
    "CGE, Clayton theta=2 (tau=0.5)": cge(time, event, CopulaSpec.from_theta("clayton", 2.0)),
    "CGE, Clayton theta=6 (tau=0.75)": cge(time, event, CopulaSpec.from_theta("clayton", 6.0)),
}

header = "t    " + "".join(f"{name:>32}" for name in curves)
print(header)
print("-" * len(header))
for t in time:
    row = f"{t:<5g}" + "".join(f"{c(t):>32.4f}" for c in curves.values())
    print(row)

print()
print("Independence reproduces KM exactly; larger theta sinks the curve.")
print("The last record is an event, so every curve reaches 0 at t = 10.")

# curves export as plain (time, value) CSV for external plotting
curves["CGE, Clayton theta=2 (tau=0.5)"].to_csv("clayton_curve.csv")
print("wrote clayton_curve.csv")
