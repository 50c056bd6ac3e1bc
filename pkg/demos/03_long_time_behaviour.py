"""Long-time behaviour: limits and growth rates at large t.

Because step sizes grow with t, horizons of 1e5-1e6 take only a few hundred
steps.  Growth exponents are measured from the states at T and 2T.

Run:  python3 demos/03_long_time_behaviour.py
"""

from ricci_qc import ClassParams, InitialData, asymptotic_profile
from ricci_qc.flow import validate_asymptotics

CASES = [
    ("A7i", ClassParams(), InitialData(1, 1, 1, 1), 1e6),
    ("A8", ClassParams(), InitialData(1, 1, 1, 1), 1e6),
    ("A3", ClassParams(k=1.0), InitialData(1, 4, 5, 1), 1e5),
    ("A9ii", ClassParams(a3=1.0), InitialData(1, 1, 2, 1), 1e5),
    ("A5", ClassParams(), InitialData(2, 3, 1, 1), 1e5),
    ("A6", ClassParams(), InitialData(2, 1, 3, 1), 1e8),     # explicit solution
]

for cls, params, init, horizon in CASES:
    print(f"{cls} from {init.as_tuple()} at T={horizon:g}")
    for check in validate_asymptotics(cls, params, init, horizon):
        print(f"   {check.component:>4}: {check.descriptor!s:<45} residual {check.residual:.2e}"
              f"  [{check.path}]")

print("\nA5 grows only logarithmically:", dict(asymptotic_profile("A5", ClassParams(),
                                                                    InitialData(2, 3, 1, 1))))
