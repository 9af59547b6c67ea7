"""Where the Bessel envelopes are tight, and where one of them is not.

Prints the worst slack of each envelope over a log-spaced sweep, then zooms in
on the first maximum of |J0'| where the derivative envelope is exceeded.
"""

import math

import numpy as np

from gyrofp.bessel import bound_slacks, j0_prime

ks = np.geomspace(1e-6, 1e4, 10_000)
slacks = bound_slacks(ks)
for key, val in slacks.items():
    i = int(np.argmin(val))
    print(f"envelope {key:>3s}: worst slack {val[i]: .3e} at k = {ks[i]:.4g}")

print()
print("near the first maximum of |J0'|:")
for k in np.linspace(1.8, 2.6, 9):
    env = min(1.0, math.sqrt(2.0 / (math.pi * k)))
    print(f"  k = {k:.2f}  |J0'| = {abs(j0_prime(k)):.5f}  envelope = {env:.5f}")
