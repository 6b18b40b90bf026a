"""Check-node marginals from the trellis against plain enumeration, and the
way their cost grows with row degree and alphabet size.

    python3 demos/trellis_check.py
"""
import math

import numpy as np

from nblpdec.algebra import build_ring
from nblpdec.oracle import brute_marginals
from nblpdec.trellis import OpCounter, build_trellis, marginals

rng = np.random.default_rng(0)

# one row over Z4 with a zero-divisor coefficient
ring = build_ring("Zq", 4)
coeffs = (1, 2, 3, 2)
v = rng.uniform(-5, 5, size=(len(coeffs), ring.q - 1))
tr = build_trellis(ring, coeffs)
for kappa in (1.0, 10.0, math.inf):
    c_r, c_rbar = marginals(tr, v, kappa)
    ref_r, ref_rbar = brute_marginals(ring, coeffs, v, kappa)
    fin = np.isfinite(ref_r)
    err = max(np.abs(c_r[fin] - ref_r[fin]).max(), np.abs(c_rbar - ref_rbar).max())
    print(f"kappa={kappa:<5} largest deviation from enumeration {err:.2e}")
print("min-sum marginals C_r, one line per position, labels 1..3:")
print(c_r)

# a lone zero-divisor coefficient: 2b = 0 rules out the odd labels
c_r, _ = marginals(build_trellis(ring, (2,)), np.zeros((1, 3)), math.inf)
print("row (2,): C_r =", c_r[0] + 0.0, "(-inf marks labels no codeword uses)")

print("\nbranch operations for one set of marginals")
print(" q   d   ops")
for q, kind, size in ((2, "Zq", 2), (4, "GF", 2), (8, "GF", 3), (16, "GF", 4)):
    r = build_ring(kind, size)
    for d in (3, 6, 12):
        c = OpCounter()
        marginals(build_trellis(r, [1] * d), np.zeros((d, q - 1)), 1.0, counter=c)
        print(f"{q:2d} {d:3d} {c.branch_ops:6d}")
