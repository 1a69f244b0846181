"""Three independent ways to get E exp(t S_n(f)), and how fast they settle.

For U(n) the moment generating function is a Toeplitz determinant of the
symbol exp(t f).  It is also a Fredholm determinant on the projection basis,
and for very small n it can be brute-forced against the explicit joint
density of the angles.  Their agreement is the check.  The Toeplitz
log-determinant then approaches t^2 * sum |k| |f_k|^2 / 2 (f with zero mean)
extremely fast.

    python3 demos/02_determinant_oracles.py
"""

import math

import mpmath as mp

from compact_clt import (
    cumulants_from_mgf,
    fredholm_mgf,
    make_poly,
    szego_residual,
    toeplitz_mgf,
    weyl_quadrature_mgf,
)

f = make_poly([(1, 1), (-1, 1)])  # 2 cos(theta)
t = 0.3

print("  n      toeplitz      fredholm   weyl (n <= 3)")
for n in (1, 2, 3, 8):
    w = weyl_quadrature_mgf("u", f, t, n) if n <= 3 else float("nan")
    print(f"{n:3d} {toeplitz_mgf(f, t, n):13.10f} {fredholm_mgf('u', f, t, n):13.10f} {w:13.10f}")

# The same comparison works for SO(2n), SO(2n+1), Sp(n) with the Fredholm form.
for kind in ("so-even", "so-odd", "sp"):
    print(f"{kind:8s} n=2: fredholm {fredholm_mgf(kind, f, t, 2):.12f}  weyl {weyl_quadrature_mgf(kind, f, t, 2):.12f}")

# Cumulants back out of the MGF by differentiating log E exp(tS) numerically.
# Extended precision keeps the fourth difference clean.
with mp.workdps(30):
    mg = cumulants_from_mgf(lambda s: toeplitz_mgf(f, s, 8, dps=30), 4)
print("\ncumulants of S_8(2cos) from the MGF:", [f"{v:.2e}" for v in mg])

# Residual of the large-n asymptote.  It decays faster than any power of n.
print("\n  n   log D - t^2   (t = 0.5)")
for n in (2, 4, 8, 16):
    print(f"{n:3d}   {szego_residual(f, 0.5, n, dps=60):.3e}")
print("float check at n=16:", abs(math.log(toeplitz_mgf(f, 0.5, 16)) - 0.25))
