"""Exact cumulants of a linear eigenvalue statistic.

Take S_n(f) = sum_j f(theta_j) over the eigenvalue angles of a Haar-random
U(n).  For a trigonometric polynomial f the cumulants are finite sums with
rational weights, so they can be computed with no rounding at all.  Once n
is at least ell * degree(f) every cumulant of order 3 and up is exactly
zero, while the variance has already reached its large-n value.

    python3 demos/01_exact_cumulants.py
"""

from fractions import Fraction

from compact_clt import cumulant_direct_unitary, cumulant_trace, g_direct, limit_cumulant, make_poly

# f(theta) = 2 cos(theta) + cos(2 theta), written by its Fourier coefficients
f = make_poly([(1, 1), (-1, 1), (2, Fraction(1, 2)), (-2, Fraction(1, 2))])
print(f"f = {f.describe()}  (degree {f.degree})")

# Two routes that share no code beyond the Fourier data: a sum over
# zero-sum frequency tuples, and traces of kernel-matrix products.
print("\n  n  ell        direct         trace")
for n in (1, 2, 4, 8):
    for ell in (2, 3, 4):
        d = cumulant_direct_unitary(f, n, ell)
        t = cumulant_trace("u", f, n, ell)
        print(f"{n:3d} {ell:4d} {str(d):>13} {str(t):>13}")
print(f"large-n variance: {limit_cumulant('u', f, 2)}")

# The cancellation behind the zeros: the weight G(k) of a zero-sum frequency
# tuple vanishes beyond pairs, and for a pair it is |k1| / 2.
print("\nG(3, -3) =", g_direct((3, -3)))
print("G(4, -1, -3) =", g_direct((4, -1, -3)))
print("G(2, 2, -1, -3) =", g_direct((2, 2, -1, -3)))

# Orthogonal and symplectic groups carry a parity-dependent shift in the mean.
for kind in ("so-even", "so-odd", "sp"):
    means = [cumulant_trace(kind, f, n, 1) for n in (1, 2, 4, 8)]
    print(f"{kind:8s} mean for n = 1, 2, 4, 8: {[str(m) for m in means]}")
