"""A one-variable Gaussian bump: tiny in the additive space, absent from the
product space.

The bump exp(-x1^2 / sigma^2) on the square is a single kernel section of the
first block, so its additive-space norm is exactly 1.  Expanding the same
function against the product (standard two-dimensional Gaussian) kernel
yields a squared-norm series whose partial sums grow without bound -- the
function simply is not in that space.
"""

from kqreg import bump_membership_report

report = bump_membership_report(sigma=1.0, grid_m=10000)
print(f"additive-space norm of the bump: {report['additive_norm']:.1f}")
print()
print("product-space squared-norm series:")
print(f"{'M':>7} {'partial sum':>12} {'lower bound':>12}")
for row in report["partial_sums"]:
    print(f"{row['M']:7d} {row['partial_sum']:12.3f} {row['lower_bound']:12.3f}")
print()
print("The partial sums clear every lower bound and keep growing like")
print("2 sqrt(M/pi); no finite norm exists, so the bump lies outside the")
print("product-kernel space even though it is a unit vector in the additive one.")
