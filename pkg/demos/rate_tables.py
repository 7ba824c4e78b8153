"""Closed-form learning-rate exponents: tables and the dimension curve.

The five-term exponent alpha(r, beta, theta, zeta) governs how fast the
excess quantile risk of the additive-kernel estimator can decay with the
sample size.  Its headline feature: with the schedule beta -> 1, the limit is
dimension-free, while the single-Gaussian-kernel exponent 2a/(2a+d) dies off
as the dimension d grows.
"""

from kqreg import alpha_es, alpha_general, alpha_quantile, beta_es, beta_quantile, figure_curve, table2

print("Exponent grid at beta = 1 (the large-d schedule limit):")
print(f"{'r':>5} {'theta':>6} {'zeta':>5} {'alpha':>7}  active term")
for row in table2():
    res = alpha_general(row["r"], 1.0, row["theta"], row["zeta"])
    print(f"{row['r']:5.2f} {row['theta']:6.2f} {row['zeta']:5.2f} {row['alpha']:7.3f}  T{res.argmin_term}")

print()
print("Quantile specialization: noise integrability p sets the rate.")
print(f"{'p':>6} {'lambda exponent':>16} {'rate exponent':>14}")
for p in (1.0, 2.0, 10.0, float("inf")):
    label = "inf" if p == float("inf") else f"{p:g}"
    print(f"{label:>6} {beta_quantile(p):16.4f} {alpha_quantile(p):14.4f}")

print()
print("Additive vs single-kernel exponent as dimension grows (r=0.5, theta=0.5, zeta=1, a=1):")
print(f"{'d':>4} {'additive':>9} {'single':>8}")
for d, ours, theirs in figure_curve(0.5, 0.5, 1.0, 1.0, 30):
    if d in (1, 2, 4, 8, 16, 30):
        marker = "  <- additive wins" if ours > theirs else ""
        print(f"{d:4d} {ours:9.4f} {theirs:8.4f}{marker}")
