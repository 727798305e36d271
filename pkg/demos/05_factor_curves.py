"""The variance factor n(1-rho)/delta across expected degrees.

var(x*) = factor * (normalized dispersion of x0), so this factor is the
whole story of how network size and density shape agreement noise: zero
at n = c (complete graph), a sharp single peak just above it, then 1/n
decay. Denser networks (larger c) peak later and lower.
"""

from erconsensus import ModelParams, factor_sweep, variance_factor

C_LIST = [5, 6, 7, 8, 9, 10]
rows = factor_sweep(C_LIST, range(5, 71))

print("peak of each factor curve over n in (c, 70]:")
for c in C_LIST:
    group = {row.n: row.factor for row in rows if row.c == c and row.n > c}
    n_hat = max(group, key=group.get)
    print(f"  c = {c:>2}: peak at n = {n_hat:>2}, factor {group[n_hat]:.6f}")

print("\n1/n decay at c = 5 (doubling n should roughly halve the factor):")
for n in (100, 200, 400, 800):
    ratio = variance_factor(ModelParams(2 * n, 5.0 / (2 * n))) / variance_factor(
        ModelParams(n, 5.0 / n)
    )
    print(f"  factor(2*{n:>3}) / factor({n:>3}) = {ratio:.4f}")

print("\nsample of the c = 5 curve:")
for row in rows:
    if row.c == 5.0 and row.n in (5, 6, 7, 8, 9, 10, 12, 15, 20, 30, 50, 70):
        bar = "#" * round(row.factor * 3000)
        print(f"  n = {row.n:>2}: {row.factor:.6f} {bar}")
