"""How much the multiplier division amplifies channel errors.

Run:  python3 demos/03_error_growth.py
"""
# %%
from mcc import CATALOG
from mcc.analysis import effective_error_rate, estimate_alpha

# %% [markdown]
# Rate 1/4: multipliers (1 + x^495 + x^990, x^247, x^743, 1 + x^990), e = 0.04.
# The two monomials contribute nothing; the dense ones add errors.

# %%
gq = CATALOG["rate-quarter-m10"][1]
for L in (3000, 6000, 12000):
    est = estimate_alpha(gq, 0.04, L, 100, 1)
    per = ", ".join(f"{a:.3f}" for a in est.per_stream_rate)
    print(f"stream length {L:5d}: alpha/N = {est.alpha_over_N:.4f}  per stream ({per})")

# %% [markdown]
# The growth per stream rises with the stream length, because each
# quotient bit of 1 + x^d collects every d-th error after it.

# %%
gq = CATALOG["rate-half-m14"][1]
est = estimate_alpha(gq, 0.02, 2800, 200, 1)
print(f"rate 1/2, N=5600: alpha = {est.alpha_mean:.1f} +- {est.std_error:.1f}, "
      f"effective rate {effective_error_rate(0.02, est.alpha_mean, 5600):.4f}")
