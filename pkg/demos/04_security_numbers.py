"""Attack-cost and reliability figures.

Run:  python3 demos/04_security_numbers.py
"""
# %%
from mcc.analysis import (
    acs_per_bit,
    gilbert_delta,
    mask_entropy_bits,
    multi_window_success,
    security_ratio,
    security_report,
    window_failure_prob,
)

# %%
mce = security_report(4096, 3556, 45)
ours = security_report(5600, 2400, 400, l=2, p=14)
print(f"ISD iterations, N=4096 K=3556 t=45 : 2^{mce.log2_C_isd:.2f} = {2 ** mce.log2_C_isd:.4e}")
print(f"ISD iterations, N=5600 K=2400 t=400: 2^{ours.log2_C_isd:.2f} = {2 ** ours.log2_C_isd:.4e}")
print(f"classical ratio {security_ratio(ours, mce):.4e}, quantum ratio {security_ratio(ours, mce, True):.4e}")

# %%
for rho in (1 / 2, 1 / 3, 1 / 4):
    print(f"rho={rho:.3f}: delta/N = {gilbert_delta(rho):.4f}")

# %%
pf = window_failure_prob(0.1175, 44, 14)
print(f"one 44-bit window fails with {pf:.4e}; 500 windows succeed with {multi_window_success(pf, 500):.4f}")
print(f"ACS units per bit (l=5, p=10): {acs_per_bit(5, 10)}")
print(f"mask entropy (K=2000, l=5): {mask_entropy_bits(2000, 5):.1f} bits")
