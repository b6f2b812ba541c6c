"""Six-bit walkthrough: from the inverse-permuted ciphertext to the plaintext.

Run:  python3 demos/01_worked_example.py
"""
# %%
from mcc import walkthrough
from mcc.gf2core import Gf2Poly, bits_to_str

r = walkthrough.run()
print("c_tilde   ", bits_to_str(r["c_tilde"]))

# %% [markdown]
# The mask span for the patterns (10, 01) has four members: 00, 01, 10, 11,
# each repeated along the 30-bit word. Unmasking xors each one in.

# %%
for i, member in enumerate(r["members"]):
    print(f"member {i}  ", bits_to_str(member))

# %% [markdown]
# Each member is split into its two streams, and stream j is divided by
# its multiplier (1 + x^7 and x^7). The remainder is discarded.

# %%
for (i, j), (quot, rem) in sorted(r["divisions"].items()):
    stream = Gf2Poly.from_coeffs(r["streams"][i, j])
    print(f"member {i} stream {j}: ({stream}) -> quotient {bits_to_str(quot)}, remainder {rem}")

# %%
# the quotient streams are re-interleaved and Viterbi-decoded
for c in r["ranked"]:
    print(f"d{c.span_index} = {bits_to_str(r['candidates'][c.span_index])}"
          f"  metric {c.outcome.metric}  info {bits_to_str(c.outcome.info)}")

# %%
# dropping the two tail zeros and multiplying by S^-1 gives the plaintext
print("plaintext", bits_to_str(r["plaintext"]))
