"""Key generation, encryption and decryption at two sizes.

Run:  python3 demos/02_round_trip.py [--full]

``--full`` adds one decryption at N = 5600, K = 2400 (a few seconds).
"""
# %%
import sys
import warnings

import numpy as np

from mcc import CATALOG, CRC16_CCITT, SystemParams, decrypt, encrypt, keygen
from mcc.cipher import DecryptFailure, decode_candidates
from mcc.gf2core import mat_rank

warnings.simplefilter("ignore")  # small demo keys trip the sizing warnings
rng = np.random.default_rng(2024)

# %%
params = SystemParams(n=2, p=2, q=7, K=32, l=2, e=0.01, crc_poly=CRC16_CCITT)
pk, sk = keygen(params, rng)
print(f"N={params.N}  K={params.K}  plaintext bits={params.plaintext_bits}  rank={mat_rank(pk.G)}")

# %%
stats = {"ok": 0, "failure": 0, "wrong": 0}
for _ in range(200):
    m = rng.integers(0, 2, size=params.plaintext_bits, dtype=np.uint8)
    out = decrypt(encrypt(m, pk, rng), sk, pk)
    if isinstance(out, DecryptFailure):
        stats["failure"] += 1
    else:
        stats["ok" if np.array_equal(out, m) else "wrong"] += 1
print("200 messages at e=0.01:", stats)

# %% [markdown]
# A failure never yields a wrong plaintext: every candidate fails the CRC
# and the caller is asked for a fresh ciphertext.

# %%
if "--full" in sys.argv:
    code, mults = CATALOG["rate-half-m14"]
    big = SystemParams(n=2, p=14, q=386, K=2400, l=2, e=0.02, crc_poly=CRC16_CCITT)
    pk, sk = keygen(big, 0, code=code, multipliers=mults)
    m = rng.integers(0, 2, size=big.plaintext_bits, dtype=np.uint8)
    ct = encrypt(m, pk, rng)
    ranked = decode_candidates(ct, sk)
    print("candidate metrics:", [(c.span_index, c.outcome.metric, c.crc_ok) for c in ranked])
    print("recovered:", np.array_equal(decrypt(ct, sk, pk), m))
