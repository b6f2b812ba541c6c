"""Command-line front end.

Exit status: 0 success, 1 usage or parameter error, 2 I/O or file-format
error, 3 decryption failure.
"""

from __future__ import annotations

import argparse
import sys
import warnings

import numpy as np

from . import analysis, walkthrough
from .cipher import DecryptFailure, crc_append, decrypt, encrypt, load_ciphertext, save_ciphertext
from .convcode import ConvCodeSpec, HighMemSpec
from .gf2core import Gf2Error, Gf2Poly, bits_to_str, mat_mul, mat_rank, pack_bits, parse_poly, unpack_bits
from .keys import CATALOG, CRC16_CCITT, KeyFormatError, PrivateKey, PublicKey, SystemParams, keygen, load_key, save_key

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_DECRYPT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --------------------------------------------------------------------------
# plaintext files: "bits=<count>" header line, then hex of the packed bits

def write_plaintext(path, bits) -> None:
    with open(path, "w") as fh:
        fh.write(f"bits={len(bits)}\n{pack_bits(bits).hex()}\n")


def read_plaintext(path) -> np.ndarray:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("bits="):
        raise KeyFormatError(f"{path}: missing 'bits=<n>' header")
    n = int(lines[0][5:])
    data = bytes.fromhex("".join(lines[1:]))
    if len(data) != (n + 7) // 8:
        raise KeyFormatError(f"{path}: {len(data)} bytes of hex for {n} bits")
    return unpack_bits(data, n)


def _crc(text: str) -> Gf2Poly:
    t = text.lower()
    if t in ("none", "1"):
        return Gf2Poly(1)
    if t in ("ccitt", "crc16", "ccitt16"):
        return CRC16_CCITT
    if t.startswith("0x"):
        return Gf2Poly(int(t, 16))
    return parse_poly(text)


# --------------------------------------------------------------------------
# subcommands

def cmd_keygen(args) -> int:
    if not args.public or not args.private:
        raise UsageError("keygen needs --public and --private output paths")
    code = mults = None
    if args.preset:
        code, mults = CATALOG[args.preset]
    if args.generators:
        code = ConvCodeSpec.from_octal(*args.generators)
    if args.multipliers:
        mults = HighMemSpec(tuple(parse_poly(m) for m in args.multipliers))
    n = code.n if code and args.n is None else (args.n or 2)
    p = code.memory if code and args.p is None else args.p
    q = mults.q if mults and args.q is None else args.q
    if p is None or q is None or args.K is None:
        raise UsageError("keygen needs --p, --q and --K (or a --preset)")
    params = SystemParams(n, p, q, args.K, args.l, args.e, _crc(args.crc), args.seed)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        pk, sk = keygen(params, args.seed, code=code, multipliers=mults)
    for w in caught:
        print(f"warning: {w.message}")
    save_key(pk, args.public)
    save_key(sk, args.private)
    rank = mat_rank(pk.G)
    print(f"seed={args.seed}")
    print(f"code={sk.code} multipliers={sk.multipliers}")
    print(f"N={params.N} K={params.K} r={params.r} plaintext_bits={params.plaintext_bits}")
    print(f"rank={rank} full_rank={rank == params.K}")
    return EXIT_OK


def cmd_encrypt(args) -> int:
    pk = load_key(args.public)
    if not isinstance(pk, PublicKey):
        raise KeyFormatError(f"{args.public} is not a public key")
    m = read_plaintext(args.plaintext)
    if m.size != pk.params.plaintext_bits:
        raise UsageError(f"plaintext has {m.size} bits, key expects {pk.params.plaintext_bits}")
    rng = np.random.default_rng(args.seed)
    ct = encrypt(m, pk, rng)
    save_ciphertext(ct, args.out)
    print(f"seed={args.seed}")
    print(f"N={len(ct)}")
    if args.seed is not None:
        clean = mat_mul(crc_append(m, pk.crc_poly), pk.G)
        print(f"errors={int(np.count_nonzero(clean != ct.bits))}")
    return EXIT_OK


def cmd_decrypt(args) -> int:
    sk, pk = load_key(args.private), load_key(args.public)
    if not isinstance(sk, PrivateKey) or not isinstance(pk, PublicKey):
        raise KeyFormatError("--private/--public do not hold the expected key kinds")
    ct = load_ciphertext(args.ciphertext)
    out = decrypt(ct, sk, pk)
    if isinstance(out, DecryptFailure):
        print("decrypt failed: no candidate passed the CRC", file=sys.stderr)
        print("metrics=" + ",".join(map(str, out.metrics)), file=sys.stderr)
        return EXIT_DECRYPT
    write_plaintext(args.out, out)
    print(f"bits={out.size}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    rep = {}
    N, K, t = args.N, args.K, args.t
    if args.key:
        key = load_key(args.key)
        N, K = key.params.N, key.params.K
        rep.update(n=key.params.n, p=key.params.p, q=key.params.q, l=key.params.l, e=key.params.e)
        if t is None:
            t = round(key.params.e * N)
        if args.l is None:
            args.l = key.params.l
        if args.p is None:
            args.p = key.params.p
    if N is not None and K is not None and t is not None:
        c, cq = analysis.isd_complexity(N, K, t)
        rep.update(N=N, K=K, t=t, log2_C_isd=c, log2_C_qisd=cq, C_isd=f"{2.0 ** c:.4e}")
        rep["delta_over_N"] = analysis.gilbert_delta(K / N)
    if args.rho is not None:
        rep["rho"] = args.rho
        rep["delta_over_N"] = analysis.gilbert_delta(args.rho)
    if args.gq:
        gq = HighMemSpec(tuple(parse_poly(s) for s in args.gq))
        est = analysis.estimate_alpha(gq, args.e, args.stream_len, args.trials, args.seed)
        rep.update(seed=args.seed, alpha_mean=est.alpha_mean, alpha_std_error=est.std_error,
                   alpha_over_N=est.alpha_over_N,
                   effective_error_rate=analysis.effective_error_rate(
                       args.e, est.alpha_mean, gq.n * args.stream_len))
    if args.rate is not None:
        pf = analysis.window_failure_prob(args.rate, args.window, args.correctable)
        rep.update(window_failure=pf, windows=args.windows,
                   multi_window_success=analysis.multi_window_success(pf, args.windows))
    if args.l is not None and args.p is not None:
        rep["acs_per_bit"] = analysis.acs_per_bit(args.l, args.p)
    if args.l is not None and K is not None:
        rep["mask_entropy_bits"] = analysis.mask_entropy_bits(K, args.l)
    if not rep:
        raise UsageError("nothing to analyze: give --N/--K/--t, --rho, --gq, --rate or --key")
    sys.stdout.write(analysis.format_report(rep))
    return EXIT_OK


def cmd_demo(args) -> int:
    r = walkthrough.run()
    print(f"code G_P = {CATALOG['worked-example'][0]}, G_Q = {CATALOG['worked-example'][1]}")
    print(f"c_tilde = {bits_to_str(r['c_tilde'])}")
    print("step 2: unmasked stream variants")
    for (i, j), s in sorted(r["streams"].items()):
        if i in (0, 3):
            print(f"  member {i} stream {j}: {Gf2Poly.from_coeffs(s)}")
    print("step 3: quotients [remainder]")
    for i, j in [(0, 0), (3, 0), (0, 1), (3, 1)]:
        quot, rem = r["divisions"][i, j]
        print(f"  member {i} stream {j}: {bits_to_str(quot)} [remainder: {rem}]")
    print("step 4: interleaved candidates")
    for i, d in enumerate(r["candidates"]):
        print(f"  d{i} = {bits_to_str(d)}")
    print("step 5: Viterbi outcomes by metric")
    for c in r["ranked"]:
        print(f"  d{c.span_index}: metric={c.outcome.metric} info={bits_to_str(c.outcome.info)}")
    win = r["ranked"][0]
    print(f"winner d{win.span_index} metric={win.outcome.metric}")
    print(f"step 6: {bits_to_str(win.outcome.info[:-2])} x S^-1 -> plaintext {bits_to_str(r['plaintext'])}")
    return EXIT_OK


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mcc", description="Masked convolutional-code public-key encryption.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    kg = sub.add_parser("keygen", help="generate a key pair")
    kg.add_argument("--n", type=int)
    kg.add_argument("--p", type=int)
    kg.add_argument("--q", type=int)
    kg.add_argument("--K", type=int)
    kg.add_argument("--l", type=int, default=2)
    kg.add_argument("--e", type=float, default=0.02)
    kg.add_argument("--crc", default="ccitt", help="'ccitt', 'none', hex mask or '1+x^5+...'")
    kg.add_argument("--preset", choices=sorted(CATALOG))
    kg.add_argument("--generators", nargs="+", metavar="OCTAL")
    kg.add_argument("--multipliers", nargs="+", metavar="POLY")
    kg.add_argument("--seed", type=int, default=0)
    kg.add_argument("--public")
    kg.add_argument("--private")
    kg.set_defaults(func=cmd_keygen)

    en = sub.add_parser("encrypt", help="encrypt a plaintext file")
    en.add_argument("--public", required=True)
    en.add_argument("--plaintext", required=True)
    en.add_argument("--out", required=True)
    en.add_argument("--seed", type=int)
    en.set_defaults(func=cmd_encrypt)

    de = sub.add_parser("decrypt", help="decrypt a ciphertext file")
    de.add_argument("--private", required=True)
    de.add_argument("--public", required=True)
    de.add_argument("--ciphertext", required=True)
    de.add_argument("--out", required=True)
    de.set_defaults(func=cmd_decrypt)

    an = sub.add_parser("analyze", help="security and reliability report")
    an.add_argument("--key")
    an.add_argument("--N", type=int)
    an.add_argument("--K", type=int)
    an.add_argument("--t", type=int)
    an.add_argument("--rho", type=float)
    an.add_argument("--gq", nargs="+", metavar="POLY")
    an.add_argument("--e", type=float, default=0.02)
    an.add_argument("--stream-len", type=int, default=12000)
    an.add_argument("--trials", type=int, default=200)
    an.add_argument("--rate", type=float)
    an.add_argument("--window", type=int, default=44)
    an.add_argument("--correctable", type=int, default=14)
    an.add_argument("--windows", type=int, default=500)
    an.add_argument("--l", type=int)
    an.add_argument("--p", type=int)
    an.add_argument("--seed", type=int, default=0)
    an.set_defaults(func=cmd_analyze)

    dm = sub.add_parser("demo", help="print the six-bit worked example")
    dm.set_defaults(func=cmd_demo)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mcc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KeyFormatError, OSError) as exc:
        print(f"mcc: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError, Gf2Error) as exc:
        print(f"mcc: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
