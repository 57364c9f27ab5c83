"""Command-line interface.

Exit codes: 0 success / all checks pass, 1 a verification check failed,
2 usage, parse or input error, 3 enumeration guard exceeded.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from .coding import CodeTable, DecodeError, build_code
from .config import ConfigError, fingerprint, load_family
from .container import FormatError, iter_unpack, pack, read_key, write_key
from .family import BitWord, FamilySpec, ShtarkovModel, build_shtarkov
from .padding import RandomSource, delta_gap
from .sbcipher import (
    CipherParams,
    HeaderMismatch,
    Key,
    Mode,
    SmallBiasSpace,
    build_space,
    ceil_log2,
    decrypt,
    encrypt,
    plan_params,
)
from .verify import GuardError, Guards, audit

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class Pipeline:
    family: FamilySpec
    model: ShtarkovModel
    table: CodeTable
    gap: float | None
    params: CipherParams
    space: SmallBiasSpace
    fingerprint: bytes


def _pipeline(args) -> Pipeline:
    family = load_family(args.family)
    model = build_shtarkov(family)
    table = build_code(model)
    gap = delta_gap(table, family) if args.delta == "exact" else None
    params = plan_params(
        model.s_p,
        table.n_star,
        args.epsilon,
        Mode.parse(args.mode),
        gap,
        n=family.n,
        constants=args.constants,
        max_ell=args.max_ell_plan,
    )
    return Pipeline(family, model, table, gap, params, build_space(params), fingerprint(family))


def cmd_analyze(args) -> int:
    pl = _pipeline(args)
    fam, model, table, params = pl.family, pl.model, pl.table, pl.params
    s_p = model.s_p
    lines = [
        f"n = {fam.n}",
        f"kind = {fam.kind.value}",
        f"members = {fam.size if fam.size is not None else 'infinite'}",
        f"S_P = {s_p} ({float(s_p):.12g})",
        f"ceil_log2_S_P = {ceil_log2(s_p)}",
        f"n_star = {table.n_star}",
        f"expansion = {table.n_star - fam.n}",
        f"delta_bound = {ceil_log2(s_p) + 2}",
    ]
    if pl.gap is not None:
        lines.append(f"delta_gap = {pl.gap:.12g}")
    lines += [
        f"delta_hat = {params.delta_hat:.12g}",
        f"epsilon = {params.epsilon:.12g}",
        f"mode = {params.mode}",
        f"delta_req = {params.delta_req:.12g}",
        f"ell = {params.ell}",
        f"modulus = {pl.space.modulus:#x}",
        f"k_theory = {params.k_theory}",
        f"k_actual = {params.k_actual}",
        f"key_slack = {params.key_slack}",
    ]
    out = "\n".join(lines) + "\n"
    if args.table:
        out += "\n" + table.dump() + "\n"
    _emit(args.out, out)
    return EXIT_OK


def cmd_keygen(args) -> int:
    pl = _pipeline(args)
    key = Key.generate(pl.params.ell, RandomSource(seed=args.seed))
    if args.out:
        with open(args.out, "w") as fh:
            write_key(fh, key, pl.space.modulus)
    else:
        write_key(sys.stdout, key, pl.space.modulus)
    return EXIT_OK


def _load_key(args, pl: Pipeline) -> Key:
    if not args.key:
        raise UsageError("--key is required")
    key, modulus = read_key(Path(args.key).read_text())
    if key.ell != pl.space.ell or modulus != pl.space.modulus:
        raise HeaderMismatch(
            f"key is for ell={key.ell} modulus={modulus:#x}; "
            f"family and parameters need ell={pl.space.ell} modulus={pl.space.modulus:#x}"
        )
    return key


def _read_records(path: str, n: int, fmt: str) -> list[BitWord]:
    if fmt == "text":
        words = []
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            if len(s) != n or any(c not in "01" for c in s):
                raise UsageError(f"{path}: line {lineno}: expected {n} bits, got {s!r}")
            words.append(BitWord.from_str(s))
        return words
    width = (n + 7) // 8
    data = Path(path).read_bytes()
    if len(data) % width:
        raise UsageError(f"{path}: size {len(data)} is not a multiple of the {width}-byte record")
    words = []
    for i in range(0, len(data), width):
        v = int.from_bytes(data[i : i + width], "big")
        if v >> n:
            raise UsageError(f"{path}: record {i // width} does not fit in {n} bits")
        words.append(BitWord(n, v))
    return words


def _write_records(path: str | None, words: list[BitWord], fmt: str) -> None:
    if fmt == "text":
        _emit(path, "".join(f"{w}\n" for w in words))
        return
    data = b"".join(w.value.to_bytes((w.length + 7) // 8, "big") for w in words)
    if path:
        Path(path).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)


def cmd_encrypt(args) -> int:
    pl = _pipeline(args)
    key = _load_key(args, pl)
    if not args.inp:
        raise UsageError("--in is required")
    rnd = RandomSource(seed=args.seed)
    blobs = []
    for m in _read_records(args.inp, pl.family.n, args.format):
        if not pl.table.is_legal(m):
            raise UsageError(f"{m} has zero probability under every family member")
        c = encrypt(pl.table, pl.params, pl.space, key, m, rnd, pl.fingerprint)
        blobs.append(pack(c))
    data = b"".join(blobs)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
    return EXIT_OK


def cmd_decrypt(args) -> int:
    pl = _pipeline(args)
    key = _load_key(args, pl)
    if not args.inp:
        raise UsageError("--in is required")
    words = [
        decrypt(pl.table, pl.params, pl.space, key, c, pl.fingerprint)
        for c in iter_unpack(Path(args.inp).read_bytes())
    ]
    _write_records(args.out, words, args.format)
    return EXIT_OK


def cmd_verify(args) -> int:
    family = load_family(args.family)
    guards = Guards(max_n=args.max_n, max_n_star=args.max_n_star, max_ell=args.max_ell)
    report = audit(
        family,
        args.epsilon,
        Mode.parse(args.mode),
        exact_delta=args.delta == "exact",
        constants=args.constants,
        ell=args.ell,
        guards=guards,
    )
    _emit(args.out, report.to_text())
    return EXIT_OK if report.passed else EXIT_FAIL


def _emit(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _epsilon(s: str) -> float:
    try:
        x = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None
    if not 0 < x < 1:
        raise argparse.ArgumentTypeError(f"epsilon must lie in (0, 1), got {s}")
    return x


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", required=True, metavar="PATH", help="family configuration (YAML)")
    common.add_argument("--epsilon", type=_epsilon, default=0.25, help="leakage target in (0, 1)")
    common.add_argument("--mode", choices=["entropic", "indist"], default="entropic")
    common.add_argument("--delta", choices=["bound", "exact"], default="bound",
                        help="plan with the bound ceil(log2 S_P)+2 or the computed gap")
    common.add_argument("--constants", choices=["proof", "statement"], default="proof",
                        help="additive key-length constants")
    common.add_argument("--key", metavar="PATH")
    common.add_argument("--in", dest="inp", metavar="PATH")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--seed", type=int, help="deterministic randomness (testing only)")
    common.add_argument("--format", choices=["text", "binary"], default="text",
                        help="plaintext record encoding")
    common.add_argument("--max-n", type=int, default=8)
    common.add_argument("--max-n-star", type=int, default=16)
    common.add_argument("--max-ell", type=int, default=12, help="enumeration limit on the field degree")
    common.add_argument("--max-ell-plan", type=int, default=256, help="planner limit on the field degree")
    common.add_argument("--ell", type=int, help="force the field degree (verify only)")
    common.add_argument("--table", action="store_true", help="append the code table (analyze only)")

    parser = argparse.ArgumentParser(prog="esc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, help_ in [
        ("analyze", cmd_analyze, "report model, code and key-length parameters"),
        ("keygen", cmd_keygen, "write a random key file"),
        ("encrypt", cmd_encrypt, "encrypt fixed-width plaintext records"),
        ("decrypt", cmd_decrypt, "decrypt a file of ciphertext containers"),
        ("verify", cmd_verify, "exhaustively audit the security bounds"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except GuardError as exc:
        print(f"esc: guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ConfigError, FormatError, HeaderMismatch, DecodeError, UsageError, ValueError, OSError) as exc:
        print(f"esc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
