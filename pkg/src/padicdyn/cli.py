"""Command-line front end.

Exit status: 0 when every requested check passes, 1 when a check fails,
2 on usage errors, 3 on internal errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import conjugation as cj
from . import maps, prng
from .errors import ConfigError, PadicError
from .padic import check_params

DEFAULT_SEED = 20240101

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_spec(text: str, seed: int) -> maps.MapSpec:
    """``odometer[:c]``, ``affine:a,b``, ``identity``, ``interleaved-odometer``, ``tree``."""
    name, _, arg = text.partition(":")
    try:
        if name == "odometer":
            return maps.Odometer(int(arg) if arg else 1)
        if name == "affine":
            a, b = (int(v) for v in arg.split(","))
            return maps.Affine(a, b)
        if name == "identity":
            return maps.Identity()
        if name == "interleaved-odometer":
            return maps.InterleavedOdometer()
        if name == "tree":
            return maps.TreeSampled(int(arg) if arg else seed)
    except ValueError as exc:
        raise UsageError(f"bad map spec {text!r}: {exc}") from exc
    raise UsageError(f"unknown map spec {text!r}")


def build_map(args, n: int) -> maps.TruncatedMap:
    if args.infile:
        f = maps.load(args.infile)
        if f.n < n:
            raise UsageError(f"{args.infile} has precision {f.n} < {n}")
        return f.reduced(n)
    if args.spec is None:
        raise UsageError("one of --spec or --in is required")
    if args.spec.startswith("transitive"):
        _, _, arg = args.spec.partition(":")
        return prng.sample_transitive(args.p, args.k, n, int(arg) if arg else args.seed)
    return maps.induce(parse_spec(args.spec, args.seed), args.p, args.k, n)


class Output:
    """Collects text lines or a JSON document depending on ``--format``."""

    def __init__(self, fmt: str, stream):
        self.fmt = fmt
        self.stream = stream
        self.doc: dict = {}

    def line(self, text: str) -> None:
        if self.fmt == "text":
            print(text, file=self.stream)

    def put(self, key, value) -> None:
        self.doc[key] = value

    def close(self) -> None:
        if self.fmt == "json":
            json.dump(self.doc, self.stream, indent=2, default=str)
            self.stream.write("\n")


def _result_dict(r: maps.CheckResult) -> dict:
    return {"ok": r.ok, "level": r.level, "witness": None if r.witness is None else [int(v) for v in r.witness]}


def cmd_check(args, out: Output) -> int:
    f = build_map(args, args.n)
    ok = True
    levels = []
    for m in range(1, f.n + 1):
        lip = maps.is_compatible_at(f, m)
        if lip:
            bij = maps.is_bijective_at(f, m)
            trans = maps.is_transitive_at(f, m) if bij else maps.CheckResult(False, m, None, "not bijective")
        else:
            bij = trans = maps.CheckResult(False, m, None, "not compatible")
        row = {"m": m, "lipschitz": _result_dict(lip), "bijective": _result_dict(bij), "transitive": _result_dict(trans)}
        levels.append(row)
        ok = ok and bool(lip) and bool(bij) and bool(trans)
        flags = " ".join(f"{name}={'pass' if r else 'FAIL'}" for name, r in (("lipschitz", lip), ("bijective", bij), ("transitive", trans)))
        out.line(f"level {m}: {flags}")
        for name, r in (("lipschitz", lip), ("bijective", bij), ("transitive", trans)):
            if not r and r.witness is not None:
                out.line(f"  {name} {r.witness_line()}")
    out.put("levels", levels)
    out.put("ok", ok)
    out.line("all checks pass" if ok else "some checks failed")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_cycles(args, out: Output) -> int:
    f = build_map(args, args.n)
    levels = []
    for m in range(1, f.n + 1):
        summary = maps.cycle_summary(maps.cycle_structure(f, m))
        levels.append({"m": m, "cycles": {str(k): v for k, v in summary.items()}})
        text = ", ".join(f"{length}x{count}" for length, count in summary.items())
        out.line(f"level {m}: {text}")
    out.put("levels", levels)
    return EXIT_OK


def _bundle(args):
    f = build_map(args, args.n)
    return cj.conjugate_forward(f, N=args.n)


def _print_checks(bundle, out: Output) -> bool:
    summary = bundle.checks.summary()
    out.put("P", list(bundle.P.images))
    out.put("checks", summary)
    out.line(f"P = {list(bundle.P.images)}")
    for name in cj.LevelChecks.NAMES + ("f_transitive",):
        s = summary[name]
        status = "pass" if s["ok"] else "FAIL"
        out.line(f"{name}: {status}")
        if not s["ok"]:
            fail = bundle.checks.first_failure(name)
            out.line(f"  {fail.witness_line()}")
    out.line(f"ergodicity_transferred: {'pass' if summary['ergodicity_transferred'] else 'FAIL'}")
    return bundle.checks.ok and bundle.checks.ergodicity_transferred


def cmd_conjugate(args, out: Output) -> int:
    bundle = _bundle(args)
    ok = _print_checks(bundle, out)
    if args.out:
        path = cj.export_bundle(bundle, args.out)
        out.line(f"bundle written to {path}")
        out.put("bundle", str(path))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_roundtrip(args, out: Output) -> int:
    if args.infile and not args.infile.endswith(".map"):
        bundle = cj.load_bundle(args.infile)
    else:
        bundle = _bundle(args)
    ok = True
    levels = []
    for n in range(1, bundle.N + 1):
        try:
            cj.conjugate_backward(bundle, n)
            rt = {"ok": True}
        except cj.VerificationFailure as exc:
            rt = {"ok": False, "level": exc.level, "witness": list(exc.witness or ())}
            ok = False
        conv = cj.verify_scalar_T_convention(bundle, n)
        levels.append({"n": n, "roundtrip": rt, "convention": conv.to_dict()})
        out.line(f"level {n}: roundtrip={'pass' if rt['ok'] else 'FAIL'} convention={conv.verdict} commutation={'pass' if conv.commutation_holds else 'FAIL'}")
        if not rt["ok"]:
            out.line(f"  witness: level={rt['level']} {' '.join(map(str, rt['witness']))}")
        if conv.witness is not None:
            x, got, want = conv.witness
            out.line(f"  convention witness: level={n} {x} {got} {want}")
        if args.require_convention and not (conv.holds and conv.commutation_holds):
            ok = False
    out.put("levels", levels)
    out.put("ok", ok)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_keystream(args, out: Output) -> int:
    f = build_map(args, args.n)
    cfg = prng.KeystreamConfig(maps.Table(f), f.p, f.k, f.n, args.state, args.count, args.extractor)
    digits = prng.keystream(cfg)
    if args.raw:
        if f.p != 2 or args.extractor != "low-digit":
            raise UsageError("--raw needs p=2 and the low-digit extractor")
        data = prng.pack_bits(digits)
        if args.out:
            with open(args.out, "wb") as fh:
                fh.write(data)
        else:
            sys.stdout.buffer.write(data)
        return EXIT_OK
    text = prng.format_keystream(digits)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        out.stream.write(text)
    return EXIT_OK


def cmd_report(args, out: Output) -> int:
    f = build_map(args, args.n)
    report = prng.uniformity_report(f)
    d = report.to_dict()
    out.doc.update(d)
    out.line(f"period {report.period}")
    for lv in d["levels"]:
        out.line(f"level {lv['m']}: classes={lv['class_count']} expected={lv['expected']} max_deviation={lv['max_deviation']}")
    return EXIT_OK if report.max_deviation == 0 else EXIT_FAIL


COMMANDS = {
    "check": cmd_check,
    "cycles": cmd_cycles,
    "conjugate": cmd_conjugate,
    "roundtrip": cmd_roundtrip,
    "keystream": cmd_keystream,
    "report": cmd_report,
}


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-p", type=int, default=2, help="prime (default 2)")
    common.add_argument("-k", type=int, default=1, help="dimension (default 1)")
    common.add_argument("-n", "-N", dest="n", type=int, default=4, help="precision / number of levels")
    common.add_argument("--spec", help="odometer[:c], affine:a,b, identity, interleaved-odometer, tree[:seed], transitive[:seed]")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--in", dest="infile", help="map file (or bundle directory for roundtrip)")
    common.add_argument("--out", help="output path")
    common.add_argument("--format", choices=("text", "json"), default="text")

    parser = argparse.ArgumentParser(prog="padicdyn", description="1-Lipschitz dynamics on Z_p^k")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="compatibility, bijectivity, transitivity per level")
    sub.add_parser("cycles", parents=[common], help="cycle structure per level")
    sub.add_parser("conjugate", parents=[common], help="build and verify the conjugate map on Z_p")
    rt = sub.add_parser("roundtrip", parents=[common], help="recover F from G and test the scalar T convention")
    rt.add_argument("--require-convention", action="store_true", help="fail when the scalar T convention fails")
    ks = sub.add_parser("keystream", parents=[common], help="iterate a map and emit digits")
    ks.add_argument("--count", type=int, default=16)
    ks.add_argument("--state", type=int, default=0, help="initial state (encoded index)")
    ks.add_argument("--extractor", choices=prng.EXTRACTORS, default="low-digit")
    ks.add_argument("--raw", action="store_true", help="pack binary digits 8 per byte")
    sub.add_parser("report", parents=[common], help="full-period residue counts")
    return parser


def run(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    out = Output(args.format, stdout)
    try:
        check_params(args.p, args.k, args.n)
        code = COMMANDS[args.command](args, out)
    except (UsageError, ConfigError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PadicError as exc:
        out.put("error", str(exc))
        out.line(f"check failed: {exc}")
        witness = getattr(exc, "witness", None)
        if witness is not None:
            out.line(f"witness: level={exc.level} {' '.join(map(str, witness))}")
        out.close()
        return EXIT_FAIL
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL
    out.close()
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
