"""Command-line front end: d_n tables, membership checks with certificates,
basis construction, and the identity suites.

Exit codes for ``check``: 0 member, 1 non-member, 2 precision/parse error.
All output is deterministic for fixed inputs, seed, and budget.
"""

from __future__ import annotations

import argparse
import json
import sys

from .arith import IncompatibleCongruences, PrecisionError, PrimeBudget
from .classify import NotInGroup, in_Qn, in_Qnm, in_Opnm_phi
from .series import TruncSeries, TruncationExhausted
from .stable import construct_Fn, dn, s_criterion, tower_member
from .suites import SUITES


def _budget_from_args(args) -> PrimeBudget:
    primes = tuple(int(p) for p in args.primes.split(","))
    return PrimeBudget.uniform(primes, args.prec)


def _emit(data, fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n")
    else:
        raise ValueError(f"unsupported format {fmt}")


def cmd_dn(args) -> int:
    rows = [(n, dn(n)) for n in range(args.max + 1)]
    if args.format == "csv":
        sys.stdout.write("n,d_n,factorization\n")
        for n, rec in rows:
            sys.stdout.write(f"{n},{rec.value},{rec.factorization()}\n")
    elif args.format == "json":
        _emit(
            [{"n": n, "d_n": rec.value, "factorization": rec.factorization()} for n, rec in rows],
            "json",
        )
    else:
        for n, rec in rows:
            sys.stdout.write(f"{n}\t{rec.value}\t{rec.factorization()}\n")
    return 0


def cmd_check(args) -> int:
    try:
        with open(args.input) as fh:
            G = TruncSeries.from_json(json.load(fh))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        _emit({"error": f"cannot read series: {exc}"}, "json")
        return 2
    budget = _budget_from_args(args)
    try:
        verdict: dict = {"test": args.test}
        if args.test == "qn":
            member = in_Qn(G, args.n)
        elif args.test == "qnm":
            member = in_Qnm(G, args.n, args.m)
        elif args.test == "opnm":
            member = in_Opnm_phi(G, args.n, args.m)
        elif args.test == "s":
            rep = s_criterion(G, primes=budget.primes)
            member = rep.ok
            if rep.witness:
                verdict["witness"] = list(rep.witness)
            if rep.skipped:
                verdict["skipped"] = [list(s) for s in rep.skipped]
        elif args.test == "tower":
            member = tower_member(G, args.n, budget)
        else:
            _emit({"error": f"unknown test {args.test}"}, "json")
            return 2
        verdict["member"] = member
        _emit(verdict, "json")
        return 0 if member else 1
    except (PrecisionError, TruncationExhausted, NotInGroup, IncompatibleCongruences, ValueError) as exc:
        _emit({"error": str(exc)}, "json")
        return 2


def cmd_basis(args) -> int:
    budget = _budget_from_args(args)
    try:
        F = construct_Fn(args.n, args.trunc, budget)
    except PrecisionError as exc:
        _emit({"error": str(exc)}, "json")
        return 2
    payload = F.to_json()
    payload["budget"] = budget.to_json()
    _emit(payload, "json")
    return 0


def cmd_verify(args) -> int:
    fn = SUITES.get(args.suite)
    if fn is None:
        _emit({"error": f"unknown suite {args.suite}", "known": sorted(SUITES)}, "json")
        return 2
    ok, report = fn(T=args.trunc, seed=args.seed)
    _emit({"suite": args.suite, "ok": ok, "report": report}, "json")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ckops",
        description="Exact series calculus for connective K-theory operations",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--primes", default="2,3,5,7", help="budget primes, comma separated")
    common.add_argument("--prec", type=int, default=8, help="per-prime precision exponent")
    common.add_argument("--trunc", type=int, default=12, help="series truncation degree")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", default="json", choices=["json", "csv", "text"])

    p_dn = sub.add_parser("dn", parents=[common], help="table of the integers d_n")
    p_dn.add_argument("--max", type=int, default=7)
    p_dn.set_defaults(fn=cmd_dn)

    p_check = sub.add_parser("check", parents=[common], help="membership tests")
    p_check.add_argument("--input", required=True, help="series JSON file")
    p_check.add_argument("--test", required=True, choices=["qn", "qnm", "opnm", "s", "tower"])
    p_check.add_argument("--n", type=int, default=1)
    p_check.add_argument("--m", type=int, default=1)
    p_check.set_defaults(fn=cmd_check)

    p_basis = sub.add_parser("basis", parents=[common], help="emit the basis series F_n")
    p_basis.add_argument("--n", type=int, required=True)
    p_basis.set_defaults(fn=cmd_basis)

    p_verify = sub.add_parser("verify", parents=[common], help="run an identity suite")
    p_verify.add_argument("suite")
    p_verify.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
