"""Command-line entry point: ``cartan-forge <command> ...``.

Exit codes: 0 success, 1 bad input / I/O / schema, 2 no decomposition can
exist (nonzero center), 3 no construction available, 4 verification failed,
5 search budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from typing import Any, Sequence

from .construct import Obstruction, Verdict, construct_odac
from .errors import BudgetExceeded, CartanForgeError
from .rings import find_primitive_root, parse_ring_spec, prime_power
from .search import (
    classical_odac_search_sl3,
    degeneracy_oracle,
    exhaustive_shape_check,
    sl2_orthogonality_analysis,
    verify_no_classical_pair,
)
from .serialize import decomposition_from_json, decomposition_to_json, dump_json, load_json
from .sln import verify_odac

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_ODAC = 2
EXIT_NO_CONSTRUCTION = 3
EXIT_VERIFY_FAILED = 4
EXIT_BUDGET = 5


class _Parser(argparse.ArgumentParser):
    # argparse's own exit status 2 would collide with the NoODAC verdict
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def parse_q_list(text: str) -> list[int]:
    """``5,7,11`` or ``5..13`` (prime powers in the range) or a mix of both."""
    out: list[int] = []
    for part in (p.strip() for p in text.split(",")):
        if not part:
            continue
        m = re.fullmatch(r"(\d+)\s*\.\.\s*(\d+)", part)
        if m:
            lo, hi = int(m[1]), int(m[2])
            out.extend(q for q in range(lo, hi + 1) if prime_power(q))
        elif part.isdigit():
            out.append(int(part))
        else:
            raise argparse.ArgumentTypeError(f"cannot read q value {part!r}")
    if not out:
        raise argparse.ArgumentTypeError("no q values given")
    return out


def _emit(args, payload: Any, text: str):
    if args.out:
        dump_json(payload, args.out)
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _report_lines(report) -> str:
    lines = [f"  {name}: {value}" for name, value in report.checks().items() if value is not None]
    if report.witness:
        lines.append("  witness: " + json.dumps(report.witness))
    return "\n".join(lines)


# ---------------------------------------------------------------------------

def cmd_construct(args) -> int:
    ring = parse_ring_spec(args.ring)
    if args.n < 2:
        raise CartanForgeError("n must be at least 2")
    result = construct_odac(ring, args.n)
    if isinstance(result, Obstruction):
        print(f"{result.verdict.value}: {result.reason}")
        return EXIT_NO_ODAC if result.verdict is Verdict.NO_ODAC else EXIT_NO_CONSTRUCTION
    doc = decomposition_to_json(result)
    if args.out:
        dump_json(doc, args.out)
    report = verify_odac(result, classical=False if args.skip_classical else None)
    if args.format == "json":
        print(json.dumps({"decomposition": doc if not args.out else args.out, "verification": report.to_json()}, indent=2))
    else:
        names = ", ".join(result.names)
        print(f"sl_{args.n}({ring.to_dsl()}): {len(result.components)} components ({names})")
        if args.out:
            print(f"wrote {args.out}")
        print("verification " + ("passed" if report.passed else "FAILED"))
        print(_report_lines(report))
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def cmd_verify(args) -> int:
    expected = parse_ring_spec(args.ring) if args.ring else None
    D = decomposition_from_json(load_json(args.input), expected)
    classical = None
    if args.classical:
        classical = True
    elif args.skip_classical:
        classical = False
    report = verify_odac(D, classical=classical)
    ok = report.passed and report.all_classical is not False
    if args.format == "json":
        print(json.dumps(report.to_json(), indent=2))
    else:
        print("verification " + ("passed" if ok else "FAILED"))
        print(_report_lines(report))
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_search_sl3(args) -> int:
    reports = [classical_odac_search_sl3(q).to_json() for q in args.q]
    text = "\n".join(
        f"q = {r['q']}: exists = {str(r['exists']).lower()}, {len(r['witnesses'])} witnesses ({r['elapsed_ms']} ms)"
        for r in reports
    )
    _emit(args, reports, text)
    return EXIT_OK


def cmd_oracle_lemma(args) -> int:
    payload = []
    lines = []
    for q in args.q:
        rep = degeneracy_oracle(q).to_json()
        count = len(rep["counterexamples"])
        line = f"q = {q}: {count} counterexamples ({rep['a_instances']} A, {rep['pairs_checked']} pairs)"
        if args.shape:
            rep["shape_check"] = exhaustive_shape_check(q)
            line += f"; every surviving plane Lemma-shaped: {str(rep['shape_check']).lower()}"
        payload.append(rep)
        lines.append(line)
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_remark_check(args) -> int:
    payload = [{"q": q, "no_classical_pair": verify_no_classical_pair(q)} for q in args.q]
    _emit(args, payload, "\n".join(f"q = {r['q']}: no classical pair = {str(r['no_classical_pair']).lower()}" for r in payload))
    return EXIT_OK


def cmd_sl2_analysis(args) -> int:
    payload, lines = [], []
    for q in args.q:
        analysis = sl2_orthogonality_analysis(q)
        doc = analysis.to_json()
        doc["consistent"] = analysis.consistent
        payload.append(doc)
        lines.append(f"q = {q}")
        for row in doc["rows"]:
            kind = "square" if row["is_square"] else "non-square"
            conj = "diagonally conjugate to a = 1" if row["diagonal_conjugation_to_standard"] else "no diagonal conjugation to a = 1"
            lines.append(f"  a = {row['a']}: partner {row['partners']}, {kind}, {conj}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_ring_info(args) -> int:
    ring = parse_ring_spec(args.ring)
    factors = [
        {
            "factor": lf.ring.to_dsl(),
            "residue_characteristic": lf.p,
            "nilpotency": lf.nilpotency,
            "residue_unit_order": lf.residue_field_unit_order,
        }
        for lf in ring.local_factors()
    ]
    doc: dict[str, Any] = {
        "ring": ring.to_dsl(),
        "size": ring.size,
        "characteristic": ring.characteristic,
        "is_field": ring.is_field,
        "local_factors": factors,
    }
    if args.p:
        u = find_primitive_root(ring, args.p)
        doc["primitive_root"] = {"p": args.p, "u": None if u is None else u.to_json()}
    lines = [f"{doc['ring']}: {doc['size']} elements, characteristic {doc['characteristic']}, field: {doc['is_field']}"]
    lines += [f"  local factor {f['factor']}: residue unit order {f['residue_unit_order']}" for f in factors]
    if args.p:
        u = doc["primitive_root"]["u"]
        lines.append(f"  root of unity of order {args.p} with u - 1 a unit: {'absent' if u is None else u}")
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cartan-forge", description="Orthogonal abelian Cartan decompositions of sl_n over finite rings.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, out=True):
        p.add_argument("--format", choices=("text", "json"), default="text")
        if out:
            p.add_argument("--out", help="write the JSON result to this file")

    def q_arg(p):
        p.add_argument("--q", type=parse_q_list, required=True, help="comma list and/or lo..hi range")

    p = sub.add_parser("construct", help="build a decomposition and verify it")
    p.add_argument("--ring", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--skip-classical", action="store_true", help="skip the root-space test over fields")
    common(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="verify a decomposition JSON file")
    p.add_argument("--ring", help="expected ring; must match the file")
    p.add_argument("--in", dest="input", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--classical", action="store_true")
    g.add_argument("--skip-classical", action="store_true")
    common(p, out=False)
    p.set_defaults(func=cmd_verify)

    for name, func, helptext in (
        ("search-sl3", cmd_search_sl3, "classical decompositions of sl_3(F_q)"),
        ("oracle-lemma", cmd_oracle_lemma, "degenerate commuting pairs with a zero first row"),
        ("remark-check", cmd_remark_check, "no Lemma-shaped classical Cartan when 3 does not divide q - 1"),
        ("sl2-analysis", cmd_sl2_analysis, "orthogonal partners and square classes in sl_2(F_q)"),
    ):
        p = sub.add_parser(name, help=helptext)
        q_arg(p)
        if name == "oracle-lemma":
            p.add_argument("--shape", action="store_true", help="also enumerate every plane of zero-diagonal sl_3")
        common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("ring-info", help="local factors and primitive roots")
    p.add_argument("--ring", required=True)
    p.add_argument("--p", type=int, help="also look for a primitive p-th root u with u - 1 a unit")
    common(p)
    p.set_defaults(func=cmd_ring_info)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (CartanForgeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
