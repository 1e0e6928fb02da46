"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 cap exceeded.
JSON output has the shape ``{"schema": "report-v1", "payload": ..., "meta": ...}``;
the payload is deterministic and all timing lives in ``meta``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .corpus import CASE_ALIASES, CASES, run_cases, summarize
from .engine import (
    CapExceeded,
    PreconditionError,
    closure,
    commutator_subgroup,
    commutator_values,
    compute_invariants,
    default_cap,
    diagonal_subgroup,
    gpqa_group,
    rho2_construction,
)
from .matgroup import MatrixError, generators_from_json, make_gpqa_generators
from .reducibility import (
    Subspace,
    algebra_span,
    check_stabilizer_dichotomy,
    decompose_rank2_group,
    find_invariant_subspace,
)

SCHEMA = "report-v1"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_CAP = 3


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# input handling


def _parse_a(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t != ""]
    except ValueError:
        raise InputError(f"--a must be comma-separated integers, got {text!r}") from None


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _gpqa_args(args) -> tuple[int, int, list[int]]:
    if args.p is None or args.q is None or args.a is None:
        raise InputError("--p, --q and --a are all required")
    return args.p, args.q, _parse_a(args.a)


def _generators(args) -> tuple[list, dict]:
    """Generators from exactly one source: --gens FILE or --p/--q/--a."""
    has_file = args.gens is not None
    has_gpqa = any(v is not None for v in (args.p, args.q, args.a))
    if has_file == has_gpqa:
        raise InputError("give exactly one input: --gens FILE or --p/--q/--a")
    if has_file:
        gens = generators_from_json(_read_json(args.gens))
        return gens, {"source": "file", "path": Path(args.gens).name}
    p, q, a = _gpqa_args(args)
    s, d = make_gpqa_generators(p, q, a)
    return [s, d], {"source": "gpqa", "p": p, "q": q, "a": [x % q for x in a]}


def _cap(args) -> int:
    if args.cap is not None:
        if args.cap < 1:
            raise InputError("--cap must be >= 1")
        return args.cap
    try:
        return default_cap()
    except ValueError as exc:
        raise InputError(str(exc)) from None


# ---------------------------------------------------------------------------
# subcommands; each returns (payload, exit code)


def cmd_gpqa(args) -> tuple[dict, int]:
    p, q, a = _gpqa_args(args)
    make_gpqa_generators(p, q, a)  # validates before enumerating
    group = gpqa_group(p, q, a, _cap(args))
    values = commutator_values(group)
    inv = compute_invariants(group, values)
    diag = diagonal_subgroup(group)
    comm = commutator_subgroup(group)
    payload = {
        "input": {"p": p, "q": q, "a": [x % q for x in a]},
        "order": group.order,
        "rho": inv.rho,
        "r": inv.r,
        "diagonal_order": diag.order,
        "commutator_order": comm.order,
        "invariants": inv.to_json(),
    }
    if inv.rho == 2:
        built = rho2_construction(group)
        payload["rho2_witness"] = {
            "gamma": built.gamma.to_json(),
            "omega": built.omega.to_json(),
            "omega_rank": built.omega_rank,
            "claimed_rank": built.claimed_rank,
        }
        if built.omega_rank != built.claimed_rank:
            return payload, EXIT_FAIL
    return payload, EXIT_OK


def cmd_burnside(args) -> tuple[dict, int]:
    gens, source = _generators(args)
    span = algebra_span(gens)
    n = gens[0].n
    payload = {"input": source, "n": n, "algebra_dim": span.dim, "irreducible": span.dim == n * n}
    if span.dim != n * n:
        found = find_invariant_subspace(gens)
        payload["invariant_subspace"] = found.to_json()
    return payload, EXIT_OK


def cmd_invariants(args) -> tuple[dict, int]:
    gens, source = _generators(args)
    group = closure(gens, _cap(args))
    inv = compute_invariants(group)
    payload = {"input": source, "n": group.n, **inv.to_json()}
    return payload, EXIT_OK


def cmd_decompose(args) -> tuple[dict, int]:
    gens, source = _generators(args)
    group = closure(gens, _cap(args))
    rep = decompose_rank2_group(group)
    payload = {"input": source, "n": group.n, "order": group.order, **rep.to_json()}
    return payload, EXIT_OK if rep.ok else EXIT_FAIL


def cmd_stabilizer(args) -> tuple[dict, int]:
    gens, source = _generators(args)
    if args.subspace is None:
        raise InputError("--subspace FILE is required")
    try:
        space = Subspace.from_json(_read_json(args.subspace))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad subspace file: {exc}") from None
    if space.n != gens[0].n:
        raise InputError(f"subspace lives in dimension {space.n}, generators in {gens[0].n}")
    group = closure(gens, _cap(args))
    rep = check_stabilizer_dichotomy(group, space)
    payload = {"input": source, "n": group.n, "order": group.order, "dim_M": space.dim, **rep.to_json()}
    return payload, EXIT_OK if rep.holds else EXIT_FAIL


def cmd_verify_paper(args) -> tuple[dict, int]:
    if args.case != "all" and args.case not in CASES and args.case not in CASE_ALIASES:
        raise InputError(f"unknown case {args.case!r}")
    if args.p_max < 2 or args.q_max < 2:
        raise InputError("--p-max and --q-max must be >= 2")
    if args.threads < 1:
        raise InputError("--threads must be >= 1")
    reports = run_cases(args.case, args.p_max, args.q_max, _cap(args), args.threads)
    summary = summarize(reports)
    payload = {
        "case": args.case,
        "p_max": args.p_max,
        "q_max": args.q_max,
        "cap": _cap(args),
        "summary": summary,
        "reports": [r.to_json() for r in reports],
    }
    return payload, EXIT_FAIL if summary["failures"] else EXIT_OK


COMMANDS = {
    "gpqa": cmd_gpqa,
    "burnside": cmd_burnside,
    "invariants": cmd_invariants,
    "decompose": cmd_decompose,
    "stabilizer": cmd_stabilizer,
    "verify-paper": cmd_verify_paper,
}


# ---------------------------------------------------------------------------
# rendering


def _fmt_matrix(m) -> str:
    if m is None:
        return "-"
    if m.get("kind") == "monomial":
        return f"perm={m['perm']} exps={m['exps']} (zeta_{m['order']})"
    return f"dense {m['n']}x{m['n']} over Q(zeta_{m['order']})"


def _fmt_subspace(data) -> str:
    if data is None:
        return "-"
    space = Subspace.from_json(data)
    vecs = ["(" + ", ".join(str(x) for x in v) + ")" for v in space.basis]
    return f"dim {space.dim}: span " + ", ".join(vecs) if vecs else "dim 0"


def _kv(rows: list[tuple[str, object]]) -> str:
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def _text_verify(payload: dict) -> str:
    summary = payload["summary"]
    header = ("case", "pass", "fail", "vacuous", "cap-exceeded")
    lines = [f"{header[0]:<22}" + "".join(f"{h:>14}" for h in header[1:])]
    for case, counts in summary["counts"].items():
        lines.append(f"{case:<22}" + "".join(f"{counts[h]:>14}" for h in header[1:]))
    failed = [r for r in payload["reports"] if r["status"] == "fail"]
    if failed:
        lines.append("")
        lines.append(f"failures ({len(failed)}):")
        for r in failed:
            bad = [c["name"] for c in r["checks"] if not c["ok"]]
            lines.append(f"  {r['case']} {json.dumps(r['instance'], sort_keys=True)}: {'; '.join(bad)}")
    findings = [(r, f) for r in payload["reports"] for f in r["findings"]]
    lines.append("")
    lines.append(f"findings ({len(findings)}):")
    for r, f in findings:
        lines.append(f"  {r['case']} {json.dumps(r['instance'], sort_keys=True)}: {f.get('note', '')}")
    lines.append("")
    lines.append("result: " + ("FAIL" if summary["failures"] else "PASS"))
    return "\n".join(lines)


def render_text(command: str, payload: dict) -> str:
    if command == "verify-paper":
        return _text_verify(payload)
    if command == "gpqa":
        inv = payload["invariants"]
        rows = [
            ("G", f"p={payload['input']['p']} q={payload['input']['q']} a={payload['input']['a']}"),
            ("order", payload["order"]),
            ("rho", payload["rho"]),
            ("r", payload["r"]),
            ("|D|", payload["diagonal_order"]),
            ("|C|", payload["commutator_order"]),
            ("rho witness", _fmt_matrix(inv["rho_witness"])),
        ]
        if inv["r_witness"]:
            rows.append(("r witness X", _fmt_matrix(inv["r_witness"][0])))
            rows.append(("r witness Y", _fmt_matrix(inv["r_witness"][1])))
        if "rho2_witness" in payload:
            w = payload["rho2_witness"]
            rows.append(("rho2 commutator rank", f"{w['omega_rank']} (claimed {w['claimed_rank']})"))
        return _kv(rows)
    rows = []
    for key in sorted(payload):
        value = payload[key]
        if value is None:
            value = "-"
        elif isinstance(value, bool):
            value = str(value).lower()
        elif isinstance(value, (dict, list)):
            if key == "rho_witness":
                value = _fmt_matrix(value)
            elif key == "M":
                value = _fmt_subspace(value)
            elif key == "invariant_subspace":
                value = f"{value['status']} via {value['method'] or '-'}; " + _fmt_subspace(value["subspace"])
            elif key == "r_witness":
                value = ", ".join(_fmt_matrix(v) for v in value)
            else:
                value = json.dumps(value, sort_keys=True)
        rows.append((key, value))
    return _kv(rows)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="prime size of the cyclic shift")
    common.add_argument("--q", type=int, help="prime order of the diagonal roots")
    common.add_argument("--a", help="exponents of A, comma separated")
    common.add_argument("--gens", help="JSON file of generator matrices")
    common.add_argument("--cap", type=int, default=None, help="element cap (default 100000, env MONO_CAP)")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="commrank",
        description="Commutator-rank invariants and reducibility checks for finite monomial groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("gpqa", parents=[common], help="analyse G(p, q, A)")
    sub.add_parser("burnside", parents=[common], help="irreducibility via the generated algebra")
    sub.add_parser("invariants", parents=[common], help="rho and r of a finite group")
    sub.add_parser("decompose", parents=[common], help="split a rank-two commutator group")
    stab = sub.add_parser("stabilizer", parents=[common], help="stabilizer of a subspace")
    stab.add_argument("--subspace", help="JSON file with n, order and basis")
    verify = sub.add_parser("verify-paper", parents=[common], help="run the verification corpus")
    verify.add_argument("--case", default="all", help="'all', a case name or a numeric label")
    verify.add_argument("--p-max", type=int, default=3)
    verify.add_argument("--q-max", type=int, default=3)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK

    start = time.perf_counter()
    try:
        payload, code = COMMANDS[args.command](args)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InputError, MatrixError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    elapsed = time.perf_counter() - start

    if args.format == "json":
        doc = {"schema": SCHEMA, "payload": payload, "meta": {"command": args.command, "elapsed_seconds": round(elapsed, 6)}}
        text = json.dumps(doc, sort_keys=True, indent=2)
    else:
        text = render_text(args.command, payload)
    try:
        _emit(text, args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_INPUT
    return code


if __name__ == "__main__":
    raise SystemExit(main())
