"""Command-line interface."""
from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from . import quasicone as qc
from . import search as se
from . import strategy as st


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 2 and name the offending flag
        self.exit(2, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    p = _Parser(prog="quasicones", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    enum = sub.add_parser("enumerate", help="stream canonical normal quasicones")
    enum.add_argument("--rank", type=int, required=True)
    enum.add_argument("--bound", type=int)
    enum.add_argument("--raw", action="store_true",
                      help="emit every normal form, not one per orbit")

    search = sub.add_parser("search", help="run the tiered strategy search")
    search.add_argument("--rank", type=int, required=True)
    search.add_argument("--bound", type=int)
    search.add_argument("--tiers", default="shortest,shortest-long,simple-basic,concat")
    search.add_argument("--max-rounds", type=int, default=16)
    search.add_argument("--out", type=Path,
                        help="directory for report, csv and figures")
    search.add_argument("--format", choices=("text", "structured"), default="text")

    apply_p = sub.add_parser("apply", help="apply a strategy to a matrix file")
    apply_p.add_argument("--matrix", type=Path, required=True)
    apply_p.add_argument("--strategy", required=True)
    apply_p.add_argument("--start-weight", default="-1d",
                         help="delta multiple such as -1d")
    apply_p.add_argument("--format", choices=("text", "structured"), default="text")

    norm = sub.add_parser("normalize", help="print the canonical representative")
    norm.add_argument("--matrix", type=Path, required=True)

    dfct = sub.add_parser("defect", help="print the defect of a matrix file")
    dfct.add_argument("--matrix", type=Path, required=True)

    verify = sub.add_parser("verify-paper",
                            help="check the engine against the bundled reference data")
    verify.add_argument("--case", choices=("table", "manual"), required=True)
    verify.add_argument("--ranks", default="2,3",
                        help="comma list of ranks for the count table")
    verify.add_argument("--format", choices=("text", "structured"), default="text")

    serve = sub.add_parser("serve", help="run the HTTP session service")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--reports", type=Path, default=Path("reports"),
                       help="directory with search reports for /api/residual")
    serve.add_argument("--static", type=Path, default=Path("frontend"),
                       help="directory with the built explorer page, if any")
    return p


def _parse_start_weight(text: str) -> int:
    m = re.fullmatch(r"([+-]?\d+)d", text.strip())
    if not m:
        raise ValueError(
            f"--start-weight must be an integer delta multiple like -1d, got {text!r}"
        )
    return int(m.group(1))


def _load_matrix(path: Path) -> qc.QuasiconeMatrix:
    return qc.loads(path.read_text())


def _cmd_enumerate(args) -> int:
    bound = args.bound if args.bound is not None else args.rank + 2
    for c in qc.enumerate_normal(args.rank, bound, canonical=not args.raw):
        print(qc.dumps(c))
    return 0


def _cmd_search(args) -> int:
    tiers = tuple(t.strip() for t in args.tiers.split(",") if t.strip())
    for t in tiers:
        if t not in se.TIER_NAMES:
            print(f"--tiers: unknown tier {t!r}", file=sys.stderr)
            return 2
    report = se.run_search(args.rank, args.bound, tiers=tiers,
                           max_rounds=args.max_rounds)
    if args.out:
        from .report import write_report

        for path in write_report(report, args.out):
            print(f"wrote {path}", file=sys.stderr)
    if args.format == "structured":
        from .report import report_json

        print(report_json(report))
    else:
        print(f"rank {report.rank}, bound {report.bound}: "
              f"{report.total_considered} quasicones")
        for name, unsolved in report.tiers:
            print(f"  after {name}: {unsolved} unsolved")
        for key in report.residual:
            print(f"  residual {key}")
    return 0


def _cmd_apply(args) -> int:
    c = _load_matrix(args.matrix)
    steps = st.parse_strategy(args.strategy)
    delta = _parse_start_weight(args.start_weight)
    state = st.apply_strategy(st.initial_state(c, delta), steps)
    if args.format == "structured":
        doc = {
            "matrix": json.loads(qc.dumps(state.matrix)),
            "defect": qc.defect(state.matrix),
            "gap": list(qc.gap(state.matrix)),
            "offset": {"classical": _offset_nu(state), "delta": state.delta},
            "trace": st.format_trace(state),
            "succeeded": st.succeeded(c, state),
        }
        print(json.dumps(doc, separators=(",", ":")))
    else:
        print(qc.dumps(state.matrix))
    return 0


def _offset_nu(state: st.StrategyState) -> int:
    from .roots import coords_to_signed_nu

    return coords_to_signed_nu(state.classical)


def _cmd_normalize(args) -> int:
    print(qc.dumps(qc.normalize(_load_matrix(args.matrix))))
    return 0


def _cmd_defect(args) -> int:
    print(qc.defect(_load_matrix(args.matrix)))
    return 0


def _cmd_verify(args) -> int:
    failures = 0
    if args.case == "manual":
        results = se.replay_manual_cases()
        if args.format == "structured":
            slim = [
                {k: v for k, v in r.items() if not k.endswith("diffs")}
                for r in results
            ]
            print(json.dumps(slim, separators=(",", ":")))
            return 1 if any(not r["pass"] for r in results) else 0
        for r in results:
            ok = r["pass"]
            failures += not ok
            detail = "entry-exact" if r["engine_exact"] else (
                "reference-bookkeeping exact" if r["emulation_exact"] else "entry diffs"
            )
            print(f"case {r['case']}: {'pass' if ok else 'FAIL'} "
                  f"({detail}; defect {r['input_defect']} -> {r['output_defect']}, "
                  f"resolved={r['resolved']})")
    else:
        ranks = [int(x) for x in args.ranks.split(",") if x.strip()]
        rows = [se.verify_table(n) for n in ranks]
        if args.format == "structured":
            slim = [{k: v for k, v in row.items() if k != "report"} for row in rows]
            print(json.dumps(slim, separators=(",", ":")))
            return 1 if any(not row["match"] for row in rows) else 0
        for row in rows:
            ok = row["match"]
            failures += not ok
            print(f"rank {row['rank']} (bound {row['bound']}): "
                  f"computed {row['computed']} "
                  f"expected {row['expected']} -> {'pass' if ok else 'FAIL'}")
    return 1 if failures else 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(reports_dir=args.reports, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


_COMMANDS = {
    "enumerate": _cmd_enumerate,
    "search": _cmd_search,
    "apply": _cmd_apply,
    "normalize": _cmd_normalize,
    "defect": _cmd_defect,
    "verify-paper": _cmd_verify,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = _build_parser()
    if argv is None:
        argv = sys.argv[1:]
    argv = list(argv)
    # keep `--start-weight -1d` working: argparse reads the bare value as a flag
    for i, token in enumerate(argv[:-1]):
        if token == "--start-weight" and argv[i + 1].startswith("-"):
            argv[i : i + 2] = [f"--start-weight={argv[i + 1]}"]
            break
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return _COMMANDS[args.command](args)
    except st.StrategyError as err:
        where = f" at step {err.step_index}" if err.step_index is not None else ""
        print(f"error: {err.kind}{where}: {err}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
