"""Command line entry point.

Exit codes: 0 success, 1 usage, 2 parse/validation, 3 cross-reference, 4 internal.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import analytics
from .config import PipelineConfig
from .graph import GraphInvalidError, validate_graph
from .io import InputParseError, dumps, envelope, file_digest, hospital_paths, load_inputs
from .pipeline import CrossReferenceError, PipelineError, check_cross_references, run_exposure, run_review, run_scoring
from .review import profiles_to_csv

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_XREF, EXIT_INTERNAL = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_inputs(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("inputs")
    g.add_argument("--hospital", action="store_true", help="use the bundled synthetic hospital dataset")
    g.add_argument("--graph", help="MLAG JSON document")
    g.add_argument("--controls", help="control catalog JSON")
    g.add_argument("--assessment", help="assessment CSV (control_id,value)")
    g.add_argument("--alignment-spec", help="classification alignment CSV (run_time,design_time,operational,compliance)")
    g.add_argument("--alignment-layers", help="layer alignment CSV (human,access,network)")
    g.add_argument("--feature-concepts", help="concept sets for lexical classification alignment")
    g.add_argument("--layer-concepts", help="concept sets for lexical layer alignment")
    g.add_argument("--vulns", help="vulnerability DB JSON")

    c = p.add_argument_group("configuration")
    c.add_argument("--config", help="pipeline config JSON; flags below override it")
    c.add_argument("--attacker", choices=["naive", "advanced", "professional"])
    c.add_argument("--aggregation", choices=["mean", "min", "max"])
    c.add_argument("--alpha", type=float)
    c.add_argument("--cv-mode", choices=["raw", "normalized"])
    c.add_argument("--seed", type=int)

    o = p.add_argument_group("output")
    o.add_argument("--out", help="output file (default: stdout)")
    o.add_argument("--format", choices=["json", "csv"], default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mlagreview", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("review", help="flag controls whose assessment looks unreliable")
    _add_inputs(p)
    p = sub.add_parser("score", help="per-edge comprehensive scores")
    _add_inputs(p)
    p = sub.add_parser("validate", help="check every input and its cross references")
    _add_inputs(p)

    p = sub.add_parser("analyze", help="statistics over comprehensive scores")
    p.add_argument("mode", choices=["summary", "bias", "sweep", "borderline"])
    _add_inputs(p)
    p.add_argument("--scores", help="scored-assessment JSON report (summary mode)")
    p.add_argument("--bias", default="conservative", help="conservative, not-rigorous or perturb (bias mode)")
    p.add_argument("--percentage", type=float, default=15.0, help="error percentage for --bias perturb")
    p.add_argument("--percentages", default="15,45,65,90", help="comma-separated error percentages (sweep mode)")
    p.add_argument("--trials", type=int, default=7, help="trials per percentage (sweep mode)")
    return parser


def _config(args) -> PipelineConfig:
    base = PipelineConfig.load(args.config).to_dict() if args.config else {}
    overrides = {
        "attacker": args.attacker,
        "aggregation": args.aggregation,
        "alpha": args.alpha,
        "cv_mode": args.cv_mode,
        "seed": args.seed,
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    if args.attacker is not None:
        base.pop("attacker_thresholds", None)
    return PipelineConfig.from_dict(base)


def _inputs(args, config: PipelineConfig, need_vulns: bool):
    if args.hospital:
        p = hospital_paths()
        for key in ("graph", "controls", "assessment", "vulns"):
            if getattr(args, key) is None:
                setattr(args, key, p[key])
        if args.alignment_spec is None and args.feature_concepts is None:
            args.alignment_spec = p["alignment_spec"]
        if args.alignment_layers is None and args.layer_concepts is None:
            args.alignment_layers = p["alignment_layers"]
    required = ["graph", "controls", "assessment"] + (["vulns"] if need_vulns else [])
    missing = [f"--{k}" for k in required if getattr(args, k) is None]
    if missing:
        raise UsageError(f"missing required inputs: {', '.join(missing)}")
    return load_inputs(
        args.graph, args.controls, args.assessment,
        args.alignment_spec, args.alignment_layers,
        args.vulns if need_vulns or args.vulns else None,
        config, args.feature_concepts, args.layer_concepts,
    )


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


DIST_COLUMNS = ["case", "count", "mean", "std", "min", "q1", "median", "q3", "max", "outliers"]


def _dist_rows(named):
    rows = []
    for name, d in named.items():
        rows.append([name, d.count, repr(d.mean), repr(d.std), repr(d.min), repr(d.q1), repr(d.median),
                     repr(d.q3), repr(d.max), ";".join(i for i, _ in d.outliers)])
    return rows


def _scored_csv(scored) -> str:
    return _csv(
        ["id", "layer", "lambda", "governance", "score"],
        [[e.edge_id, e.layer.value, repr(e.lam), "" if e.governance is None else repr(e.governance), repr(e.score)]
         for e in scored.edges],
    )


def cmd_review(args) -> str:
    config = _config(args)
    inputs, digests = _inputs(args, config, need_vulns=False)
    profiles = run_review(inputs, config)
    if args.format == "csv":
        return profiles_to_csv(profiles)
    payload = {
        "controls": [p.to_dict() for p in profiles],
        "flagged": [p.control_id for p in profiles if p.flagged],
    }
    return dumps(envelope("flagged-assessment", payload, config, digests))


def cmd_score(args) -> str:
    config = _config(args)
    inputs, digests = _inputs(args, config, need_vulns=True)
    scored = run_scoring(inputs, config)
    if args.format == "csv":
        return _scored_csv(scored)
    return dumps(envelope("scored-assessment", scored.to_dict(), config, digests))


def cmd_validate(args) -> str:
    config = _config(args)
    inputs, digests = _inputs(args, config, need_vulns=False)
    violations = validate_graph(inputs.graph)
    if violations:
        raise GraphInvalidError(violations)
    check_cross_references(inputs)
    if inputs.vulns is not None:
        run_exposure(inputs, config)
    return dumps({"valid": True, "inputs": digests})


def _summary_from_report(path):
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        edges = doc["edges"]
        return {str(e["id"]): float(e["score"]) for e in edges}, doc.get("config"), file_digest(path)
    except (KeyError, TypeError) as exc:
        raise InputParseError(path, f"not a scored-assessment report: {exc}") from None


def cmd_analyze(args) -> str:
    config = _config(args)
    mode = args.mode
    if mode == "summary":
        if args.scores:
            scores, _, digest = _summary_from_report(args.scores)
            digests = {"scores": digest}
        else:
            inputs, digests = _inputs(args, config, need_vulns=True)
            scores = run_scoring(inputs, config).scores()
        dist = analytics.summarize(scores)
        if args.format == "csv":
            return _csv(DIST_COLUMNS, _dist_rows({"scores": dist}))
        return dumps(envelope("score-summary", {"distribution": dist.to_dict()}, config, digests))

    inputs, digests = _inputs(args, config, need_vulns=True)
    if mode == "bias":
        transform = analytics.parse_bias(args.bias, args.percentage, config.seed)
        results = analytics.bias_comparison(inputs, transform, config)
        dists = {name: analytics.summarize(s.edges) for name, s in results.items()}
        if args.format == "csv":
            return _csv(DIST_COLUMNS, _dist_rows(dists))
        payload = {
            "bias": transform.name,
            "cases": {
                name: {"cv": s.cv, "scores": s.scores(), "distribution": dists[name].to_dict()}
                for name, s in results.items()
            },
        }
        if isinstance(transform, analytics.Perturb):
            payload["percentage"] = transform.percentage
        return dumps(envelope("bias-comparison", payload, config, digests))

    if mode == "sweep":
        try:
            percentages = [float(x) for x in args.percentages.split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"--percentages must be comma-separated numbers, got {args.percentages!r}") from None
        report = analytics.sensitivity_sweep(inputs, config, percentages, args.trials, config.seed)
        if args.format == "csv":
            return report.to_csv()
        return dumps(envelope("sensitivity-sweep", report.to_dict(), config, digests))

    results = analytics.borderline_cases(inputs, config)
    dists = {name: analytics.summarize(s.edges) for name, s in results.items()}
    if args.format == "csv":
        return _csv(DIST_COLUMNS, _dist_rows(dists))
    payload = {
        "cases": {
            name: {"cv": s.cv, "scores": s.scores(), "distribution": dists[name].to_dict()}
            for name, s in results.items()
        }
    }
    return dumps(envelope("borderline-cases", payload, config, digests))


COMMANDS = {"review": cmd_review, "score": cmd_score, "validate": cmd_validate, "analyze": cmd_analyze}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        text = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"mlagreview: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CrossReferenceError as exc:
        print(f"mlagreview: cross-reference error: {exc}", file=sys.stderr)
        return EXIT_XREF
    except (InputParseError, GraphInvalidError, PipelineError, ValueError) as exc:
        print(f"mlagreview: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        print(f"mlagreview: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
