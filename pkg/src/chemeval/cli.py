"""``chemeval`` command line.

Data-level failures (invalid SMILES, non-adherent documents, flagged
records) are results and never change the exit status. Unreadable inputs
and bad configuration exit with status 1 or 2.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import warnings
from pathlib import Path

from . import __version__
from .errors import ChemEvalError, ConfigError
from .lora.train import config_from_mapping, parse_flat_config

log = logging.getLogger("chemeval")


def _dump(rec) -> str:
    return json.dumps(rec, sort_keys=True, ensure_ascii=False)


class _Out:
    """Write records to a file, or to stdout when no path is given."""

    def __init__(self, path):
        self.path = path
        self.fh = None

    def __enter__(self):
        self.fh = open(self.path, "w", encoding="utf-8", newline="\n") if self.path else sys.stdout
        return self

    def write(self, rec):
        self.fh.write(_dump(rec) + "\n")

    def __exit__(self, *exc):
        if self.path:
            self.fh.close()


def _conf(args, key, default, cast=str):
    if key in args.conf:
        try:
            return cast(args.conf[key])
        except ValueError as exc:
            raise ConfigError(f"bad value {args.conf[key]!r} for {key}") from exc
    return default


def _stats_kw(args) -> dict:
    return {
        "margin": _conf(args, "margin", 0.05, float),
        "alpha": _conf(args, "alpha", 0.05, float),
        "confidence": _conf(args, "confidence", 0.95, float),
        "mcnemar_method": _conf(args, "mcnemar_method", "corrected"),
    }


def _rate_line(label: str, est) -> str:
    return (f"{label}: {est.successes}/{est.trials} = {est.point:.1%} "
            f"({est.confidence_level:.0%} CI {est.ci_low:.1%}-{est.ci_high:.1%})")


# -- subcommands ------------------------------------------------------------

def cmd_validate(args) -> int:
    from .molgraph import iter_smiles_lines
    from .validity import corpus_validity_rate, validate_many

    texts = list(iter_smiles_lines(args.input))
    reports = validate_many(texts, jobs=args.jobs)
    with _Out(args.output) as out:
        for r in reports:
            out.write(r.to_record())
    if reports:
        print(_rate_line("valid", corpus_validity_rate(reports)), file=sys.stdout if args.output else sys.stderr)
    else:
        print("valid: 0/0 (no structures)", file=sys.stderr)
    return 0


def _read_documents(path: Path) -> list[tuple[str, str]]:
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.suffix in (".md", ".txt") and p.is_file())
        return [(p.stem, p.read_text("utf-8", errors="replace")) for p in files]
    docs = []
    for k, line in enumerate(path.read_text("utf-8").splitlines(), 1):
        if line.strip():
            row = json.loads(line)
            docs.append((str(row.get("id", k)), row["text"]))
    return docs


def cmd_format_check(args) -> int:
    from .protocol import FormatProfile, check_format, corpus_adherence_rate, load_profile, requirement_rates

    profile = load_profile(args.profile) if args.profile else FormatProfile()
    docs = _read_documents(Path(args.input))
    reports = []
    with _Out(args.output) as out:
        for doc_id, text in docs:
            rep = check_format(text, profile)
            reports.append(rep)
            out.write({"id": doc_id, **rep.as_dict()})
    if reports:
        stream = sys.stdout if args.output else sys.stderr
        print(_rate_line("adherent", corpus_adherence_rate(reports)), file=stream)
        for name, rates in requirement_rates(reports).items():
            app = rates["applicable"]
            shown = f"{app.point:.1%} of {app.trials} applicable" if app else "not applicable"
            print(f"  {name}: {shown}; {rates['all'].point:.1%} of all", file=stream)
    return 0


def cmd_curate(args) -> int:
    from .curation import deduplicate, emit_instruction_record, load_corpus, quality_control

    records, issues = load_corpus(args.input)
    for issue in issues:
        log.warning("line %d (%s) skipped: %s", issue.line, issue.id or "?", issue.message)
    qc = quality_control(records)
    kept, removed = deduplicate(records)
    if args.drop_flagged:
        bad = set(qc.removal_candidates)
        kept = [r for r in kept if r.id not in bad]
    with _Out(args.output) as out:
        for r in kept:
            out.fh.write(emit_instruction_record(r) + "\n")
    if args.qc:
        with _Out(args.qc) as out:
            for rec in qc.records():
                out.write(rec)
    stream = sys.stdout if args.output else sys.stderr
    print(f"loaded {len(records)} records ({len(issues)} unreadable)", file=stream)
    print(f"duplicates removed: {removed}", file=stream)
    print("qc flags: " + ", ".join(f"{k}={v}" for k, v in qc.counts.items()), file=stream)
    print(f"written: {len(kept)}", file=stream)
    return 0


def _ratios(text: str):
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad ratios {text!r}") from exc


def cmd_split(args) -> int:
    from .curation import load_corpus, scaffold_split

    records, issues = load_corpus(args.input)
    for issue in issues:
        log.warning("line %d (%s) skipped: %s", issue.line, issue.id or "?", issue.message)
    ratios = _ratios(args.ratios or _conf(args, "ratios", "0.85,0.10,0.05"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assignment = scaffold_split(records, ratios, seed=args.seed)
    with _Out(args.output) as out:
        for row in assignment.manifest():
            out.write(row)
    stream = sys.stdout if args.output else sys.stderr
    counts = assignment.counts()
    print(" ".join(f"{k}={v}" for k, v in counts.items()), file=stream)
    for note in assignment.warnings:
        print(f"warning: {note}", file=sys.stderr)
    return 0


def cmd_evaluate(args) -> int:
    from .evaluation import evaluate_corpus
    from .protocol import FormatProfile, load_profile

    profile = load_profile(args.profile) if args.profile else FormatProfile()
    report = evaluate_corpus(
        args.outputs,
        profile=profile,
        catalog_path=args.catalog,
        rules_path=args.rules,
        max_steps=args.max_steps or _conf(args, "max_steps", 12, int),
        jobs=args.jobs,
        **_stats_kw(args),
    )
    if args.report:
        with _Out(args.report) as out:
            for rec in report.records():
                out.write(rec)
    sys.stdout.write(report.render())
    return 0


def _read_verdicts(path: Path) -> list[dict]:
    text = path.read_text("utf-8")
    if path.suffix == ".csv":
        return list(csv.DictReader(text.splitlines()))
    return [json.loads(ln) for ln in text.splitlines() if ln.strip()]


def cmd_compare(args) -> int:
    from .evaluation import compare_verdicts

    comps = compare_verdicts(_read_verdicts(Path(args.verdicts)), **_stats_kw(args))
    with _Out(args.output) as out:
        for c in comps:
            out.write(c.as_dict())
    stream = sys.stdout if args.output else sys.stderr
    for c in comps:
        print(f"{c.model_a} vs {c.model_b}: b={c.discordant_ab} c={c.discordant_ba} "
              f"p={c.mcnemar_p:.4g} adjusted={c.adjusted_p:.4g} h={c.cohens_h:+.3f} "
              f"equivalent={'yes' if c.tost_equivalent else 'no'}", file=stream)
    return 0


def cmd_lora_demo(args) -> int:
    from .lora import run_demo

    values = dict(args.conf)
    values.setdefault("seed", str(args.seed))
    for key in ("epochs", "rank", "alpha"):
        if getattr(args, key) is not None:
            values[key] = str(getattr(args, key))
    cfg = config_from_mapping(values, strict=False)
    report = run_demo(cfg, checkpoint_dir=args.checkpoints)
    for line in report.lines():
        print(line)
    return 0


# -- wiring -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="chemeval", parents=[common],
                                description="Chemistry model-output evaluation toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="staged validity check of SMILES lines")
    s.add_argument("input")
    s.add_argument("-o", "--output", help="report records (default stdout)")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("format-check", parents=[common], help="format adherence of model outputs")
    s.add_argument("input", help="JSONL of {id, text} or a directory of .md/.txt files")
    s.add_argument("--profile", help="JSON profile naming mandatory requirements")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_format_check)

    s = sub.add_parser("curate", parents=[common], help="standardize, QC, deduplicate and emit records")
    s.add_argument("input")
    s.add_argument("-o", "--output", help="instruction records (default stdout)")
    s.add_argument("--qc", help="write QC flags here")
    s.add_argument("--drop-flagged", action="store_true", help="also drop QC-flagged records")
    s.set_defaults(func=cmd_curate)

    s = sub.add_parser("split", parents=[common], help="scaffold-aware train/validation/test split")
    s.add_argument("input")
    s.add_argument("--ratios", help="train,validation,test (default 0.85,0.10,0.05)")
    s.add_argument("-o", "--output", help="split manifest (default stdout)")
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("evaluate", parents=[common], help="rate tables over a directory of outputs")
    s.add_argument("outputs", help="directory with documents and manifest.jsonl")
    s.add_argument("--profile")
    s.add_argument("--catalog", help="purchasable SMILES, one per line (default: bundled)")
    s.add_argument("--rules", help="transformation templates JSONL (default: bundled)")
    s.add_argument("--max-steps", type=int)
    s.add_argument("--report", help="write report records here")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("compare", parents=[common], help="pairwise model comparisons from verdicts")
    s.add_argument("verdicts", help="CSV or JSONL rows of task_id, model, verdict")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("lora-demo", parents=[common], help="toy adapter training with invariant checks")
    s.add_argument("--epochs", type=int)
    s.add_argument("--rank", type=int)
    s.add_argument("--alpha", type=float)
    s.add_argument("--checkpoints", help="directory for checkpoints")
    s.set_defaults(func=cmd_lora_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        args.conf = parse_flat_config(Path(args.config).read_text("utf-8")) if args.config else {}
        return args.func(args)
    except (ConfigError, ChemEvalError) as exc:
        print(f"chemeval: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"chemeval: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
