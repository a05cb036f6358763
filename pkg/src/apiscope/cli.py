"""Command-line pipeline: one subcommand per stage, JSON artifacts between them.

Every command is deterministic; running it twice on the same inputs
produces byte-identical output. The APISCOPE_SEED environment variable
seeds the standard RNG for reproducibility, although no stage uses
randomized ordering today. Exit code 0 means the stage succeeded;
nonzero codes identify the failing error class (see errors module).
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from pathlib import Path
from typing import Sequence

from . import bridgefinder, catalog, classifier, corpus, harness, ir, recognizer, reporter, testgen
from .errors import PipelineError
from .jsonio import dumps, read_json, write_json


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    seed = os.environ.get("APISCOPE_SEED")
    if seed is not None:
        random.seed(seed)
    try:
        return args.handler(args)
    except PipelineError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apiscope",
        description="Hidden-API detection pipeline for layered miniapp runtimes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", help="recognize hidden-API candidates in an IR bundle")
    scan.add_argument("--ir", required=True)
    scan.add_argument("--catalog", required=True)
    scan.add_argument("-o", "--output", required=True)
    scan.set_defaults(handler=_cmd_scan)

    gen = sub.add_parser("gen-tests", help="generate probing test cases for candidates")
    gen.add_argument("--candidates", required=True)
    gen.add_argument("--ir", required=True)
    gen.add_argument("--manual")
    gen.add_argument("-o", "--output", required=True)
    gen.set_defaults(handler=_cmd_gen_tests)

    bridge = sub.add_parser("find-bridge", help="discover the bridge function from traces")
    bridge.add_argument("--runtime", required=True)
    bridge.add_argument("--catalog", required=True)
    bridge.add_argument("-k", type=int, default=None, help="documented APIs to observe (default: all)")
    bridge.add_argument("-o", "--output", required=True)
    bridge.set_defaults(handler=_cmd_find_bridge)

    cls = sub.add_parser("classify", help="probe candidates and assign verdicts")
    cls.add_argument("--runtime", required=True)
    cls.add_argument("--profile", required=True)
    cls.add_argument("--suite", required=True)
    cls.add_argument("--bridge", required=True)
    cls.add_argument("-o", "--output", required=True)
    cls.set_defaults(handler=_cmd_classify)

    audit = sub.add_parser("audit", help="audit unchecked APIs for protected-resource access")
    audit.add_argument("--runtime", required=True)
    audit.add_argument("--classified", required=True)
    audit.add_argument("-o", "--output", required=True)
    audit.set_defaults(handler=_cmd_audit)

    usage = sub.add_parser("usage", help="measure hidden-API usage across a source corpus")
    usage.add_argument("--corpus", required=True)
    usage.add_argument("--hidden", required=True)
    usage.add_argument("--namespace", required=True)
    usage.add_argument("--allow-empty", action="store_true")
    usage.add_argument("-o", "--output", required=True)
    usage.set_defaults(handler=_cmd_usage)

    evolve = sub.add_parser("evolve", help="diff catalog versions into an evolution series")
    evolve.add_argument("--versions", nargs="+", required=True)
    evolve.add_argument("-o", "--output")
    evolve.add_argument("--csv")
    evolve.set_defaults(handler=_cmd_evolve)

    report = sub.add_parser("report", help="render reports over a completed run directory")
    report.add_argument("--run", required=True)
    report.add_argument("--format", choices=("json", "text"), default="json")
    report.add_argument("-o", "--output")
    report.set_defaults(handler=_cmd_report)

    return parser


def _cmd_scan(args: argparse.Namespace) -> int:
    bundle = ir.load_ir(args.ir)
    cat = catalog.load_catalog(args.catalog)
    impls = recognizer.locate_documented_impls(bundle, cat)
    inv = recognizer.extract_invariants(impls, bundle)
    papi = recognizer.papi_classes(impls)
    candidates = recognizer.match_candidates(bundle, inv, papi, cat)
    write_json(args.output, recognizer.candidates_to_obj(candidates))
    return 0


def _cmd_gen_tests(args: argparse.Namespace) -> int:
    candidates = recognizer.read_candidates(args.candidates)
    bundle = ir.load_ir(args.ir)
    suite = testgen.gen_suite(candidates, bundle, args.manual)
    write_json(args.output, testgen.suite_to_obj(suite))
    return 0


def _cmd_find_bridge(args: argparse.Namespace) -> int:
    runtime = harness.load_runtime(args.runtime)
    cat = catalog.load_catalog(args.catalog)
    observations = bridgefinder.observe_documented(runtime, cat, args.k)
    result = bridgefinder.find_bridge(observations)
    write_json(args.output, bridgefinder.bridge_result_to_obj(result))
    return 0


def _cmd_classify(args: argparse.Namespace) -> int:
    runtime = harness.load_runtime(args.runtime)
    profile = catalog.load_profile(args.profile)
    suite = testgen.read_suite(args.suite)
    bridge = bridgefinder.read_bridge_result(args.bridge)
    result = classifier.classify(runtime, profile, suite, bridge.bridge)
    write_json(args.output, classifier.classification_to_obj(result))
    return 0


def _cmd_audit(args: argparse.Namespace) -> int:
    runtime = harness.load_runtime(args.runtime)
    classification = classifier.read_classification(args.classified)
    table = classifier.audit_sensitive(runtime, classification.unchecked)
    write_json(args.output, classifier.audit_to_obj(table))
    return 0


def _cmd_usage(args: argparse.Namespace) -> int:
    packages = corpus.load_corpus(args.corpus)
    hidden = corpus.load_hidden_apis(args.hidden)
    report = corpus.scan_usage(packages, hidden, args.namespace, allow_empty=args.allow_empty)
    write_json(args.output, corpus.usage_to_obj(report))
    return 0


def _cmd_evolve(args: argparse.Namespace) -> int:
    versions = [_load_version(path) for path in args.versions]
    series = reporter.evolution_report(versions)
    obj = reporter.evolution_to_obj(series)
    _emit(args.output, dumps(obj))
    if args.csv:
        Path(args.csv).write_text(reporter.evolution_to_csv(series), encoding="utf-8")
    return 0


def _load_version(path: str) -> reporter.VersionPoint:
    from .jsonio import check_keys

    obj = read_json(path)
    check_keys(obj, ("catalog", "hidden"), (), f"version file '{path}'")
    cat = catalog.catalog_from_obj(obj["catalog"])
    hidden = obj["hidden"]
    if not isinstance(hidden, list) or any(not isinstance(h, str) for h in hidden):
        from .errors import SchemaError

        raise SchemaError(f"version file '{path}': 'hidden' must be a list of names")
    return reporter.VersionPoint(cat, frozenset(hidden))


def _cmd_report(args: argparse.Namespace) -> int:
    run = reporter.load_run(args.run)
    report = reporter.build_report(run)
    if args.format == "json":
        _emit(args.output, dumps(report))
    else:
        _emit(args.output, reporter.render_report_text(report))
    return 0


def _emit(output: str | None, text: str) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    sys.exit(main())
