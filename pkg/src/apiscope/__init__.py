"""apiscope: hidden-API detection for layered miniapp runtimes.

The pipeline recognizes undocumented API implementations in a decompiled
bundle by invariant matching, generates probing test cases, identifies
the bridge function from execution traces, classifies every candidate by
its runtime response, and audits which unchecked APIs reach
permission-protected resources.
"""

from __future__ import annotations

from .bridgefinder import BridgeResult, Observation, find_bridge, observe_documented
from .catalog import (
    ApiCatalog,
    EvolutionDiff,
    VendorProfile,
    diff_catalogs,
    load_catalog,
    load_profile,
)
from .classifier import (
    AuditTable,
    ClassificationResult,
    ClassifiedApi,
    audit_sensitive,
    calibrate,
    classify,
    render_percent,
)
from .corpus import (
    HiddenApi,
    MiniappPackage,
    UsageReport,
    load_corpus,
    load_hidden_apis,
    scan_usage,
)
from .harness import (
    ApiEntry,
    InvocationRequest,
    InvocationResponse,
    RuntimeSpec,
    inject,
    load_runtime,
    run_suite,
)
from .ir import ClassUnit, IrBundle, callers_of, dump_ir, load_ir
from .recognizer import (
    Candidate,
    InvariantSet,
    extract_invariants,
    locate_documented_impls,
    match_candidates,
    papi_classes,
)
from .reporter import (
    EffectivenessRow,
    build_report,
    category_report,
    effectiveness_report,
    evolution_report,
    load_run,
)
from .testgen import ParamSpec, TestCase, TestSuite, extract_params, gen_suite, instantiate, permute

__version__ = "0.1.0"

__all__ = [
    "ApiCatalog",
    "ApiEntry",
    "AuditTable",
    "BridgeResult",
    "Candidate",
    "ClassUnit",
    "ClassificationResult",
    "ClassifiedApi",
    "EffectivenessRow",
    "EvolutionDiff",
    "HiddenApi",
    "InvariantSet",
    "InvocationRequest",
    "InvocationResponse",
    "IrBundle",
    "MiniappPackage",
    "Observation",
    "ParamSpec",
    "RuntimeSpec",
    "TestCase",
    "TestSuite",
    "UsageReport",
    "VendorProfile",
    "audit_sensitive",
    "build_report",
    "calibrate",
    "callers_of",
    "category_report",
    "classify",
    "diff_catalogs",
    "dump_ir",
    "effectiveness_report",
    "evolution_report",
    "extract_invariants",
    "extract_params",
    "find_bridge",
    "gen_suite",
    "inject",
    "instantiate",
    "load_catalog",
    "load_corpus",
    "load_hidden_apis",
    "load_ir",
    "load_profile",
    "load_run",
    "load_runtime",
    "locate_documented_impls",
    "match_candidates",
    "observe_documented",
    "papi_classes",
    "permute",
    "render_percent",
    "run_suite",
    "scan_usage",
]
