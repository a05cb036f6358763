"""Dynamic probing verdicts and the sensitive-resource audit.

Each candidate's test cases are executed against the runtime and the
response errors are matched, lowercased, against the vendor profile:
an empty error is a success, a denied keyword marks a permission gate,
an unsupported keyword marks a name the runtime does not dispatch.
One success outweighs any number of denials, and a denial outweighs
rejections; candidates whose errors never match the vocabulary land in
a needs-review list instead of being forced into a verdict.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

from .catalog import VendorProfile
from .errors import CalibrationFailed, MissingTestCases, SchemaError
from .harness import (
    InvocationRequest,
    RESOURCE_CATEGORIES,
    RuntimeSpec,
    inject,
    run_suite,
)
from .jsonio import check_keys, read_json
from .recognizer import Candidate
from .testgen import TestCase, TestSuite, case_from_obj, case_to_obj

VERDICT_UNCHECKED = "Unchecked"
VERDICT_CHECKED = "Checked"
VERDICT_NON_API = "NonApi"
VERDICT_NEEDS_REVIEW = "NeedsReview"

_MATCH_SUCCESS = "success"
_MATCH_DENIED = "denied"
_MATCH_UNSUPPORTED = "unsupported"
_MATCH_UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class SuccessSignature:
    """Response shape of an approved invocation."""

    empty_error: bool
    callback_fired: bool


@dataclass(frozen=True)
class EvidenceEntry:
    case: TestCase
    error_message: str


@dataclass(frozen=True)
class ClassifiedApi:
    """Final verdict for one candidate API.

    Invariants: Unchecked implies at least one evidence entry with an empty
    error; NonApi implies every evidence entry matched unsupported keywords.
    Resources are only collected for unchecked APIs.
    """

    api_name: str
    class_name: str
    verdict: str
    evidence: tuple[EvidenceEntry, ...]
    resources: frozenset[str]


@dataclass(frozen=True)
class ClassificationResult:
    """Disjoint partition of the candidates; every candidate lands in exactly one list."""

    unchecked: tuple[ClassifiedApi, ...]
    checked: tuple[ClassifiedApi, ...]
    non_api: tuple[ClassifiedApi, ...]
    needs_review: tuple[ClassifiedApi, ...]

    def all_entries(self) -> tuple[ClassifiedApi, ...]:
        return self.unchecked + self.checked + self.non_api + self.needs_review


def calibrate(
    runtime: RuntimeSpec, documented_api_name: str, repeats: int = 1
) -> SuccessSignature:
    """Probe one documented unchecked API and record the success shape.

    Every repeat must return a clean identical success; any error, or any
    instability across repeats, fails calibration.
    """
    if repeats < 1:
        raise SchemaError("calibration needs at least one probe")
    responses = [
        inject(runtime, InvocationRequest(documented_api_name, (), callback_id=i))[0]
        for i in range(1, repeats + 1)
    ]
    first = responses[0]
    if first.error_message:
        raise CalibrationFailed(
            f"probe of '{documented_api_name}' returned '{first.error_message}'"
        )
    if any(r != first for r in responses[1:]):
        raise CalibrationFailed(f"probe of '{documented_api_name}' is unstable across repeats")
    return SuccessSignature(empty_error=True, callback_fired=first.callback_fired)


def classify(
    runtime: RuntimeSpec,
    profile: VendorProfile,
    suite: TestSuite,
    bridge: str,
    candidates: Sequence[Candidate] | None = None,
) -> ClassificationResult:
    """Execute the suite and partition its APIs by verdict.

    When candidates are supplied, each must be covered by at least one
    case and its class name is attached to the verdict; otherwise the
    candidate set is the suite's API names. Verdicts do not depend on
    case order.
    """
    if bridge != runtime.bridge_name:
        # The probes would be routed through a function the runtime never
        # dispatches; fail loudly instead of emitting garbage verdicts.
        raise SchemaError(
            f"bridge '{bridge}' does not match the runtime bridge '{runtime.bridge_name}'"
        )
    class_names: dict[str, str] = {}
    if candidates is not None:
        suite_apis = {case.api_name for case in suite.cases}
        for candidate in candidates:
            if candidate.api_name not in suite_apis:
                raise MissingTestCases(f"candidate '{candidate.api_name}' has no test case")
            class_names.setdefault(candidate.api_name, candidate.class_name)

    evidence_by_api: dict[str, list[EvidenceEntry]] = {}
    matches_by_api: dict[str, list[str]] = {}
    resources_by_api: dict[str, set[str]] = {}
    for case, response in run_suite(runtime, suite):
        evidence_by_api.setdefault(case.api_name, []).append(
            EvidenceEntry(case, response.error_message)
        )
        matches_by_api.setdefault(case.api_name, []).append(
            _match_error(profile, response.error_message)
        )
        if response.ok:
            resources_by_api.setdefault(case.api_name, set()).update(response.resource_touches)

    buckets: dict[str, list[ClassifiedApi]] = {
        VERDICT_UNCHECKED: [],
        VERDICT_CHECKED: [],
        VERDICT_NON_API: [],
        VERDICT_NEEDS_REVIEW: [],
    }
    for api_name in sorted(evidence_by_api):
        matches = matches_by_api[api_name]
        verdict = _verdict(matches)
        resources = (
            frozenset(resources_by_api.get(api_name, set()))
            if verdict == VERDICT_UNCHECKED
            else frozenset()
        )
        buckets[verdict].append(
            ClassifiedApi(
                api_name=api_name,
                class_name=class_names.get(api_name, ""),
                verdict=verdict,
                evidence=tuple(evidence_by_api[api_name]),
                resources=resources,
            )
        )
    return ClassificationResult(
        unchecked=tuple(buckets[VERDICT_UNCHECKED]),
        checked=tuple(buckets[VERDICT_CHECKED]),
        non_api=tuple(buckets[VERDICT_NON_API]),
        needs_review=tuple(buckets[VERDICT_NEEDS_REVIEW]),
    )


def _match_error(profile: VendorProfile, error_message: str) -> str:
    if error_message == "":
        return _MATCH_SUCCESS
    lowered = error_message.lower()
    if any(kw.lower() in lowered for kw in profile.denied_keywords):
        return _MATCH_DENIED
    if any(kw.lower() in lowered for kw in profile.unsupported_keywords):
        return _MATCH_UNSUPPORTED
    return _MATCH_UNCLASSIFIED


def _verdict(matches: Sequence[str]) -> str:
    # One permissive path is enough to make an API exploitable, so a single
    # success wins over any number of denials or rejections.
    if _MATCH_SUCCESS in matches:
        return VERDICT_UNCHECKED
    if _MATCH_DENIED in matches:
        return VERDICT_CHECKED
    if all(m == _MATCH_UNSUPPORTED for m in matches):
        return VERDICT_NON_API
    return VERDICT_NEEDS_REVIEW


# ---------------------------------------------------------------------------
# Sensitive-resource audit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AuditRow:
    category: str
    count: int
    percent: str


@dataclass(frozen=True)
class AuditTable:
    """Per-category counts of unchecked APIs touching protected resources.

    An API touching k categories appears in k rows but only once in the
    total row. Percentages are count / total unchecked, two decimals.
    """

    total_unchecked: int
    rows: tuple[AuditRow, ...]
    total: AuditRow


def audit_sensitive(runtime: RuntimeSpec, unchecked: Sequence[ClassifiedApi]) -> AuditTable:
    """Re-run each unchecked API's first successful case and record touches.

    Re-execution (rather than reusing classification-phase touches)
    guarantees the recorded access belongs to a payload known to succeed.
    """
    total = len(unchecked)
    per_category = {category: 0 for category in RESOURCE_CATEGORIES}
    touching = 0
    for api in unchecked:
        case = _first_successful_case(api)
        if case is None:
            continue
        response, _ = inject(runtime, InvocationRequest(case.api_name, case.payload))
        touches = response.resource_touches if response.ok else frozenset()
        for category in touches:
            per_category[category] += 1
        if touches:
            touching += 1
    rows = tuple(
        AuditRow(category, per_category[category], render_percent(per_category[category], total))
        for category in RESOURCE_CATEGORIES
    )
    return AuditTable(total, rows, AuditRow("Total", touching, render_percent(touching, total)))


def _first_successful_case(api: ClassifiedApi) -> TestCase | None:
    for entry in api.evidence:
        if entry.error_message == "":
            return entry.case
    return None


def render_percent(count: int, total: int, decimals: int = 2) -> str:
    if total == 0:
        return f"{0:.{decimals}f}"
    return f"{round(100 * count / total, decimals):.{decimals}f}"


# ---------------------------------------------------------------------------
# Artifacts
# ---------------------------------------------------------------------------

def classification_to_obj(result: ClassificationResult) -> dict:
    return {
        "unchecked": [_classified_to_obj(a) for a in result.unchecked],
        "checked": [_classified_to_obj(a) for a in result.checked],
        "non_api": [_classified_to_obj(a) for a in result.non_api],
        "needs_review": [_classified_to_obj(a) for a in result.needs_review],
    }


def _classified_to_obj(api: ClassifiedApi) -> dict:
    return {
        "api": api.api_name,
        "class": api.class_name,
        "verdict": api.verdict,
        "evidence": [
            {"case": case_to_obj(e.case), "error": e.error_message} for e in api.evidence
        ],
        "resources": sorted(api.resources),
    }


def read_classification(path: str | Path) -> ClassificationResult:
    obj = read_json(path)
    check_keys(obj, ("unchecked", "checked", "non_api", "needs_review"), (), "classification")
    lists: dict[str, tuple[ClassifiedApi, ...]] = {}
    for key in ("unchecked", "checked", "non_api", "needs_review"):
        if not isinstance(obj[key], list):
            raise SchemaError(f"classification: '{key}' must be a list")
        lists[key] = tuple(
            _classified_from_obj(item, f"classification.{key}[{i}]")
            for i, item in enumerate(obj[key])
        )
    return ClassificationResult(
        unchecked=lists["unchecked"],
        checked=lists["checked"],
        non_api=lists["non_api"],
        needs_review=lists["needs_review"],
    )


def _classified_from_obj(obj: Any, where: str) -> ClassifiedApi:
    check_keys(obj, ("api", "class", "verdict", "evidence", "resources"), (), where)
    if obj["verdict"] not in (
        VERDICT_UNCHECKED,
        VERDICT_CHECKED,
        VERDICT_NON_API,
        VERDICT_NEEDS_REVIEW,
    ):
        raise SchemaError(f"{where}: bad verdict '{obj['verdict']}'")
    evidence = []
    for i, item in enumerate(obj["evidence"]):
        entry_where = f"{where}.evidence[{i}]"
        check_keys(item, ("case", "error"), (), entry_where)
        evidence.append(
            EvidenceEntry(case_from_obj(item["case"], entry_where), item["error"])
        )
    for tag in obj["resources"]:
        if tag not in RESOURCE_CATEGORIES:
            raise SchemaError(f"{where}: unknown resource category '{tag}'")
    return ClassifiedApi(
        api_name=obj["api"],
        class_name=obj["class"],
        verdict=obj["verdict"],
        evidence=tuple(evidence),
        resources=frozenset(obj["resources"]),
    )


def audit_to_obj(table: AuditTable) -> dict:
    return {
        "total_unchecked": table.total_unchecked,
        "rows": [
            {"category": r.category, "count": r.count, "percent": r.percent}
            for r in table.rows
        ],
        "total": {
            "category": table.total.category,
            "count": table.total.count,
            "percent": table.total.percent,
        },
    }


def audit_from_obj(obj: Any) -> AuditTable:
    check_keys(obj, ("total_unchecked", "rows", "total"), (), "audit")
    rows = tuple(
        AuditRow(r["category"], r["count"], r["percent"])
        for r in (
            check_keys(item, ("category", "count", "percent"), (), f"audit.rows[{i}]")
            for i, item in enumerate(obj["rows"])
        )
    )
    total = obj["total"]
    check_keys(total, ("category", "count", "percent"), (), "audit.total")
    return AuditTable(
        obj["total_unchecked"], rows, AuditRow(total["category"], total["count"], total["percent"])
    )
