"""Report aggregation over completed pipeline runs.

A run directory holds one file per stage output under conventional
names. Reports carry counts plus percentages rendered from those exact
counts; no number in a report is free-floating. JSON and text renderings
of the same report are data-equal.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

from .bridgefinder import BridgeResult, read_bridge_result
from .catalog import ApiCatalog, EvolutionDiff, diff_catalogs, load_catalog
from .classifier import (
    AuditTable,
    ClassificationResult,
    audit_from_obj,
    read_classification,
    render_percent,
)
from .corpus import UNCATEGORIZED, UsageReport, usage_from_obj
from .errors import IncompleteRun, SingleVersion
from .jsonio import read_json
from .recognizer import Candidate, read_candidates
from .testgen import ORIGIN_AUTO, ORIGIN_MANUAL, TestSuite, read_suite

# Conventional file names inside a run directory, keyed by producing stage.
RUN_FILES = {
    "catalog": "catalog.json",
    "scan": "candidates.json",
    "gen-tests": "suite.json",
    "find-bridge": "bridge.json",
    "classify": "classified.json",
}
OPTIONAL_RUN_FILES = {
    "audit": "audit.json",
    "usage": "usage.json",
    "category-map": "category_map.json",
}


@dataclass(frozen=True)
class RunArtifacts:
    catalog: ApiCatalog
    candidates: tuple[Candidate, ...]
    suite: TestSuite
    bridge: BridgeResult
    classification: ClassificationResult
    audit: AuditTable | None = None
    usage: UsageReport | None = None
    category_map: Mapping[str, str] | None = None


def load_run(run_dir: str | Path) -> RunArtifacts:
    root = Path(run_dir)
    for stage, filename in RUN_FILES.items():
        if not (root / filename).is_file():
            raise IncompleteRun(stage)
    audit_path = root / OPTIONAL_RUN_FILES["audit"]
    usage_path = root / OPTIONAL_RUN_FILES["usage"]
    map_path = root / OPTIONAL_RUN_FILES["category-map"]
    return RunArtifacts(
        catalog=load_catalog(root / RUN_FILES["catalog"]),
        candidates=tuple(read_candidates(root / RUN_FILES["scan"])),
        suite=read_suite(root / RUN_FILES["gen-tests"]),
        bridge=read_bridge_result(root / RUN_FILES["find-bridge"]),
        classification=read_classification(root / RUN_FILES["classify"]),
        audit=audit_from_obj(read_json(audit_path)) if audit_path.is_file() else None,
        usage=usage_from_obj(read_json(usage_path)) if usage_path.is_file() else None,
        category_map=read_json(map_path) if map_path.is_file() else None,
    )


# ---------------------------------------------------------------------------
# Effectiveness summary
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EffectivenessRow:
    """One pipeline run in numbers.

    candidate_count counts distinct API names, the same unit the verdict
    partition uses, so candidate_count always equals the four-way sum on
    a consistent run.
    """

    vendor: str
    public_apis: int
    facets: tuple[str, ...]
    candidate_count: int
    traced_functions: int
    auto_cases: int
    manual_cases: int
    checked: int
    unchecked: int
    non_api: int
    needs_review: int


def effectiveness_report(run: RunArtifacts) -> EffectivenessRow:
    suite_origins = [case.origin for case in run.suite.cases]
    classification = run.classification
    return EffectivenessRow(
        vendor=run.catalog.vendor,
        public_apis=len(run.catalog.entries),
        facets=_facet_union(run.candidates),
        candidate_count=len({c.api_name for c in run.candidates}),
        traced_functions=len(run.bridge.traced_functions),
        auto_cases=suite_origins.count(ORIGIN_AUTO),
        manual_cases=suite_origins.count(ORIGIN_MANUAL),
        checked=len(classification.checked),
        unchecked=len(classification.unchecked),
        non_api=len(classification.non_api),
        needs_review=len(classification.needs_review),
    )


def _facet_union(candidates: Sequence[Candidate]) -> tuple[str, ...]:
    # All candidates of one run share the same facet conjunction; the union
    # is only meaningful when the run produced at least one candidate.
    seen: list[str] = []
    for candidate in candidates:
        for facet in candidate.matched_facets:
            if facet not in seen:
                seen.append(facet)
    return tuple(seen)


def effectiveness_to_obj(row: EffectivenessRow) -> dict:
    return {
        "vendor": row.vendor,
        "public_apis": row.public_apis,
        "facets": list(row.facets),
        "candidates": row.candidate_count,
        "traced_functions": row.traced_functions,
        "auto_cases": row.auto_cases,
        "manual_cases": row.manual_cases,
        "checked": row.checked,
        "unchecked": row.unchecked,
        "non_api": row.non_api,
        "needs_review": row.needs_review,
    }


# ---------------------------------------------------------------------------
# Category breakdown
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CategoryReportRow:
    """Documented / undocumented-unchecked / undocumented-checked for one category."""

    category: str
    documented: int
    undocumented_unchecked: int
    undocumented_checked: int
    documented_pct: str
    unchecked_pct: str
    checked_pct: str


def category_report(
    catalog: ApiCatalog,
    classification: ClassificationResult,
    category_map: Mapping[str, str] | None = None,
) -> list[CategoryReportRow]:
    """Counts per category plus an All row; percentages are row-relative, one decimal.

    Hidden APIs fall back to the category map, then to Uncategorized.
    Non-API and needs-review candidates are not APIs and stay out.
    """
    category_map = category_map or {}
    documented: dict[str, int] = {}
    for entry in catalog.entries:
        documented[entry.category] = documented.get(entry.category, 0) + 1
    unchecked: dict[str, int] = {}
    for api in classification.unchecked:
        cat = category_map.get(api.api_name, UNCATEGORIZED)
        unchecked[cat] = unchecked.get(cat, 0) + 1
    checked: dict[str, int] = {}
    for api in classification.checked:
        cat = category_map.get(api.api_name, UNCATEGORIZED)
        checked[cat] = checked.get(cat, 0) + 1

    rows = []
    for category in sorted(set(documented) | set(unchecked) | set(checked)):
        rows.append(
            _category_row(
                category,
                documented.get(category, 0),
                unchecked.get(category, 0),
                checked.get(category, 0),
            )
        )
    rows.append(
        _category_row(
            "All",
            sum(documented.values()),
            sum(unchecked.values()),
            sum(checked.values()),
        )
    )
    return rows


def _category_row(category: str, d: int, uu: int, uc: int) -> CategoryReportRow:
    total = d + uu + uc
    return CategoryReportRow(
        category=category,
        documented=d,
        undocumented_unchecked=uu,
        undocumented_checked=uc,
        documented_pct=render_percent(d, total, 1),
        unchecked_pct=render_percent(uu, total, 1),
        checked_pct=render_percent(uc, total, 1),
    )


def category_rows_to_obj(rows: Sequence[CategoryReportRow]) -> list[dict]:
    return [
        {
            "category": r.category,
            "documented": r.documented,
            "undocumented_unchecked": r.undocumented_unchecked,
            "undocumented_checked": r.undocumented_checked,
            "documented_pct": r.documented_pct,
            "unchecked_pct": r.unchecked_pct,
            "checked_pct": r.checked_pct,
        }
        for r in rows
    ]


# ---------------------------------------------------------------------------
# Evolution series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VersionPoint:
    catalog: ApiCatalog
    hidden: frozenset[str]


@dataclass(frozen=True)
class EvolutionSeries:
    points: tuple[tuple[str, int, int], ...]  # (version, documented, hidden)
    transitions: tuple[EvolutionDiff, ...]


def evolution_report(versions: Sequence[VersionPoint]) -> EvolutionSeries:
    """Per-version counts and consecutive-pair transitions."""
    if len(versions) < 2:
        raise SingleVersion("evolution analysis needs at least two versions")
    points = tuple(
        (v.catalog.version, len(v.catalog.entries), len(v.hidden)) for v in versions
    )
    transitions = tuple(
        diff_catalogs(a.catalog, a.hidden, b.catalog, b.hidden)
        for a, b in zip(versions, versions[1:])
    )
    return EvolutionSeries(points, transitions)


def evolution_to_obj(series: EvolutionSeries) -> dict:
    return {
        "points": [
            {"version": v, "documented": d, "hidden": h} for v, d, h in series.points
        ],
        "transitions": [
            {
                "old_version": t.old_version,
                "new_version": t.new_version,
                "added_documented": sorted(t.added_documented),
                "removed_documented": sorted(t.removed_documented),
                "became_hidden": sorted(t.became_hidden),
                "became_documented": sorted(t.became_documented),
            }
            for t in series.transitions
        ],
    }


def evolution_to_csv(series: EvolutionSeries) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["version", "documented", "hidden"])
    for version, documented, hidden in series.points:
        writer.writerow([version, documented, hidden])
    return buffer.getvalue()


# ---------------------------------------------------------------------------
# Full report document
# ---------------------------------------------------------------------------

def build_report(run: RunArtifacts) -> dict:
    report: dict[str, Any] = {
        "effectiveness": effectiveness_to_obj(effectiveness_report(run)),
        "categories": category_rows_to_obj(
            category_report(run.catalog, run.classification, run.category_map)
        ),
    }
    if run.audit is not None:
        from .classifier import audit_to_obj

        report["audit"] = audit_to_obj(run.audit)
    if run.usage is not None:
        from .corpus import usage_to_obj

        report["usage"] = usage_to_obj(run.usage)
    return report


def render_report_text(report: Mapping[str, Any]) -> str:
    sections = []
    eff = report["effectiveness"]
    eff_rows = [[str(k), str(v if not isinstance(v, list) else ", ".join(v))] for k, v in eff.items()]
    sections.append("effectiveness\n" + render_table(["metric", "value"], eff_rows))
    cat_rows = [
        [
            r["category"],
            str(r["documented"]),
            str(r["undocumented_unchecked"]),
            str(r["undocumented_checked"]),
            r["documented_pct"],
            r["unchecked_pct"],
            r["checked_pct"],
        ]
        for r in report["categories"]
    ]
    sections.append(
        "categories\n"
        + render_table(["category", "D", "UU", "UC", "D%", "UU%", "UC%"], cat_rows)
    )
    if "audit" in report:
        audit = report["audit"]
        rows = [[r["category"], str(r["count"]), r["percent"]] for r in audit["rows"]]
        rows.append(
            [audit["total"]["category"], str(audit["total"]["count"]), audit["total"]["percent"]]
        )
        sections.append(
            f"audit (unchecked APIs: {audit['total_unchecked']})\n"
            + render_table(["resource", "count", "percent"], rows)
        )
    if "usage" in report:
        usage = report["usage"]
        rows = [
            [r["category"], str(r["using"]), str(r["apps"]), r["percent"]]
            for r in usage["per_category"]
        ]
        total = usage["total"]
        rows.append([total["category"], str(total["using"]), str(total["apps"]), total["percent"]])
        sections.append(
            "usage\n" + render_table(["category", "using", "apps", "percent"], rows)
        )
        api_rows = [
            [r["api"], r["category"], str(r["apps"]), r["percent"], "yes" if r["checked"] else "no"]
            for r in usage["per_api"]
        ]
        sections.append(render_table(["api", "category", "apps", "percent", "checked"], api_rows))
    return "\n\n".join(sections) + "\n"


def render_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Aligned plain-text table with a dashed header rule."""
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def fmt(cells: Sequence[str]) -> str:
        return "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(cells)).rstrip()
    lines = [fmt(headers), fmt(["-" * w for w in widths])]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines)
