"""Hidden-API usage measurement over a corpus of miniapp source packages.

Matching is plain token scanning, not script parsing: a package uses an
API when some source contains namespace + "." + name, optional
whitespace, then "(", and the character before the namespace is absent
or not part of an identifier. Dynamic invocation through computed names
is undetectable at this granularity and is declared in the report's
caveats instead of being guessed at.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

from .classifier import render_percent
from .errors import EmptyCorpus, SchemaError
from .jsonio import check_keys, read_json

UNCATEGORIZED = "Uncategorized"

_CAVEATS = (
    "token scanning cannot see dynamic invocation (bracket access or computed names)",
)


@dataclass(frozen=True)
class MiniappPackage:
    """One scanned package; sources are (relative path, text) pairs."""

    id: str
    category: str
    sources: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class HiddenApi:
    name: str
    checked: bool
    category: str


@dataclass(frozen=True)
class CategoryRow:
    category: str
    using_count: int
    app_count: int
    percent: str


@dataclass(frozen=True)
class ApiRow:
    api_name: str
    category: str
    app_count: int
    percent: str
    checked: bool


@dataclass(frozen=True)
class UsageReport:
    """Per-category and per-API usage; the Total row deduplicates packages.

    Invariant: using_count never exceeds app_count in any row.
    """

    per_category: tuple[CategoryRow, ...]
    total: CategoryRow
    per_api: tuple[ApiRow, ...]
    caveats: tuple[str, ...]


def load_corpus(root: str | Path) -> tuple[MiniappPackage, ...]:
    """Read every package directory under root (manifest.json plus *.js sources)."""
    root = Path(root)
    if not root.is_dir():
        raise SchemaError(f"corpus root '{root}' is not a directory")
    packages = []
    seen: set[str] = set()
    for pkg_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        manifest_path = pkg_dir / "manifest.json"
        if not manifest_path.is_file():
            raise SchemaError(f"package '{pkg_dir.name}' lacks manifest.json")
        manifest = check_keys(read_json(manifest_path), ("id", "category"), (), pkg_dir.name)
        pkg_id = manifest["id"]
        if not isinstance(pkg_id, str) or not pkg_id:
            raise SchemaError(f"package '{pkg_dir.name}': id must be a non-empty string")
        if pkg_id in seen:
            raise SchemaError(f"duplicate package id '{pkg_id}'")
        seen.add(pkg_id)
        sources = tuple(
            (str(src.relative_to(pkg_dir)), src.read_text(encoding="utf-8"))
            for src in sorted(pkg_dir.rglob("*.js"))
        )
        packages.append(MiniappPackage(pkg_id, manifest["category"] or UNCATEGORIZED, sources))
    return tuple(packages)


def call_pattern(namespace: str, api_name: str) -> re.Pattern[str]:
    """Compiled matcher for one namespaced call site."""
    return re.compile(
        r"(?<![A-Za-z0-9_$.])" + re.escape(namespace) + r"\." + re.escape(api_name) + r"\s*\("
    )


def scan_usage(
    corpus: Sequence[MiniappPackage],
    hidden_apis: Sequence[HiddenApi],
    namespace: str,
    allow_empty: bool = False,
    declared_categories: Iterable[str] = (),
) -> UsageReport:
    """Count, per package, which hidden APIs its sources invoke.

    A package counts at most once per API regardless of how many sources
    or call sites match. Percentages are rendered to two decimals.
    """
    if not namespace:
        raise SchemaError("namespace must be non-empty")
    if not corpus and not allow_empty:
        raise EmptyCorpus("corpus contains no packages")
    patterns = {api.name: call_pattern(namespace, api.name) for api in hidden_apis}

    used_by_package: dict[str, frozenset[str]] = {}
    for pkg in corpus:
        used = {
            name
            for name, pattern in patterns.items()
            if any(pattern.search(text) for _, text in pkg.sources)
        }
        used_by_package[pkg.id] = frozenset(used)

    categories = sorted({pkg.category for pkg in corpus} | set(declared_categories))
    total_apps = len(corpus)
    category_rows = []
    for category in categories:
        members = [pkg for pkg in corpus if pkg.category == category]
        using = sum(1 for pkg in members if used_by_package[pkg.id])
        category_rows.append(
            CategoryRow(category, using, len(members), render_percent(using, len(members)))
        )
    total_using = sum(1 for pkg in corpus if used_by_package[pkg.id])
    total_row = CategoryRow("Total", total_using, total_apps, render_percent(total_using, total_apps))

    api_rows = []
    for api in hidden_apis:
        count = sum(1 for used in used_by_package.values() if api.name in used)
        api_rows.append(
            ApiRow(api.name, api.category, count, render_percent(count, total_apps), api.checked)
        )
    api_rows.sort(key=lambda r: (-r.app_count, r.api_name))
    return UsageReport(tuple(category_rows), total_row, tuple(api_rows), _CAVEATS)


def load_hidden_apis(path: str | Path) -> list[HiddenApi]:
    """Hidden-API list file: [{"name", "checked"?, "category"?}, ...]."""
    obj = read_json(path)
    if not isinstance(obj, list):
        raise SchemaError("hidden APIs: expected a list")
    out = []
    seen: set[str] = set()
    for i, item in enumerate(obj):
        where = f"hidden[{i}]"
        check_keys(item, ("name",), ("checked", "category"), where)
        name = item["name"]
        if not isinstance(name, str) or not name:
            raise SchemaError(f"{where}: 'name' must be a non-empty string")
        if name in seen:
            continue
        seen.add(name)
        out.append(
            HiddenApi(
                name=name,
                checked=bool(item.get("checked", False)),
                category=item.get("category") or UNCATEGORIZED,
            )
        )
    return out


def usage_to_obj(report: UsageReport) -> dict:
    def row(r: CategoryRow) -> dict:
        return {
            "category": r.category,
            "using": r.using_count,
            "apps": r.app_count,
            "percent": r.percent,
        }

    return {
        "per_category": [row(r) for r in report.per_category],
        "total": row(report.total),
        "per_api": [
            {
                "api": r.api_name,
                "category": r.category,
                "apps": r.app_count,
                "percent": r.percent,
                "checked": r.checked,
            }
            for r in report.per_api
        ],
        "caveats": list(report.caveats),
    }


def usage_from_obj(obj: Any) -> UsageReport:
    check_keys(obj, ("per_category", "total", "per_api", "caveats"), (), "usage")

    def row(item: Any, where: str) -> CategoryRow:
        check_keys(item, ("category", "using", "apps", "percent"), (), where)
        return CategoryRow(item["category"], item["using"], item["apps"], item["percent"])

    per_category = tuple(
        row(item, f"usage.per_category[{i}]") for i, item in enumerate(obj["per_category"])
    )
    per_api = tuple(
        ApiRow(item["api"], item["category"], item["apps"], item["percent"], item["checked"])
        for item in (
            check_keys(it, ("api", "category", "apps", "percent", "checked"), (), f"usage.per_api[{i}]")
            for i, it in enumerate(obj["per_api"])
        )
    )
    return UsageReport(per_category, row(obj["total"], "usage.total"), per_api, tuple(obj["caveats"]))
