"""Static recognition of hidden-API implementations.

Three steps over an immutable bundle: anchor documented names to the
classes that implement them (verbatim string containment), extract the
facets that are uniform across every anchored class, then keep every
other class that satisfies all present facets and yields an API name.
The facet conjunction is deliberately restrictive; a facet that is not
uniform across all documented implementations is dropped entirely.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .catalog import ApiCatalog
from .errors import NoImplementationsFound, NoInvariantsFound, SchemaError
from .ir import ClassUnit, IrBundle, callers_of
from .jsonio import check_keys, read_json

FACET_SIGNATURE = "signature"
FACET_SUPERCLASS = "superclass"
FACET_SUPER_PACKAGE = "super_package"
FACET_CALLERS = "callers"

NAME_SOURCE_LEARNED = "learned-field"
NAME_SOURCE_HEURISTIC = "heuristic"

# Script-layer identifier; dots admit namespaced names.
IDENTIFIER_RE = re.compile(r"^[A-Za-z_$][A-Za-z0-9_$.]*$")

# A super-package of fewer than two segments would match almost anything.
MIN_SUPER_PACKAGE_DEPTH = 2


@dataclass(frozen=True)
class InvariantSet:
    """Facets shared by every documented implementation.

    Invariants:
      - each facet is present only if uniform across ALL anchored classes
      - at least one of the four facets is present (name_field alone does
        not qualify; it only guides name extraction)
    """

    signature: tuple[tuple[str, ...], str] | None
    superclass: str | None
    super_package: str | None
    callers: frozenset[str] | None
    name_field: str | None

    def present_facets(self) -> tuple[str, ...]:
        tags = []
        if self.signature is not None:
            tags.append(FACET_SIGNATURE)
        if self.superclass is not None:
            tags.append(FACET_SUPERCLASS)
        if self.super_package is not None:
            tags.append(FACET_SUPER_PACKAGE)
        if self.callers is not None:
            tags.append(FACET_CALLERS)
        return tuple(tags)


@dataclass(frozen=True)
class Candidate:
    """A class that satisfies every present facet and is not documented."""

    class_name: str
    api_name: str
    matched_facets: tuple[str, ...]
    name_source: str


def locate_documented_impls(
    bundle: IrBundle, catalog: ApiCatalog
) -> dict[str, tuple[ClassUnit, ...]]:
    """Anchor each documented name to the classes containing it verbatim.

    A name matches a class when it appears among the class's field
    constants or any method's body strings. One class may anchor several
    names; names with no implementation map to an empty tuple.
    """
    if not catalog.entries:
        raise NoImplementationsFound("catalog has no documented APIs to anchor")
    impls: dict[str, tuple[ClassUnit, ...]] = {}
    for entry in catalog.entries:
        matched = [
            cls for cls in bundle.classes if entry.name in cls.string_constants()
        ]
        impls[entry.name] = tuple(sorted(matched, key=lambda c: c.name))
    if not any(impls.values()):
        raise NoImplementationsFound("no documented API name anchors to any class")
    return impls


def extract_invariants(
    impls: Mapping[str, Sequence[ClassUnit]], bundle: IrBundle
) -> InvariantSet:
    """Keep each facet iff it is identical across every anchored class."""
    papi = papi_classes(impls)
    if not papi:
        raise NoImplementationsFound("no anchored implementations to extract from")

    signature = _uniform(
        [
            (m.params, m.returns) if (m := cls.handler_method()) is not None else None
            for cls in papi
        ]
    )
    superclass = _uniform([cls.superclass for cls in papi])
    super_package = _common_package([cls.package for cls in papi])
    caller_sets = [frozenset(callers_of(bundle, cls.name)) for cls in papi]
    callers = caller_sets[0] if all(s == caller_sets[0] for s in caller_sets) else None
    name_field = _learn_name_field(impls)

    if signature is None and superclass is None and super_package is None and callers is None:
        raise NoInvariantsFound("no facet is uniform across the documented implementations")
    return InvariantSet(signature, superclass, super_package, callers, name_field)


def papi_classes(impls: Mapping[str, Sequence[ClassUnit]]) -> tuple[ClassUnit, ...]:
    """Union of anchored classes, deduplicated, sorted by name."""
    by_name = {cls.name: cls for classes in impls.values() for cls in classes}
    return tuple(by_name[name] for name in sorted(by_name))


def _uniform(values: list) -> Any:
    first = values[0]
    if first is None or any(v != first for v in values[1:]):
        return None
    return first


def _common_package(packages: Sequence[str]) -> str | None:
    split = [p.split(".") if p else [] for p in packages]
    prefix = split[0]
    for segments in split[1:]:
        keep = 0
        for a, b in zip(prefix, segments):
            if a != b:
                break
            keep += 1
        prefix = prefix[:keep]
    if len(prefix) < MIN_SUPER_PACKAGE_DEPTH:
        return None
    return ".".join(prefix)


def _learn_name_field(impls: Mapping[str, Sequence[ClassUnit]]) -> str | None:
    """Find one field name that holds the documented name in every anchored class."""
    common: set[str] | None = None
    for api_name, classes in impls.items():
        for cls in classes:
            holding = {
                f.name for f in cls.fields if isinstance(f.const, str) and f.const == api_name
            }
            common = holding if common is None else common & holding
            if not common:
                return None
    if not common:
        return None
    return min(common)


def match_candidates(
    bundle: IrBundle,
    inv: InvariantSet,
    papi: Iterable[ClassUnit] | Iterable[str],
    catalog: ApiCatalog,
) -> list[Candidate]:
    """Every class satisfying all present facets, outside PAPI, with a name.

    Output is sorted by api name (class name breaks ties) and carries one
    entry per (class, api name) pair. Deterministic: identical inputs give
    identical serialized output.
    """
    facets = inv.present_facets()
    if not facets:
        raise NoInvariantsFound("cannot match candidates without facets")
    papi_names = {cls if isinstance(cls, str) else cls.name for cls in papi}
    documented = catalog.documented_names()
    found: dict[tuple[str, str], Candidate] = {}
    for cls in bundle.classes:
        if cls.name in papi_names:
            continue
        if not _satisfies(bundle, cls, inv):
            continue
        named = _extract_name(cls, inv.name_field, documented)
        if named is None:
            continue
        api_name, source = named
        found.setdefault((cls.name, api_name), Candidate(cls.name, api_name, facets, source))
    return sorted(found.values(), key=lambda c: (c.api_name, c.class_name))


def _satisfies(bundle: IrBundle, cls: ClassUnit, inv: InvariantSet) -> bool:
    if inv.signature is not None:
        handler = cls.handler_method()
        if handler is None or (handler.params, handler.returns) != inv.signature:
            return False
    if inv.superclass is not None and cls.superclass != inv.superclass:
        return False
    if inv.super_package is not None:
        pkg = cls.package
        if pkg != inv.super_package and not pkg.startswith(inv.super_package + "."):
            return False
    if inv.callers is not None and frozenset(callers_of(bundle, cls.name)) != inv.callers:
        return False
    return True


def _extract_name(
    cls: ClassUnit, name_field: str | None, documented: frozenset[str]
) -> tuple[str, str] | None:
    """Learned field first; fall back to the first identifier-shaped constant."""
    if name_field is not None:
        for field in cls.fields:
            if field.name == name_field and isinstance(field.const, str):
                value = field.const
                if IDENTIFIER_RE.match(value) and value not in documented:
                    return value, NAME_SOURCE_LEARNED
                break
    pool = [
        s
        for s in cls.string_constants()
        if IDENTIFIER_RE.match(s) and s not in documented
    ]
    if not pool:
        return None
    return min(pool), NAME_SOURCE_HEURISTIC


# ---------------------------------------------------------------------------
# Candidate artifact (JSON list)
# ---------------------------------------------------------------------------

def candidates_to_obj(candidates: Sequence[Candidate]) -> list[dict]:
    return [
        {
            "class": c.class_name,
            "api_name": c.api_name,
            "facets": list(c.matched_facets),
            "name_source": c.name_source,
        }
        for c in candidates
    ]


def read_candidates(path: str | Path) -> list[Candidate]:
    obj = read_json(path)
    if not isinstance(obj, list):
        raise SchemaError("candidates: expected a list")
    out = []
    known_facets = (FACET_SIGNATURE, FACET_SUPERCLASS, FACET_SUPER_PACKAGE, FACET_CALLERS)
    for i, item in enumerate(obj):
        where = f"candidates[{i}]"
        check_keys(item, ("class", "api_name", "facets", "name_source"), (), where)
        facets = item["facets"]
        if not isinstance(facets, list) or any(f not in known_facets for f in facets):
            raise SchemaError(f"{where}: bad facet list")
        if item["name_source"] not in (NAME_SOURCE_LEARNED, NAME_SOURCE_HEURISTIC):
            raise SchemaError(f"{where}: bad name_source '{item['name_source']}'")
        out.append(Candidate(item["class"], item["api_name"], tuple(facets), item["name_source"]))
    return out
