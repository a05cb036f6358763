"""Documented-API catalogs, vendor profiles, and cross-version diffing.

Catalogs model official documentation only; hidden-API sets for diffing are
pipeline outputs supplied alongside, never stored in the catalog itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable

from .errors import SchemaError, VendorMismatch
from .jsonio import check_keys, read_json


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    category: str
    subcategory: str | None = None


@dataclass(frozen=True)
class ApiCatalog:
    """One vendor's documented API surface at one version.

    Invariants: entry names unique; namespace non-empty.
    """

    vendor: str
    namespace: str
    version: str
    entries: tuple[CatalogEntry, ...]

    def documented_names(self) -> frozenset[str]:
        return frozenset(e.name for e in self.entries)


@dataclass(frozen=True)
class VendorProfile:
    """Per-vendor error vocabulary used to classify probe responses.

    Invariants: both keyword lists non-empty and disjoint after lowercasing.
    """

    vendor: str
    namespace: str
    denied_keywords: tuple[str, ...]
    unsupported_keywords: tuple[str, ...]


@dataclass(frozen=True)
class EvolutionDiff:
    """API-name movements between two catalog versions; the four sets are pairwise disjoint."""

    added_documented: frozenset[str]
    removed_documented: frozenset[str]
    became_hidden: frozenset[str]
    became_documented: frozenset[str]
    old_version: str
    new_version: str


def load_catalog(path: str | Path) -> ApiCatalog:
    return catalog_from_obj(read_json(path))


def catalog_from_obj(obj: Any) -> ApiCatalog:
    check_keys(obj, ("vendor", "namespace", "version", "documented"), (), "catalog")
    vendor = _nonempty(obj, "vendor", "catalog")
    namespace = _nonempty(obj, "namespace", "catalog")
    version = obj["version"]
    if not isinstance(version, str):
        raise SchemaError("catalog: 'version' must be a string")
    raw = obj["documented"]
    if not isinstance(raw, list):
        raise SchemaError("catalog: 'documented' must be a list")
    entries = []
    seen: set[str] = set()
    for i, item in enumerate(raw):
        where = f"catalog.documented[{i}]"
        check_keys(item, ("name", "category"), ("subcategory",), where)
        name = _nonempty(item, "name", where)
        if name in seen:
            raise SchemaError(f"{where}: duplicate API name '{name}'")
        seen.add(name)
        category = _nonempty(item, "category", where)
        sub = item.get("subcategory")
        if sub is not None and not isinstance(sub, str):
            raise SchemaError(f"{where}: 'subcategory' must be a string")
        entries.append(CatalogEntry(name, category, sub))
    return ApiCatalog(vendor, namespace, version, tuple(entries))


def load_profile(path: str | Path) -> VendorProfile:
    return profile_from_obj(read_json(path))


def profile_from_obj(obj: Any) -> VendorProfile:
    check_keys(obj, ("vendor", "namespace", "denied_keywords", "unsupported_keywords"), (), "profile")
    vendor = _nonempty(obj, "vendor", "profile")
    namespace = _nonempty(obj, "namespace", "profile")
    denied = _keywords(obj, "denied_keywords")
    unsupported = _keywords(obj, "unsupported_keywords")
    # Case-insensitive vocabularies must not overlap, or a single response
    # could justify two contradictory verdicts.
    overlap = {k.lower() for k in denied} & {k.lower() for k in unsupported}
    if overlap:
        raise SchemaError(f"profile: keyword '{sorted(overlap)[0]}' appears in both lists")
    return VendorProfile(vendor, namespace, denied, unsupported)


def _keywords(obj: Any, key: str) -> tuple[str, ...]:
    value = obj[key]
    if not isinstance(value, list) or not value:
        raise SchemaError(f"profile: '{key}' must be a non-empty list")
    for item in value:
        if not isinstance(item, str) or not item:
            raise SchemaError(f"profile: '{key}' entries must be non-empty strings")
    return tuple(value)


def _nonempty(obj: Any, key: str, where: str) -> str:
    value = obj[key]
    if not isinstance(value, str) or not value:
        raise SchemaError(f"{where}: '{key}' must be a non-empty string")
    return value


def diff_catalogs(
    old: ApiCatalog,
    old_hidden: Iterable[str],
    new: ApiCatalog,
    new_hidden: Iterable[str],
) -> EvolutionDiff:
    """Name movements between versions.

    became_hidden = old documented that now appear in the new hidden set;
    became_documented = old hidden that are now documented; added/removed
    are computed on the documented sets with those transitions excluded,
    which keeps the four sets pairwise disjoint.
    """
    if old.vendor != new.vendor:
        raise VendorMismatch(f"cannot diff '{old.vendor}' against '{new.vendor}'")
    old_doc = old.documented_names()
    new_doc = new.documented_names()
    old_hid = frozenset(old_hidden)
    new_hid = frozenset(new_hidden)
    for label, doc, hid in (("old", old_doc, old_hid), ("new", new_doc, new_hid)):
        clash = doc & hid
        if clash:
            raise SchemaError(f"{label} hidden set overlaps documented set: '{sorted(clash)[0]}'")
    became_hidden = old_doc & new_hid
    became_documented = old_hid & new_doc
    added = new_doc - old_doc - became_documented
    removed = old_doc - new_doc - became_hidden
    return EvolutionDiff(
        added_documented=frozenset(added),
        removed_documented=frozenset(removed),
        became_hidden=frozenset(became_hidden),
        became_documented=frozenset(became_documented),
        old_version=old.version,
        new_version=new.version,
    )
