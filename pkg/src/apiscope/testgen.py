"""Probing test-case generation for candidate APIs.

Parameter specs are recovered from the handler's accessor calls on its
payload object, instantiated from fixed per-kind templates, and emitted
once per key ordering. Orderings are exhaustive up to four parameters;
larger parameter lists keep only the declaration order and mark the
suite truncated. Everything here is pure and deterministic.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from .errors import ManualCaseUnknownApi, NoHandler, SchemaError, UnknownClass
from .ir import ClassUnit, IrBundle, MethodUnit
from .jsonio import check_keys, read_json
from .recognizer import Candidate

ORIGIN_AUTO = "auto"
ORIGIN_MANUAL = "manual"

# Accessor method name -> parameter kind.
ACCESSOR_KINDS = {
    "optString": "string",
    "optInt": "number",
    "optLong": "number",
    "optDouble": "number",
    "optBoolean": "boolean",
    "optJSONObject": "object",
    "optJSONArray": "array",
}

MAX_PERMUTED_PARAMS = 4

# The handler parameter whose accessor calls define the API's inputs.
_PAYLOAD_PARAM_TYPE = "JSONObject"


@dataclass(frozen=True)
class ParamSpec:
    """One recovered parameter.

    Invariants: keys unique among siblings; children only on object kind.
    """

    key: str
    kind: str
    children: tuple[ParamSpec, ...] = ()
    default: Any = None


@dataclass(frozen=True)
class TestCase:
    """One probing invocation: ordered payload plus provenance indices."""

    __test__ = False  # keep pytest from collecting this

    api_name: str
    payload: tuple[tuple[str, Any], ...]
    permutation_index: int
    variant_index: int
    origin: str


@dataclass(frozen=True)
class TestSuite:
    __test__ = False

    cases: tuple[TestCase, ...]
    truncated: bool


def extract_params(cls: ClassUnit) -> list[ParamSpec]:
    """Recover the parameter specs read by the class's handler method.

    Scans accessor calls whose receiver is the handler's payload object;
    the first literal argument names the key, the second (when literal)
    is the declared default. Object-typed parameters recurse through the
    local value their accessor binds. Order follows first occurrence.
    """
    handler = cls.handler_method()
    if handler is None:
        raise NoHandler(f"class '{cls.name}' has no handler method")
    payload_index = _payload_param_index(handler)
    if payload_index is None:
        return []
    return _specs_for(f"param:{payload_index}", handler, frozenset())


def _payload_param_index(handler: MethodUnit) -> int | None:
    for i, param in enumerate(handler.params):
        if param.rsplit(".", 1)[-1] == _PAYLOAD_PARAM_TYPE:
            return i
    return None


def _specs_for(receiver: str, handler: MethodUnit, visited: frozenset[str]) -> list[ParamSpec]:
    specs: list[ParamSpec] = []
    seen: set[str] = set()
    for site in handler.invokes:
        if site.receiver != receiver or site.callee_method not in ACCESSOR_KINDS:
            continue
        if not site.args or not isinstance(site.args[0], str):
            continue
        key = site.args[0]
        if key in seen:
            continue
        seen.add(key)
        kind = ACCESSOR_KINDS[site.callee_method]
        default = site.args[1] if len(site.args) > 1 else None
        children: tuple[ParamSpec, ...] = ()
        if kind == "object" and site.binds is not None and site.binds not in visited:
            children = tuple(_specs_for(site.binds, handler, visited | {receiver}))
        specs.append(ParamSpec(key, kind, children, default))
    return specs


def instantiate(params: Sequence[ParamSpec]) -> list[tuple[tuple[str, Any], ...]]:
    """Cartesian product of per-kind template values, in declaration order.

    Numbers contribute 1 then 0; strings, booleans, and arrays contribute a
    single template each; objects multiply through their children. The
    variant index downstream is the position in this list.
    """
    pools = [_template_values(p) for p in params]
    keys = [p.key for p in params]
    return [tuple(zip(keys, combo)) for combo in itertools.product(*pools)]


def _template_values(spec: ParamSpec) -> list[Any]:
    if spec.kind == "string":
        return ["test"]
    if spec.kind == "number":
        return [1, 0]
    if spec.kind == "boolean":
        return [True]
    if spec.kind == "array":
        return [[]]
    if spec.kind == "object":
        return [dict(assignment) for assignment in instantiate(spec.children)]
    raise SchemaError(f"unknown parameter kind '{spec.kind}'")


def permute(
    api_name: str,
    assignment: tuple[tuple[str, Any], ...],
    variant_index: int = 0,
    origin: str = ORIGIN_AUTO,
) -> tuple[list[TestCase], bool]:
    """All key orderings of one assignment as test cases.

    n <= 4 yields every ordering, ranked lexicographically by index
    permutation; larger n keeps only the given order and reports
    truncation. Reordering never rewrites the key->value mapping.
    """
    n = len(assignment)
    if n <= MAX_PERMUTED_PARAMS:
        orders = itertools.permutations(range(n))
        truncated = False
    else:
        orders = iter([tuple(range(n))])
        truncated = True
    cases = [
        TestCase(
            api_name=api_name,
            payload=tuple(assignment[i] for i in order),
            permutation_index=rank,
            variant_index=variant_index,
            origin=origin,
        )
        for rank, order in enumerate(orders)
    ]
    return cases, truncated


def gen_suite(
    candidates: Sequence[Candidate],
    bundle: IrBundle,
    manual_path: str | Path | None = None,
) -> TestSuite:
    """Auto cases for every candidate, plus optional manual cases.

    Candidates without a handler get the zero-parameter case, so every
    candidate always has at least one case. The suite is sorted by
    (api, variant, permutation, origin) and exact duplicates collapse.
    """
    cases: list[TestCase] = []
    truncated = False
    api_names: set[str] = set()
    for candidate in candidates:
        api_names.add(candidate.api_name)
        cls = bundle.index.get(candidate.class_name)
        if cls is None:
            raise UnknownClass(f"candidate class '{candidate.class_name}' is not in the bundle")
        try:
            params = extract_params(cls)
        except NoHandler:
            params = []
        for variant, assignment in enumerate(instantiate(params)):
            permuted, cut = permute(candidate.api_name, assignment, variant)
            cases.extend(permuted)
            truncated = truncated or cut
    if manual_path is not None:
        cases.extend(_load_manual(manual_path, api_names))
    unique: dict[str, TestCase] = {}
    for case in sorted(cases, key=_case_sort_key):
        unique.setdefault(_case_identity(case), case)
    return TestSuite(tuple(unique.values()), truncated)


def _case_sort_key(case: TestCase) -> tuple:
    return (
        case.api_name,
        case.variant_index,
        case.permutation_index,
        case.origin,
        json.dumps(case.payload, sort_keys=True),
    )


def _case_identity(case: TestCase) -> str:
    return json.dumps(
        [case.api_name, case.payload, case.permutation_index, case.variant_index, case.origin]
    )


def _load_manual(path: str | Path, api_names: set[str]) -> list[TestCase]:
    obj = read_json(path)
    if not isinstance(obj, list):
        raise SchemaError("manual cases: expected a list")
    out = []
    for i, item in enumerate(obj):
        where = f"manual[{i}]"
        check_keys(item, ("api", "payload"), ("origin",), where)
        if item.get("origin") not in (None, ORIGIN_MANUAL):
            raise SchemaError(f"{where}: origin must be '{ORIGIN_MANUAL}' when present")
        api = item["api"]
        if api not in api_names:
            raise ManualCaseUnknownApi(f"{where}: '{api}' names no candidate")
        out.append(
            TestCase(
                api_name=api,
                payload=_payload_from_obj(item["payload"], where),
                permutation_index=0,
                variant_index=0,
                origin=ORIGIN_MANUAL,
            )
        )
    return out


def _payload_from_obj(obj: Any, where: str) -> tuple[tuple[str, Any], ...]:
    if not isinstance(obj, list):
        raise SchemaError(f"{where}: payload must be a list of [key, value] pairs")
    pairs = []
    for j, pair in enumerate(obj):
        if not isinstance(pair, list) or len(pair) != 2 or not isinstance(pair[0], str):
            raise SchemaError(f"{where}: payload[{j}] must be a [key, value] pair")
        pairs.append((pair[0], pair[1]))
    return tuple(pairs)


# ---------------------------------------------------------------------------
# Suite artifact (JSON list)
# ---------------------------------------------------------------------------

def case_to_obj(case: TestCase) -> dict:
    return {
        "api": case.api_name,
        "payload": [[k, v] for k, v in case.payload],
        "perm": case.permutation_index,
        "variant": case.variant_index,
        "origin": case.origin,
    }


def case_from_obj(obj: Any, where: str = "case") -> TestCase:
    check_keys(obj, ("api", "payload", "perm", "variant", "origin"), (), where)
    if obj["origin"] not in (ORIGIN_AUTO, ORIGIN_MANUAL):
        raise SchemaError(f"{where}: bad origin '{obj['origin']}'")
    if not isinstance(obj["perm"], int) or not isinstance(obj["variant"], int):
        raise SchemaError(f"{where}: perm and variant must be integers")
    return TestCase(
        api_name=obj["api"],
        payload=_payload_from_obj(obj["payload"], where),
        permutation_index=obj["perm"],
        variant_index=obj["variant"],
        origin=obj["origin"],
    )


def suite_to_obj(suite: TestSuite) -> list[dict]:
    return [case_to_obj(c) for c in suite.cases]


def read_suite(path: str | Path) -> TestSuite:
    obj = read_json(path)
    if not isinstance(obj, list):
        raise SchemaError("suite: expected a list")
    cases = tuple(case_from_obj(item, f"suite[{i}]") for i, item in enumerate(obj))
    return TestSuite(cases, truncated=False)
