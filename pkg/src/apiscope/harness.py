"""Simulated layered runtime with an attachable call profiler.

An invocation walks the script entry point, the wrapper chain, and the
bridge function, then dispatches against the runtime's API table: unknown
names are rejected as unsupported, permission-checked APIs deny
third-party callers, and order-sensitive APIs reject non-canonical key
orders. Configured noise events are spliced into the emitted trace so
downstream chain analysis has something to filter. The whole runtime is
stateless: identical requests always produce identical responses and
traces, and it never raises; failures travel in the response error string.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

from .errors import SchemaError
from .jsonio import check_keys, read_json
from .testgen import TestCase, TestSuite

RESOURCE_CATEGORIES = (
    "Bluetooth",
    "Camera",
    "Location",
    "Media",
    "NFC",
    "Network",
    "Package",
    "Storage",
    "Telephony",
)

CALLER_FIRST_PARTY = "first-party"
CALLER_THIRD_PARTY = "third-party"

ENTRY_EVENT_FN = "invoke"


@dataclass(frozen=True)
class ApiEntry:
    """Dispatch-table row for one API name."""

    checked: bool
    documented: bool
    resources: frozenset[str] = frozenset()
    order_sensitive: bool = False


@dataclass(frozen=True)
class NoiseEvent:
    """An unrelated function call spliced into the trace at a fixed position."""

    fn: str
    args: tuple[str, ...]
    position: int


@dataclass(frozen=True)
class RuntimeSpec:
    """Ground truth for one simulated vendor runtime.

    Invariants: wrapper chain non-empty; bridge not in the wrapper chain;
    denied and unsupported error strings differ; every resource tag drawn
    from the nine-category vocabulary.
    """

    vendor: str
    wrapper_chain: tuple[str, ...]
    bridge_name: str
    apis: Mapping[str, ApiEntry]
    denied_error: str
    unsupported_error: str
    noise_events: tuple[NoiseEvent, ...] = ()
    caller_context: str = CALLER_THIRD_PARTY


@dataclass(frozen=True)
class InvocationRequest:
    api_name: str
    payload: tuple[tuple[str, Any], ...] = ()
    callback_id: int = 1


@dataclass(frozen=True)
class InvocationResponse:
    """Success iff error_message is empty iff the callback fired."""

    error_message: str
    callback_fired: bool
    resource_touches: frozenset[str]

    @property
    def ok(self) -> bool:
        return self.error_message == ""


@dataclass(frozen=True)
class TraceEvent:
    fn: str
    args: tuple[str, ...]
    seq: int


Trace = tuple[TraceEvent, ...]


def load_runtime(path: str | Path) -> RuntimeSpec:
    return runtime_from_obj(read_json(path))


def runtime_from_obj(obj: Any) -> RuntimeSpec:
    check_keys(
        obj,
        ("vendor", "wrapper_chain", "bridge", "errors", "apis"),
        ("caller_context", "noise"),
        "runtime",
    )
    vendor = obj["vendor"]
    chain = obj["wrapper_chain"]
    if not isinstance(chain, list) or not chain or any(not isinstance(f, str) for f in chain):
        raise SchemaError("runtime: 'wrapper_chain' must be a non-empty list of names")
    bridge = obj["bridge"]
    if not isinstance(bridge, str) or not bridge:
        raise SchemaError("runtime: 'bridge' must be a non-empty string")
    if bridge in chain:
        raise SchemaError("runtime: bridge must not appear in the wrapper chain")
    errors = check_keys(obj["errors"], ("denied", "unsupported"), (), "runtime.errors")
    if errors["denied"] == errors["unsupported"]:
        raise SchemaError("runtime: denied and unsupported errors must differ")
    context = obj.get("caller_context", CALLER_THIRD_PARTY)
    if context not in (CALLER_FIRST_PARTY, CALLER_THIRD_PARTY):
        raise SchemaError(f"runtime: bad caller_context '{context}'")
    noise = tuple(
        _noise_from_obj(n, f"runtime.noise[{i}]") for i, n in enumerate(obj.get("noise", []))
    )
    raw_apis = obj["apis"]
    if not isinstance(raw_apis, dict):
        raise SchemaError("runtime: 'apis' must be an object")
    apis = {
        name: _api_from_obj(entry, f"runtime.apis['{name}']")
        for name, entry in raw_apis.items()
    }
    return RuntimeSpec(
        vendor=vendor,
        wrapper_chain=tuple(chain),
        bridge_name=bridge,
        apis=apis,
        denied_error=errors["denied"],
        unsupported_error=errors["unsupported"],
        noise_events=noise,
        caller_context=context,
    )


def _noise_from_obj(obj: Any, where: str) -> NoiseEvent:
    check_keys(obj, ("fn", "args", "position"), (), where)
    if not isinstance(obj["args"], list) or any(not isinstance(a, str) for a in obj["args"]):
        raise SchemaError(f"{where}: 'args' must be a list of strings")
    if not isinstance(obj["position"], int) or obj["position"] < 0:
        raise SchemaError(f"{where}: 'position' must be a non-negative integer")
    return NoiseEvent(obj["fn"], tuple(obj["args"]), obj["position"])


def _api_from_obj(obj: Any, where: str) -> ApiEntry:
    check_keys(obj, ("checked", "documented"), ("resources", "order_sensitive"), where)
    if not isinstance(obj["checked"], bool) or not isinstance(obj["documented"], bool):
        raise SchemaError(f"{where}: 'checked' and 'documented' must be booleans")
    resources = obj.get("resources", [])
    if not isinstance(resources, list):
        raise SchemaError(f"{where}: 'resources' must be a list")
    for tag in resources:
        if tag not in RESOURCE_CATEGORIES:
            raise SchemaError(f"{where}: unknown resource category '{tag}'")
    order_sensitive = obj.get("order_sensitive", False)
    if not isinstance(order_sensitive, bool):
        raise SchemaError(f"{where}: 'order_sensitive' must be a boolean")
    return ApiEntry(obj["checked"], obj["documented"], frozenset(resources), order_sensitive)


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------

def inject(
    runtime: RuntimeSpec, req: InvocationRequest, profiling: bool = False
) -> tuple[InvocationResponse, Trace | None]:
    """Run one invocation; the trace is emitted only while profiling."""
    if not req.api_name:
        raise SchemaError("invocation needs a non-empty API name")
    payload_json = serialize_payload(req.payload)
    events: list[tuple[str, tuple[str, ...]]] = [(ENTRY_EVENT_FN, (req.api_name,))]
    for fn in runtime.wrapper_chain:
        events.append((fn, (req.api_name, payload_json)))
    events.append((runtime.bridge_name, (req.api_name, payload_json, str(req.callback_id))))
    for noise in runtime.noise_events:
        events.insert(min(noise.position, len(events)), (noise.fn, noise.args))
    trace: Trace | None = None
    if profiling:
        trace = tuple(
            TraceEvent(fn, args, seq) for seq, (fn, args) in enumerate(events, start=1)
        )
    return _dispatch(runtime, req), trace


def _dispatch(runtime: RuntimeSpec, req: InvocationRequest) -> InvocationResponse:
    entry = runtime.apis.get(req.api_name)
    if entry is None:
        return _failure(runtime.unsupported_error)
    # The permission gate comes before any payload validation.
    if entry.checked and runtime.caller_context == CALLER_THIRD_PARTY:
        return _failure(runtime.denied_error)
    if entry.order_sensitive:
        keys = [k for k, _ in req.payload]
        # Canonical argument order is the sorted key list; permuted
        # payloads are treated as malformed requests.
        if keys != sorted(keys):
            return _failure(runtime.unsupported_error)
    return InvocationResponse("", True, entry.resources)


def _failure(message: str) -> InvocationResponse:
    return InvocationResponse(message, False, frozenset())


def serialize_payload(payload: Sequence[tuple[str, Any]]) -> str:
    """Compact JSON object preserving the payload's key order."""
    return json.dumps(dict(payload), separators=(",", ":"), ensure_ascii=False)


def run_suite(
    runtime: RuntimeSpec, suite: TestSuite
) -> list[tuple[TestCase, InvocationResponse]]:
    """One fresh invocation per case, responses in suite order."""
    results = []
    for i, case in enumerate(suite.cases, start=1):
        req = InvocationRequest(case.api_name, case.payload, callback_id=i)
        response, _ = inject(runtime, req, profiling=False)
        results.append((case, response))
    return results


# ---------------------------------------------------------------------------
# Trace files (JSON lines, one event per line)
# ---------------------------------------------------------------------------

def write_trace(path: str | Path, trace: Trace) -> None:
    lines = [
        json.dumps({"seq": ev.seq, "fn": ev.fn, "args": list(ev.args)}, ensure_ascii=False)
        for ev in trace
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_trace(path: str | Path) -> Trace:
    from .errors import ParseError

    events = []
    for i, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines()):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as err:
            raise ParseError(f"{path}: {err.msg}", i + 1, err.colno) from err
        check_keys(obj, ("seq", "fn", "args"), (), f"trace line {i + 1}")
        events.append(TraceEvent(obj["fn"], tuple(str(a) for a in obj["args"]), obj["seq"]))
    return tuple(events)
