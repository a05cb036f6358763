"""Bridge discovery from documented-API execution traces.

For each observed invocation, the dependency chain is the subsequence of
trace events whose arguments carry the API name, either as an exact
element or as a token embedded in a serialized argument. The chain's
last event names that trace's bridge candidate; the bridge is accepted
only when every observation agrees. No majority vote: a wrong bridge
would silently poison every later classification.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .catalog import ApiCatalog
from .errors import AmbiguousBridge, NoChainFound, NoDocumentedApis, SchemaError
from .harness import InvocationRequest, RuntimeSpec, Trace, inject
from .jsonio import check_keys, read_json

# Identifier alphabet used for token boundaries inside serialized args.
_IDENT_CHARS = frozenset(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_$."
)


@dataclass(frozen=True)
class Observation:
    """One profiled invocation of a documented API."""

    api_name: str
    trace: Trace


@dataclass(frozen=True)
class ChainEvidence:
    """Chain tail for one observation; tie marks an in-trace seq collision."""

    api_name: str
    candidate: str
    tie: bool


@dataclass(frozen=True)
class BridgeResult:
    bridge: str
    evidence: tuple[ChainEvidence, ...]
    traced_functions: tuple[str, ...]


def carries_token(arg: str, name: str) -> bool:
    """True when name occurs in arg with non-identifier characters around it."""
    start = arg.find(name)
    while start != -1:
        end = start + len(name)
        before_ok = start == 0 or arg[start - 1] not in _IDENT_CHARS
        after_ok = end == len(arg) or arg[end] not in _IDENT_CHARS
        if before_ok and after_ok:
            return True
        start = arg.find(name, start + 1)
    return False


def find_bridge(observations: Sequence[Observation]) -> BridgeResult:
    """The unique chain-tail function across all observations.

    Raises NoChainFound when a trace never carries its API name, and
    AmbiguousBridge (with per-trace evidence) when observations disagree.
    """
    if not observations:
        raise NoChainFound("no observations supplied")
    evidence: list[ChainEvidence] = []
    for obs in observations:
        chain = [
            ev for ev in obs.trace if any(carries_token(arg, obs.api_name) for arg in ev.args)
        ]
        if not chain:
            raise NoChainFound(f"trace for '{obs.api_name}' never carries the API name")
        last_seq = max(ev.seq for ev in chain)
        finals = [ev for ev in chain if ev.seq == last_seq]
        # Equal-seq collisions cannot come from the simulated runtime but can
        # from hand-written trace files; take the later entry and flag it.
        evidence.append(ChainEvidence(obs.api_name, finals[-1].fn, tie=len(finals) > 1))
    tails = {e.candidate for e in evidence}
    traced = tuple(sorted({ev.fn for obs in observations for ev in obs.trace}))
    if len(tails) > 1:
        detail = ", ".join(f"{e.api_name}->{e.candidate}" for e in evidence)
        raise AmbiguousBridge(f"observations disagree on the bridge: {detail}", tuple(evidence))
    return BridgeResult(tails.pop(), tuple(evidence), traced)


def observe_documented(
    runtime: RuntimeSpec, catalog: ApiCatalog, k: int | None = None
) -> list[Observation]:
    """Profile the first k documented APIs in catalog order (all when k is None).

    k larger than the number of available documented APIs is clamped.
    """
    if k is not None and k < 1:
        raise SchemaError("observation count must be at least 1")
    names = [
        entry.name
        for entry in catalog.entries
        if (api := runtime.apis.get(entry.name)) is not None and api.documented
    ]
    if not names:
        raise NoDocumentedApis(f"runtime '{runtime.vendor}' exposes no documented API")
    if k is not None:
        names = names[:k]
    observations = []
    for i, name in enumerate(names, start=1):
        _, trace = inject(runtime, InvocationRequest(name, (), callback_id=i), profiling=True)
        assert trace is not None
        observations.append(Observation(name, trace))
    return observations


# ---------------------------------------------------------------------------
# Bridge artifact
# ---------------------------------------------------------------------------

def bridge_result_to_obj(result: BridgeResult) -> dict:
    return {
        "bridge": result.bridge,
        "evidence": [
            {"api": e.api_name, "candidate": e.candidate, "tie": e.tie}
            for e in result.evidence
        ],
        "traced_functions": list(result.traced_functions),
    }


def read_bridge_result(path: str | Path) -> BridgeResult:
    obj = read_json(path)
    check_keys(obj, ("bridge", "evidence", "traced_functions"), (), "bridge")
    evidence = tuple(
        ChainEvidence(e["api"], e["candidate"], e["tie"])
        for e in (
            check_keys(item, ("api", "candidate", "tie"), (), f"bridge.evidence[{i}]")
            for i, item in enumerate(obj["evidence"])
        )
    )
    return BridgeResult(obj["bridge"], evidence, tuple(obj["traced_functions"]))
