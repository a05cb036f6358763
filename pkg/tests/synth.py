"""Programmatic fixture builders: seeded random bundles and scale fixtures."""

from __future__ import annotations

import random

from apiscope.classifier import ClassifiedApi, EvidenceEntry
from apiscope.harness import ApiEntry, RuntimeSpec
from apiscope.recognizer import Candidate
from apiscope.testgen import TestCase, TestSuite

DOC_POOL = ("getLocation", "showToast", "request", "setClipboard", "chooseImage")
SIG_POOL = (
    # (params, returns, payload param index)
    (("Context", "JSONObject", "int"), "void", 1),
    (("JSONObject",), "boolean", 0),
    (("String", "JSONObject"), "void", 1),
)
SUPER_POOL = ("b", "aa", "base.AbsHandler", None)
ROOT_POOL = ("com.vend.host.jsapi", "com.vend.host.core")
HIDDEN_WORDS = ("Screen", "Contact", "Clipboard", "Wifi", "Proc")


def _impl_class(name, pkg, sup, sig, field_name, const, extra_strings=()):
    params, returns, payload_idx = sig
    cls = {
        "name": name,
        "package": pkg,
        "fields": [],
        "methods": [
            {
                "name": "a",
                "params": list(params),
                "returns": returns,
                "handler": True,
                "strings": list(extra_strings),
                "invokes": [
                    {
                        "callee_class": "org.json.JSONObject",
                        "callee_method": "optString",
                        "args": ["value", None],
                        "receiver": f"param:{payload_idx}",
                    }
                ],
            }
        ],
    }
    if sup is not None:
        cls["super"] = sup
    if field_name is not None:
        cls["fields"] = [{"name": field_name, "type": "String", "const": const}]
    else:
        cls["methods"][0]["strings"] = [const, *extra_strings]
    return cls


def random_bundle(rng: random.Random) -> tuple[dict, list[str]]:
    """One seeded bundle plus its documented names; always loader-valid."""
    documented = rng.sample(DOC_POOL, rng.randint(1, 3))
    base_sig = rng.choice(SIG_POOL)
    base_super = rng.choice(SUPER_POOL)
    base_root = rng.choice(ROOT_POOL)
    field_name = rng.choice(("NAME", "ACTION", None))
    uniform_sig = rng.random() < 0.85
    uniform_super = rng.random() < 0.85
    same_root = rng.random() < 0.85

    counter = iter(range(10_000))

    def fresh(pkg: str) -> str:
        return f"{pkg}.C{next(counter)}"

    def pick_pkg(first: bool) -> str:
        if first or same_root:
            return base_root + rng.choice(("", ".sub1", ".sub2"))
        return rng.choice(("com.elsewhere.app", base_root + ".sub1"))

    classes = []
    impl_names = []
    for i, doc in enumerate(documented):
        sig = base_sig if i == 0 or uniform_sig else rng.choice(SIG_POOL)
        sup = base_super if i == 0 or uniform_super else rng.choice(SUPER_POOL)
        cls = _impl_class(fresh(pick_pkg(i == 0)), None, sup, sig, field_name, doc)
        cls["package"] = cls["name"].rsplit(".", 1)[0]
        classes.append(cls)
        impl_names.append(cls["name"])

    hidden_names = []
    for k in range(rng.randint(0, 5)):
        const = f"private{rng.choice(HIDDEN_WORDS)}{k}"
        if rng.random() < 0.15:
            const = f"bad name {k}"  # not identifier-shaped
        elif rng.random() < 0.1:
            const = documented[0]  # collides with a documented name
        cls = _impl_class(
            fresh(base_root + rng.choice(("", ".sub1"))), None, base_super, base_sig,
            field_name, const,
        )
        cls["package"] = cls["name"].rsplit(".", 1)[0]
        classes.append(cls)
        hidden_names.append(cls["name"])

    # Spoilers: right neighborhood, one facet off.
    for k in range(rng.randint(0, 3)):
        kind = rng.choice(("super", "package", "no-handler", "no-name"))
        name = fresh("com.far.away" if kind == "package" else base_root)
        cls = _impl_class(
            name, None,
            "zz" if kind == "super" else base_super,
            base_sig, field_name, f"spoiler{k}" if kind != "no-name" else "not an identifier",
        )
        cls["package"] = cls["name"].rsplit(".", 1)[0]
        if kind == "no-handler":
            cls["methods"][0]["handler"] = False
        classes.append(cls)

    # Dispatchers drive the caller-set facet.
    targets = impl_names + hidden_names
    for d in range(rng.randint(0, 2)):
        if not targets:
            break
        called = rng.sample(targets, rng.randint(1, len(targets)))
        classes.append(
            {
                "name": fresh(base_root + ".scheme"),
                "package": base_root + ".scheme",
                "fields": [],
                "methods": [
                    {
                        "name": "route",
                        "params": ["String", "JSONObject"],
                        "returns": "void",
                        "handler": False,
                        "strings": [],
                        "invokes": [
                            {
                                "callee_class": t,
                                "callee_method": "a",
                                "args": [None],
                                "receiver": "other",
                            }
                            for t in sorted(called)
                        ],
                    }
                ],
            }
        )

    for k in range(rng.randint(0, 4)):
        classes.append(
            {
                "name": fresh("com.vend.util"),
                "package": "com.vend.util",
                "fields": [],
                "methods": [],
            }
        )

    rng.shuffle(classes)
    return {"version": 1, "classes": classes}, documented


# ---------------------------------------------------------------------------
# Scale fixtures
# ---------------------------------------------------------------------------

def perf_bundle(total: int = 10_000, n_doc: int = 40, n_hidden: int = 160) -> tuple[dict, list[str]]:
    pkg = "com.perf.host.jsapi"
    documented = [f"docApi{i}" for i in range(n_doc)]
    classes = []
    api_classes = []
    for i, doc in enumerate(documented):
        cls = _impl_class(f"{pkg}.D{i}", pkg, "base", SIG_POOL[0], "NAME", doc)
        classes.append(cls)
        api_classes.append(cls["name"])
    for i in range(n_hidden):
        cls = _impl_class(f"{pkg}.H{i}", pkg, "base", SIG_POOL[0], "NAME", f"hiddenApi{i}")
        classes.append(cls)
        api_classes.append(cls["name"])
    classes.append(
        {
            "name": f"{pkg}.Dispatch",
            "package": pkg,
            "fields": [],
            "methods": [
                {
                    "name": "route",
                    "params": ["String", "JSONObject"],
                    "returns": "void",
                    "handler": False,
                    "strings": [],
                    "invokes": [
                        {"callee_class": t, "callee_method": "a", "args": [None], "receiver": "other"}
                        for t in api_classes
                    ],
                }
            ],
        }
    )
    for i in range(total - len(classes)):
        classes.append(
            {
                "name": f"com.perf.host.other.F{i}",
                "package": "com.perf.host.other",
                "fields": [],
                "methods": [
                    {
                        "name": "m",
                        "params": [],
                        "returns": "void",
                        "handler": False,
                        "strings": [f"filler {i}"],
                        "invokes": [],
                    }
                ],
            }
        )
    return {"version": 1, "classes": classes}, documented


def synthetic_runtime(apis: dict[str, ApiEntry], vendor: str = "synth") -> RuntimeSpec:
    return RuntimeSpec(
        vendor=vendor,
        wrapper_chain=("Shim.invoke",),
        bridge_name="Core.dispatch",
        apis=apis,
        denied_error="fail: no permission",
        unsupported_error="fail: not supported",
    )


def empty_case(api_name: str) -> TestCase:
    return TestCase(api_name, (), 0, 0, "auto")


def one_case_suite(names) -> TestSuite:
    return TestSuite(tuple(empty_case(n) for n in names), truncated=False)


def bookkeeping_fixture(n_checked: int = 25, n_unchecked: int = 113, n_absent: int = 5):
    """Runtime, suite, and candidates with known verdict counts."""
    apis: dict[str, ApiEntry] = {}
    names = []
    for i in range(n_checked):
        name = f"gated{i}"
        apis[name] = ApiEntry(checked=True, documented=False)
        names.append(name)
    for i in range(n_unchecked):
        name = f"open{i}"
        apis[name] = ApiEntry(checked=False, documented=False)
        names.append(name)
    names.extend(f"ghost{i}" for i in range(n_absent))
    runtime = synthetic_runtime(apis)
    suite = one_case_suite(names)
    candidates = [
        Candidate(f"com.synth.app.K{i}", name, ("signature",), "learned-field")
        for i, name in enumerate(names)
    ]
    return runtime, suite, candidates


def audit_fixture(total: int = 502, touching: int = 39, multi: int = 5):
    """Unchecked population where `touching` APIs reach protected resources.

    The first `multi` touching APIs reach two categories each; an API
    still counts once in the Total row.
    """
    apis: dict[str, ApiEntry] = {}
    unchecked = []
    for i in range(total):
        name = f"u{i}"
        if i < multi:
            resources = frozenset({"Location", "Camera"})
        elif i < touching:
            resources = frozenset({"Location"})
        else:
            resources = frozenset()
        apis[name] = ApiEntry(checked=False, documented=False, resources=resources)
        case = empty_case(name)
        unchecked.append(
            ClassifiedApi(name, f"com.synth.app.U{i}", "Unchecked", (EvidenceEntry(case, ""),), resources)
        )
    return synthetic_runtime(apis), tuple(unchecked)


def dynamic_perf_fixture(n_candidates: int = 625):
    """625 two-parameter candidates -> 2,500 generated cases."""
    pkg = "com.perf.host.jsapi"
    classes = []
    candidates = []
    apis: dict[str, ApiEntry] = {}
    for i in range(n_candidates):
        name = f"probe{i}"
        cls = {
            "name": f"{pkg}.P{i}",
            "package": pkg,
            "super": "base",
            "fields": [{"name": "NAME", "type": "String", "const": name}],
            "methods": [
                {
                    "name": "a",
                    "params": ["Context", "JSONObject", "int"],
                    "returns": "void",
                    "handler": True,
                    "strings": [],
                    "invokes": [
                        {
                            "callee_class": "org.json.JSONObject",
                            "callee_method": "optString",
                            "args": ["url", None],
                            "receiver": "param:1",
                        },
                        {
                            "callee_class": "org.json.JSONObject",
                            "callee_method": "optInt",
                            "args": ["count", 3],
                            "receiver": "param:1",
                        },
                    ],
                }
            ],
        }
        classes.append(cls)
        candidates.append(Candidate(cls["name"], name, ("signature",), "learned-field"))
        if i < 300:
            apis[name] = ApiEntry(checked=False, documented=False)
        elif i < 575:
            apis[name] = ApiEntry(checked=True, documented=False)
        # else: absent -> NonApi
    bundle_obj = {"version": 1, "classes": classes}
    return bundle_obj, candidates, synthetic_runtime(apis)
