import shutil
from pathlib import Path

import pytest

from apiscope import (
    load_catalog,
    load_ir,
    load_profile,
    load_runtime,
)

FIXTURES = Path(__file__).parent / "fixtures"


def build_run_dir(root: Path, manual: Path | None = None, with_audit: bool = True) -> Path:
    """Materialize a full run directory from the wechat fixtures, library-only."""
    from apiscope import (
        audit_sensitive,
        classify,
        find_bridge,
        gen_suite,
        load_run,
        locate_documented_impls,
        extract_invariants,
        match_candidates,
        observe_documented,
        papi_classes,
    )
    from apiscope.bridgefinder import bridge_result_to_obj
    from apiscope.classifier import audit_to_obj, classification_to_obj
    from apiscope.recognizer import candidates_to_obj
    from apiscope.testgen import suite_to_obj
    from apiscope.jsonio import write_json

    root.mkdir(parents=True, exist_ok=True)
    shutil.copy(FIXTURES / "wechat-mini.catalog.json", root / "catalog.json")
    bundle = load_ir(FIXTURES / "wechat-mini.ir.json")
    catalog = load_catalog(FIXTURES / "wechat-mini.catalog.json")
    runtime = load_runtime(FIXTURES / "wechat-mini.runtime.json")
    profile = load_profile(FIXTURES / "wechat.profile.json")

    impls = locate_documented_impls(bundle, catalog)
    inv = extract_invariants(impls, bundle)
    candidates = match_candidates(bundle, inv, papi_classes(impls), catalog)
    write_json(root / "candidates.json", candidates_to_obj(candidates))

    suite = gen_suite(candidates, bundle, manual)
    write_json(root / "suite.json", suite_to_obj(suite))

    bridge = find_bridge(observe_documented(runtime, catalog))
    write_json(root / "bridge.json", bridge_result_to_obj(bridge))

    result = classify(runtime, profile, suite, bridge.bridge, candidates)
    write_json(root / "classified.json", classification_to_obj(result))

    if with_audit:
        write_json(root / "audit.json", audit_to_obj(audit_sensitive(runtime, result.unchecked)))
    return root


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def wechat_bundle():
    return load_ir(FIXTURES / "wechat-mini.ir.json")


@pytest.fixture(scope="session")
def wechat_catalog():
    return load_catalog(FIXTURES / "wechat-mini.catalog.json")


@pytest.fixture(scope="session")
def wechat_runtime():
    return load_runtime(FIXTURES / "wechat-mini.runtime.json")


@pytest.fixture(scope="session")
def wechat_profile():
    return load_profile(FIXTURES / "wechat.profile.json")


@pytest.fixture(scope="session")
def wecom_runtime():
    return load_runtime(FIXTURES / "wecom.runtime.json")


@pytest.fixture(scope="session")
def wecom_profile():
    return load_profile(FIXTURES / "wecom.profile.json")


@pytest.fixture(scope="session")
def baidu_bundle():
    return load_ir(FIXTURES / "baidu-mini.ir.json")


@pytest.fixture(scope="session")
def baidu_catalog():
    return load_catalog(FIXTURES / "baidu-mini.catalog.json")


@pytest.fixture(scope="session")
def wechat_run_dir(tmp_path_factory):
    return build_run_dir(tmp_path_factory.mktemp("run") / "wechat")
