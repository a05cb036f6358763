"""Decompiled-app intermediate representation: model, loader, serializer.

The IR is a plain JSON document describing classes with their string
constants and invoke sites. Every static stage downstream (anchoring,
invariant extraction, candidate matching, parameter recovery) consumes
only this model, so loading is strict: unknown keys are rejected, class
names must be unique, and dataflow provenance tags are checked. A loaded
bundle is immutable and safe to share across any number of workers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .errors import SchemaError, UnknownClass
from .jsonio import check_keys, read_json

IR_VERSION = 1

_RECEIVER_RE = re.compile(r"^(?:other|param:\d+|local:[A-Za-z0-9_$]+)$")
_BINDS_RE = re.compile(r"^local:[A-Za-z0-9_$]+$")

# JSON literals an invoke argument may carry; None marks a non-literal slot.
_LITERAL_TYPES = (str, int, float, bool)


@dataclass(frozen=True)
class FieldUnit:
    """A class field.

    Invariants:
      - const is only meaningful when the field's type denotes a string;
        loaders reject const on anything else
    """

    name: str
    type: str
    const: str | None = None


@dataclass(frozen=True)
class InvokeSite:
    """One call site inside a method body.

    Invariants:
      - args holds only literals (str/int/float/bool) or None for
        non-literal argument positions
      - receiver is one of "other", "param:<index>", "local:<id>"
      - a "local:<id>" receiver must have been bound by an earlier site's
        binds tag within the same method
    """

    callee_class: str
    callee_method: str
    args: tuple[Any, ...]
    receiver: str
    binds: str | None = None


@dataclass(frozen=True)
class MethodUnit:
    """A method with its literal strings and ordered invoke sites.

    Invariants:
      - at most one method per class carries handler=True; the flag is a
        producer contract and is never inferred here
      - strings preserves body order
    """

    name: str
    params: tuple[str, ...]
    returns: str
    handler: bool
    strings: tuple[str, ...]
    invokes: tuple[InvokeSite, ...]


@dataclass(frozen=True)
class ClassUnit:
    """The unit of analysis: one class of the decompiled app.

    Invariants:
      - package is a dot-separated prefix of the name's package portion
      - superclass may name a class outside the bundle (framework types)
    """

    name: str
    package: str
    superclass: str | None
    fields: tuple[FieldUnit, ...]
    methods: tuple[MethodUnit, ...]

    def handler_method(self) -> MethodUnit | None:
        for method in self.methods:
            if method.handler:
                return method
        return None

    def string_constants(self) -> tuple[str, ...]:
        """All string literals of the class: field constants plus body strings."""
        pool = [f.const for f in self.fields if isinstance(f.const, str)]
        for method in self.methods:
            pool.extend(method.strings)
        return tuple(pool)


@dataclass(frozen=True)
class IrBundle:
    """A validated bundle of classes.

    Invariants:
      - class names are unique
      - index resolves every class name to its unit
      - callers maps callee class name -> sorted caller names, derived
        purely from invoke sites with self-calls excluded
    """

    version: int
    classes: tuple[ClassUnit, ...]
    index: dict[str, ClassUnit] = field(init=False, repr=False, compare=False)
    callers: dict[str, tuple[str, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        index: dict[str, ClassUnit] = {}
        for cls in self.classes:
            if cls.name in index:
                raise SchemaError(f"duplicate class name '{cls.name}'")
            index[cls.name] = cls
        edges: dict[str, set[str]] = {}
        for cls in self.classes:
            for method in cls.methods:
                for site in method.invokes:
                    if site.callee_class != cls.name:
                        edges.setdefault(site.callee_class, set()).add(cls.name)
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "callers", {k: tuple(sorted(v)) for k, v in edges.items()})


def callers_of(bundle: IrBundle, class_name: str) -> tuple[str, ...]:
    """Classes with at least one invoke site targeting class_name, sorted.

    A pure function of invoke sites; strings and fields never influence it.
    """
    if class_name not in bundle.index:
        raise UnknownClass(f"class '{class_name}' is not in the bundle")
    return bundle.callers.get(class_name, ())


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def load_ir(path: str | Path) -> IrBundle:
    return bundle_from_obj(read_json(path))


def bundle_from_obj(obj: Any) -> IrBundle:
    check_keys(obj, ("version", "classes"), (), "bundle")
    if obj["version"] != IR_VERSION:
        raise SchemaError(f"bundle: unsupported version {obj['version']!r}")
    if not isinstance(obj["classes"], list):
        raise SchemaError("bundle: 'classes' must be a list")
    classes = tuple(
        _class_from_obj(cls, f"classes[{i}]") for i, cls in enumerate(obj["classes"])
    )
    return IrBundle(IR_VERSION, classes)


def _class_from_obj(obj: Any, where: str) -> ClassUnit:
    check_keys(obj, ("name", "package", "fields", "methods"), ("super",), where)
    name = _require_str(obj, "name", where)
    package = obj["package"]
    if not isinstance(package, str):
        raise SchemaError(f"{where}: 'package' must be a string")
    _check_package(name, package, where)
    superclass = obj.get("super")
    if superclass is not None and not isinstance(superclass, str):
        raise SchemaError(f"{where}: 'super' must be a string")
    if not isinstance(obj["fields"], list) or not isinstance(obj["methods"], list):
        raise SchemaError(f"{where}: 'fields' and 'methods' must be lists")
    fields = tuple(
        _field_from_obj(f, f"{where}.fields[{i}]") for i, f in enumerate(obj["fields"])
    )
    methods = tuple(
        _method_from_obj(m, f"{where}.methods[{i}]") for i, m in enumerate(obj["methods"])
    )
    if sum(1 for m in methods if m.handler) > 1:
        raise SchemaError(f"{where}: class '{name}' has more than one handler method")
    return ClassUnit(name, package, superclass, fields, methods)


def _check_package(name: str, package: str, where: str) -> None:
    owner = name.rsplit(".", 1)[0] if "." in name else ""
    if owner:
        if not package or (owner != package and not owner.startswith(package + ".")):
            raise SchemaError(f"{where}: package '{package}' is not a prefix of '{name}'")
    elif package:
        raise SchemaError(f"{where}: class '{name}' has no package portion but declares '{package}'")


def _field_from_obj(obj: Any, where: str) -> FieldUnit:
    check_keys(obj, ("name", "type"), ("const",), where)
    name = _require_str(obj, "name", where)
    type_name = _require_str(obj, "type", where)
    const = obj.get("const")
    if const is not None:
        if not isinstance(const, str):
            raise SchemaError(f"{where}: 'const' must be a string")
        if type_name.rsplit(".", 1)[-1].lower() != "string":
            raise SchemaError(f"{where}: const on non-string field type '{type_name}'")
    return FieldUnit(name, type_name, const)


def _method_from_obj(obj: Any, where: str) -> MethodUnit:
    check_keys(obj, ("name", "params", "returns", "handler", "strings", "invokes"), (), where)
    name = _require_str(obj, "name", where)
    params = _require_str_list(obj, "params", where)
    returns = _require_str(obj, "returns", where)
    handler = obj["handler"]
    if not isinstance(handler, bool):
        raise SchemaError(f"{where}: 'handler' must be a boolean")
    strings = _require_str_list(obj, "strings", where)
    if not isinstance(obj["invokes"], list):
        raise SchemaError(f"{where}: 'invokes' must be a list")
    invokes = tuple(
        _invoke_from_obj(s, f"{where}.invokes[{i}]") for i, s in enumerate(obj["invokes"])
    )
    _check_provenance(invokes, where)
    return MethodUnit(name, params, returns, handler, strings, invokes)


def _invoke_from_obj(obj: Any, where: str) -> InvokeSite:
    check_keys(obj, ("callee_class", "callee_method", "args", "receiver"), ("binds",), where)
    callee_class = _require_str(obj, "callee_class", where)
    callee_method = _require_str(obj, "callee_method", where)
    raw_args = obj["args"]
    if not isinstance(raw_args, list):
        raise SchemaError(f"{where}: 'args' must be a list")
    for i, arg in enumerate(raw_args):
        if arg is not None and not isinstance(arg, _LITERAL_TYPES):
            raise SchemaError(f"{where}: args[{i}] must be a literal or null")
    receiver = _require_str(obj, "receiver", where)
    if not _RECEIVER_RE.match(receiver):
        raise SchemaError(f"{where}: bad receiver tag '{receiver}'")
    binds = obj.get("binds")
    if binds is not None and (not isinstance(binds, str) or not _BINDS_RE.match(binds)):
        raise SchemaError(f"{where}: bad binds tag '{binds}'")
    return InvokeSite(callee_class, callee_method, tuple(raw_args), receiver, binds)


def _check_provenance(invokes: tuple[InvokeSite, ...], where: str) -> None:
    # local: receivers must refer to a value bound by an earlier site.
    bound: set[str] = set()
    for i, site in enumerate(invokes):
        if site.receiver.startswith("local:") and site.receiver not in bound:
            raise SchemaError(f"{where}.invokes[{i}]: dangling receiver '{site.receiver}'")
        if site.binds is not None:
            bound.add(site.binds)


def _require_str(obj: Mapping[str, Any], key: str, where: str) -> str:
    value = obj[key]
    if not isinstance(value, str) or not value:
        raise SchemaError(f"{where}: '{key}' must be a non-empty string")
    return value


def _require_str_list(obj: Mapping[str, Any], key: str, where: str) -> tuple[str, ...]:
    value = obj[key]
    if not isinstance(value, list) or any(not isinstance(v, str) for v in value):
        raise SchemaError(f"{where}: '{key}' must be a list of strings")
    return tuple(value)


# ---------------------------------------------------------------------------
# Serialization (canonical field order; optional keys omitted when absent)
# ---------------------------------------------------------------------------

def bundle_to_obj(bundle: IrBundle) -> dict:
    return {"version": bundle.version, "classes": [_class_to_obj(c) for c in bundle.classes]}


def _class_to_obj(cls: ClassUnit) -> dict:
    obj: dict[str, Any] = {"name": cls.name, "package": cls.package}
    if cls.superclass is not None:
        obj["super"] = cls.superclass
    obj["fields"] = [_field_to_obj(f) for f in cls.fields]
    obj["methods"] = [_method_to_obj(m) for m in cls.methods]
    return obj


def _field_to_obj(unit: FieldUnit) -> dict:
    obj: dict[str, Any] = {"name": unit.name, "type": unit.type}
    if unit.const is not None:
        obj["const"] = unit.const
    return obj


def _method_to_obj(method: MethodUnit) -> dict:
    return {
        "name": method.name,
        "params": list(method.params),
        "returns": method.returns,
        "handler": method.handler,
        "strings": list(method.strings),
        "invokes": [_invoke_to_obj(s) for s in method.invokes],
    }


def _invoke_to_obj(site: InvokeSite) -> dict:
    obj: dict[str, Any] = {
        "callee_class": site.callee_class,
        "callee_method": site.callee_method,
        "args": list(site.args),
        "receiver": site.receiver,
    }
    if site.binds is not None:
        obj["binds"] = site.binds
    return obj


def dump_ir(bundle: IrBundle) -> str:
    from .jsonio import dumps

    return dumps(bundle_to_obj(bundle))


def write_ir(path: str | Path, bundle: IrBundle) -> None:
    Path(path).write_text(dump_ir(bundle), encoding="utf-8")
