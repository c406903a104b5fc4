"""JSON instance files and solution files.

Edge lengths and opening costs are written as decimal strings so that no
JSON reader downstream turns them into floats. Rationals (variant
parameters) are ``"p/q"`` strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from rgather.instance import Instance, Solution
from rgather.tree import TreeError, build_tree

SCHEMA_VERSION = 1


class ParseError(ValueError):
    """Malformed file; the message names the line or field."""


class ValidationError(ValueError):
    """Well-formed file describing an invalid instance."""


@dataclass(frozen=True)
class InstanceFile:
    instance: Instance
    outlier_fraction: Fraction | None = None
    max_open: int | None = None


def _int(value, where: str) -> int:
    if isinstance(value, bool):
        raise ParseError(f"{where}: expected an integer, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value, 10)
        except ValueError:
            pass
    raise ParseError(f"{where}: expected an integer, got {value!r}")


def _get(data: dict, key: str):
    if key not in data:
        raise ParseError(f"missing field {key!r}")
    return data[key]


def instance_from_dict(data: dict) -> InstanceFile:
    if not isinstance(data, dict):
        raise ParseError("top level must be an object")
    version = _get(data, "schema_version")
    if version != SCHEMA_VERSION:
        raise ParseError(f"schema_version: unsupported version {version!r}")
    r = _int(_get(data, "r"), "r")
    if r < 1:
        raise ValidationError(f"r: must be at least 1, got {r}")
    root = _int(_get(data, "root"), "root")
    edges = []
    for i, e in enumerate(_get(data, "edges")):
        if not isinstance(e, list) or len(e) != 3:
            raise ParseError(f"edges[{i}]: expected [u, v, length]")
        edges.append(tuple(_int(x, f"edges[{i}][{j}]") for j, x in enumerate(e)))
    try:
        tree = build_tree(edges, root)
    except TreeError as exc:
        raise ValidationError(f"edges: {exc}") from exc
    users = [_int(u, f"users[{i}]") for i, u in enumerate(_get(data, "users"))]
    facilities = []
    for i, f in enumerate(_get(data, "facilities")):
        if not isinstance(f, dict):
            raise ParseError(f"facilities[{i}]: expected an object")
        facilities.append(
            (_int(_get(f, "vertex"), f"facilities[{i}].vertex"), _int(f.get("open_cost", 0), f"facilities[{i}].open_cost"))
        )
    try:
        instance = Instance(tree, users, facilities, r)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc

    variant = data.get("variant") or {}
    alpha = variant.get("outlier_fraction")
    k = variant.get("max_open")
    try:
        alpha = None if alpha is None else Fraction(str(alpha))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"variant.outlier_fraction: {exc}") from exc
    k = None if k is None else _int(k, "variant.max_open")
    return InstanceFile(instance, alpha, k)


def instance_to_dict(instance: Instance, outlier_fraction=None, max_open=None) -> dict:
    data = {
        "schema_version": SCHEMA_VERSION,
        "r": instance.r,
        "root": instance.tree.root,
        "edges": [[p, c, str(length)] for p, c, length in instance.tree.edges],
        "users": list(instance.users),
        "facilities": [{"vertex": v, "open_cost": str(c)} for v, c in instance.facilities],
    }
    variant = {}
    if outlier_fraction is not None:
        variant["outlier_fraction"] = str(Fraction(outlier_fraction))
    if max_open is not None:
        variant["max_open"] = max_open
    if variant:
        data["variant"] = variant
    return data


def loads_instance(text: str) -> InstanceFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return instance_from_dict(data)


def dumps_instance(instance: Instance, outlier_fraction=None, max_open=None) -> str:
    return json.dumps(instance_to_dict(instance, outlier_fraction, max_open), indent=1, sort_keys=True) + "\n"


def parse_instance(path) -> Instance:
    return loads_instance(Path(path).read_text()).instance


def read_instance_file(path) -> InstanceFile:
    return loads_instance(Path(path).read_text())


def serialize_instance(instance: Instance, path, outlier_fraction=None, max_open=None) -> None:
    Path(path).write_text(dumps_instance(instance, outlier_fraction, max_open))


def read_solution(path) -> Solution:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if isinstance(data, dict) and "solution" in data:
        data = data["solution"]
    try:
        return Solution.from_dict(data)
    except (TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"solution: {exc}") from exc


def write_solution(solution: Solution, path) -> None:
    Path(path).write_text(json.dumps(solution.to_dict(), indent=1, sort_keys=True) + "\n")
