from __future__ import annotations

import json
import os
from typing import Any, Mapping

from ..utils import canonical_json, sha256_digest
from .rule import COLOR_NAMES, SchemaError, SubdivisionRule, build_rule


TOP_LEVEL_FIELDS: tuple[str, ...] = ("m", "d", "vertices", "edges", "tiles", "curve")
DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data")


def _require(data: Mapping[str, Any], key: str, kind, where: str):
    if key not in data:
        raise SchemaError(f"missing required field '{key}' in {where}")
    value = data[key]
    if kind is int and isinstance(value, bool):
        raise SchemaError(f"field '{key}' in {where} must be an integer")
    if not isinstance(value, kind):
        name = getattr(kind, "__name__", str(kind))
        raise SchemaError(f"field '{key}' in {where} must be of type {name}")
    return value


def _cell_id(value, where: str):
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise SchemaError(f"cell id {value!r} in {where} must be an integer or string")
    return value


def _color(value, where: str) -> int:
    if value not in COLOR_NAMES:
        raise SchemaError(f"{where} must be one of {COLOR_NAMES}, got {value!r}")
    return COLOR_NAMES.index(value)


def parse_rule(document: str | bytes | Mapping[str, Any]) -> SubdivisionRule:
    """Decode a rule document; ids are renumbered densely, nothing is validated."""
    if isinstance(document, (str, bytes)):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"rule document is not valid JSON: {exc}") from None
    else:
        data = document
    if not isinstance(data, Mapping):
        raise SchemaError("rule document must be a JSON object")

    m = _require(data, "m", int, "rule")
    d = _require(data, "d", int, "rule")
    raw_vertices = _require(data, "vertices", list, "rule")
    raw_edges = _require(data, "edges", list, "rule")
    raw_tiles = _require(data, "tiles", list, "rule")
    raw_curve = _require(data, "curve", list, "rule")

    labels = {}
    for k, entry in enumerate(raw_vertices):
        where = f"vertices[{k}]"
        if not isinstance(entry, Mapping):
            raise SchemaError(f"{where} must be an object")
        vid = _cell_id(_require(entry, "id", (int, str), where), where)
        label = _require(entry, "label", int, where)
        if not 0 <= label < m:
            raise SchemaError(f"{where}.label {label} outside 0..{m - 1}")
        if vid in labels:
            raise SchemaError(f"duplicate vertex id {vid!r}")
        labels[vid] = label

    edges = {}
    for k, entry in enumerate(raw_edges):
        where = f"edges[{k}]"
        if not isinstance(entry, Mapping):
            raise SchemaError(f"{where} must be an object")
        eid = _cell_id(_require(entry, "id", (int, str), where), where)
        ends = _require(entry, "ends", list, where)
        if len(ends) != 2:
            raise SchemaError(f"{where}.ends must list exactly two vertices")
        for v in ends:
            if _cell_id(v, where) not in labels:
                raise SchemaError(f"{where}.ends references unknown vertex {v!r}")
        image = _require(entry, "image", int, where)
        if not 0 <= image < m:
            raise SchemaError(f"{where}.image {image} outside 0..{m - 1}")
        rev = _require(entry, "reversed", bool, where)
        if eid in edges:
            raise SchemaError(f"duplicate edge id {eid!r}")
        edges[eid] = (tuple(ends), image, rev)

    tiles = []
    for k, entry in enumerate(raw_tiles):
        where = f"tiles[{k}]"
        if not isinstance(entry, Mapping):
            raise SchemaError(f"{where} must be an object")
        color = _color(_require(entry, "color", str, where), f"{where}.color")
        location = _color(_require(entry, "location", str, where), f"{where}.location")
        tv = _require(entry, "vertices", list, where)
        te = _require(entry, "edges", list, where)
        for v in tv:
            if _cell_id(v, where) not in labels:
                raise SchemaError(f"{where}.vertices references unknown vertex {v!r}")
        for e in te:
            if _cell_id(e, where) not in edges:
                raise SchemaError(f"{where}.edges references unknown edge {e!r}")
        tiles.append((color, location, tuple(tv), tuple(te)))

    curve = []
    for k, entry in enumerate(raw_curve):
        where = f"curve[{k}]"
        if not isinstance(entry, Mapping):
            raise SchemaError(f"{where} must be an object")
        cv = _require(entry, "vertices", list, where)
        ce = _require(entry, "edges", list, where)
        for v in cv:
            if _cell_id(v, where) not in labels:
                raise SchemaError(f"{where}.vertices references unknown vertex {v!r}")
        for e in ce:
            if _cell_id(e, where) not in edges:
                raise SchemaError(f"{where}.edges references unknown edge {e!r}")
        curve.append((tuple(cv), tuple(ce)))

    return build_rule(m, d, labels, edges, tiles, curve)


def rule_to_dict(rule: SubdivisionRule) -> dict[str, Any]:
    return {
        "m": rule.m,
        "d": rule.d,
        "vertices": [
            {"id": v, "label": label} for v, label in enumerate(rule.vertex_labels)
        ],
        "edges": [
            {
                "id": i,
                "ends": list(e.ends),
                "image": e.image,
                "reversed": e.reversed,
            }
            for i, e in enumerate(rule.edges)
        ],
        "tiles": [
            {
                "color": COLOR_NAMES[t.color],
                "location": COLOR_NAMES[t.location],
                "vertices": list(t.vertices),
                "edges": list(t.edges),
            }
            for t in rule.tiles
        ],
        "curve": [
            {"vertices": list(c.vertices), "edges": list(c.edges)} for c in rule.curve
        ],
    }


def save_rule(rule: SubdivisionRule) -> str:
    """Canonical document: sorted keys, dense ids, trailing newline."""
    return canonical_json(rule_to_dict(rule))


def rule_digest(rule: SubdivisionRule) -> str:
    return sha256_digest(save_rule(rule))


def load_rule(path: str) -> SubdivisionRule:
    with open(path, "r", encoding="utf-8") as f:
        return parse_rule(f.read())


def dump_rule(rule: SubdivisionRule, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(save_rule(rule))


def bundled_rule_path(name: str) -> str:
    from ..config import BUNDLED_RULES

    if name not in BUNDLED_RULES:
        raise KeyError(
            f"unknown bundled rule '{name}', available: {', '.join(BUNDLED_RULES)}"
        )
    return os.path.join(DATA_DIR, BUNDLED_RULES[name])


def load_bundled_rule(name: str) -> SubdivisionRule:
    return load_rule(bundled_rule_path(name))


def resolve_rule(name_or_path: str) -> SubdivisionRule:
    """Load a rule file, falling back to the bundled rule registry."""
    from ..config import BUNDLED_RULES

    if not os.path.exists(name_or_path):
        stem = os.path.basename(name_or_path)
        if stem.endswith(".rule"):
            stem = stem[: -len(".rule")]
        if stem in BUNDLED_RULES:
            return load_bundled_rule(stem)
    return load_rule(name_or_path)
