"""JSON spec files for trees, covers and inverse systems.

Tree spec::

    {"kind": "profile", "profile": {...}, "depth": 8, "ambient": false}
    {"kind": "nodes", "nodes": [[0], [0, 1], ...], "depth": 2}
    {"kind": "predicate", "predicate-id": "countable", "depth": 64}

Profiles are ``{"kind": "constant", "b": 2}``,
``{"kind": "eventually-periodic", "preperiod": [...], "period": [...]}``,
``{"kind": "block-schedule", "base": 4, "scale": 1, "values": [1, 2]}`` or
``{"kind": "explicit", "counts": [...]}``.

System spec::

    {"kind": "c2-tower", "depth": 12}
    {"kind": "cyclic-tower", "p": 2, "depth": 40}
    {"kind": "abelian-product", "levels": [[], [2], [2, 2]], "maps": [[[]], [[0], [1]]]}
    {"kind": "cayley-tower", "levels": [{"table": [[0]], "identity": 0}, ...], "maps": [[0, 0], ...]}

``maps[n]`` describes ``p_n : L_{n+1} -> L_n``: for abelian products the
image of each basis vector of ``L_{n+1}``, for Cayley towers the image of
every element index.

Canonical serialisation is ``json.dumps(obj, sort_keys=True, separators=(",", ":"))``.
"""
from __future__ import annotations

import json
from pathlib import Path

from .families import PREDICATES
from .profinite import (
    AbelianMap,
    AbelianProductGroup,
    CayleyGroup,
    CayleyMap,
    InverseSystem,
    SystemValidationError,
    c2_tower,
    cyclic_tower,
)
from .tree_core import BranchingProfile, TreeTruncation, TreeValidationError, build_tree


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _read(source) -> dict | list:
    if isinstance(source, (dict, list)):
        return source
    try:
        return json.loads(Path(source).read_text())
    except json.JSONDecodeError as exc:
        raise TreeValidationError(f"{source}: not valid JSON ({exc})") from None


def load_tree(source, depth: int | None = None) -> TreeTruncation:
    """Tree from a spec dict or JSON file; ``depth`` overrides the stored depth."""
    spec = _read(source)
    if not isinstance(spec, dict):
        raise TreeValidationError("tree spec must be a JSON object")
    kind = spec.get("kind")
    depth = int(depth if depth is not None else spec.get("depth", 0))
    ambient = bool(spec.get("ambient", False))
    if kind == "profile":
        return build_tree(BranchingProfile.from_dict(spec["profile"]), depth, ambient=ambient)
    if kind == "nodes":
        return build_tree(spec["nodes"], depth, ambient=ambient)
    if kind == "predicate":
        pid = spec.get("predicate-id")
        if pid not in PREDICATES:
            raise TreeValidationError(f"unknown predicate-id {pid!r}")
        return PREDICATES[pid](depth)
    raise TreeValidationError(f"unknown tree spec kind {kind!r}")


def tree_spec(tree: TreeTruncation) -> dict:
    if tree.spec is None:
        raise TreeValidationError(f"{tree!r} has no serialisable spec")
    return tree.spec


def load_cover(source) -> list[tuple[int, ...]]:
    """Cover file: a JSON list of symbol lists, or one node per line as digits / spaced symbols."""
    if isinstance(source, list):
        return [tuple(v) for v in source]
    text = Path(source).read_text().strip()
    if text.startswith("["):
        return [tuple(int(x) for x in v) for v in json.loads(text)]
    nodes = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line in ("-", "()"):
            nodes.append(())
        elif " " in line or "," in line:
            nodes.append(tuple(int(x) for x in line.replace(",", " ").split()))
        else:
            nodes.append(tuple(int(c) for c in line))
    return nodes


def load_system(source) -> InverseSystem:
    spec = _read(source)
    kind = spec.get("kind")
    try:
        if kind == "c2-tower":
            return c2_tower(int(spec["depth"]))
        if kind == "cyclic-tower":
            return cyclic_tower(int(spec.get("p", 2)), int(spec["depth"]))
        if kind == "abelian-product":
            levels = [AbelianProductGroup(o) for o in spec["levels"]]
            maps = [AbelianMap(m, levels[n + 1], levels[n]) for n, m in enumerate(spec["maps"])]
            return InverseSystem(levels, maps, name=spec.get("name", "abelian-product"))
        if kind == "cayley-tower":
            levels = [CayleyGroup(l["table"], l.get("identity", 0)) for l in spec["levels"]]
            maps = [CayleyMap(m) for m in spec["maps"]]
            return InverseSystem(levels, maps, name=spec.get("name", "cayley-tower"))
    except KeyError as exc:
        raise SystemValidationError(f"system spec is missing field {exc}") from None
    raise SystemValidationError(f"unknown system kind {kind!r}")


def system_spec(sys: InverseSystem) -> dict:
    if sys.spec is not None:
        return sys.spec
    if sys.kind == "abelian-product":
        return {
            "kind": "abelian-product",
            "name": sys.name,
            "levels": [list(g.orders) for g in sys.levels],
            "maps": [m.to_list() for m in sys.maps],
        }
    return {
        "kind": "cayley-tower",
        "name": sys.name,
        "levels": [g.to_dict() for g in sys.levels],
        "maps": [m.to_list() for m in sys.maps],
    }
