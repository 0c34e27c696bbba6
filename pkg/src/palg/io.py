"""JSON formats for algebras, dilation descriptors and representations.

Algebra files::

    {"kind": "full_set_algebra", "dim": 2, "base": 2, "unit": "0xf"}
    {"kind": "abstract", "dim": 1, "atoms": 2,
     "cyl": {"{0}": [0, 3, 3, 3]}, "subst": {"[0]": [0, 1, 2, 1]}}

Abstract tables are indexed by element mask.  With ``"mode": "atoms"`` the
tables list images of the atoms only and are extended additively.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .algebra import BAO, FiniteBAO, FullSetAlgebra, Operator
from .core import parse_mask
from .errors import MalformedInput


def _parse_gamma_key(key: str) -> tuple[int, ...]:
    body = key.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise MalformedInput(f"cylindrifier key {key!r} must look like {{0,1}}")
    inner = body[1:-1].strip()
    try:
        return tuple(sorted(int(v) for v in inner.split(","))) if inner else ()
    except ValueError:
        raise MalformedInput(f"bad cylindrifier key {key!r}") from None


def _parse_tau_key(key: str) -> tuple[int, ...]:
    try:
        val = json.loads(key)
    except json.JSONDecodeError:
        raise MalformedInput(f"substitution key {key!r} must be an entry array like [1,0]") from None
    if not isinstance(val, list):
        raise MalformedInput(f"substitution key {key!r} must be an entry array")
    return tuple(int(v) for v in val)


def _table(values):
    return [parse_mask(v) for v in values]


def algebra_from_json(obj) -> BAO:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise MalformedInput('algebra files need a "kind" field')
    kind = obj["kind"]
    try:
        if kind == "full_set_algebra":
            unit = obj.get("unit")
            return FullSetAlgebra.of(int(obj["dim"]), int(obj["base"]),
                                     None if unit is None else parse_mask(unit))
        if kind == "abstract":
            dim, n = int(obj["dim"]), int(obj["atoms"])
            cyl = {_parse_gamma_key(k): _table(v) for k, v in obj.get("cyl", {}).items()}
            sub = {_parse_tau_key(k): _table(v) for k, v in obj.get("subst", {}).items()}
            meta = {"name": obj["name"]} if "name" in obj else {}
            if obj.get("mode", "tables") == "atoms":
                return FiniteBAO.from_atom_images(dim, n, cyl, sub, meta=meta)
            return FiniteBAO(dim, n, cyl, sub, meta=meta)
    except KeyError as exc:
        raise MalformedInput(f"algebra file is missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, MalformedInput):
            raise
        raise MalformedInput(f"malformed algebra file: {exc}") from None
    raise MalformedInput(f"unknown algebra kind {kind!r}")


def algebra_to_json(A: BAO) -> dict:
    if isinstance(A, FullSetAlgebra):
        out = {"kind": "full_set_algebra", "dim": A.dim, "base": A.base}
        if A.relativized:
            out["unit"] = hex(A.unit)
        return out
    if isinstance(A, FiniteBAO):
        cyl, sub = {}, {}
        for op in A.operators():
            tab = [int(v) for v in A.table(op)]
            if op.kind == "c":
                cyl[op.arg.key()] = tab
            else:
                sub[json.dumps(op.arg.to_list(), separators=(",", ":"))] = tab
        out = {"kind": "abstract", "dim": A.dim, "atoms": A.atom_count, "cyl": cyl, "subst": sub}
        if "name" in A.meta:
            out["name"] = A.meta["name"]
        return out
    raise MalformedInput(f"cannot serialize {A!r}")


def read_json(path) -> object:
    p = Path(path)
    try:
        return json.loads(p.read_text())
    except FileNotFoundError:
        raise MalformedInput(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from None


def load_algebra(path) -> BAO:
    return algebra_from_json(read_json(path))


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=False) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def digest(path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def dilation_descriptor(ref: str, beta: int) -> dict:
    return {"algebra": ref, "beta": beta}


def operator_key(op: Operator) -> str:
    return op.key()
