"""JSON encodings for posets, spreads and modules."""

from __future__ import annotations

import json
import re
from typing import Any

import numpy as np

from .poset import FinitePoset, GridPoset, PosetError, Spread, make_spread, materialize_spread
from .rep import ModuleError, PersModule


class FormatError(ValueError):
    pass


def _point(x) -> Any:
    if isinstance(x, (list, tuple)):
        return tuple(int(v) if isinstance(v, (int, np.integer)) else v for v in x)
    return x


def point_key(x) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(str(v) for v in x) + ")"
    return f"({x})"


_KEY = re.compile(r"^\((.*)\)$")


def parse_point_key(s: str, P: FinitePoset):
    m = _KEY.match(s.strip())
    if not m:
        raise FormatError(f"bad point key {s!r}")
    body = m.group(1).strip()
    if body in P:
        return body
    parts = [t.strip() for t in body.split(",")] if body else []
    try:
        pt = tuple(int(t) for t in parts)
    except ValueError:
        raise FormatError(f"bad point key {s!r}") from None
    if len(pt) == 1 and pt[0] in P:
        return pt[0]
    if pt not in P:
        raise FormatError(f"point {s} is not in the poset")
    return pt


def poset_to_json(P: FinitePoset) -> dict:
    if isinstance(P, GridPoset):
        if P.is_standard():
            return {"kind": "grid", "sizes": list(P.sizes)}
        return {"kind": "grid", "axes": [list(a) for a in P.axes]}
    return {
        "kind": "finite",
        "elements": [list(x) if isinstance(x, tuple) else x for x in P.elements],
        "leq": [[i, j] for i, j in P.hasse_idx],
    }


def poset_from_json(d: dict) -> FinitePoset:
    if not isinstance(d, dict) or "kind" not in d:
        raise FormatError("poset JSON needs a 'kind'")
    try:
        if d["kind"] == "grid":
            if "axes" in d:
                return GridPoset(d["axes"])
            return GridPoset.from_sizes([int(n) for n in d["sizes"]])
        if d["kind"] == "finite":
            elems = [_point(x) for x in d["elements"]]
            rel = [(elems[int(i)], elems[int(j)]) for i, j in d.get("leq", [])]
            return FinitePoset(elems, rel)
    except (KeyError, TypeError, IndexError) as e:
        raise FormatError(f"bad poset JSON: {e}") from None
    raise FormatError(f"unknown poset kind {d['kind']!r}")


def spread_to_json(s: Spread) -> dict:
    return s.describe()


def spread_from_json(d: dict, P: FinitePoset) -> Spread:
    if not isinstance(d, dict):
        raise FormatError("spread JSON must be an object")
    try:
        if "support" in d:
            return make_spread(P, [_point(x) for x in d["support"]])
        A = [_point(x) for x in d["A"]]
        B = d.get("B", "inf")
        return materialize_spread(P, A, None if B == "inf" else [_point(x) for x in B])
    except KeyError as e:
        raise FormatError(f"spread JSON missing {e}") from None


def module_to_json(M: PersModule) -> dict:
    P = M.poset
    dims = {point_key(x): int(M.dims[i]) for i, x in enumerate(P.elements)}
    maps = {}
    for (i, j) in P.hasse_idx:
        if M.dims[i] and M.dims[j]:
            maps[f"{point_key(P.elements[i])}->{point_key(P.elements[j])}"] = M.maps[(i, j)].tolist()
    return {"poset": poset_to_json(P), "prime": int(M.p), "dims": dims, "maps": maps}


def module_from_json(d: dict, P: FinitePoset | None = None, p: int | None = None) -> PersModule:
    if not isinstance(d, dict) or "dims" not in d:
        raise FormatError("module JSON needs 'dims'")
    if P is None:
        if "poset" not in d:
            raise FormatError("module JSON needs a 'poset' when none is supplied")
        P = poset_from_json(d["poset"])
    if p is None:
        p = d.get("prime")
    dims = {}
    for k, v in d["dims"].items():
        dims[parse_point_key(k, P)] = int(v)
    maps = {}
    for k, v in d.get("maps", {}).items():
        if "->" not in k:
            raise FormatError(f"bad map key {k!r}")
        a, b = k.split("->", 1)
        x, y = parse_point_key(a, P), parse_point_key(b, P)
        if not P.is_cover(x, y):
            raise FormatError(f"map {k} is not on a cover relation")
        maps[(x, y)] = np.asarray(v, dtype=np.int64)
    try:
        return PersModule.from_points(P, dims, maps, p=p)
    except (ModuleError, PosetError) as e:
        raise FormatError(str(e)) from None


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def load_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise FormatError(f"{path} is not valid JSON: {e.msg}") from None
