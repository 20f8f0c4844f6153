"""
JSON file formats and deterministic emission.

Algebra files come in two kinds. ``{"kind": "hecke", ...}`` describes a Hecke
algebra by its group and horizon and is expanded on load. ``{"kind":
"constants", ...}`` lists sparse structure constants with polynomials as
sorted ``[exponent, coefficient]`` pairs, plus the unknown/escaping pair
lists. A constants file written from a Hecke algebra carries an ``origin``
descriptor so Hecke-specific data (traces, the natural datum) can be rebuilt.

:func:`emit` writes sorted keys and one list item per line for long lists,
so output is byte-stable and diffs line up with basis elements.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .cells import StructureTable
from .coxeter import CoxeterGroup, CoxeterPresentation
from .laurent import LaurentPoly

__all__ = [
    "FormatError", "LoadedAlgebra", "emit", "write_json", "read_json",
    "poly_to_json", "poly_from_json", "table_to_json", "table_from_json",
    "hecke_descriptor", "group_from_descriptor", "load_algebra", "algebra_from_json",
]

_COMPACT_WIDTH = 100


class FormatError(ValueError):
    """A JSON document does not match the expected layout."""


# -- emission -----------------------------------------------------------------

def _compact(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _emit(obj: Any, indent: int) -> str:
    pad = " " * indent
    inner = " " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        if indent and len(_compact(obj)) <= _COMPACT_WIDTH:
            return _compact(obj)
        parts = [f"{inner}{json.dumps(k)}: {_emit(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(obj, list):
        flat = _compact(obj)
        if len(flat) <= _COMPACT_WIDTH and (indent or not any(isinstance(x, dict) for x in obj)) \
                or not any(isinstance(x, (list, dict)) for x in obj):
            return flat
        parts = [inner + _emit(x, indent + 1) for x in obj]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    return _compact(obj)


def emit(doc: Any) -> str:
    """Deterministic JSON text with a trailing newline."""
    return _emit(doc, 0) + "\n"


def write_json(path: str | Path, doc: Any) -> None:
    Path(path).write_text(emit(doc), encoding="utf-8")


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from exc


# -- polynomials ------------------------------------------------------------------

def poly_to_json(p: LaurentPoly) -> list:
    return [list(t) for t in p.to_pairs()]


def poly_from_json(pairs: Any) -> LaurentPoly:
    if not isinstance(pairs, list) or not all(
            isinstance(t, list) and len(t) == 2 and all(isinstance(x, int) and not isinstance(x, bool)
                                                          for x in t) for t in pairs):
        raise FormatError(f"a polynomial must be a list of [exponent, coefficient] integer "
                          f"pairs, got {pairs!r}")
    exps = [e for e, _ in pairs]
    if len(set(exps)) != len(exps):
        raise FormatError(f"repeated exponent in polynomial {pairs!r}")
    return LaurentPoly.from_pairs([tuple(t) for t in pairs])


# -- structure tables -------------------------------------------------------------

def table_to_json(table: StructureTable, origin: Optional[dict] = None) -> dict:
    """Constants file for a table; rows sorted by label position."""
    labels = table.labels
    consts = []
    for i, j, row in table.nonzero_rows():
        for k in sorted(row):
            consts.append([labels[i], labels[j], labels[k], poly_to_json(row[k])])
    doc = {
        "kind": "constants",
        "labels": list(labels),
        "unit": [labels[u] for u in table.unit],
        "constants": consts,
        "unknown": [[labels[i], labels[j]] for i, j in sorted(table.unknown_pairs())],
        "escaping": [[labels[i], labels[j]] for i, j in sorted(table.escaping_pairs())],
    }
    if table.lengths is not None:
        doc["lengths"] = list(table.lengths)
    if table.bound is not None:
        doc["bound"] = table.bound
    if table.star is not None:
        doc["star"] = [labels[s] for s in table.star]
    if table.name:
        doc["name"] = table.name
    if origin is not None:
        doc["origin"] = origin
    return doc


def table_from_json(doc: dict) -> StructureTable:
    try:
        labels = list(doc["labels"])
        index = {lab: i for i, lab in enumerate(labels)}
        if len(index) != len(labels):
            raise FormatError("duplicate basis labels")

        def ix(lab: str) -> int:
            if lab not in index:
                raise FormatError(f"unknown basis label {lab!r}")
            return index[lab]

        rows: dict = {}
        for a, b, c, p in doc.get("constants", []):
            key = (ix(a), ix(b))
            row = rows.setdefault(key, {})
            k = ix(c)
            if k in row:
                raise FormatError(f"duplicate constant for {a}*{b} -> {c}")
            poly = poly_from_json(p)
            if poly:
                row[k] = poly
        unknown = [(ix(a), ix(b)) for a, b in doc.get("unknown", [])]
        escaping = [(ix(a), ix(b)) for a, b in doc.get("escaping", [])]
        star = [ix(s) for s in doc["star"]] if doc.get("star") is not None else None
        return StructureTable(labels, rows, unknown=unknown, escaping=escaping,
                              unit=[ix(u) for u in doc.get("unit", [])],
                              lengths=doc.get("lengths"), bound=doc.get("bound"),
                              star=star, name=doc.get("name", ""))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed constants file: {exc!r}") from exc


# -- Hecke descriptors ------------------------------------------------------------

def hecke_descriptor(family: str, n: int, *, extended: bool = True,
                     horizon: Optional[int] = None, m: Optional[int] = None,
                     product_bound: Optional[int] = None) -> dict:
    doc: dict = {"kind": "hecke", "family": family, "n": n}
    if family == "affA":
        doc["extended"] = extended
        doc["horizon"] = horizon
        if product_bound is not None:
            doc["product_bound"] = product_bound
    if family == "I":
        doc["m"] = m
    return doc


def group_from_descriptor(doc: dict) -> CoxeterGroup:
    family = doc.get("family")
    n = doc.get("n")
    if not isinstance(n, int) or n < 1:
        raise FormatError(f"descriptor needs a positive integer n, got {n!r}")
    if family == "A":
        pres = CoxeterPresentation.type_A(n)
    elif family == "B":
        pres = CoxeterPresentation.type_B(n)
    elif family == "I":
        m = doc.get("m")
        if not isinstance(m, int) or m < 2:
            raise FormatError("dihedral family needs m >= 2")
        pres = CoxeterPresentation.dihedral(m)
    elif family == "affA":
        if n < 2:
            raise FormatError("affine type A needs n >= 2")
        pres = CoxeterPresentation.affine_A(n, bool(doc.get("extended", True)))
    else:
        raise FormatError(f"unknown family {family!r} (expected A, B, I or affA)")
    return CoxeterGroup(pres)


@dataclass
class LoadedAlgebra:
    """A structure table plus the Hecke descriptor it came from, if any."""
    table: StructureTable
    origin: Optional[dict] = None
    source: dict = field(default_factory=dict)

    @property
    def is_hecke(self) -> bool:
        return hasattr(self.table, "kl")

    def hecke_table(self):
        """The table as a Hecke structure table, rebuilding it from ``origin``.

        A rebuilt table must carry the same labels and constants as the file.
        """
        if self.is_hecke:
            return self.table
        if self.origin is None:
            raise FormatError("this algebra file has no Hecke origin")
        rebuilt = build_hecke(self.origin)
        if table_to_json(rebuilt)["constants"] != table_to_json(self.table)["constants"] \
                or rebuilt.labels != self.table.labels:
            raise FormatError("the constants do not match the Hecke algebra named in 'origin'")
        return rebuilt


def build_hecke(doc: dict):
    from .hecke import kl_structure_constants
    group = group_from_descriptor(doc)
    horizon = doc.get("horizon")
    if group.affine and (not isinstance(horizon, int) or horizon < 0):
        raise FormatError("an affine descriptor needs a nonnegative integer horizon")
    table = kl_structure_constants(group, horizon if group.affine else None,
                                   doc.get("product_bound"))
    return table


def algebra_from_json(doc: Any) -> LoadedAlgebra:
    if not isinstance(doc, dict):
        raise FormatError("an algebra file must hold a JSON object")
    kind = doc.get("kind")
    if kind == "hecke":
        return LoadedAlgebra(build_hecke(doc), {k: v for k, v in doc.items()}, doc)
    if kind == "constants":
        return LoadedAlgebra(table_from_json(doc), doc.get("origin"), doc)
    raise FormatError(f"unknown algebra kind {kind!r} (expected 'hecke' or 'constants')")


def load_algebra(path: str | Path) -> LoadedAlgebra:
    return algebra_from_json(read_json(path))
