"""
Cell theory for based algebras given by (possibly partial) structure constants.

A :class:`StructureTable` records, for each ordered pair of basis labels, the
expansion of their product. Every pair is in one of three states:

* known: the row is stored; a label missing from the row has coefficient zero,
* known but escaping: as above for the labels present, but the product also
  has support outside the loaded labels (a horizon truncation),
* unknown: the product was not computed; nothing may be inferred from it.

From a table we build the left/right/two-sided preorder graphs, their
strongly connected components (the cells), the a-function and the leading
coefficients gamma.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

import networkx as nx

from .laurent import LaurentPoly, MINUS_INFINITY, ZERO

__all__ = [
    "StructureTable", "UnknownProduct", "CellDecomposition", "AFunctionTable",
    "GammaTable", "preorder_graphs", "cell_decomposition", "a_function",
    "gamma_table", "FLAVORS",
]

FLAVORS = ("left", "right", "two_sided")

Row = dict  # label index -> LaurentPoly


class UnknownProduct(LookupError):
    """A product needed by a computation is flagged unknown in the table."""


class StructureTable:
    """Sparse structure constants g_{x,y,z} over a list of basis labels."""

    def __init__(self, labels: list[str], rows: Optional[dict] = None, *,
                 unknown: Iterable[tuple[int, int]] = (),
                 escaping: Iterable[tuple[int, int]] = (),
                 unit: Optional[list[int]] = None,
                 lengths: Optional[list[int]] = None,
                 bound: Optional[int] = None,
                 star: Optional[list[int]] = None,
                 name: str = ""):
        self.labels = list(labels)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self.index) != len(self.labels):
            raise ValueError("duplicate basis labels")
        self._rows = {} if rows is None else {k: r for k, r in rows.items() if r}
        self._unknown = set(unknown)
        self._escaping = set(escaping)
        self.unit = list(unit) if unit is not None else []
        self.lengths = lengths
        self.bound = bound
        self.star = star
        self.name = name

    def __len__(self) -> int:
        return len(self.labels)

    # -- access ---------------------------------------------------------
    def row(self, i: int, j: int) -> Optional[Row]:
        """Expansion of b_i b_j, or None when the product is unknown."""
        if (i, j) in self._unknown:
            return None
        return self._rows.get((i, j), {})

    def is_known(self, i: int, j: int) -> bool:
        return (i, j) not in self._unknown

    def escapes(self, i: int, j: int) -> bool:
        return (i, j) in self._escaping

    def is_complete(self, i: int, j: int) -> bool:
        return self.is_known(i, j) and not self.escapes(i, j)

    def coefficient(self, i: int, j: int, k: int) -> Optional[LaurentPoly]:
        r = self.row(i, j)
        if r is None:
            return None
        return r.get(k, ZERO)

    def unknown_pairs(self) -> set[tuple[int, int]]:
        return set(self._unknown)

    def escaping_pairs(self) -> set[tuple[int, int]]:
        return set(self._escaping)

    def known_pairs(self) -> Iterator[tuple[int, int]]:
        n = len(self.labels)
        for i in range(n):
            for j in range(n):
                if (i, j) not in self._unknown:
                    yield i, j

    def nonzero_rows(self) -> Iterator[tuple[int, int, Row]]:
        """(i, j, row) for every known pair with a nonzero product."""
        for i, j in self.known_pairs():
            r = self.row(i, j)
            if r:
                yield i, j, r

    def is_finite_complete(self) -> bool:
        return not self._unknown and not self._escaping and self.bound is None

    def depth(self, k: int) -> Optional[int]:
        if self.bound is None or self.lengths is None:
            return None
        return self.bound - self.lengths[k]

    def coverage(self) -> dict:
        n = len(self.labels)
        total = n * n
        unknown = len(self._unknown)
        escaping = len(self._escaping)
        return {
            "pairs": total,
            "known": total - unknown,
            "complete": total - unknown - escaping,
            "escaping": escaping,
            "unknown": unknown,
            "known_fraction": (total - unknown) / total if total else 1.0,
        }

    # -- arithmetic on elements (dict label-index -> LaurentPoly) -------
    def multiply(self, a: dict, b: dict, *, allow_escape: bool = False) -> dict:
        out: dict[int, LaurentPoly] = {}
        for i, ca in a.items():
            for j, cb in b.items():
                r = self.row(i, j)
                if r is None:
                    raise UnknownProduct(f"{self.labels[i]} * {self.labels[j]} is unknown")
                if not allow_escape and self.escapes(i, j):
                    raise UnknownProduct(f"{self.labels[i]} * {self.labels[j]} leaves the horizon")
                cab = ca * cb
                for k, g in r.items():
                    val = out.get(k, ZERO) + cab * g
                    if val:
                        out[k] = val
                    else:
                        out.pop(k, None)
        return out

    def basis_element(self, label) -> dict:
        i = self.index[label] if isinstance(label, str) else label
        return {i: LaurentPoly.monomial(1, 0)}

    def unit_element(self) -> dict:
        return {i: LaurentPoly.monomial(1, 0) for i in self.unit}

    def check_unit(self) -> list[str]:
        """Problems with the declared unit decomposition (empty list when fine)."""
        problems = []
        unit = self.unit_element()
        for e in self.unit:
            for f in self.unit:
                r = self.row(e, f)
                if r is None:
                    continue
                expected = {e: LaurentPoly.monomial(1, 0)} if e == f else {}
                if r != expected:
                    problems.append(f"{self.labels[e]}*{self.labels[f]} is not "
                                    f"{'idempotent' if e == f else 'zero'}")
        for x in range(len(self.labels)):
            xe = {x: LaurentPoly.monomial(1, 0)}
            for side in ("left", "right"):
                try:
                    prod = self.multiply(unit, xe) if side == "left" else self.multiply(xe, unit)
                except UnknownProduct:
                    continue
                if prod != xe:
                    problems.append(f"unit does not act as identity on the {side} of "
                                    f"{self.labels[x]}")
        return problems

    def check_associativity(self, triples: Iterable[tuple[int, int, int]]) -> tuple[int, list]:
        """Check (xy)z = x(yz) on the given triples where all products are known."""
        tested = 0
        failures = []
        for x, y, z in triples:
            try:
                left = self.multiply(self.multiply({x: 1 * _ONE}, {y: _ONE}), {z: _ONE})
                right = self.multiply({x: _ONE}, self.multiply({y: _ONE}, {z: _ONE}))
            except UnknownProduct:
                continue
            tested += 1
            if left != right:
                failures.append((self.labels[x], self.labels[y], self.labels[z]))
        return tested, failures

    def restrict(self, keep: list[int], *, name: str = "") -> "StructureTable":
        """Table on a subset of labels, dropping the other coordinates of every product.

        Used for quotients by ideals spanned by the dropped labels.
        """
        new_index = {old: new for new, old in enumerate(keep)}
        rows = {}
        unknown = []
        escaping = []
        for a, i in enumerate(keep):
            for b, j in enumerate(keep):
                r = self.row(i, j)
                if r is None:
                    unknown.append((a, b))
                    continue
                if self.escapes(i, j):
                    escaping.append((a, b))
                nr = {new_index[k]: g for k, g in r.items() if k in new_index}
                if nr:
                    rows[(a, b)] = nr
        star = None
        if self.star is not None and all(self.star[i] in new_index for i in keep):
            star = [new_index[self.star[i]] for i in keep]
        return StructureTable(
            [self.labels[i] for i in keep], rows, unknown=unknown, escaping=escaping,
            unit=[new_index[u] for u in self.unit if u in new_index],
            lengths=None if self.lengths is None else [self.lengths[i] for i in keep],
            bound=self.bound, star=star, name=name or self.name)


_ONE = LaurentPoly.monomial(1, 0)


# -- preorders and cells ---------------------------------------------------

def preorder_graphs(table: StructureTable) -> dict:
    """Directed graphs with an edge X -> X' whenever X' <= X in the given flavor.

    Left: X' has nonzero coefficient in K X for some basis element K.
    Right: X' has nonzero coefficient in X K. Two-sided: union of both.
    The returned dict also carries ``uncertified``: labels that are a factor
    in some unknown product (their outgoing edges may be incomplete).
    """
    n = len(table)
    left = nx.DiGraph()
    right = nx.DiGraph()
    left.add_nodes_from(range(n))
    right.add_nodes_from(range(n))
    uncertified = set()
    for i in range(n):
        for j in range(n):
            r = table.row(i, j)
            if r is None:
                uncertified.add(i)
                uncertified.add(j)
                continue
            for k in r:
                left.add_edge(j, k)
                right.add_edge(i, k)
    both = nx.DiGraph()
    both.add_nodes_from(range(n))
    both.add_edges_from(left.edges())
    both.add_edges_from(right.edges())
    return {"left": left, "right": right, "two_sided": both, "uncertified": uncertified}


@dataclass
class CellDecomposition:
    """Per-flavor partition into cells, the strict order DAG between cells,
    and per-label certification flags."""
    labels: list[str]
    cells: dict[str, list[list[int]]]
    cell_of: dict[str, list[int]]
    order: dict[str, list[tuple[int, int]]]  # (lower cell, higher cell) covering-ish edges
    certified: list[bool]

    def cells_of(self, flavor: str) -> list[list[int]]:
        return self.cells[flavor]

    def same_cell(self, flavor: str, i: int, j: int) -> bool:
        return self.cell_of[flavor][i] == self.cell_of[flavor][j]

    def below(self, flavor: str, c: int) -> set[int]:
        """Cells strictly below cell c."""
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.cells[flavor])))
        g.add_edges_from((hi, lo) for lo, hi in self.order[flavor])
        return set(nx.descendants(g, c))

    def leq(self, flavor: str, c1: int, c2: int) -> bool:
        return c1 == c2 or c1 in self.below(flavor, c2)

    def label_cells(self, flavor: str) -> list[list[str]]:
        return [[self.labels[i] for i in c] for c in self.cells[flavor]]


def cell_decomposition(table: StructureTable, graphs: Optional[dict] = None, *,
                       margin: int = 1) -> CellDecomposition:
    """Strongly connected components of each preorder graph, in label order.

    Labels within ``margin`` of a horizon bound, or involved in unknown
    products, are marked uncertified.
    """
    if graphs is None:
        graphs = preorder_graphs(table)
    n = len(table)
    cells = {}
    cell_of = {}
    order = {}
    for flavor in FLAVORS:
        g = graphs[flavor]
        comps = [sorted(c) for c in nx.strongly_connected_components(g)]
        comps.sort(key=lambda c: c[0])
        which = [0] * n
        for ci, comp in enumerate(comps):
            for x in comp:
                which[x] = ci
        edges = set()
        for a, b in g.edges():
            ca, cb = which[a], which[b]
            if ca != cb:
                edges.add((cb, ca))  # cell of b is below cell of a
        cells[flavor] = comps
        cell_of[flavor] = which
        order[flavor] = sorted(edges)
    certified = []
    for x in range(n):
        ok = x not in graphs["uncertified"]
        d = table.depth(x)
        if d is not None and d < margin:
            ok = False
        certified.append(ok)
    return CellDecomposition(list(table.labels), cells, cell_of, order, certified)


# -- a-function and gamma ------------------------------------------------

@dataclass
class AFunctionTable:
    values: list  # int, or MINUS_INFINITY when no structure constant produces the label
    certified: list[bool]
    inconsistent_cells: list[int] = field(default_factory=list)

    def __getitem__(self, k: int):
        return self.values[k]

    def certified_value(self, k: int) -> Optional[int]:
        return self.values[k] if self.certified[k] else None


def a_function(table: StructureTable, cells: CellDecomposition, *,
               margin: int = 1) -> AFunctionTable:
    """a(z) = max deg g_{x,y,z} over known entries, with certification.

    A value is certified when it is attained by a known entry, every unknown
    product that could contribute has a factor more than ``margin`` longer
    than z (for truncated tables: z lies at least ``margin`` below the
    horizon), and it agrees with the other such values in its two-sided cell.
    """
    n = len(table)
    best = [MINUS_INFINITY] * n
    for i, j, r in table.nonzero_rows():
        for k, g in r.items():
            d = g.degree()
            if d > best[k]:
                best[k] = d
    unknown = table.unknown_pairs()
    if unknown and table.lengths is None:
        reach = None  # no way to bound unknown products: certify nothing
    elif unknown:
        reach = min(max(table.lengths[i], table.lengths[j]) for i, j in unknown)
    else:
        reach = float("inf")
    certified = []
    for k in range(n):
        ok = best[k] != MINUS_INFINITY
        d = table.depth(k)
        if d is not None and d < margin:
            ok = False
        if reach is None:
            ok = False
        elif unknown and reach - table.lengths[k] <= margin:
            ok = False
        certified.append(ok)
    inconsistent = []
    for ci, comp in enumerate(cells.cells["two_sided"]):
        vals = {best[k] for k in comp if certified[k]}
        if len(vals) > 1:
            inconsistent.append(ci)
            for k in comp:
                certified[k] = False
    return AFunctionTable(best, certified, inconsistent)


class GammaTable:
    """Integer leading coefficients gamma_{x,y,z} (coefficient of v^a(z) in g_{x,y,z}).

    Only nonzero entries are stored; ``get`` returns None when the value
    cannot be certified (unknown product or uncertified a(z)).
    """

    def __init__(self, table: StructureTable, afunc: AFunctionTable,
                 entries: dict, by_pair: dict):
        self.table = table
        self.afunc = afunc
        self.entries = entries
        self._by_pair = by_pair

    def get(self, i: int, j: int, k: int) -> Optional[int]:
        if not self.afunc.certified[k] or not self.table.is_known(i, j):
            return None
        return self.entries.get((i, j, k), 0)

    def product(self, i: int, j: int) -> Optional[dict[int, int]]:
        """t_i t_j when fully determined, else None."""
        if not self.table.is_complete(i, j):
            return None
        r = self.table.row(i, j)
        if any(not self.afunc.certified[k] for k in r):
            return None
        return dict(self._by_pair.get((i, j), {}))

    def nonzero(self) -> Iterator[tuple[tuple[int, int, int], int]]:
        return iter(self.entries.items())

    def __len__(self) -> int:
        return len(self.entries)


def gamma_table(table: StructureTable, afunc: AFunctionTable) -> GammaTable:
    entries = {}
    by_pair: dict = {}
    for i, j, r in table.nonzero_rows():
        for k, g in r.items():
            if not afunc.certified[k]:
                continue
            c = g.coefficient(afunc.values[k])
            if c:
                entries[(i, j, k)] = c
                by_pair.setdefault((i, j), {})[k] = c
    return GammaTable(table, afunc, entries, by_pair)
