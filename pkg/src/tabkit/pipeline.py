"""
The standard chain table -> cells -> a-function -> gamma -> asymptotic algebra.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .asymptotic import AsymptoticAlgebra, build_asymptotic
from .cells import (AFunctionTable, CellDecomposition, GammaTable, StructureTable,
                    a_function, cell_decomposition, gamma_table)

__all__ = ["Analysis", "analyze", "idempotent_basis_elements"]


@dataclass
class Analysis:
    table: StructureTable
    cells: CellDecomposition
    afunc: AFunctionTable
    gamma: GammaTable
    distinguished: list[int]
    undecided: list[int]
    asym: AsymptoticAlgebra
    inverse: Optional[list[int]]

    def two_sided_cell(self, label: str) -> int:
        return self.cells.cell_of["two_sided"][self.table.index[label]]


def idempotent_basis_elements(gamma: GammaTable, star: Optional[Sequence[int]]):
    """Basis elements with t_d t_d = t_d and d* = d (certified gamma only).

    For a table without Hecke data this stands in for the distinguished
    involutions. Returns (members, undecided).
    """
    members, undecided = [], []
    for d in range(len(gamma.table)):
        if star is not None and star[d] != d:
            continue
        p = gamma.product(d, d)
        if p is None:
            undecided.append(d)
        elif p == {d: 1}:
            members.append(d)
    return members, undecided


def analyze(table: StructureTable, distinguished: Optional[Sequence[int]] = None) -> Analysis:
    cells = cell_decomposition(table)
    afunc = a_function(table, cells)
    gamma = gamma_table(table, afunc)
    undecided: list[int] = []
    if distinguished is None:
        if hasattr(table, "kl"):
            from .hecke import distinguished_involutions
            distinguished, undecided = distinguished_involutions(table, afunc)
        else:
            distinguished, undecided = idempotent_basis_elements(gamma, table.star)
    asym = build_asymptotic(gamma, cells, distinguished)
    return Analysis(table, cells, afunc, gamma, list(distinguished), list(undecided), asym,
                    None if table.star is None else list(table.star))
