import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from tabkit.coxeter import CoxeterGroup, CoxeterPresentation  # noqa: E402
from tabkit.hecke import KLBasis, kl_structure_constants  # noqa: E402
from tabkit.pipeline import analyze  # noqa: E402
from tabkit.tabular import hecke_datum  # noqa: E402

AFFINE_HORIZON = 8
AFFINE_LABELING = {"(3)": "s1*s2*s1", "(2,1)": "s1", "(1,1,1)": "e"}


class Bundle:
    """Group, table, analysis and natural datum of one Hecke algebra."""

    def __init__(self, group, table, labeling=None):
        self.group = group
        self.table = table
        self.kl = table.kl
        self.an = analyze(table)
        self.datum = hecke_datum(table, self.an.cells, self.an.afunc, self.an.gamma,
                                 labeling=labeling)

    def idx(self, label: str) -> int:
        return self.table.index[label]

    def lam_of(self, label: str) -> str:
        return self.datum.lambda_of(label)

    def cell_of_lam(self, lam: str) -> int:
        return self.an.two_sided_cell(self.datum.cell(lam)[0])


@pytest.fixture(scope="session")
def s3():
    g = CoxeterGroup(CoxeterPresentation.type_A(2))
    return Bundle(g, kl_structure_constants(g))


@pytest.fixture(scope="session")
def s4():
    g = CoxeterGroup(CoxeterPresentation.type_A(3))
    return Bundle(g, kl_structure_constants(g))


@pytest.fixture(scope="session")
def affine():
    g = CoxeterGroup(CoxeterPresentation.affine_A(3))
    kl = KLBasis(g, 2 * AFFINE_HORIZON)
    return Bundle(g, kl_structure_constants(g, AFFINE_HORIZON, kl=kl), AFFINE_LABELING)
