"""Library-level tour: KL basis of S4, its cells, gamma and a standard module."""

from tabkit.cellmods import check_hecke_relations, gamma_simples, standard_module
from tabkit.coxeter import CoxeterGroup, CoxeterPresentation
from tabkit.hecke import kl_structure_constants
from tabkit.laurent import GF
from tabkit.pipeline import analyze
from tabkit.tabular import hecke_datum, verify_tabular_axioms

group = CoxeterGroup(CoxeterPresentation.type_A(3))
table = kl_structure_constants(group)
an = analyze(table)

w = group.parse("s2*s1*s3*s2")
print("P_{e,w} as [q-degree, coefficient] pairs:", table.kl.P(group.identity(), w).to_pairs())
for cell in an.cells.label_cells("two_sided"):
    a = an.afunc.values[table.index[cell[0]]]
    print(f"a = {a}: {len(cell)} elements")

datum = hecke_datum(table, an.cells, an.afunc, an.gamma)
report = verify_tabular_axioms(datum, table, afunc=an.afunc, cells=an.cells)
print("A1-A5:", ", ".join(f"{r.name} {r.status}" for r in report.results))

field = GF(5)
for lam in datum.lambdas:
    cell = an.two_sided_cell(datum.cell(lam)[0])
    (n,) = gamma_simples(datum.gamma[lam], field)
    sm = standard_module(datum, table, an.asym, lam, cell, n, field, 2)
    ok = not check_hecke_relations(table, sm.tensor, field, field(2))
    print(f"{lam}: dim {sm.dim}, constructions agree {sm.equal}, relations hold {ok}")
