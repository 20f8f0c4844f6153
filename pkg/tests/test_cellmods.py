import itertools

import pytest

from tabkit.cellmods import (GammaRepresentation, ModuleError, NonSplitError, cell_module,
                             cell_module_from_basis, check_hecke_relations, compare_modules,
                             e_bimodule, gamma_simples, parse_field, specialize_module,
                             standard_module, trivial_representation, w_prime_and_theta)
from tabkit.laurent import GF, QQ, ONE, ZERO, v
from tabkit.table_algebra import TableAlgebra

SETTINGS = [(QQ, 1), (QQ, 2), (GF(5), 2)]


def cyclic(n):
    labels = [f"g{k}" for k in range(n)]
    return TableAlgebra.group_ring(labels, lambda a, b: f"g{(int(a[1:]) + int(b[1:])) % n}", "g0")


def lam_cells(bundle):
    return [(lam, bundle.cell_of_lam(lam)) for lam in bundle.datum.lambdas]


def test_s3_cell_module_dimensions(s3):
    dims = {lam: cell_module(s3.datum, s3.table, lam).dim for lam in s3.datum.lambdas}
    assert dims == {"c0": 1, "c1": 2, "c2": 1}


def test_s3_cell_module_matrices(s3):
    m = cell_module(s3.datum, s3.table, "c1")
    assert m.basis == [("s1", "s1"), ("s2", "s1")]
    assert m.partial == []
    vv = v + ~v
    assert m.action[s3.idx("s1")] == [[vv, ONE], [ZERO, ZERO]]
    assert m.action[s3.idx("s2")] == [[ZERO, ZERO], [ONE, vv]]
    assert m.action[s3.idx("s1*s2*s1")] == [[ZERO, ZERO], [ZERO, ZERO]]
    top = cell_module(s3.datum, s3.table, "c0")
    assert top.action[s3.idx("e")] == [[ONE]]
    assert all(top.action[s3.idx(x)] == [[ZERO]] for x in ("s1", "s2", "s1*s2*s1"))


def test_cell_module_is_a_representation(s3):
    t = s3.table
    for lam in s3.datum.lambdas:
        m = cell_module(s3.datum, t, lam)
        n = m.dim
        for a, b in itertools.product(range(len(t)), repeat=2):
            prod = [[ZERO] * n for _ in range(n)]
            for k, c in t.row(a, b).items():
                mk = m.action[k]
                prod = [[prod[i][j] + c * mk[i][j] for j in range(n)] for i in range(n)]
            ma, mb = m.action[a], m.action[b]
            direct = [[sum((ma[i][l] * mb[l][j] for l in range(n)), ZERO) for j in range(n)]
                      for i in range(n)]
            assert direct == prod, (lam, t.labels[a], t.labels[b])


def test_cell_module_matches_left_cell_module(s3, s4):
    for b in (s3, s4):
        d, t, cells = b.datum, b.table, b.an.cells
        seen = 0
        for lc, members in enumerate(cells.cells["left"]):
            labels = [t.labels[w] for w in members]
            lam = d.lambda_of(labels[0])
            cols = {d.coords[l][3] for l in labels}
            assert len(cols) == 1
            m1 = cell_module(d, t, lam)
            m2 = cell_module_from_basis(t, cells, lc)
            where = {(d.coords[l][1], d.coords[l][2]): k for k, l in enumerate(labels)}
            corr = {k: where[key] for k, key in enumerate(m1.basis)}
            assert compare_modules(m1, m2, corr) == []
            seen += 1
        assert seen == len(cells.cells["left"])


@pytest.mark.parametrize("lam", ["c0", "c1", "c2"])
def test_theta_intertwines(s3, lam):
    cell = s3.cell_of_lam(lam)
    wprime, wmod, rep = w_prime_and_theta(s3.datum, s3.table, s3.an.asym, lam, cell)
    assert rep["tested"] == len(s3.table)
    assert rep["mismatch"] == [] and rep["right_ok"]
    assert wprime.action == wmod.action


@pytest.mark.parametrize("lam", ["c0", "c1", "c2"])
def test_e_bimodule_commutation(s3, lam):
    e = e_bimodule(s3.datum, s3.table, s3.an.gamma, lam)
    assert e.commutation["failures"] == 0 and e.commutation["right_mismatch"] == []
    # one matrix identity per (a, Y) covers every X in the cell
    n = len(s3.datum.cell(lam))
    assert e.commutation["tested"] == len(s3.table) * n
    assert len(e.right) == len(e.right_gamma) == n
    assert e.decomposition_ok


@pytest.mark.parametrize("lam", ["c0", "c1", "c2"])
@pytest.mark.parametrize("field,r", SETTINGS)
def test_standard_modules_agree(s3, lam, field, r):
    gam = s3.datum.gamma[lam]
    chars = gamma_simples(gam, field)
    assert len(chars) == 1
    for n in chars:
        sm = standard_module(s3.datum, s3.table, s3.an.asym, lam, s3.cell_of_lam(lam), n,
                             field, r)
        assert sm.equal and sm.mismatch == []
        assert len(sm.tensor) == len(s3.table)
        assert check_hecke_relations(s3.table, sm.tensor, field, field(r)) == []


@pytest.mark.parametrize("field,r", SETTINGS)
def test_specialized_cell_modules_satisfy_relations(s3, field, r):
    for lam in s3.datum.lambdas:
        m = specialize_module(cell_module(s3.datum, s3.table, lam), field, r)
        assert check_hecke_relations(s3.table, m.action, field, m.r) == []


def test_relation_check_catches_a_wrong_matrix(s3):
    f = QQ
    m = specialize_module(cell_module(s3.datum, s3.table, "c1"), f, 1)
    bad = dict(m.action)
    bad[s3.idx("s1")] = [[f(2), f(0)], [f(0), f(0)]]
    assert check_hecke_relations(s3.table, bad, f, f(1))


def test_s4_standard_modules(s4):
    f = GF(5)
    for lam in s4.datum.lambdas:
        n = trivial_representation(s4.datum.gamma[lam], f)
        sm = standard_module(s4.datum, s4.table, s4.an.asym, lam, s4.cell_of_lam(lam), n, f, 2)
        assert sm.equal
        assert check_hecke_relations(s4.table, sm.tensor, f, f(2)) == []


def test_gamma_simples_cyclic():
    reps = gamma_simples(cyclic(2), QQ)
    assert sorted(r.matrices["g1"][0][0].to_json() for r in reps) == ["-1", "1"]
    reps = gamma_simples(cyclic(3), GF(7))
    assert {r.matrices["g1"][0][0] for r in reps} == {GF(7)(1), GF(7)(2), GF(7)(4)}
    for r in reps:
        assert r.check(cyclic(3)) == []
    with pytest.raises(NonSplitError, match="supply N manually"):
        gamma_simples(cyclic(3), QQ)


def test_gamma_representation_validation():
    f = GF(7)
    good = GammaRepresentation(f, 1, {"g0": [[f(1)]], "g1": [[f(2)]], "g2": [[f(4)]]})
    assert good.check(cyclic(3)) == []
    assert GammaRepresentation.from_json(good.to_json()).matrices == good.matrices
    bad = GammaRepresentation(f, 1, {"g0": [[f(1)]], "g1": [[f(3)]], "g2": [[f(4)]]})
    assert bad.check(cyclic(3))
    assert GammaRepresentation(f, 1, {"g0": [[f(1)]]}).check(cyclic(3))


def test_standard_module_rejects_bad_n(s3):
    f = QQ
    n = GammaRepresentation(f, 1, {"s1": [[f(2)]]})
    with pytest.raises(ModuleError):
        standard_module(s3.datum, s3.table, s3.an.asym, "c1", s3.cell_of_lam("c1"), n, f, 1)


def test_parse_field():
    assert parse_field("QQ").tag == "QQ"
    assert parse_field("GF(5)").tag == "GF(5)"
    with pytest.raises(ValueError):
        parse_field("GF(6)")
    with pytest.raises(ValueError):
        parse_field("RR")


def test_affine_standard_module_bottom_of_order(affine):
    f = GF(7)
    lam = "(1,1,1)"
    gens = [i for i in range(len(affine.table)) if affine.table.lengths[i] <= 1]
    chars = gamma_simples(affine.datum.gamma[lam], f)
    assert len(chars) == 3
    for n in chars:
        sm = standard_module(affine.datum, affine.table, affine.an.asym, lam,
                             affine.cell_of_lam(lam), n, f, 2, gens)
        assert sm.equal and len(sm.tensor) == len(gens)
