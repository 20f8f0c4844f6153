from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tabkit.table_algebra import NotATableAlgebra, TableAlgebra, derive_bar, kappa, verify_table_axioms


def cyclic(n: int) -> TableAlgebra:
    labels = [f"g{k}" for k in range(n)]
    return TableAlgebra.group_ring(labels, lambda a, b: f"g{(int(a[1:]) + int(b[1:])) % n}", "g0")


def fibonacci() -> TableAlgebra:
    return TableAlgebra(["1", "t"], {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1},
                                     (1, 1): {0: 1, 1: 1}}, "1")


@given(st.integers(1, 7))
def test_cyclic_group_rings_pass(n):
    t = cyclic(n)
    rep = verify_table_axioms(t)
    assert rep.passed, rep.to_json()
    assert derive_bar(t) == [(-k) % n for k in range(n)]


def test_fibonacci_fusion_ring():
    rep = verify_table_axioms(fibonacci())
    assert rep.passed
    assert derive_bar(fibonacci()) == [0, 1]


def test_negative_constant_gives_t1_witness():
    t = TableAlgebra(["1", "b"], {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (1, 1): {0: -1}}, "1")
    rep = verify_table_axioms(t)
    r = rep["T1"]
    assert r.status == "fail"
    assert r.witness == ("b", "b", "1", -1)
    assert "negative" in r.detail


def test_bad_bar_gives_t2_witness():
    t = cyclic(3)
    t.bar = [0, 1, 1]
    rep = verify_table_axioms(t)
    assert rep["T2"].status == "fail" and rep["T2"].detail == "bar does not permute the basis"
    t = cyclic(4)
    t.bar = [0, 2, 3, 1]
    rep = verify_table_axioms(t)
    assert rep["T2"].witness == ("g1",) and rep["T2"].detail == "bar is not an involution"
    # the identity is an anti-automorphism of a commutative ring, but kappa breaks
    t = cyclic(3)
    t.bar = [0, 1, 2]
    rep = verify_table_axioms(t)
    assert rep["T2"].status == "pass" and rep["T3"].status == "fail"


def test_kappa_asymmetry_gives_t3_witness():
    t = TableAlgebra(["1", "x", "y"],
                     {(0, 0): {0: 1}, (0, 1): {1: 1}, (0, 2): {2: 1}, (1, 0): {1: 1}, (2, 0): {2: 1},
                      (1, 1): {0: 1, 2: 2}, (1, 2): {1: 1}, (2, 1): {1: 1}, (2, 2): {0: 1}},
                     "1", bar=[0, 1, 2])
    rep = verify_table_axioms(t)
    assert rep["T1"].status == "pass"
    assert rep["T3"].status == "fail"
    assert "kappa mismatch" in rep["T3"].detail


def test_derive_bar_failures():
    t = TableAlgebra(["1", "x"], {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (1, 1): {1: 1}}, "1")
    with pytest.raises(NotATableAlgebra, match="no basis element"):
        derive_bar(t)
    t = TableAlgebra(["1", "x"], {(0, 0): {0: 1}, (0, 1): {0: 1, 1: 1}, (1, 0): {1: 1},
                                  (1, 1): {0: 1}}, "1")
    with pytest.raises(NotATableAlgebra, match="several"):
        derive_bar(t)


def test_non_integer_constants_rejected():
    with pytest.raises(NotATableAlgebra):
        TableAlgebra(["1"], {(0, 0): {0: Fraction(1, 2)}}, "1")
    with pytest.raises(NotATableAlgebra):
        TableAlgebra(["1"], {(0, 0): {0: 0.5}}, "1")


def test_partial_algebra():
    t = TableAlgebra(["1", "x"], {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (1, 1): None},
                     "1", bar=[0, 1], complete=False)
    rep = verify_table_axioms(t)
    assert not rep.failed and rep.partial
    assert rep["T1"].status == "partial"
    assert rep.coverage["known"] == 3
    assert t.multiply({1: 1}, {1: 1}) is None


def test_kappa():
    t = fibonacci()
    x = t.multiply({1: 1}, {1: 1})
    assert kappa(t, "1", x) == 1 and kappa(t, 1, x) == 1
    with pytest.raises(KeyError):
        kappa(t, "z", x)


def test_json_round_trip():
    for t in (cyclic(4), fibonacci()):
        doc = t.to_json()
        back = TableAlgebra.from_json(doc)
        assert back.to_json() == doc
        assert verify_table_axioms(back).passed
