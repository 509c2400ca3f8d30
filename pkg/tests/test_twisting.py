import pytest

from derived_kernel.cech import LaurentTruncation
from derived_kernel.dgmodules import (
    DegreeWindow,
    direct_sum,
    free_module,
    structure_sheaf,
)
from derived_kernel.errors import PreconditionError, SearchExhausted
from derived_kernel.strong import classify_map
from derived_kernel.twisting import (
    global_generation_search,
    is_ample,
    is_globally_generated,
    twist_isomorphism_check,
    twist_search,
    uniform_twist_search,
)

import corpus

T = LaurentTruncation(2)


def test_ampleness_model_rule():
    for dga in (corpus.p1(), corpus.double_point()):
        assert is_ample(1, dga).verdict == "ample"
        assert is_ample(0, dga).verdict == "not_ample"
        assert is_ample(-1, dga).verdict == "not_ample"
        assert is_ample(3, dga).verdict == "ample"


def test_twist_iso_structure_sheaf():
    p1 = corpus.p1()
    row = twist_isomorphism_check(structure_sheaf(p1), 0, 0, T)
    assert row.iso and row.stable
    assert row.lhs_dim == row.rhs_dim == 1


def test_twist_iso_worked_example():
    # O + shift(O(-2), 1) on P^1: spurious H^1(pi_1) at n=0, gone at n=1
    p1 = corpus.p1()
    m = direct_sum([structure_sheaf(p1), free_module(p1, [-2]).shift(1)])
    row0 = twist_isomorphism_check(m, 0, 0, T)
    assert not row0.iso
    assert (row0.lhs_dim, row0.rhs_dim) == (2, 1)
    row1 = twist_isomorphism_check(m, 0, 1, T)
    assert row1.iso and row1.stable


def test_twist_search_finds_n0_equal_1():
    p1 = corpus.p1()
    m = direct_sum([structure_sheaf(p1), free_module(p1, [-2]).shift(1)])
    rep = twist_search(m, 0, ceiling=3, trunc=T)
    assert rep.n0 == 1
    # monotone: once iso, always iso up to the ceiling
    seen_iso = False
    for row in rep.rows:
        if seen_iso:
            assert row.iso
        seen_iso = seen_iso or (row.iso and row.n >= rep.n0)


def test_twist_search_o5_on_p2():
    p2 = corpus.p2()
    rep = twist_search(free_module(p2, [5]), 0, ceiling=1, trunc=T)
    assert rep.n0 == 0


def test_twist_search_shifted_on_p2():
    # for O(-3)[1] the spectrum-level interference H^2(O(n-3)) sits in
    # total degree -1 and dies exactly when n - 3 >= -2
    p2 = corpus.p2()
    m = free_module(p2, [-3]).shift(1)
    rep = twist_search(m, -1, ceiling=2, trunc=T)
    assert rep.n0 == 1
    assert not rep.rows[0].iso
    # at the shifted homotopy index itself both sides vanish throughout
    rep1 = twist_search(m, 1, ceiling=2, trunc=T)
    assert rep1.n0 == 0


def test_uniform_twist_search():
    p1 = corpus.p1()
    m = direct_sum([structure_sheaf(p1), free_module(p1, [-2]).shift(1)])
    n0, reports = uniform_twist_search(m, range(0, 2), ceiling=3, trunc=T)
    assert n0 == 1
    o = structure_sheaf(p1)
    n0o, _ = uniform_twist_search(o, ceiling=2, trunc=T)
    assert n0o == 0
    z = free_module(p1, [])
    n0z, _ = uniform_twist_search(z, ceiling=2, trunc=T)
    assert n0z == 0


def test_globally_generated_structure_sheaf():
    p1 = corpus.p1()
    rep = is_globally_generated(structure_sheaf(p1), T)
    assert rep.generated and rep.sections == 1
    assert classify_map(rep.witness, DegreeWindow(-1, 4, 0, 1), T).epi


def test_not_generated_negative_twist():
    p1 = corpus.p1()
    rep = is_globally_generated(free_module(p1, [-1]), T)
    assert not rep.generated


def test_generated_sum_with_three_sections():
    p1 = corpus.p1()
    m = free_module(p1, [0, 1])
    rep = is_globally_generated(m, T)
    assert rep.generated and rep.sections == 3


def test_generation_search_o_minus_1():
    p1 = corpus.p1()
    rep = global_generation_search(free_module(p1, [-1]), ceiling=3, trunc=T)
    assert rep.n0 == 1
    rep = global_generation_search(structure_sheaf(p1), ceiling=2, trunc=T)
    assert rep.n0 == 0


def test_generation_search_kernel_bundle_p2():
    p2 = corpus.p2()
    omega = corpus.cotangent_p2(p2)
    rep = global_generation_search(omega, ceiling=4, trunc=T)
    assert rep.n0 == 2
    # cross-check: the found witness is independently an epi
    tw = omega.twist(rep.n0)
    w = DegreeWindow(-3, 4, -1, 2)
    assert classify_map(rep.witness, w, T, check_strong=False).epi


def test_generation_monotone_on_corpus():
    p1 = corpus.p1()
    for m in (free_module(p1, [-1]), free_module(p1, [0, -2])):
        results = []
        for n in range(0, 4):
            out = is_globally_generated(m.twist(n), T, check_strong=False)
            results.append(out.generated)
        for a, b in zip(results, results[1:]):
            assert (not a) or b  # once generated, stays generated


def test_generation_requires_strong():
    dbl = corpus.double_point()
    m = direct_sum([structure_sheaf(dbl), structure_sheaf(dbl).shift(1)])
    with pytest.raises(PreconditionError):
        is_globally_generated(m, T)


def test_search_ceiling_exhausted():
    p1 = corpus.p1()
    m = direct_sum([structure_sheaf(p1), free_module(p1, [-2]).shift(1)])
    with pytest.raises(SearchExhausted):
        twist_search(m, 0, ceiling=0, trunc=T)
