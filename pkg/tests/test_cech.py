from derived_kernel.cech import (
    LaurentTruncation,
    build_cech_double_complex,
    run_spectral_sequence,
    sections_homotopy,
    sheaf_cohomology,
    totalize,
)
from derived_kernel.dga import make_koszul_dga
from derived_kernel.dgmodules import (
    DegreeWindow,
    direct_sum,
    free_module,
    structure_sheaf,
)
from derived_kernel.presentations import extract_presentation, presented_free
from derived_kernel.spectral import DoubleComplex

from oracles import line_bundle_cohomology


def test_sheaf_cohomology_matches_monomial_oracle_p1():
    p1 = make_koszul_dga(1, [])
    for d in range(-5, 5):
        pres = presented_free(p1, [d])
        out = sheaf_cohomology(pres, 0, LaurentTruncation(abs(d) + 1))
        for p in range(0, 2):
            assert out.table[p] == line_bundle_cohomology(1, d, p), (d, p)
            assert out.stable[p]


def test_sheaf_cohomology_matches_monomial_oracle_p2():
    p2 = make_koszul_dga(2, [])
    for d in (-4, -3, -1, 0, 2, 3):
        pres = presented_free(p2, [d])
        out = sheaf_cohomology(pres, 0, LaurentTruncation(abs(d) + 1))
        for p in range(0, 3):
            assert out.table[p] == line_bundle_cohomology(2, d, p), (d, p)


def test_cech_grid_shape_on_p1():
    p1 = make_koszul_dga(1, [])
    dc = build_cech_double_complex(structure_sheaf(p1), 0, LaurentTruncation(2))
    # two columns: p = 0 carries the two charts, p = 1 the double overlap
    assert dc.dim(0, 0) > 0 and dc.dim(1, 0) > 0
    assert dc.dim(2, 0) == 0


def test_totalize_sections_of_twists():
    p1 = make_koszul_dga(1, [])
    o2 = structure_sheaf(p1)
    _, table = totalize(build_cech_double_complex(o2, 2, LaurentTruncation(3)))
    assert table.get(0, 0) == 3  # H^0(P^1, O(2))
    assert table.get(-1, 0) == 0
    _, table = totalize(build_cech_double_complex(o2, -2, LaurentTruncation(3)))
    assert table.get(0, 0) == 0
    assert table.get(-1, 0) == 1  # H^1(P^1, O(-2)) as pi_(-1)


def test_totalize_direct_sum_with_shift():
    p1 = make_koszul_dga(1, [])
    m = direct_sum([structure_sheaf(p1), free_module(p1, [-2]).shift(1)])
    _, table = totalize(build_cech_double_complex(m, 0, LaurentTruncation(3)))
    # pi_0 = H^0(O) + H^1(O(-2)) = 1 + 1
    assert table.get(0, 0) == 2


def test_sections_homotopy_flags_and_values():
    p1 = make_koszul_dga(1, [])
    o = structure_sheaf(p1)
    sh = sections_homotopy(o, 0, range(-1, 2), LaurentTruncation(2))
    assert sh.table == {-1: 0, 0: 1, 1: 0}
    assert all(sh.stable.values())
    sh = sections_homotopy(o, -2, range(-1, 1), LaurentTruncation(2))
    assert sh.table == {-1: 1, 0: 0}


def test_sections_homotopy_derived_double_point():
    dbl = make_koszul_dga(1, [({(1, 0): 1}, 1), ({(1, 0): 1}, 1)])
    o = structure_sheaf(dbl)
    sh = sections_homotopy(o, 0, range(0, 3), LaurentTruncation(2))
    assert sh.table[0] == 1
    assert sh.table[1] == 1
    assert sh.table[2] == 0


def test_single_cell_spectral_sequence():
    dc = DoubleComplex({(0, 0): 2}, {}, {})
    ss = run_spectral_sequence(dc)
    assert ss.pages[1].dims() == {(0, 0): 2}
    assert ss.infinity.dims() == {(0, 0): 2}
    assert ss.stabilized_at() <= 2


def test_p1_degenerates_at_e2():
    p1 = make_koszul_dga(1, [])
    m = direct_sum([structure_sheaf(p1), free_module(p1, [-2]).shift(1)])
    ss = run_spectral_sequence(build_cech_double_complex(m, 0, LaurentTruncation(3)))
    e2 = ss.pages[1]
    assert e2.dims() == ss.infinity.dims()
    # E_2 cells: (0,0) from H^0(O) and (1,1) from H^1(O(-2))
    assert e2.dims() == {(0, 0): 1, (1, 1): 1}


def test_p2_filtration_and_cells():
    p2 = make_koszul_dga(2, [])
    m = direct_sum([free_module(p2, [-3]).shift(1), structure_sheaf(p2)])
    ss = run_spectral_sequence(build_cech_double_complex(m, 0, LaurentTruncation(3)))
    e2 = ss.pages[1]
    assert e2.dims() == {(0, 0): 1, (2, 1): 1}
    # filtration identity is asserted inside; check reported degrees
    assert ss.total.homology(0).dim == 1
    assert ss.total.homology(-1).dim == 1


def test_e1_is_vertical_homology_and_e2_matches_sheaf_cohomology():
    dbl = make_koszul_dga(1, [({(1, 0): 1}, 1), ({(1, 0): 1}, 1)])
    o = structure_sheaf(dbl)
    dc = build_cech_double_complex(o, 0, LaurentTruncation(3))
    ss = run_spectral_sequence(dc)
    w = DegreeWindow(0, 4, 0, 2)
    for q in (0, 1):
        pres = extract_presentation(o, q, w)
        coh = sheaf_cohomology(pres, 0, LaurentTruncation(3))
        for p in (0, 1):
            got = ss.pages[1].cells.get((p, q))
            assert (got.dim if got else 0) == coh.table[p], (p, q)


def test_euler_characteristic_consistency():
    p1 = make_koszul_dga(1, [])
    m = direct_sum([structure_sheaf(p1), free_module(p1, [-3]).shift(1)])
    dc = build_cech_double_complex(m, 0, LaurentTruncation(4))
    ss = run_spectral_sequence(dc)
    total_chi = sum((-1) ** (m_ % 2) * d
                    for m_, d in ss.total.homology_table().items())
    e2_chi = 0
    for (p, q), cell in ss.pages[1].cells.items():
        e2_chi += (-1) ** ((q - p) % 2) * cell.dim
    assert total_chi == e2_chi


def test_truncation_monotone_stabilization():
    p1 = make_koszul_dga(1, [])
    o = structure_sheaf(p1)
    dims = []
    for T in (2, 3, 4):
        _, table = totalize(build_cech_double_complex(o, -2, LaurentTruncation(T)))
        dims.append(table.get(-1, 0))
    assert dims[0] <= dims[1] <= dims[2]
    assert dims[1] == dims[2] == 1
