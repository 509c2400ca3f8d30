"""Shared zoo of schemes and sheaves used across the test suite."""

from derived_kernel.dga import make_koszul_dga
from derived_kernel.dgmodules import (
    ModuleMap,
    cone,
    direct_sum,
    fibre,
    free_module,
    koszul_module,
    structure_sheaf,
)


def p1():
    return make_koszul_dga(1, [])


def p2():
    return make_koszul_dga(2, [])


def double_point():
    """Derived double point V(x0, x0) in P^1: pi_1 is a skyscraper."""
    return make_koszul_dga(1, [({(1, 0): 1}, 1), ({(1, 0): 1}, 1)])


def classical_point():
    """V(x0) in P^1."""
    return make_koszul_dga(1, [({(1, 0): 1}, 1)])


def derived_line():
    """V(x0, x0^2) in P^2: a line with derived structure."""
    return make_koszul_dga(2, [({(1, 0, 0): 1}, 1), ({(2, 0, 0): 1}, 2)])


def conic():
    """Smooth conic V(x0*x2 - x1^2) in P^2."""
    return make_koszul_dga(2, [({(1, 0, 1): 1, (0, 2, 0): -1}, 2)])


def point_sheaf(dga):
    """cone(x0: O(-1) -> O): the structure sheaf of V(x0)."""
    f = ModuleMap(free_module(dga, [-1]), free_module(dga, [0]),
                  {(0, 0): {(1,) + (0,) * dga.base.n: 1}})
    return cone(f)


def euler_maps(dga):
    """O(-2) -> O(-1)^2 -> O on a P^1-type ambient (x1, -x0 then x0, x1)."""
    om2 = free_module(dga, [-2])
    om1s = free_module(dga, [-1, -1])
    o = free_module(dga, [0])
    f = ModuleMap(om2, om1s, {(0, 0): {(0, 1): 1}, (1, 0): {(1, 0): -1}})
    g = ModuleMap(om1s, o, {(0, 0): {(1, 0): 1}, (0, 1): {(0, 1): 1}})
    return f, g


def kernel_bundle_p1(dga):
    """fibre((x0, x1): O(-1)^2 -> O); abstractly O(-2)."""
    om1s = free_module(dga, [-1, -1])
    o = free_module(dga, [0])
    g = ModuleMap(om1s, o, {(0, 0): {(1, 0): 1}, (0, 1): {(0, 1): 1}})
    return fibre(g)


def cotangent_p2(dga):
    """fibre((x0, x1, x2): O(-1)^3 -> O) on P^2: the rank-2 bundle
    Omega^1(0) up to quasi-isomorphism."""
    om1s = free_module(dga, [-1, -1, -1])
    o = free_module(dga, [0])
    g = ModuleMap(om1s, o, {(0, 0): {(1, 0, 0): 1},
                            (0, 1): {(0, 1, 0): 1},
                            (0, 2): {(0, 0, 1): 1}})
    return fibre(g)


def skyscraper_p2(dga):
    """Koszul module of (x0, x1): the structure sheaf of a point."""
    return koszul_module(dga, [({(1, 0, 0): 1}, 1), ({(0, 1, 0): 1}, 1)])


def double_point_pushforward(dga):
    """Koszul module of (x0, x0) over P^1: the pushforward of the
    derived double point structure sheaf."""
    return koszul_module(dga, [({(1, 0): 1}, 1), ({(1, 0): 1}, 1)])


def spectral_corpus():
    """Modules exercising the descent spectral sequence (>= 10, with
    derived structure included)."""
    P1, P2 = p1(), p2()
    DBL, DL = double_point(), derived_line()
    out = [
        ("p1:O", structure_sheaf(P1)),
        ("p1:O(2)", free_module(P1, [2])),
        ("p1:O+O(-2)[1]", direct_sum([structure_sheaf(P1),
                                      free_module(P1, [-2]).shift(1)])),
        ("p1:point", point_sheaf(P1)),
        ("p1:kernel-bundle", kernel_bundle_p1(P1)),
        ("p1:double-pushforward", double_point_pushforward(P1)),
        ("p2:O", structure_sheaf(P2)),
        ("p2:O+O(-3)[1]", direct_sum([structure_sheaf(P2),
                                      free_module(P2, [-3]).shift(1)])),
        ("p2:skyscraper", skyscraper_p2(P2)),
        ("p2:cotangent", cotangent_p2(P2)),
        ("dbl:O", structure_sheaf(DBL)),
        ("dbl:O(1)+O(-1)", free_module(DBL, [1, -1])),
        ("dline:O", structure_sheaf(DL)),
    ]
    return out
