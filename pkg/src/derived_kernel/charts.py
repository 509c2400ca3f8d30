"""Stable chart-local homology over truncated Laurent slices.

Truncated slices of a localized module approximate chart sections from
below, and homology of a truncation carries phantom classes whose
killing boundary (or covering preimage) lies just outside the
truncation.  Raising the bound kills them and mints new ones at the
deeper edge, so neither dimensions nor map ranks stabilize naively.

The sound finite data are *surviving images* under the inclusion
T -> T+1: a homology class, kernel class, cokernel class, or middle
homology class of a triple only counts if it survives to the next
level.  Every chart-local verdict in the kernel (strongness, epi/mono,
exactness, quasi-isomorphism, acyclicity) is computed this way, with a
stability flag comparing the (T, T+1) answer against (T+1, T+2).

Modules entering one comparison must see each other's denominators, so
all participants share an alignment depth derived from their generator
degrees (`module_depth_hint`).
"""

from __future__ import annotations

from .dgmodules import DgModule, ModuleMap, chart_bounds
from .exact_linear import Echelon, RatMatrix, kernel_basis, rank
from .presentations import PresentedModule


def module_depth_hint(m: DgModule, d):
    """Extra Laurent depth so the degree-d slices of M carry their
    classes: high-degree generators need deeper denominators."""
    if not m.gens:
        return 0
    top = max(a for _, a in m.gens) + sum(m.dga.section_degrees)
    return max(0, top - d)


def presented_depth_hint(pres: PresentedModule, d):
    if not pres.gen_degrees:
        return 0
    return max(0, max(pres.gen_degrees) - d)


class ChartHomologyPair:
    """H_i(M)_d at truncations L and L+1 with the inclusion map."""

    def __init__(self, m: DgModule, i, d, charts, L):
        self.module = m
        b0 = chart_bounds(m.dga, charts, L)
        b1 = chart_bounds(m.dga, charts, L + 1)
        self.b0, self.b1 = b0, b1
        self.h0 = m.homology(i, d, b0)
        self.h1 = m.homology(i, d, b1)
        index1 = {lab: k for k, lab in enumerate(self.h1.labels)}
        ent = {}
        for col, rep in enumerate(self.h0.reps):
            vec = {index1[self.h0.labels[k]]: c for k, c in rep.items()}
            coords = self.h1.coords(vec)
            assert coords is not None
            for row, c in coords.items():
                ent[(row, col)] = c
        self.iota = RatMatrix(self.h1.dim, self.h0.dim, ent)

    def surviving_dim(self):
        return rank(self.iota)


class PresentedSlicePair:
    """Localized cokernel slice of a presentation at L and L+1 with the
    inclusion map; plays the homology role for presented modules."""

    def __init__(self, pres: PresentedModule, d, charts, L):
        self.pres = pres
        b0 = chart_bounds(pres.dga, charts, L)
        b1 = chart_bounds(pres.dga, charts, L + 1)
        self.b0, self.b1 = b0, b1
        self.sl0 = pres.localized_slice(d, b0)
        self.sl1 = pres.localized_slice(d, b1)
        ent = {}
        for col, k in enumerate(self.sl0.rep_labels):
            g, exps = self.sl0.labels[k]
            for row, c in self.sl1.coords_of(g, exps).items():
                ent[(row, col)] = c
        self.iota = RatMatrix(self.sl1.dim, self.sl0.dim, ent)

    def surviving_dim(self):
        return rank(self.iota)


def _span_dims(base_cols, extra_cols):
    """(dim base, dim base+extra) for sparse column collections."""
    e = Echelon()
    for c in base_cols:
        if c:
            e.add(c)
    d0 = e.dim
    for c in extra_cols:
        if c:
            e.add(c)
    return d0, e.dim


class SurvivingMap:
    """A map between chart homologies at two truncation levels.

    m0: matrix at level L over (src.h0, tgt.h0); m1 at level L+1.
    Surviving kernel and cokernel dimensions are the honest finite
    approximations of the localized kernel and cokernel."""

    def __init__(self, src_pair, tgt_pair, m0, m1):
        self.src = src_pair
        self.tgt = tgt_pair
        self.m0 = m0
        self.m1 = m1

    def surviving_kernel_dim(self):
        kern = kernel_basis(self.m0)
        cols = [self.src.iota.apply(v) for v in kern]
        e = Echelon()
        for c in cols:
            if c:
                e.add(c)
        return e.dim

    def surviving_cokernel_dim(self):
        im1 = [self.m1.column(c) for c in range(self.m1.cols)]
        moved = [self.tgt.iota.column(c) for c in range(self.tgt.iota.cols)]
        d0, d1 = _span_dims(im1, moved)
        return d1 - d0


def map_homology_pair(f: ModuleMap, i, d, charts, L, extra,
                      src_pair=None, tgt_pair=None):
    """Build the SurvivingMap of f at (i, d) on a chart set."""
    if src_pair is None:
        src_pair = ChartHomologyPair(f.source, i, d, charts, L + extra)
    if tgt_pair is None:
        tgt_pair = ChartHomologyPair(f.target, i, d, charts, L + extra)
    m0 = _homology_matrix_between(f, src_pair.h0, tgt_pair.h0, i, d,
                                  src_pair.b0)
    m1 = _homology_matrix_between(f, src_pair.h1, tgt_pair.h1, i, d,
                                  src_pair.b1)
    return SurvivingMap(src_pair, tgt_pair, m0, m1)


def _homology_matrix_between(f, hs, ht, i, d, bounds):
    sl = f.slice_matrix(i, d, bounds)
    ent = {}
    for col, rep in enumerate(hs.reps):
        img = sl.apply(rep)
        coords = ht.coords(img)
        assert coords is not None, "chain map broke cycles"
        for row, c in coords.items():
            ent[(row, col)] = c
    return RatMatrix(ht.dim, hs.dim, ent)


def triple_defects(f: ModuleMap, g: ModuleMap, i, d, chart, L, extra):
    """(not injective, not surjective, middle homology) surviving
    defects of F -> G -> H at one slice."""
    charts = (chart,)
    fp = ChartHomologyPair(f.source, i, d, charts, L + extra)
    gp = ChartHomologyPair(f.target, i, d, charts, L + extra)
    hp = ChartHomologyPair(g.target, i, d, charts, L + extra)
    a = map_homology_pair(f, i, d, charts, L, extra, fp, gp)
    b = map_homology_pair(g, i, d, charts, L, extra, gp, hp)
    inj = a.surviving_kernel_dim() > 0
    surj = b.surviving_cokernel_dim() > 0
    # middle: ker(b0)/im(a0) classes surviving into ker(b1)/im(a1)
    z0 = kernel_basis(b.m0)
    moved = [gp.iota.apply(v) for v in z0]
    im1 = [a.m1.column(c) for c in range(a.m1.cols)]
    d0, d1 = _span_dims(im1, moved)
    middle = (d1 - d0) > 0
    return inj, surj, middle


def surviving_quasi_iso_defects(f: ModuleMap, i, d, chart, L, extra=None):
    """(kernel defect, cokernel defect) of f on one slice."""
    if extra is None:
        extra = max(module_depth_hint(f.source, d),
                    module_depth_hint(f.target, d))
    sm = map_homology_pair(f, i, d, (chart,), L, extra)
    return (sm.surviving_kernel_dim() > 0, sm.surviving_cokernel_dim() > 0)


def stable_chart_dim(m: DgModule, i, d, chart, T, extra=None):
    """(value, stable flag) for the surviving homology dimension."""
    if extra is None:
        extra = module_depth_hint(m, d)
    a = ChartHomologyPair(m, i, d, (chart,), T + extra).surviving_dim()
    b = ChartHomologyPair(m, i, d, (chart,), T + 1 + extra).surviving_dim()
    return a, a == b


def chart_homology_vanishes(m: DgModule, i_range, d_range, T, charts=None):
    """Check that every chart-local homology slice dies; returns
    (verdict, witness, unstable)."""
    nvars = m.dga.base.nvars
    chart_list = charts if charts is not None else range(nvars)
    unstable = []
    for chart in chart_list:
        for i in i_range:
            for d in d_range:
                val, ok = stable_chart_dim(m, i, d, chart, T)
                if not ok:
                    unstable.append((chart, i, d))
                elif val:
                    return False, (chart, i, d), tuple(unstable)
    return True, None, tuple(unstable)


def map_is_stable_quasi_iso(f: ModuleMap, i_range, d_range, T, charts=None):
    """Chart-local quasi-isomorphism test on surviving defects."""
    nvars = f.dga.base.nvars
    chart_list = charts if charts is not None else range(nvars)
    unstable = []
    for chart in chart_list:
        for i in i_range:
            for d in d_range:
                got = [surviving_quasi_iso_defects(f, i, d, chart, lv)
                       for lv in (T, T + 1)]
                if got[0] != got[1]:
                    unstable.append((chart, i, d))
                    continue
                if got[1] != (False, False):
                    return False, (chart, i, d), tuple(unstable)
    return True, None, tuple(unstable)
