"""Bounded and 3-periodic chain complexes over a bound quiver algebra.

A 3-periodic complex is the same thing as a module over the tensor of the
base algebra with the radical-square-zero oriented-3-cycle algebra; the
conversion in both directions is exact and bit-faithful, so syzygies,
decompositions and isomorphism tests for periodic complexes all delegate to
the module machinery over the tensor algebra.

Degree classes are labeled -1, 0, 1.  Wrapping sends degree i to class
(i mod 3), with -1 landing in class -1; inside a wrapped class the summands
are ordered by ascending original degree, matching the block matrices of
the worked examples.
"""

from __future__ import annotations

import numpy as np

from .quivers import CycleTensorAlgebra, tensor_cycle3
from .rep import (
    Decomposition,
    Module,
    Morphism,
    decompose,
    direct_sum,
    hom_basis,
    is_isomorphic,
    syzygy,
    top_and_cover,
    zero_module,
)

CLASSES = (-1, 0, 1)
_PREV = {1: 0, 0: -1, -1: 1}
_CLASS_TO_LEVEL = {-1: 1, 0: 2, 1: 3}
_LEVEL_TO_CLASS = {1: -1, 2: 0, 3: 1}


def degree_class(i: int) -> int:
    return {2: -1, 0: 0, 1: 1}[i % 3]


class BoundedComplex:
    """Chain complex ... -> X_i -> X_{i-1} -> ..., nonzero only in [lo, hi].

    diffs[i] is the differential leaving degree i (for lo < i <= hi).
    """

    def __init__(self, algebra, lo: int, modules, diffs, check: bool = True):
        self.algebra = algebra
        self.lo = lo
        self.modules: dict[int, Module] = dict(modules) if isinstance(modules, dict) \
            else {lo + k: m for k, m in enumerate(modules)}
        self.hi = max(self.modules) if self.modules else lo
        self.diffs: dict[int, Morphism] = dict(diffs)
        if check:
            self._validate()

    def _validate(self):
        for i in range(self.lo + 1, self.hi + 1):
            d = self.diffs.get(i)
            if d is None:
                raise ValueError(f"missing differential leaving degree {i}")
            if d.source is not self.modules[i] or d.target is not self.modules[i - 1]:
                if d.source.dims != self.modules[i].dims or d.target.dims != self.modules[i - 1].dims:
                    raise ValueError(f"differential at degree {i} has wrong endpoints")
        for i in range(self.lo + 2, self.hi + 1):
            comp = self.diffs[i - 1] @ self.diffs[i]
            if not comp.is_zero():
                raise ValueError(f"d^2 != 0 between degrees {i} and {i-2}")

    def module_at(self, i: int) -> Module:
        got = self.modules.get(i)
        return got if got is not None else zero_module(self.algebra)

    @property
    def total_dim(self) -> int:
        return sum(m.total_dim for m in self.modules.values())

    def degree_dims(self) -> dict[int, tuple]:
        return {i: m.dims for i, m in sorted(self.modules.items())}

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "modules": [self.module_at(i).to_dict() for i in range(self.lo, self.hi + 1)],
            "differentials": [
                [c.tolist() for c in self.diffs[i].components]
                for i in range(self.lo + 1, self.hi + 1)
            ],
        }

    def __repr__(self):
        dims = ", ".join(f"{i}:{sum(self.module_at(i).dims)}" for i in range(self.lo, self.hi + 1))
        return f"<BoundedComplex [{self.lo},{self.hi}] dims {dims}>"


def sum_bounded(complexes) -> BoundedComplex:
    """Degree-wise direct sum of bounded complexes."""
    complexes = list(complexes)
    algebra = complexes[0].algebra
    lo = min(c.lo for c in complexes)
    hi = max(c.hi for c in complexes)
    modules = {}
    sums = {}
    for i in range(lo, hi + 1):
        sm = direct_sum(algebra, [c.module_at(i) for c in complexes])
        sums[i] = sm
        modules[i] = sm.module
    diffs = {}
    field = algebra.field
    for i in range(lo + 1, hi + 1):
        comps = []
        for v in range(algebra.quiver.vertex_count):
            blocks = []
            for c in complexes:
                d = c.diffs.get(i)
                if d is not None:
                    blocks.append(d.components[v])
                else:
                    blocks.append(field.zeros(c.module_at(i - 1).dims[v], c.module_at(i).dims[v]))
            total = field.zeros(modules[i - 1].dims[v], modules[i].dims[v])
            r0 = c0 = 0
            for b in blocks:
                total[r0:r0 + b.shape[0], c0:c0 + b.shape[1]] = b
                r0 += b.shape[0]
                c0 += b.shape[1]
            comps.append(total)
        diffs[i] = Morphism(modules[i], modules[i - 1], comps, check=False)
    return BoundedComplex(algebra, lo, modules, diffs)


def stalk_complex(M: Module, degree: int = -1) -> BoundedComplex:
    return BoundedComplex(M.algebra, degree, {degree: M}, {})


class PeriodicComplex:
    """3-periodic complex: one module per degree class, three differentials.

    diffs[c] leaves class c and lands in class c-1 (cyclically); all three
    consecutive composites must vanish.
    """

    def __init__(self, algebra, modules: dict[int, Module], diffs: dict[int, Morphism],
                 check: bool = True):
        self.algebra = algebra
        self.modules = {c: modules[c] for c in CLASSES}
        self.diffs = {c: diffs[c] for c in CLASSES}
        if check:
            self._validate()

    def _validate(self):
        for c in CLASSES:
            d = self.diffs[c]
            if d.source.dims != self.modules[c].dims or \
               d.target.dims != self.modules[_PREV[c]].dims:
                raise ValueError(f"differential leaving class {c} has wrong endpoints")
        for c in CLASSES:
            comp = self.diffs[_PREV[c]] @ self.diffs[c]
            if not comp.is_zero():
                raise ValueError(f"consecutive differentials from class {c} do not compose to zero")

    @property
    def total_dim(self) -> int:
        return sum(m.total_dim for m in self.modules.values())

    def class_dims(self) -> dict[int, tuple]:
        return {c: self.modules[c].dims for c in CLASSES}

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def to_dict(self) -> dict:
        return {
            "classes": {str(c): self.modules[c].to_dict() for c in CLASSES},
            "differentials": {str(c): [m.tolist() for m in self.diffs[c].components]
                              for c in CLASSES},
        }

    def __repr__(self):
        dims = ", ".join(f"[{c}]:{self.modules[c].total_dim}" for c in CLASSES)
        return f"<PeriodicComplex {dims}>"


def periodic_zero(algebra) -> PeriodicComplex:
    z = zero_module(algebra)
    zm = {c: z for c in CLASSES}
    zd = {c: Morphism(z, z, [algebra.field.zeros(0, 0)] * algebra.quiver.vertex_count,
                      check=False) for c in CLASSES}
    return PeriodicComplex(algebra, zm, zd)


# ---------------------------------------------------------------------------
# wrapping
# ---------------------------------------------------------------------------

def wrap(X: BoundedComplex) -> PeriodicComplex:
    """Collapse a bounded complex to its 3-periodic wrapping.

    Class c collects the degrees congruent to c mod 3 in ascending order;
    the differential block from degree i to degree j is d_i when j = i - 1
    and zero otherwise.
    """
    algebra = X.algebra
    field = algebra.field
    degs = {c: [i for i in range(X.lo, X.hi + 1) if degree_class(i) == c] for c in CLASSES}
    sums = {c: direct_sum(algebra, [X.module_at(i) for i in degs[c]]) for c in CLASSES}
    modules = {c: sums[c].module for c in CLASSES}
    diffs = {}
    for c in CLASSES:
        tgt_c = _PREV[c]
        src_list, tgt_list = degs[c], degs[tgt_c]
        comps = []
        for v in range(algebra.quiver.vertex_count):
            mat = field.zeros(modules[tgt_c].dims[v], modules[c].dims[v])
            for si, i in enumerate(src_list):
                d = X.diffs.get(i)
                if d is None or (i - 1) not in tgt_list:
                    continue
                ti = tgt_list.index(i - 1)
                r0 = sums[tgt_c].offsets[ti][v]
                c0 = sums[c].offsets[si][v]
                blk = d.components[v]
                mat[r0:r0 + blk.shape[0], c0:c0 + blk.shape[1]] = blk
            comps.append(mat)
        diffs[c] = Morphism(modules[c], modules[tgt_c], comps, check=False)
    return PeriodicComplex(algebra, modules, diffs)


def periodic_direct_sum(parts) -> PeriodicComplex:
    parts = list(parts)
    algebra = parts[0].algebra
    field = algebra.field
    modules = {}
    sums = {}
    for c in CLASSES:
        sm = direct_sum(algebra, [p.modules[c] for p in parts])
        sums[c] = sm
        modules[c] = sm.module
    diffs = {}
    for c in CLASSES:
        tc = _PREV[c]
        comps = []
        for v in range(algebra.quiver.vertex_count):
            mat = field.zeros(modules[tc].dims[v], modules[c].dims[v])
            r0 = c0 = 0
            for p in parts:
                blk = p.diffs[c].components[v]
                mat[r0:r0 + blk.shape[0], c0:c0 + blk.shape[1]] = blk
                r0 += blk.shape[0]
                c0 += blk.shape[1]
            comps.append(mat)
        diffs[c] = Morphism(modules[c], modules[tc], comps, check=False)
    return PeriodicComplex(algebra, modules, diffs)


# ---------------------------------------------------------------------------
# the identification with modules over the cycle tensor algebra
# ---------------------------------------------------------------------------

_TENSOR_CACHE: dict[int, CycleTensorAlgebra] = {}
_TENSOR_KEEPALIVE: list = []


def tensor_algebra_of(base) -> CycleTensorAlgebra:
    got = _TENSOR_CACHE.get(id(base))
    if got is None:
        got = tensor_cycle3(base)
        _TENSOR_CACHE[id(base)] = got
        _TENSOR_KEEPALIVE.append(base)
    return got


def periodic_to_module(P: PeriodicComplex, talg: CycleTensorAlgebra | None = None) -> Module:
    """The module over base (x) A3CT corresponding to a 3-periodic complex.

    Raises RelationViolation via module validation if d^2 or naturality fail.
    """
    talg = talg or tensor_algebra_of(P.algebra)
    base = talg.base
    nv = base.quiver.vertex_count
    dims = [0] * (3 * nv)
    for c in CLASSES:
        lvl = _CLASS_TO_LEVEL[c]
        for v in range(nv):
            dims[talg.vertex_index(v, lvl)] = P.modules[c].dims[v]
    action = {}
    for a in base.quiver.arrows:
        for c in CLASSES:
            lvl = _CLASS_TO_LEVEL[c]
            action[f"{a.label}@{lvl}"] = P.modules[c].action[a.label]
    for c in CLASSES:
        lvl = _CLASS_TO_LEVEL[c]
        for v in range(nv):
            action[f"d{lvl}@{v + 1}"] = P.diffs[c].components[v]
    return Module(talg, dims, action)


def module_to_periodic(M: Module) -> PeriodicComplex:
    """Inverse of periodic_to_module, bit-exact."""
    talg = M.algebra
    if not isinstance(talg, CycleTensorAlgebra):
        raise TypeError("module is not over a cycle tensor algebra")
    base = talg.base
    nv = base.quiver.vertex_count
    modules = {}
    for c in CLASSES:
        lvl = _CLASS_TO_LEVEL[c]
        dims = [M.dims[talg.vertex_index(v, lvl)] for v in range(nv)]
        action = {a.label: M.action[f"{a.label}@{lvl}"] for a in base.quiver.arrows}
        modules[c] = Module(base, dims, action, check=False)
    diffs = {}
    for c in CLASSES:
        lvl = _CLASS_TO_LEVEL[c]
        comps = [M.action[f"d{lvl}@{v + 1}"] for v in range(nv)]
        diffs[c] = Morphism(modules[c], modules[_PREV[c]], comps, check=False)
    return PeriodicComplex(base, modules, diffs)


def periodic_syzygy(P: PeriodicComplex) -> PeriodicComplex:
    """Syzygy in the category of 3-periodic complexes: the syzygy of the
    corresponding tensor-algebra module, converted back."""
    M = periodic_to_module(P)
    S = syzygy(M).module
    return module_to_periodic(S)


def periodic_cover_dims(P: PeriodicComplex) -> dict[int, tuple]:
    M = periodic_to_module(P)
    cov = top_and_cover(M)
    return module_to_periodic(cov.module).class_dims()


def periodic_decompose(P: PeriodicComplex, rng: np.random.Generator) -> Decomposition:
    return decompose(periodic_to_module(P), rng)


def periodic_iso(P: PeriodicComplex, Q: PeriodicComplex, rng: np.random.Generator,
                 strategy: str = "auto") -> bool:
    ok, _ = is_isomorphic(periodic_to_module(P), periodic_to_module(Q), rng,
                          strategy=strategy)
    return ok


def periodic_hom_dim(P: PeriodicComplex, Q: PeriodicComplex) -> int:
    return len(hom_basis(periodic_to_module(P), periodic_to_module(Q)))


# ---------------------------------------------------------------------------
# chain maps of bounded complexes
# ---------------------------------------------------------------------------

def chain_hom_dim(X: BoundedComplex, Y: BoundedComplex) -> int:
    """Dimension of the space of chain maps X -> Y (degreewise module maps
    commuting with the differentials)."""
    lo = min(X.lo, Y.lo)
    hi = max(X.hi, Y.hi)
    field = X.algebra.field
    bases = {i: hom_basis(X.module_at(i), Y.module_at(i)) for i in range(lo, hi + 1)}
    col_of = {}
    ncols = 0
    for i in range(lo, hi + 1):
        col_of[i] = ncols
        ncols += len(bases[i])
    if ncols == 0:
        return 0
    rows = []
    for i in range(lo + 1, hi + 1):
        xd = X.diffs.get(i)
        yd = Y.diffs.get(i)
        flat_dim = sum(X.module_at(i).dims[v] * Y.module_at(i - 1).dims[v]
                       for v in range(X.algebra.quiver.vertex_count))
        if flat_dim == 0:
            continue
        block = field.zeros(flat_dim, ncols)
        for k, b in enumerate(bases[i]):
            if yd is not None:
                vec = np.concatenate([field.mul(c, d).ravel()
                                      for c, d in zip(yd.components, b.components)])
                block[:, col_of[i] + k] = vec
        for k, b in enumerate(bases[i - 1]):
            if xd is not None:
                vec = np.concatenate([field.mul(c, d).ravel()
                                      for c, d in zip(b.components, xd.components)])
                block[:, col_of[i - 1] + k] = (block[:, col_of[i - 1] + k] - vec) % field.p
        rows.append(block)
    if not rows:
        return ncols
    system = np.concatenate(rows, axis=0)
    return ncols - field.rank(system)
