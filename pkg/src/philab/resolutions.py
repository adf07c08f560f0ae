"""Truncated minimal projective resolutions and their explicit syzygies.

A truncated resolution of length m peels a chosen direct summand Q_i off the
kernel at each stage of a minimal projective resolution and keeps resolving
the complementary summand R_i; the final kernel Q_m is kept whole.  Rendered
as a bounded complex it lives in degrees -1..m with degree-i object
Q_i + P_i.

The syzygy of such a complex (in the category of bounded complexes) is again
a truncated resolution, of the first syzygy of the base: its pieces are the
covers of the peeled summands and the next stages of the original.  The
construction is assembled from explicit block maps; every call re-verifies
that the assembled cover complex is exact in each degree, that the cover
surjection and kernel inclusion are chain maps, and that the claimed kernel
really is the kernel.  The alternating signs in the inclusion are part of
the chain-map identity and are exercised by that verification.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .complexes import BoundedComplex
from .grothendieck import ClassRegistry
from .primefield import PrimeField
from .rep import (
    Module,
    Morphism,
    decompose,
    direct_sum,
    block_morphism_from_summands,
    hom_basis,
    identity_morphism,
    is_isomorphic,
    submodule,
    syzygy,
    top_and_cover,
    top_dims,
    projective,
    zero_morphism,
    zero_module,
)


class InvalidPlanError(ValueError):
    """A split plan requests unavailable summands or empties a kernel early."""


class ExactnessError(RuntimeError):
    """The assembled syzygy construction failed its runtime verification."""


@dataclass(frozen=True)
class SplitPlan:
    """Per-step choice of kernel summands to peel: step -> ((class_id, mult), ...).

    Class ids refer to a ClassRegistry over the same algebra.  Steps absent
    from the mapping peel nothing; the final kernel is always kept whole.
    """

    peels: tuple[tuple[int, tuple[tuple[int, int], ...]], ...] = ()

    @classmethod
    def from_dict(cls, mapping: dict) -> "SplitPlan":
        items = tuple(sorted((int(step), tuple((int(c), int(n)) for c, n in entries))
                             for step, entries in mapping.items()))
        return cls(items)

    def step(self, k: int):
        for s, entries in self.peels:
            if s == k:
                return entries
        return ()

    def max_step(self) -> int:
        return max((s for s, _ in self.peels), default=0)

    def to_json(self) -> str:
        return json.dumps([{"step": s, "peel": [{"class": c, "mult": n} for c, n in entries]}
                           for s, entries in self.peels])

    @classmethod
    def from_json(cls, text: str) -> "SplitPlan":
        data = json.loads(text)
        return cls.from_dict({row["step"]: [(p["class"], p["mult"]) for p in row["peel"]]
                              for row in data})


EMPTY_PLAN = SplitPlan()


@dataclass
class TruncatedResolution:
    """Structural data of a truncated minimal projective resolution.

    Index conventions follow the construction: P[k] covers R[k] (P[0] covers
    the base), K[k] = ker(P[k-1] -> previous target) includes into P[k-1]
    and splits as Q[k] + R[k]; Q[m] is the whole last kernel.
    """

    base: Module
    m: int
    P: dict
    f0: Morphism
    fmaps: dict
    coverR: dict
    Q: dict
    R: dict
    iQ: dict
    iR: dict
    K: dict
    jK: dict
    qinK: dict
    rinK: dict
    plan: SplitPlan | None = None
    _rendered: tuple | None = None

    @property
    def algebra(self):
        return self.base.algebra

    def total_dim(self) -> int:
        return (self.base.total_dim + sum(p.total_dim for p in self.P.values())
                + sum(q.total_dim for q in self.Q.values()))

    def degree_module_dims(self) -> dict[int, tuple]:
        out = {-1: self.base.dims}
        nv = len(self.base.dims)
        for k in range(0, self.m + 1):
            q = self.Q.get(k)
            p = self.P.get(k)
            dims = tuple((q.dims[v] if q else 0) + (p.dims[v] if p else 0)
                         for v in range(nv))
            out[k] = dims
        return out

    def validate(self):
        alg = self.algebra
        if self.base.total_dim == 0:
            raise ValueError("base of a truncated resolution must be nonzero")
        if not self.f0.is_surjective():
            raise ExactnessError("P0 does not surject onto the base")
        self._check_cover_minimal(self.P[0], self.base)
        self._check_kernel(self.K[1], self.jK[1], self.f0)
        for k in range(1, self.m):
            if self.R[k].total_dim == 0:
                raise InvalidPlanError(f"R_{k} is zero: the plan peeled everything early")
            if not self.coverR[k].is_surjective():
                raise ExactnessError(f"P_{k} does not surject onto R_{k}")
            self._check_cover_minimal(self.P[k], self.R[k])
            self._check_kernel(self.K[k + 1], self.jK[k + 1], self.coverR[k])
            if not (self.jK[k] @ self.qinK[k]).equals(self.iQ[k]):
                raise ExactnessError(f"Q_{k} inclusion is inconsistent")
            if not (self.jK[k] @ self.rinK[k]).equals(self.iR[k]):
                raise ExactnessError(f"R_{k} inclusion is inconsistent")
            expect = self.iR[k] @ self.coverR[k]
            if not expect.equals(self.fmaps[k]):
                raise ExactnessError(f"f_{k} does not factor through R_{k}")
            self._check_split(k)
        if self.Q[self.m].dims != self.K[self.m].dims:
            raise ExactnessError("last kernel must be peeled whole")
        if not (self.jK[self.m] @ self.qinK[self.m]).equals(self.iQ[self.m]):
            raise ExactnessError("last kernel inclusion inconsistent")

    def _check_split(self, k):
        field = self.algebra.field
        sm = direct_sum(self.algebra, [self.Q[k], self.R[k]])
        both = block_morphism_from_summands(
            sm, self.K[k], [self.qinK[k], self.rinK[k]])
        if not both.is_invertible():
            raise ExactnessError(f"Q_{k} + R_{k} does not reconstitute the kernel")

    def _check_cover_minimal(self, P: Module, target: Module):
        tops = top_dims(target)
        nv = len(tops)
        expect = [0] * nv
        for v in range(nv):
            if tops[v]:
                pv = projective(self.algebra, v)
                for w in range(nv):
                    expect[w] += tops[v] * pv.dims[w]
        if tuple(expect) != P.dims:
            raise ExactnessError("cover has a superfluous or missing summand")

    def _check_kernel(self, K: Module, jK: Morphism, surj: Morphism):
        field = self.algebra.field
        comp = surj @ jK
        if not comp.is_zero():
            raise ExactnessError("kernel inclusion does not compose to zero")
        if not jK.is_injective():
            raise ExactnessError("kernel inclusion is not injective")
        for v in range(len(K.dims)):
            if K.dims[v] != surj.components[v].shape[1] - field.rank(surj.components[v]):
                raise ExactnessError("kernel dimensions do not match corank")

    # -- rendering ---------------------------------------------------------

    def rendered(self):
        """The bounded complex in degrees -1..m, with its degree sums."""
        if self._rendered is not None:
            return self._rendered
        alg = self.algebra
        zero = zero_module(alg)
        sums = {}
        modules = {-1: self.base}
        for k in range(0, self.m + 1):
            q = self.Q.get(k, zero)
            p = self.P.get(k, zero)
            sm = direct_sum(alg, [q, p])
            sums[k] = sm
            modules[k] = sm.module
        diffs = {}
        pieces0 = [zero_morphism(sums[0].injections[0].source, self.base), self.f0]
        diffs[0] = block_morphism_from_summands(sums[0], self.base, pieces0)
        for k in range(1, self.m + 1):
            tgt = sums[k - 1]
            qk = self.Q.get(k, zero)
            pk = self.P.get(k, zero)
            q_piece = (tgt.injections[1] @ self.iQ[k]) if qk.total_dim else \
                zero_morphism(qk, tgt.module)
            p_piece = (tgt.injections[1] @ self.fmaps[k]) if (k in self.fmaps and pk.total_dim) else \
                zero_morphism(pk, tgt.module)
            diffs[k] = block_morphism_from_summands(sums[k], tgt.module, [q_piece, p_piece])
        cx = BoundedComplex(alg, -1, modules, diffs)
        self._rendered = (cx, sums)
        return self._rendered

    def to_bounded_complex(self) -> BoundedComplex:
        return self.rendered()[0]

    def to_dict(self) -> dict:
        return {
            "complex": self.to_bounded_complex().to_dict(),
            "plan": json.loads(self.plan.to_json()) if self.plan else [],
            "length": self.m,
        }


# ---------------------------------------------------------------------------
# building from a module and a plan
# ---------------------------------------------------------------------------

def build(base: Module, m: int, plan: SplitPlan, reg: ClassRegistry,
          rng: np.random.Generator) -> TruncatedResolution:
    """Truncated minimal projective resolution of base with the given peels.

    Requires pd(base) >= m, checked while resolving; peels reference
    registry class ids and must leave R_k nonzero for every k < m.
    """
    if m < 1:
        raise InvalidPlanError("length must be positive")
    if plan.max_step() > m - 1:
        raise InvalidPlanError("plan peels at or beyond the final step")
    alg = base.algebra
    P: dict = {}
    fmaps: dict = {}
    coverR: dict = {}
    Q: dict = {}
    R: dict = {}
    iQ: dict = {}
    iR: dict = {}
    K: dict = {}
    jK: dict = {}
    qinK: dict = {}
    rinK: dict = {}

    cov = top_and_cover(base)
    P[0] = cov.module
    f0 = cov.surjection
    syz = syzygy(base)
    K[1], jK[1] = syz.module, syz.inclusion

    for k in range(1, m + 1):
        if K[k].total_dim == 0:
            raise InvalidPlanError(
                f"kernel vanished at step {k}: projective dimension below {m}")
        if k == m:
            Q[m] = K[m]
            qinK[m] = identity_morphism(K[m])
            iQ[m] = jK[m]
            break
        peels = plan.step(k)
        if not peels:
            Q[k] = zero_module(alg)
            qinK[k] = zero_morphism(Q[k], K[k])
            R[k] = K[k]
            rinK[k] = identity_morphism(K[k])
        else:
            Q[k], qinK[k], R[k], rinK[k] = _apply_peel(K[k], peels, reg, rng)
            if R[k].total_dim == 0:
                raise InvalidPlanError(f"peel at step {k} leaves R_{k} = 0")
        iQ[k] = jK[k] @ qinK[k]
        iR[k] = jK[k] @ rinK[k]
        covR = top_and_cover(R[k])
        P[k] = covR.module
        coverR[k] = covR.surjection
        fmaps[k] = iR[k] @ coverR[k]
        syzR = syzygy(R[k])
        K[k + 1], jK[k + 1] = syzR.module, syzR.inclusion

    out = TruncatedResolution(base, m, P, f0, fmaps, coverR, Q, R, iQ, iR,
                              K, jK, qinK, rinK, plan=plan)
    out.validate()
    return out


def _apply_peel(K: Module, peels, reg: ClassRegistry, rng: np.random.Generator):
    """Split K = Q + R per the requested (class id, multiplicity) peels."""
    alg = K.algebra
    dec = decompose(K, rng)
    # match each decomposition class against the registry ids in the plan
    group_of = {}
    for gi, (rep_mod, mult) in enumerate(dec.summands):
        for cid in {c for c, _ in peels}:
            ok, _ = is_isomorphic(reg.rep(cid), rep_mod, rng)
            if ok:
                group_of[cid] = (gi, mult)
                break
    sm = direct_sum(alg, dec.expanded())
    starts = []
    t = 0
    for rep_mod, mult in dec.summands:
        starts.append(t)
        t += mult
    taken = [0] * len(dec.summands)
    q_parts: list[Module] = []
    q_pieces: list[Morphism] = []
    for cid, want in peels:
        if cid not in group_of:
            raise InvalidPlanError(f"kernel has no summand of class {cid}")
        gi, have = group_of[cid]
        if taken[gi] + want > have:
            raise InvalidPlanError(
                f"class {cid}: requested {taken[gi] + want} copies, kernel has {have}")
        for _ in range(want):
            idx = starts[gi] + taken[gi]
            q_parts.append(dec.summands[gi][0])
            q_pieces.append(dec.iso @ sm.injections[idx])
            taken[gi] += 1
    r_parts: list[Module] = []
    r_pieces: list[Morphism] = []
    for gi, (rep_mod, mult) in enumerate(dec.summands):
        for c in range(taken[gi], mult):
            r_parts.append(rep_mod)
            r_pieces.append(dec.iso @ sm.injections[starts[gi] + c])
    q_sum = direct_sum(alg, q_parts)
    r_sum = direct_sum(alg, r_parts)
    q_in = block_morphism_from_summands(q_sum, K, q_pieces) if q_parts else \
        zero_morphism(q_sum.module, K)
    r_in = block_morphism_from_summands(r_sum, K, r_pieces) if r_parts else \
        zero_morphism(r_sum.module, K)
    return q_sum.module, q_in, r_sum.module, r_in


# ---------------------------------------------------------------------------
# the explicit syzygy construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectivePair:
    """Terminal marker: the syzygy collapsed to a projective complex."""

    module: Module


@dataclass(frozen=True)
class FormulaSyzygy:
    resolution: TruncatedResolution
    cover_complex: BoundedComplex
    cover_map: dict      # degree -> Morphism P_X -> X
    kernel_map: dict     # degree -> Morphism Omega X -> P_X


def formula_syzygy(T: TruncatedResolution, verify: bool = True):
    """Syzygy of a truncated resolution in the category of bounded complexes.

    Returns a FormulaSyzygy whose resolution presents Omega(base); its
    length drops by one exactly when the last kernel is projective.  Every
    call verifies exactness of the assembled cover columns.
    """
    alg = T.algebra
    zero = zero_module(alg)
    m = T.m
    PQ: dict = {}
    qmap: dict = {}
    OQ: dict = {}
    jQ: dict = {}
    for k in range(1, m + 1):
        qk = T.Q.get(k, zero)
        if qk.total_dim:
            cov = top_and_cover(qk)
            sz = syzygy(qk)
            PQ[k], qmap[k] = cov.module, cov.surjection
            OQ[k], jQ[k] = sz.module, sz.inclusion
        else:
            PQ[k], OQ[k] = zero, zero
            qmap[k] = zero_morphism(zero, qk)
            jQ[k] = zero_morphism(zero, zero)
    last_projective = OQ[m].total_dim == 0
    if last_projective and m == 1:
        marker = ProjectivePair(T.Q[m])
        if verify:
            _verify_formula(T, PQ, qmap, OQ, jQ)
        return marker

    new_m = m - 1 if last_projective else m
    sums: dict = {}
    newP: dict = {}
    for k in range(0, new_m):
        second = T.P.get(k + 1, zero)
        sm = direct_sum(alg, [PQ.get(k + 1, zero), second])
        sums[k] = sm
        newP[k] = sm.module

    base2 = T.K[1]
    p1 = (T.qinK[1] @ qmap[1]) if T.Q[1].total_dim else zero_morphism(PQ[1], base2)
    if 1 in T.coverR:
        p2 = T.rinK[1] @ T.coverR[1]
    else:
        p2 = zero_morphism(T.P.get(1, zero), base2)
    nf0 = block_morphism_from_summands(sums[0], base2, [p1, p2])

    nQ: dict = {}
    nR: dict = {}
    niQ: dict = {}
    niR: dict = {}
    nK: dict = {}
    njK: dict = {}
    nqinK: dict = {}
    nrinK: dict = {}
    nfmaps: dict = {}
    ncoverR: dict = {}

    for k in range(1, new_m):
        # R'_k = K_{k+1} inside the P_k block of P'_{k-1}
        nR[k] = T.K[k + 1]
        niR[k] = sums[k - 1].injections[1] @ T.jK[k + 1]
        cpieces = [(T.qinK[k + 1] @ qmap[k + 1]) if T.Q[k + 1].total_dim
                   else zero_morphism(PQ[k + 1], nR[k])]
        if (k + 1) in T.coverR:
            cpieces.append(T.rinK[k + 1] @ T.coverR[k + 1])
        else:
            # k + 1 == m: the last kernel is covered through qinK[m] = id
            cpieces.append(zero_morphism(T.P.get(k + 1, zero), nR[k]))
        ncoverR[k] = block_morphism_from_summands(sums[k], nR[k], cpieces)
        nfmaps[k] = niR[k] @ ncoverR[k]

    for k in range(1, new_m + 1):
        if k == new_m:
            if last_projective:
                # absorb the projective last kernel into the final peel
                kparts = [OQ[k], T.K[m]]
                kin = [sums[k - 1].injections[0] @ jQ[k] if OQ[k].total_dim
                       else zero_morphism(OQ[k], newP[k - 1]),
                       sums[k - 1].injections[1] @ T.jK[m]]
            else:
                kparts = [OQ[m]]
                kin = [sums[k - 1].injections[0] @ jQ[m] if OQ[m].total_dim
                       else zero_morphism(OQ[m], newP[k - 1])]
            ksum = direct_sum(alg, kparts)
            nK[k] = ksum.module
            njK[k] = block_morphism_from_summands(ksum, newP[k - 1], kin)
            nQ[k] = nK[k]
            nqinK[k] = identity_morphism(nK[k])
            niQ[k] = njK[k]
        else:
            ksum = direct_sum(alg, [OQ[k], T.K[k + 1]])
            nK[k] = ksum.module
            pieces = [sums[k - 1].injections[0] @ jQ[k] if OQ[k].total_dim
                      else zero_morphism(OQ[k], newP[k - 1]),
                      sums[k - 1].injections[1] @ T.jK[k + 1]]
            njK[k] = block_morphism_from_summands(ksum, newP[k - 1], pieces)
            nQ[k] = OQ[k]
            nqinK[k] = ksum.injections[0]
            nrinK[k] = ksum.injections[1]
            niQ[k] = njK[k] @ nqinK[k]

    out = TruncatedResolution(base2, new_m, newP, nf0, nfmaps, ncoverR,
                              nQ, nR, niQ, niR, nK, njK, nqinK, nrinK, plan=None)
    out.validate()
    if verify:
        cover_cx, gmaps, hmaps = _verify_formula(T, PQ, qmap, OQ, jQ)
    else:
        cover_cx, gmaps, hmaps = None, None, None
    return FormulaSyzygy(out, cover_cx, gmaps, hmaps)


def _verify_formula(T: TruncatedResolution, PQ, qmap, OQ, jQ):
    """Assemble the cover complex P_X with its surjection g and kernel
    inclusion h, plus the syzygy complex itself on the (OQ_k, PQ_{k+1},
    P_{k+1}) slot layout, and check exactness degree by degree.

    The signs carried by h alternate with the degree; the chain-map check
    is the identity they exist to satisfy.
    """
    alg = T.algebra
    field = alg.field
    zero = zero_module(alg)
    m = T.m
    X, xsums = T.rendered()

    def part(d, slot):
        # slot layout per degree: (PQ_d, P_d, PQ_{d+1}, P_{d+1})
        if slot == 0:
            return PQ.get(d, zero)
        if slot == 1:
            return T.P.get(d, zero)
        if slot == 2:
            return PQ.get(d + 1, zero)
        return T.P.get(d + 1, zero)

    psums = {}
    pmods = {}
    for d in range(-1, m + 1):
        sm = direct_sum(alg, [part(d, s) for s in range(4)])
        psums[d] = sm
        pmods[d] = sm.module
    pdiffs = {}
    for d in range(0, m + 1):
        tgt = psums[d - 1]
        pieces = []
        for s in range(4):
            mod = part(d, s)
            if s == 0 and mod.total_dim:
                pieces.append(tgt.injections[2] @ identity_morphism(mod))
            elif s == 1 and mod.total_dim:
                pieces.append(tgt.injections[3] @ identity_morphism(mod))
            else:
                pieces.append(zero_morphism(mod, tgt.module))
        pdiffs[d] = block_morphism_from_summands(psums[d], tgt.module, pieces)
    cover_cx = BoundedComplex(alg, -1, pmods, pdiffs)

    # the syzygy complex on slots (OQ_d, PQ_{d+1}, P_{d+1})
    osums = {}
    omods = {-1: T.K[1]}
    for d in range(0, m + 1):
        sm = direct_sum(alg, [OQ.get(d, zero), PQ.get(d + 1, zero), T.P.get(d + 1, zero)])
        osums[d] = sm
        omods[d] = sm.module
    odiffs = {}
    p1 = (T.qinK[1] @ qmap[1]) if T.Q[1].total_dim else zero_morphism(PQ.get(1, zero), T.K[1])
    p2 = (T.rinK[1] @ T.coverR[1]) if 1 in T.coverR else \
        zero_morphism(T.P.get(1, zero), T.K[1])
    odiffs[0] = block_morphism_from_summands(
        osums[0], T.K[1],
        [zero_morphism(OQ.get(0, zero), T.K[1]), p1, p2])
    for d in range(1, m + 1):
        tgt = osums[d - 1]
        pieces = []
        oqd = OQ.get(d, zero)
        pieces.append((tgt.injections[1] @ jQ[d]) if oqd.total_dim
                      else zero_morphism(oqd, tgt.module))
        pq_next = PQ.get(d + 1, zero)
        if pq_next.total_dim and (d + 1) in qmap and T.Q.get(d + 1, zero).total_dim:
            pieces.append(tgt.injections[2] @ T.iQ[d + 1] @ qmap[d + 1])
        else:
            pieces.append(zero_morphism(pq_next, tgt.module))
        p_next = T.P.get(d + 1, zero)
        if p_next.total_dim and (d + 1) in T.fmaps:
            pieces.append(tgt.injections[2] @ T.fmaps[d + 1])
        else:
            pieces.append(zero_morphism(p_next, tgt.module))
        odiffs[d] = block_morphism_from_summands(osums[d], tgt.module, pieces)
    BoundedComplex(alg, -1, omods, odiffs)  # validates d^2 = 0

    # g: P_X ->> X
    gmaps = {}
    gmaps[-1] = block_morphism_from_summands(
        psums[-1], T.base,
        [zero_morphism(part(-1, 0), T.base), zero_morphism(part(-1, 1), T.base),
         zero_morphism(part(-1, 2), T.base), T.f0])
    for d in range(0, m + 1):
        xs = xsums[d]
        qd = T.Q.get(d, zero)
        pd = T.P.get(d, zero)
        pieces = []
        pieces.append((xs.injections[0] @ qmap[d]) if d in qmap and qd.total_dim
                      else zero_morphism(part(d, 0), xs.module))
        pieces.append((xs.injections[1] @ identity_morphism(pd)) if pd.total_dim
                      else zero_morphism(part(d, 1), xs.module))
        if (d + 1) in qmap and T.Q.get(d + 1, zero).total_dim and pd.total_dim:
            pieces.append(xs.injections[1] @ T.iQ[d + 1] @ qmap[d + 1])
        else:
            pieces.append(zero_morphism(part(d, 2), xs.module))
        if (d + 1) in T.fmaps and pd.total_dim:
            pieces.append(xs.injections[1] @ T.fmaps[d + 1])
        else:
            pieces.append(zero_morphism(part(d, 3), xs.module))
        gmaps[d] = block_morphism_from_summands(psums[d], xs.module, pieces)

    # h: Omega X -> P_X, with the alternating degree signs
    hmaps = {}
    hmaps[-1] = (psums[-1].injections[3] @ T.jK[1]).scale(-1)
    for d in range(0, m + 1):
        sign = 1 if d % 2 == 0 else -1
        src = osums[d]
        parts = [OQ.get(d, zero), PQ.get(d + 1, zero), T.P.get(d + 1, zero)]
        pieces = []
        if parts[0].total_dim:
            pieces.append((psums[d].injections[0] @ jQ[d]).scale(-sign))
        else:
            pieces.append(zero_morphism(parts[0], pmods[d]))
        blk2 = None
        if parts[1].total_dim and T.P.get(d, zero).total_dim and \
                (d + 1) in qmap and T.Q.get(d + 1, zero).total_dim:
            blk2 = (psums[d].injections[1] @ T.iQ[d + 1] @ qmap[d + 1]).scale(-sign)
        mid = (psums[d].injections[2] @ identity_morphism(parts[1])).scale(sign) \
            if parts[1].total_dim else None
        if blk2 is not None and mid is not None:
            pieces.append(blk2.add(mid))
        elif mid is not None:
            pieces.append(mid)
        else:
            pieces.append(zero_morphism(parts[1], pmods[d]))
        blk3 = None
        if parts[2].total_dim and T.P.get(d, zero).total_dim and (d + 1) in T.fmaps:
            blk3 = (psums[d].injections[1] @ T.fmaps[d + 1]).scale(-sign)
        last = (psums[d].injections[3] @ identity_morphism(parts[2])).scale(sign) \
            if parts[2].total_dim else None
        if blk3 is not None and last is not None:
            pieces.append(blk3.add(last))
        elif last is not None:
            pieces.append(last)
        else:
            pieces.append(zero_morphism(parts[2], pmods[d]))
        hmaps[d] = block_morphism_from_summands(src, pmods[d], pieces)

    # verification proper: chain maps, exact columns
    for d in range(0, m + 1):
        if not (X.diffs[d] @ gmaps[d]).equals(gmaps[d - 1] @ pdiffs[d]):
            raise ExactnessError(f"cover surjection is not a chain map at degree {d}")
        if not (pdiffs[d] @ hmaps[d]).equals(hmaps[d - 1] @ odiffs[d]):
            raise ExactnessError(f"kernel inclusion is not a chain map at degree {d}")
    for d in range(-1, m + 1):
        g = gmaps[d]
        h = hmaps[d]
        if not g.is_surjective():
            raise ExactnessError(f"cover map not surjective at degree {d}")
        if not h.is_injective():
            raise ExactnessError(f"kernel inclusion not injective at degree {d}")
        if not (g @ h).is_zero():
            raise ExactnessError(f"g . h != 0 at degree {d}")
        for v in range(alg.quiver.vertex_count):
            gk = g.components[v]
            if h.components[v].shape[1] != gk.shape[1] - field.rank(gk):
                raise ExactnessError(f"column at degree {d} is not exact")
    return cover_cx, gmaps, hmaps


# ---------------------------------------------------------------------------
# indecomposability criterion for the wrapped complex
# ---------------------------------------------------------------------------

def check_indecomposability_criterion(T: TruncatedResolution,
                                      rng: np.random.Generator) -> tuple[bool, dict]:
    """Sufficient criterion for the wrapping of T to be indecomposable:
    the base is indecomposable and Hom(X_i, ker d_j) = 0 whenever
    i = j mod 3 and i != -1.  Returns the verdict with the kernel table."""
    X = T.to_bounded_complex()
    field = T.algebra.field
    kernels = {}
    kernels[-1] = T.base
    for j in range(0, T.m + 1):
        d = X.diffs[j]
        kers = [field.kernel_basis(c) for c in d.components]
        kernels[j], _ = submodule(X.module_at(j), kers)
    table = {j: kernels[j].dims for j in sorted(kernels)}
    dec = decompose(T.base, rng)
    if not (len(dec.summands) == 1 and dec.summands[0][1] == 1):
        return False, {"reason": "base is decomposable", "kernels": table}
    for i in range(0, T.m + 1):
        for j in range(-1, T.m + 1):
            if (i - j) % 3 != 0:
                continue
            if X.module_at(i).total_dim == 0 or kernels[j].total_dim == 0:
                continue
            if hom_basis(X.module_at(i), kernels[j]):
                return False, {"reason": f"Hom(X_{i}, ker d_{j}) != 0", "kernels": table}
    return True, {"kernels": table}


# ---------------------------------------------------------------------------
# iteration with structural summand splitting
# ---------------------------------------------------------------------------

def split_summands(T: TruncatedResolution) -> list[TruncatedResolution]:
    """Split T along the direct-sum structure visible in its coordinates.

    Builds the interaction graph of all complex coordinates (module actions
    within a degree, differential entries across degrees) plus the kernel
    bookkeeping, and slices every structural piece along its connected
    components.  Falls back to [T] when any stored map straddles components.
    """
    X, xsums = T.rendered()
    alg = T.algebra
    nv = alg.quiver.vertex_count
    # global coordinate index per (degree, vertex, i)
    index = {}
    t = 0
    for d in range(-1, T.m + 1):
        mod = X.module_at(d)
        for v in range(nv):
            for i in range(mod.dims[v]):
                index[(d, v, i)] = t
                t += 1
    if t == 0:
        return [T]
    parent = list(range(t))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for d in range(-1, T.m + 1):
        mod = X.module_at(d)
        for a in alg.quiver.arrows:
            mat = mod.action[a.label]
            for i, j in zip(*np.nonzero(mat)):
                union(index[(d, a.target, int(i))], index[(d, a.source, int(j))])
    for d in range(0, T.m + 1):
        dmor = X.diffs[d]
        for v in range(nv):
            for i, j in zip(*np.nonzero(dmor.components[v])):
                union(index[(d - 1, v, int(i))], index[(d, v, int(j))])

    roots = sorted({find(x) for x in range(t)}, key=lambda r: min(
        x for x in range(t) if find(x) == r))
    if len(roots) == 1:
        return [T]
    comp_of = {x: roots.index(find(x)) for x in range(t)}
    ncomp = len(roots)

    def coord_comps(d, v, offset, count):
        return [comp_of[index[(d, v, offset + i)]] for i in range(count)]

    # per-piece coordinate component labels
    def degree_piece_comps(d, which):
        """which: 0 = Q part, 1 = P part of the rendered degree object."""
        sm = xsums[d]
        mod = sm.injections[which].source
        out = []
        for v in range(nv):
            off = sm.offsets[which][v]
            out.append(coord_comps(d, v, off, mod.dims[v]))
        return out

    base_comps = [coord_comps(-1, v, 0, T.base.dims[v]) for v in range(nv)]
    q_comps = {k: degree_piece_comps(k, 0) for k in range(0, T.m + 1) if k in T.Q}
    p_comps = {k: degree_piece_comps(k, 1) for k in range(0, T.m + 1) if k in T.P}

    def assign_by_columns(mor: Morphism, target_comps):
        """Component of each source coordinate, via the column support in the
        target; None on conflict or all-zero columns."""
        out = []
        for v in range(nv):
            mat = mor.components[v]
            col_assign = []
            for j in range(mat.shape[1]):
                rows = np.nonzero(mat[:, j])[0]
                if len(rows) == 0:
                    col_assign.append(None)
                    continue
                comps = {target_comps[v][int(r)] for r in rows}
                if len(comps) != 1:
                    return None
                col_assign.append(comps.pop())
            out.append(col_assign)
        return out

    k_comps = {}
    for k in range(1, T.m + 1):
        got = assign_by_columns(T.jK[k], p_comps[k - 1])
        if got is None or any(c is None for row in got for c in row):
            return [T]
        k_comps[k] = got
    r_comps = {}
    for k in range(1, T.m):
        got = assign_by_columns(T.rinK[k], k_comps[k])
        if got is None or any(c is None for row in got for c in row):
            return [T]
        r_comps[k] = got

    def check_morphism(mor, src_comps, tgt_comps):
        for v in range(nv):
            mat = mor.components[v]
            for i, j in zip(*np.nonzero(mat)):
                if tgt_comps[v][int(i)] != src_comps[v][int(j)]:
                    return False
        return True

    consistent = True
    consistent &= check_morphism(T.f0, p_comps[0], base_comps)
    for k in range(1, T.m):
        consistent &= check_morphism(T.coverR[k], p_comps[k], r_comps[k])
        consistent &= check_morphism(T.qinK[k], q_comps[k], k_comps[k])
    consistent &= check_morphism(T.qinK[T.m], q_comps[T.m], k_comps[T.m])
    if not consistent:
        return [T]

    def slice_module(mod: Module, comps, target):
        keep = [[i for i in range(mod.dims[v]) if comps[v][i] == target]
                for v in range(nv)]
        dims = [len(keep[v]) for v in range(nv)]
        action = {}
        for a in alg.quiver.arrows:
            mat = mod.action[a.label]
            action[a.label] = mat[np.ix_(keep[a.target], keep[a.source])].copy()
        return Module(alg, dims, action), keep

    def slice_morphism(mor, src_keep, tgt_keep, src_mod, tgt_mod):
        comps = [mor.components[v][np.ix_(tgt_keep[v], src_keep[v])].copy()
                 for v in range(nv)]
        return Morphism(src_mod, tgt_mod, comps)

    results = []
    for target in range(ncomp):
        nbase, base_keep = slice_module(T.base, base_comps, target)
        if nbase.total_dim == 0:
            return [T]
        P: dict = {}
        Q: dict = {}
        R: dict = {}
        K: dict = {}
        keeps = {"P": {}, "Q": {}, "R": {}, "K": {}}
        for k in range(0, T.m):
            P[k], keeps["P"][k] = slice_module(T.P[k], p_comps[k], target)
        for k in range(1, T.m + 1):
            Q[k], keeps["Q"][k] = slice_module(T.Q[k], q_comps[k], target)
            K[k], keeps["K"][k] = slice_module(T.K[k], k_comps[k], target)
        for k in range(1, T.m):
            R[k], keeps["R"][k] = slice_module(T.R[k], r_comps[k], target)
        f0 = slice_morphism(T.f0, keeps["P"][0], base_keep, P[0], nbase)
        fmaps = {}
        coverR = {}
        iQ = {}
        iR = {}
        jK = {}
        qinK = {}
        rinK = {}
        for k in range(1, T.m):
            fmaps[k] = slice_morphism(T.fmaps[k], keeps["P"][k], keeps["P"][k - 1],
                                      P[k], P[k - 1])
            coverR[k] = slice_morphism(T.coverR[k], keeps["P"][k], keeps["R"][k],
                                       P[k], R[k])
            iR[k] = slice_morphism(T.iR[k], keeps["R"][k], keeps["P"][k - 1],
                                   R[k], P[k - 1])
            rinK[k] = slice_morphism(T.rinK[k], keeps["R"][k], keeps["K"][k],
                                     R[k], K[k])
        for k in range(1, T.m + 1):
            jK[k] = slice_morphism(T.jK[k], keeps["K"][k], keeps["P"][k - 1],
                                   K[k], P[k - 1])
            qinK[k] = slice_morphism(T.qinK[k], keeps["Q"][k], keeps["K"][k],
                                     Q[k], K[k])
            iQ[k] = slice_morphism(T.iQ[k], keeps["Q"][k], keeps["P"][k - 1],
                                   Q[k], P[k - 1])
        # trim trailing zero degrees
        new_m = T.m
        while new_m > 1 and Q[new_m].total_dim == 0 and P.get(new_m - 1, zero_module(alg)).total_dim == 0:
            Q.pop(new_m)
            K.pop(new_m)
            jK.pop(new_m)
            qinK.pop(new_m)
            iQ.pop(new_m)
            P.pop(new_m - 1, None)
            new_m -= 1
            # the previous R becomes the final whole kernel
            if new_m in R:
                Q[new_m] = K[new_m]
                qinK[new_m] = identity_morphism(K[new_m])
                iQ[new_m] = jK[new_m]
                R.pop(new_m)
                rinK.pop(new_m, None)
                coverR.pop(new_m, None)
                fmaps.pop(new_m, None)
                iR.pop(new_m, None)
        piece = TruncatedResolution(nbase, new_m, P, f0, fmaps, coverR, Q, R,
                                    iQ, iR, K, jK, qinK, rinK, plan=None)
        piece.validate()
        results.append(piece)
    results.sort(key=lambda r: (r.total_dim(), tuple(sorted(r.degree_module_dims().items()))))
    return results


def iterate_syzygy(T: TruncatedResolution, t: int,
                   verify: bool = True) -> list:
    """Apply the explicit syzygy t times, splitting off structural direct
    summands after each application.  Projective-pair leftovers (possible
    only when a length-1 resolution ends in a projective kernel) vanish
    under further syzygies and are dropped mid-iteration."""
    parts: list = [T]
    for step in range(t):
        nxt: list = []
        for p in parts:
            if isinstance(p, ProjectivePair):
                continue
            out = formula_syzygy(p, verify=verify)
            if isinstance(out, ProjectivePair):
                if step == t - 1:
                    nxt.append(out)
                continue
            nxt.extend(split_summands(out.resolution))
        parts = nxt
    return parts
