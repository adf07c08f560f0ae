"""The module families behind the infinite phi-dimension example.

X_k and Y_k are truncated projective resolutions of the simples at the two
symmetric vertices of the base algebra, with a simple peeled off the kernel
every third step; Z_k^i truncates the minimal resolution of the i-th simple
without peeling.  Wrapped into 3-periodic complexes they live over the
tensor algebra, where the verification pipeline checks:

* the small syzygy rotation  W Z^3 -> W Z^1 -> W Z^2 -> W Z^3 + W Z^4;
* the decomposition of the 3k-th syzygy of W X_k into Z-classes, against the
  parity-dependent closed form;
* the lower-bound certificate: the (3k+1)-st syzygies of W X_k and W Y_k
  agree while the 3k-th do not, so phi of their sum is at least 3k.

Both syzygy routes are exercised: the explicit formula in the category of
bounded complexes, and plain projective covers over the tensor algebra; the
identified class multisets must agree.
"""

from __future__ import annotations

import hashlib
import json
import time
from collections import Counter
from dataclasses import dataclass, field as dfield

import numpy as np

from .complexes import tensor_algebra_of, wrap, periodic_to_module
from .grothendieck import ClassRegistry, phi_data, phi_lower_bound
from .primefield import PrimeField
from .quivers import builtin_algebra
from .rep import (
    Module,
    decompose,
    direct_sum,
    is_isomorphic,
    projective,
    simple,
    syzygy,
    visible_blocks,
)
from .resolutions import (
    EMPTY_PLAN,
    SplitPlan,
    TruncatedResolution,
    build,
    check_indecomposability_criterion,
    iterate_syzygy,
)

# base quiver vertex numbering: 1, 2, 3, 4 with the two symmetric spokes 3, 4
_V3, _V4 = 2, 3  # zero-based indices of vertices 3 and 4


@dataclass(frozen=True)
class FamilySpec:
    kind: str                 # "X", "Y" or "Z"
    k: int
    vertex: int | None = None  # 1-based simple index, Z only

    def __post_init__(self):
        if self.kind not in ("X", "Y", "Z"):
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if self.kind == "Z":
            if self.vertex not in (1, 2, 3, 4):
                raise ValueError("Z families need a vertex in 1..4")
        elif self.vertex is not None:
            raise ValueError(f"{self.kind} families do not take a vertex")
        if self.kind in ("X", "Y") and self.k < 1:
            raise ValueError("X and Y families need k >= 1")

    @property
    def label(self) -> str:
        if self.kind == "Z":
            return f"Z{self.k}^{self.vertex}"
        return f"{self.kind}{self.k}"

    @classmethod
    def parse(cls, text: str) -> "FamilySpec":
        text = text.strip()
        kind = text[0].upper()
        rest = text[1:]
        if kind == "Z":
            if "^" in rest:
                k_str, v_str = rest.split("^")
            elif "." in rest:
                k_str, v_str = rest.split(".")
            else:
                raise ValueError("Z family literals look like Z1^4")
            return cls("Z", int(k_str), int(v_str))
        return cls(kind, int(rest))


@dataclass
class VerificationReport:
    k: int
    iso_at_3k_plus_1: bool
    witness_hash: str
    noniso_at_3k: bool
    distinguishing: dict
    big_syzygy_match: bool
    multiset_x: list
    multiset_y: list
    expected_multiset: list
    phi_lower_bound: int | None
    certificate_refuted: str | None
    conjectured_bound: int
    exact_phi: int | None
    nonprojective_ok: bool
    nonprojective_checked_to: int
    runtime_seconds: float
    dimension_stats: dict

    @property
    def passes_expected(self) -> bool:
        return (self.iso_at_3k_plus_1 and self.noniso_at_3k
                and self.big_syzygy_match and self.nonprojective_ok
                and self.phi_lower_bound == 3 * self.k
                and (self.exact_phi is None or self.exact_phi >= 3 * self.k))

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "iso_at_3k_plus_1": self.iso_at_3k_plus_1,
            "witness_hash": self.witness_hash,
            "noniso_at_3k": self.noniso_at_3k,
            "distinguishing": self.distinguishing,
            "big_syzygy_match": self.big_syzygy_match,
            "multiset_x": self.multiset_x,
            "multiset_y": self.multiset_y,
            "expected_multiset": self.expected_multiset,
            "phi_lower_bound": self.phi_lower_bound,
            "certificate_refuted": self.certificate_refuted,
            "conjectured_bound": self.conjectured_bound,
            "exact_phi": self.exact_phi,
            "nonprojective_ok": self.nonprojective_ok,
            "nonprojective_checked_to": self.nonprojective_checked_to,
            "runtime_seconds": round(self.runtime_seconds, 3),
            "dimension_stats": self.dimension_stats,
            "passes_expected": self.passes_expected,
        }

    def render_text(self) -> str:
        lines = [f"k = {self.k}"]
        lines.append(f"  Omega^{3 * self.k} W X_{self.k}  = " + _render_multiset(self.multiset_x))
        lines.append(f"  Omega^{3 * self.k} W Y_{self.k}  = " + _render_multiset(self.multiset_y))
        lines.append(f"  matches closed form: {self.big_syzygy_match}")
        lines.append(f"  isomorphic at step {3 * self.k + 1}: {self.iso_at_3k_plus_1}"
                     f"  (witness {self.witness_hash[:12]})")
        lines.append(f"  non-isomorphic at step {3 * self.k}: {self.noniso_at_3k}"
                     f"  (distinguishing: {self.distinguishing.get('only_in_x')}"
                     f" vs {self.distinguishing.get('only_in_y')})")
        bound = self.phi_lower_bound if self.phi_lower_bound is not None else "refuted"
        lines.append(f"  certified phi lower bound: {bound}"
                     f"  (unproven remark would give {self.conjectured_bound})")
        if self.exact_phi is not None:
            lines.append(f"  computed phi(W X_{self.k} + W Y_{self.k}) = {self.exact_phi}")
        lines.append(f"  nonzero non-projective syzygies through t = "
                     f"{self.nonprojective_checked_to}: {self.nonprojective_ok}")
        lines.append(f"  runtime: {self.runtime_seconds:.1f}s; dims: {self.dimension_stats}")
        return "\n".join(lines)


def _render_multiset(items) -> str:
    if not items:
        return "0"
    parts = []
    for (j, i), mult in sorted(Counter({tuple(key): m for key, m in items}).items()):
        term = f"W Z{j}^{i}"
        parts.append(term if mult == 1 else f"({term})^{mult}")
    return " + ".join(parts)


def expected_big_multiset(k: int, side: str) -> Counter:
    """The closed form for the 3k-th syzygy class multiset of W X_k / W Y_k."""
    lead_x_even = [(k, 3), (k - 1, 4)]
    lead_x_odd = [(k, 4), (k - 1, 3)]
    if side == "X":
        lead = lead_x_even if k % 2 == 0 else lead_x_odd
    else:
        lead = lead_x_odd if k % 2 == 0 else lead_x_even
    out = Counter(lead)
    for j in range(0, k - 1):
        out[(j, 3)] += k - j - 1
        out[(j, 4)] += k - j - 1
    return out


class Workbench:
    """Shared context: the base algebra, its cycle tensor algebra, class
    registries on both sides, and a seeded randomness source."""

    def __init__(self, field: PrimeField | None = None, seed: int = 0,
                 max_classes: int = 2048):
        self.field = field or PrimeField()
        self.algebra = builtin_algebra("A", self.field)
        self.talg = tensor_algebra_of(self.algebra)
        self.reg_base = ClassRegistry(self.algebra, max_classes=max_classes)
        self.reg_tensor = ClassRegistry(self.talg, max_classes=max_classes)
        self.rng = np.random.default_rng(seed)
        self._families: dict[FamilySpec, TruncatedResolution] = {}
        self._wrapped: dict[FamilySpec, Module] = {}

    # -- families -----------------------------------------------------------

    def make_family(self, spec: FamilySpec) -> TruncatedResolution:
        got = self._families.get(spec)
        if got is not None:
            return got
        m = 3 + 3 * spec.k
        if spec.kind == "Z":
            base = simple(self.algebra, spec.vertex - 1)
            plan = EMPTY_PLAN
        else:
            v = _V3 if spec.kind == "X" else _V4
            base = simple(self.algebra, v)
            cid = self.reg_base.register(simple(self.algebra, v), self.rng)
            plan = SplitPlan.from_dict(
                {3 + 3 * r: [(cid, 1)] for r in range(spec.k)})
        out = build(base, m, plan, self.reg_base, self.rng)
        if spec.kind in ("X", "Y"):
            self._check_family_shape(spec, out)
        self._families[spec] = out
        return out

    def _check_family_shape(self, spec: FamilySpec, T: TruncatedResolution):
        """Degree-wise dims must match the printed diagram pattern."""
        p = {v: projective(self.algebra, v).dims for v in range(4)}
        s = {v: simple(self.algebra, v).dims for v in range(4)}
        main, peel = (_V3, _V3) if spec.kind == "X" else (_V4, _V4)
        other = _V4 if spec.kind == "X" else _V3
        expect = {-1: s[main], 0: p[main], 1: p[0], 2: p[1]}
        d = 3
        for _ in range(spec.k):
            expect[d] = _vadd(p[other], s[peel])
            expect[d + 1] = p[0]
            expect[d + 2] = p[1]
            d += 3
        expect[d] = _vadd(s[_V3], s[_V4])
        got = T.degree_module_dims()
        if got != expect:
            raise RuntimeError(f"family {spec.label} does not match its diagram: {got}")

    def wrapped_module(self, spec: FamilySpec) -> Module:
        got = self._wrapped.get(spec)
        if got is None:
            got = periodic_to_module(wrap(self.make_family(spec).to_bounded_complex()),
                                     self.talg)
            self._wrapped[spec] = got
        return got

    # -- formal-sum syzygy evolution over the tensor algebra ----------------

    def c3_syzygy_parts(self, parts: list[Module]) -> list[Module]:
        out = []
        for p in parts:
            s = syzygy(p).module
            if s.total_dim == 0:
                continue
            for sub, _ in visible_blocks(s):
                out.append(sub)
        return out

    def c3_chain(self, start: Module, steps: int) -> list[list[Module]]:
        """[parts after 0 steps, after 1 step, ...]; parts split along
        visible blocks, which syzygies over the tensor algebra preserve."""
        chain = [[start]]
        parts = [start]
        for _ in range(steps):
            parts = self.c3_syzygy_parts(parts)
            chain.append(parts)
        return chain

    # -- identification against the Z references ----------------------------

    def reference_pool(self, k: int) -> dict[tuple[int, int], Module]:
        refs = {}
        for j in range(0, k + 1):
            for i in (1, 2, 3, 4):
                refs[(j, i)] = self.wrapped_module(FamilySpec("Z", j, i))
        return refs

    def identify_parts(self, parts: list[Module], refs: dict) -> Counter:
        """Krull-Schmidt classes of a formal sum, named by the references.

        Every indecomposable summand must match exactly one reference; a
        failure to identify raises, since the closed forms claim otherwise.
        """
        out: Counter = Counter()
        for part in parts:
            dec = decompose(part, self.rng)
            for rep_mod, mult in dec.summands:
                found = None
                for key, ref in refs.items():
                    if ref.dims != rep_mod.dims:
                        continue
                    ok, _ = is_isomorphic(ref, rep_mod, self.rng)
                    if ok:
                        found = key
                        break
                if found is None:
                    raise RuntimeError(
                        f"summand with dims {rep_mod.dims} matches no W Z reference")
                out[found] += mult
        return out

    # -- the verification operations ----------------------------------------

    def verify_small_syzygy(self, k: int) -> bool:
        """Omega W Z_k^3 = W Z_k^1 = Omega W Z_k^4, Omega W Z_k^1 = W Z_k^2,
        Omega W Z_k^2 = W Z_k^3 + W Z_k^4, after wrapping."""
        z = {i: self.wrapped_module(FamilySpec("Z", k, i)) for i in (1, 2, 3, 4)}
        om = {i: syzygy(z[i]).module for i in (1, 2, 3, 4)}
        ok3, _ = is_isomorphic(om[3], z[1], self.rng, strategy="decompose")
        ok4, _ = is_isomorphic(om[4], z[1], self.rng, strategy="decompose")
        ok1, _ = is_isomorphic(om[1], z[2], self.rng, strategy="decompose")
        pair = direct_sum(self.talg, [z[3], z[4]]).module
        ok2, _ = is_isomorphic(om[2], pair, self.rng, strategy="decompose")
        return ok3 and ok4 and ok1 and ok2

    def big_syzygy_multisets(self, k: int):
        """Identified class multisets of the 3k-th syzygies, by both routes."""
        refs = self.reference_pool(k)
        results = {}
        chains = {}
        for side in ("X", "Y"):
            spec = FamilySpec(side, k)
            start = self.wrapped_module(spec)
            chain = self.c3_chain(start, 3 * k)
            chains[side] = chain
            results[side] = self.identify_parts(chain[-1], refs)
            # independent route: the explicit formula in bounded complexes
            cb_parts = iterate_syzygy(self.make_family(spec), 3 * k)
            wrapped = [periodic_to_module(wrap(p.to_bounded_complex()), self.talg)
                       for p in cb_parts]
            formula_side = self.identify_parts(wrapped, refs)
            if formula_side != results[side]:
                raise RuntimeError(
                    f"syzygy routes disagree for {side}_{k}: "
                    f"{formula_side} vs {results[side]}")
        return results, chains, refs

    def verify_big_syzygy(self, k: int) -> bool:
        if k < 1:
            raise ValueError("k must be at least 1")
        results, _, _ = self.big_syzygy_multisets(k)
        return (results["X"] == expected_big_multiset(k, "X")
                and results["Y"] == expected_big_multiset(k, "Y"))

    def verify_main(self, k: int, compute_exact_phi: bool = False,
                    run_certificate: bool = True) -> VerificationReport:
        if k < 1:
            raise ValueError("k must be at least 1")
        t0 = time.time()
        results, chains, refs = self.big_syzygy_multisets(k)
        mx, my = results["X"], results["Y"]
        expected_x = expected_big_multiset(k, "X")
        big_match = (mx == expected_x and my == expected_big_multiset(k, "Y"))
        noniso = mx != my
        only_x = sorted((mx - my).keys())
        only_y = sorted((my - mx).keys())
        # the distinguishing pair per the closed form: W Z_k^3 vs W Z_k^4
        lead3, _ = is_isomorphic(refs[(k, 3)], refs[(k, 4)], self.rng)
        distinguishing = {
            "only_in_x": [f"WZ{j}^{i}" for j, i in only_x],
            "only_in_y": [f"WZ{j}^{i}" for j, i in only_y],
            "WZ_k3_iso_WZ_k4": lead3,
        }
        # one more syzygy on each side and compare class multisets
        parts_x = self.c3_syzygy_parts(chains["X"][-1])
        parts_y = self.c3_syzygy_parts(chains["Y"][-1])
        next_x = self.identify_parts(parts_x, refs)
        next_y = self.identify_parts(parts_y, refs)
        iso_next = next_x == next_y
        witness_hash = hashlib.sha256(
            json.dumps(sorted((list(key), m) for key, m in next_x.items())).encode()
        ).hexdigest()
        # the module-level certificate of Lemma 3.1(2) at t = 3k + 1
        bound = None
        refuted = None
        if run_certificate:
            cert = phi_lower_bound(self.wrapped_module(FamilySpec("X", k)),
                                   self.wrapped_module(FamilySpec("Y", k)),
                                   3 * k + 1, self.rng)
            bound = cert.bound
            refuted = cert.refuted
            if cert.certified != (iso_next and noniso):
                raise RuntimeError("certificate disagrees with multiset evidence")
        elif iso_next and noniso:
            bound = 3 * k
        # non-projectivity sweep supporting infinite projective dimension
        sweep_to = 3 * k + 6
        parts = chains["X"][-1]
        ok_sweep = all(chains["X"][t] for t in range(1, 3 * k + 1))
        for _ in range(3 * k, sweep_to + 1):
            parts = self.c3_syzygy_parts(parts)
            ok_sweep = ok_sweep and bool(parts)
        exact = None
        if compute_exact_phi:
            both = direct_sum(self.talg, [self.wrapped_module(FamilySpec("X", k)),
                                          self.wrapped_module(FamilySpec("Y", k))]).module
            exact = phi_data(both, self.reg_tensor, self.rng).value
        dims = {
            "WX_k": self.wrapped_module(FamilySpec("X", k)).total_dim,
            "omega_3k_total": sum(p.total_dim for p in chains["X"][-1]),
            "registry_classes": len(self.reg_tensor),
        }
        return VerificationReport(
            k=k,
            iso_at_3k_plus_1=iso_next,
            witness_hash=witness_hash,
            noniso_at_3k=noniso,
            distinguishing=distinguishing,
            big_syzygy_match=big_match,
            multiset_x=sorted((list(key), m) for key, m in mx.items()),
            multiset_y=sorted((list(key), m) for key, m in my.items()),
            expected_multiset=sorted((list(key), m) for key, m in expected_x.items()),
            phi_lower_bound=bound,
            certificate_refuted=refuted,
            conjectured_bound=3 * k + 1,
            exact_phi=exact,
            nonprojective_ok=ok_sweep,
            nonprojective_checked_to=sweep_to,
            runtime_seconds=time.time() - t0,
            dimension_stats=dims,
        )

    def family_indecomposable(self, spec: FamilySpec) -> bool:
        ok, _ = check_indecomposability_criterion(self.make_family(spec), self.rng)
        return ok


def _vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def swap34_module(M: Module) -> Module:
    """Apply the base-quiver automorphism exchanging the two symmetric
    vertices (and the arrows into them) to a module over A or over the
    tensor algebra."""
    alg = M.algebra
    from .quivers import CycleTensorAlgebra

    if isinstance(alg, CycleTensorAlgebra):
        def vmap(idx):
            v, c = alg.vertex_pair(idx)
            v = {_V3: _V4, _V4: _V3}.get(v, v)
            return alg.vertex_index(v, c)

        def amap(label):
            name, rest = label.split("@", 1)
            if name.startswith("d"):
                lvl = name[1:]
                v = int(rest)
                v2 = {3: 4, 4: 3}.get(v, v)
                return f"d{lvl}@{v2}"
            swapped = {"x2": "x2p", "x2p": "x2", "x3": "x4", "x4": "x3"}.get(name, name)
            return f"{swapped}@{rest}"
    else:
        def vmap(v):
            return {_V3: _V4, _V4: _V3}.get(v, v)

        def amap(label):
            return {"x2": "x2p", "x2p": "x2", "x3": "x4", "x4": "x3"}.get(label, label)

    nv = alg.quiver.vertex_count
    dims = [0] * nv
    for v in range(nv):
        dims[vmap(v)] = M.dims[v]
    action = {}
    for a in alg.quiver.arrows:
        action[amap(a.label)] = M.action[a.label]
    return Module(alg, dims, action)
