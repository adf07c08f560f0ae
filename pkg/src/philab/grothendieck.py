"""The split Grothendieck group, the syzygy operator L, and phi/psi.

K0 is free abelian on the isomorphism classes of indecomposable
non-projective modules.  A ClassRegistry assigns stable integer ids to the
classes encountered in a session; K0 elements are sparse integer vectors
over those ids.  The syzygy functor induces L by sending a class to the
class vector of its syzygy.

phi(M) is the first index where the rank of L^t<add M> stabilizes
permanently.  Consecutive equal ranks do not certify stabilization (the
rank can plateau and drop later, e.g. for any module of projective
dimension 2, and for the wrapped complex pairs this package studies).  The
computation therefore closes the set of classes reachable from M under L,
forms the transition matrix on that finite set, and reads the permanent
rank off the matrix: once the kernels of its powers stabilize (Fitting),
image dimensions can never drop again.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sympy import Matrix as SymMatrix

from .rep import (
    Decomposition,
    Module,
    decompose,
    is_isomorphic,
    is_projective,
    syzygy,
    syzygy_module,
)


class RegistryOverflow(RuntimeError):
    """The syzygy closure exceeded the configured class budget."""


class ClassRegistry:
    """Stable ids for indecomposable non-projective iso-classes.

    Insertions serialize through a lock; ids are never reused.  With a
    persistence path attached, each new representative is appended to the
    JSON-lines file as it is registered.
    """

    def __init__(self, algebra, max_classes: int = 512):
        self.algebra = algebra
        self.max_classes = max_classes
        self._reps: list[Module] = []
        self._by_dims: dict[tuple, list[int]] = {}
        self._syzygy_class: dict[int, "K0Vector"] = {}
        self._lock = threading.Lock()
        self._persist_path: Path | None = None

    def __len__(self):
        return len(self._reps)

    def rep(self, cid: int) -> Module:
        return self._reps[cid]

    def register(self, M: Module, rng: np.random.Generator) -> int:
        for cid in self._by_dims.get(M.dims, []):
            ok, _ = is_isomorphic(self._reps[cid], M, rng)
            if ok:
                return cid
        with self._lock:
            # re-check under the lock in case of a concurrent insertion
            for cid in self._by_dims.get(M.dims, []):
                ok, _ = is_isomorphic(self._reps[cid], M, rng)
                if ok:
                    return cid
            cid = len(self._reps)
            if cid >= self.max_classes:
                raise RegistryOverflow(
                    f"class registry exceeded {self.max_classes} representatives")
            self._reps.append(M)
            self._by_dims.setdefault(M.dims, []).append(cid)
            if self._persist_path is not None:
                with self._persist_path.open("a") as fh:
                    fh.write(json.dumps({"id": cid, "module": M.to_dict()}) + "\n")
                    fh.flush()
            return cid

    def attach_persistence(self, path):
        self._persist_path = Path(path)

    def save(self, path) -> None:
        p = Path(path)
        tmp = p.with_suffix(p.suffix + ".tmp")
        with tmp.open("w") as fh:
            for cid, m in enumerate(self._reps):
                fh.write(json.dumps({"id": cid, "module": m.to_dict()}) + "\n")
        tmp.replace(p)

    @classmethod
    def load(cls, path, algebra, max_classes: int = 512) -> "ClassRegistry":
        reg = cls(algebra, max_classes=max_classes)
        p = Path(path)
        if not p.exists():
            return reg
        for line in p.read_text().splitlines():
            if not line.strip():
                continue
            data = json.loads(line)
            m = Module.from_dict(algebra, data["module"])
            cid = len(reg._reps)
            if cid != data["id"]:
                raise ValueError(f"registry file ids are not contiguous at {data['id']}")
            reg._reps.append(m)
            reg._by_dims.setdefault(m.dims, []).append(cid)
        return reg


class K0Vector:
    """Sparse integer vector over registry class ids."""

    __slots__ = ("counts",)

    def __init__(self, counts: dict[int, int] | None = None):
        self.counts = {int(k): int(v) for k, v in (counts or {}).items() if int(v) != 0}

    def is_zero(self) -> bool:
        return not self.counts

    def add(self, other: "K0Vector") -> "K0Vector":
        out = dict(self.counts)
        for k, v in other.counts.items():
            out[k] = out.get(k, 0) + v
        return K0Vector(out)

    def scale(self, c: int) -> "K0Vector":
        return K0Vector({k: c * v for k, v in self.counts.items()})

    def sub(self, other: "K0Vector") -> "K0Vector":
        return self.add(other.scale(-1))

    def __eq__(self, other):
        return isinstance(other, K0Vector) and self.counts == other.counts

    def __hash__(self):
        return hash(frozenset(self.counts.items()))

    def support(self) -> frozenset[int]:
        return frozenset(self.counts)

    def __repr__(self):
        inner = " + ".join(f"{v}*[{k}]" for k, v in sorted(self.counts.items()))
        return f"<K0 {inner or '0'}>"


def k0_class(M: Module, reg: ClassRegistry, rng: np.random.Generator,
             dec: Decomposition | None = None) -> K0Vector:
    """[M] in K0: decompose, drop projective summands, register the rest."""
    dec = dec or decompose(M, rng)
    counts: dict[int, int] = {}
    for rep_mod, mult in dec.summands:
        if is_projective(rep_mod):
            continue
        cid = reg.register(rep_mod, rng)
        counts[cid] = counts.get(cid, 0) + mult
    return K0Vector(counts)


def class_syzygy_vector(cid: int, reg: ClassRegistry, rng: np.random.Generator) -> K0Vector:
    """L applied to a single class, cached in the registry."""
    got = reg._syzygy_class.get(cid)
    if got is None:
        got = k0_class(syzygy(reg.rep(cid)).module, reg, rng)
        reg._syzygy_class[cid] = got
    return got


def L_apply(v, reg: ClassRegistry, rng: np.random.Generator) -> K0Vector:
    """The homomorphism induced by the syzygy functor, L[M] = [Omega M]."""
    if isinstance(v, Module):
        v = k0_class(v, reg, rng)
    out = K0Vector()
    for cid, mult in v.counts.items():
        out = out.add(class_syzygy_vector(cid, reg, rng).scale(mult))
    return out


# ---------------------------------------------------------------------------
# phi and psi
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiData:
    value: int
    ranks: tuple[int, ...]        # rank of L^t<add M> for t = 0..fitting index
    stable_rank: int
    class_ids: tuple[int, ...]    # syzygy-closed reachable class set
    seed_ids: tuple[int, ...]


def _closure(seed_ids, reg, rng):
    known = set(seed_ids)
    frontier = sorted(known)
    while frontier:
        nxt = []
        for cid in frontier:
            for c2 in class_syzygy_vector(cid, reg, rng).support():
                if c2 not in known:
                    known.add(c2)
                    nxt.append(c2)
        frontier = sorted(nxt)
    return sorted(known)


def phi_data(M: Module, reg: ClassRegistry, rng: np.random.Generator) -> PhiData:
    dec = decompose(M, rng)
    seeds = sorted({reg.register(r, rng) for r, _ in dec.summands if not is_projective(r)})
    if not seeds:
        return PhiData(0, (0,), 0, (), ())
    ids = _closure(seeds, reg, rng)
    index = {cid: i for i, cid in enumerate(ids)}
    n = len(ids)
    A = SymMatrix.zeros(n, n)
    for cid in ids:
        for c2, mult in class_syzygy_vector(cid, reg, rng).counts.items():
            A[index[c2], index[cid]] = mult
    G = SymMatrix.zeros(n, len(seeds))
    for j, cid in enumerate(seeds):
        G[index[cid], j] = 1
    # Fitting index of A: once rank(A^s) = rank(A^{s+1}) the kernel chain is
    # stable, A is injective on im(A^s), and no image dimension drops after s
    powers = [SymMatrix.eye(n)]
    s = 0
    while True:
        powers.append(powers[-1] * A)
        if powers[-1].rank() == powers[-2].rank():
            break
        s += 1
    ranks = tuple((powers[t] * G).rank() for t in range(s + 1))
    stable = ranks[s]
    value = next(t for t in range(s + 1) if ranks[t] == stable)
    return PhiData(value, ranks, stable, tuple(ids), tuple(seeds))


def phi(M: Module, reg: ClassRegistry, rng: np.random.Generator) -> int:
    return phi_data(M, reg, rng).value


@dataclass(frozen=True)
class AtLeast:
    bound: int


MINUS_INFINITY = float("-inf")
INFINITE = math.inf


def projective_dimension(M: Module, cutoff: int, reg: ClassRegistry,
                         rng: np.random.Generator):
    """Exact pd when it resolves within cutoff; math.inf when the set of
    syzygy classes revisits itself (it then cycles forever); AtLeast(cutoff)
    otherwise.  The zero module gets -inf, excluded from all suprema."""
    if M.total_dim == 0:
        return MINUS_INFINITY
    cur = k0_class(M, reg, rng).support()
    seen = set()
    t = 0
    while t <= cutoff:
        if not cur:
            return t
        if cur in seen:
            return INFINITE
        seen.add(cur)
        nxt = set()
        for cid in cur:
            nxt |= class_syzygy_vector(cid, reg, rng).support()
        cur = frozenset(nxt)
        t += 1
    return AtLeast(cutoff)


@dataclass(frozen=True)
class PsiData:
    value: int | None
    phi: int
    summand_pds: tuple
    unresolved: bool


def psi_data(M: Module, reg: ClassRegistry, rng: np.random.Generator,
             cutoff: int = 64) -> PsiData:
    """psi(M) = phi(M) + sup of the finite projective dimensions among the
    direct summands of the phi(M)-th syzygy (0 when none is finite)."""
    t = phi(M, reg, rng)
    om = syzygy_module(M, t)
    if om.total_dim == 0:
        return PsiData(t, t, (), False)
    dec = decompose(om, rng)
    pds = []
    best = 0
    unresolved = False
    for rep_mod, _ in dec.summands:
        pd = projective_dimension(rep_mod, cutoff, reg, rng)
        pds.append(pd)
        if isinstance(pd, AtLeast):
            unresolved = True
        elif pd not in (INFINITE, MINUS_INFINITY):
            best = max(best, int(pd))
    if unresolved:
        return PsiData(None, t, tuple(pds), True)
    return PsiData(t + best, t, tuple(pds), False)


def psi(M: Module, reg: ClassRegistry, rng: np.random.Generator, cutoff: int = 64):
    data = psi_data(M, reg, rng, cutoff)
    return data.value if not data.unresolved else data


# ---------------------------------------------------------------------------
# the lower-bound certificate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LowerBoundCertificate:
    t: int
    iso_at_t: bool
    noniso_below: bool
    bound: int | None            # phi-dim(M + N) >= bound when certified
    refuted: str | None
    conjectured_bound: int       # the stronger >= t remarked without proof

    @property
    def certified(self) -> bool:
        return self.refuted is None


def phi_lower_bound(M: Module, N: Module, t: int, rng: np.random.Generator) -> LowerBoundCertificate:
    """Certificate that phi-dim(M + N) >= t - 1.

    Verifies Omega^t M iso Omega^t N (exact witness) and
    Omega^(t-1) M not iso Omega^(t-1) N (exact, by Krull-Schmidt matching).
    """
    if t < 1:
        raise ValueError("t must be at least 1")
    if is_projective(M) and is_projective(N):
        return LowerBoundCertificate(t, True, False, None,
                                     "both modules are projective; every syzygy vanishes", t)
    om_m, om_n = M, N
    for _ in range(t - 1):
        om_m = syzygy(om_m).module
        om_n = syzygy(om_n).module
    below_iso, _ = is_isomorphic(om_m, om_n, rng, strategy="decompose")
    om_m_t = syzygy(om_m).module
    om_n_t = syzygy(om_n).module
    top_iso, witness = is_isomorphic(om_m_t, om_n_t, rng, strategy="decompose")
    if not top_iso:
        return LowerBoundCertificate(t, False, not below_iso, None,
                                     f"Omega^{t} M and Omega^{t} N are not isomorphic", t)
    if below_iso:
        return LowerBoundCertificate(t, True, False, None,
                                     f"Omega^{t-1} M and Omega^{t-1} N are isomorphic", t)
    assert witness is not None and witness.is_invertible()
    return LowerBoundCertificate(t, True, True, t - 1, None, t)


def integer_rank(vectors: list[K0Vector]) -> int:
    """Rank over Z (= over Q) of a finite set of K0 vectors."""
    ids = sorted({k for v in vectors for k in v.counts})
    if not ids or not vectors:
        return 0
    index = {cid: i for i, cid in enumerate(ids)}
    mat = SymMatrix.zeros(len(ids), len(vectors))
    for j, v in enumerate(vectors):
        for cid, mult in v.counts.items():
            mat[index[cid], j] = mult
    return mat.rank()
