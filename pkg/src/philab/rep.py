"""Finite-dimensional modules over bound quiver algebras.

A module is a representation: one F_p vector space per vertex and one matrix
per arrow, with every algebra relation acting as zero (re-validated on every
construction).  Morphisms are per-vertex matrices commuting with the action.

The homological toolkit built on top: projective covers and tops, syzygies
(kernels of covers), Hom-space bases computed through a projective
presentation, Krull-Schmidt decomposition via idempotent lifting in the
endomorphism algebra, and randomized isomorphism testing with exact
witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sympy import Poly, Symbol

from .primefield import FieldConfigError, PrimeField, frozen
from .quivers import Path


class RelationViolation(ValueError):
    """A would-be module does not satisfy the algebra relations."""


class DecompositionFailure(RuntimeError):
    """Idempotent lifting or splitting did not converge within bounds."""


class Module:
    __slots__ = ("algebra", "dims", "action", "total_dim",
                 "_path_actions", "_cover", "_syzygy", "_end", "_proj_paths")

    def __init__(self, algebra, dims, action, check: bool = True):
        self.algebra = algebra
        self.dims = tuple(int(d) for d in dims)
        if len(self.dims) != algebra.quiver.vertex_count:
            raise ValueError("dims length does not match vertex count")
        if any(d < 0 for d in self.dims):
            raise ValueError("negative dimension")
        field = algebra.field
        acts = {}
        for a in algebra.quiver.arrows:
            mat = action.get(a.label)
            shape = (self.dims[a.target], self.dims[a.source])
            if mat is None:
                mat = field.zeros(*shape)
            else:
                mat = field.asarray(mat)
                if mat.size == 0 and (shape[0] == 0 or shape[1] == 0):
                    mat = field.zeros(*shape)
                elif mat.shape != shape:
                    raise ValueError(
                        f"arrow {a.label}: matrix shape {mat.shape}, expected {shape}")
            acts[a.label] = frozen(mat)
        self.action = acts
        self.total_dim = sum(self.dims)
        self._path_actions: dict = {}
        self._cover = None
        self._syzygy = None
        self._end = None
        self._proj_paths = None
        if check:
            self._check_relations()

    def _check_relations(self):
        field = self.algebra.field
        for rel in self.algebra.relations_linear():
            acc = None
            for coeff, path in rel:
                term = field.scale(coeff, self.path_action(path))
                acc = term if acc is None else field.add(acc, term)
            if acc is not None and np.any(acc):
                raise RelationViolation(
                    f"relation { ' , '.join(str(p) for _, p in rel) } acts nontrivially")

    def path_action(self, path: Path) -> np.ndarray:
        key = (path.source, path.labels)
        got = self._path_actions.get(key)
        if got is not None:
            return got
        field = self.algebra.field
        if path.is_trivial():
            out = field.identity(self.dims[path.source])
        else:
            out = field.identity(self.dims[path.source])
            for label in path.labels:
                out = field.mul(self.action[label], out)
        self._path_actions[key] = frozen(out)
        return out

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def equals(self, other: "Module") -> bool:
        return (self.algebra is other.algebra and self.dims == other.dims
                and all(np.array_equal(self.action[l], other.action[l])
                        for l in self.action))

    def to_dict(self) -> dict:
        return {
            "algebra_id": self.algebra.name,
            "dims": list(self.dims),
            "action": {l: m.tolist() for l, m in sorted(self.action.items())},
        }

    @classmethod
    def from_dict(cls, algebra, data: dict) -> "Module":
        if data.get("algebra_id") != algebra.name:
            raise ValueError(
                f"module was serialized over {data.get('algebra_id')!r}, not {algebra.name!r}")
        return cls(algebra, data["dims"], data["action"])

    def __repr__(self):
        return f"<Module dims={self.dims}>"


class Morphism:
    __slots__ = ("source", "target", "components")

    def __init__(self, source: Module, target: Module, components, check: bool = True):
        if source.algebra is not target.algebra:
            raise ValueError("morphism endpoints live over different algebras")
        self.source = source
        self.target = target
        field = source.algebra.field
        comps = []
        for v in range(source.algebra.quiver.vertex_count):
            mat = field.asarray(components[v])
            shape = (target.dims[v], source.dims[v])
            if mat.size == 0 and (shape[0] == 0 or shape[1] == 0):
                mat = field.zeros(*shape)
            elif mat.shape != shape:
                raise ValueError(f"component {v}: shape {mat.shape}, expected {shape}")
            comps.append(frozen(mat))
        self.components = tuple(comps)
        if check:
            self._check_commutes()

    def _check_commutes(self):
        field = self.source.algebra.field
        for a in self.source.algebra.quiver.arrows:
            left = field.mul(self.target.action[a.label], self.components[a.source])
            right = field.mul(self.components[a.target], self.source.action[a.label])
            if not np.array_equal(left, right):
                raise ValueError(f"morphism does not commute with arrow {a.label}")

    def __matmul__(self, other: "Morphism") -> "Morphism":
        """Composition self after other."""
        if other.target is not self.source and not other.target.equals(self.source):
            raise ValueError("composition mismatch")
        field = self.source.algebra.field
        comps = [field.mul(a, b) for a, b in zip(self.components, other.components)]
        return Morphism(other.source, self.target, comps, check=False)

    def add(self, other: "Morphism") -> "Morphism":
        field = self.source.algebra.field
        comps = [field.add(a, b) for a, b in zip(self.components, other.components)]
        return Morphism(self.source, self.target, comps, check=False)

    def scale(self, c: int) -> "Morphism":
        field = self.source.algebra.field
        comps = [field.scale(c, m) for m in self.components]
        return Morphism(self.source, self.target, comps, check=False)

    def is_zero(self) -> bool:
        return not any(np.any(m) for m in self.components)

    def is_injective(self) -> bool:
        field = self.source.algebra.field
        return all(field.rank(m) == m.shape[1] for m in self.components)

    def is_surjective(self) -> bool:
        field = self.source.algebra.field
        return all(field.rank(m) == m.shape[0] for m in self.components)

    def is_invertible(self) -> bool:
        return (self.source.dims == self.target.dims) and self.is_injective()

    def inverse(self) -> "Morphism":
        field = self.source.algebra.field
        comps = []
        for m in self.components:
            inv = field.inv(m)
            if inv is None:
                raise ValueError("morphism is not invertible")
            comps.append(inv)
        return Morphism(self.target, self.source, comps, check=False)

    def equals(self, other: "Morphism") -> bool:
        return all(np.array_equal(a, b) for a, b in zip(self.components, other.components))

    def __repr__(self):
        return f"<Morphism {self.source.dims} -> {self.target.dims}>"


def identity_morphism(M: Module) -> Morphism:
    field = M.algebra.field
    return Morphism(M, M, [field.identity(d) for d in M.dims], check=False)


def zero_morphism(M: Module, N: Module) -> Morphism:
    field = M.algebra.field
    return Morphism(M, N, [field.zeros(N.dims[v], M.dims[v])
                           for v in range(len(M.dims))], check=False)


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def zero_module(algebra) -> Module:
    return Module(algebra, [0] * algebra.quiver.vertex_count, {}, check=False)


def simple(algebra, v: int) -> Module:
    got = algebra._simple_cache.get(v)
    if got is None:
        dims = [0] * algebra.quiver.vertex_count
        dims[v] = 1
        got = Module(algebra, dims, {}, check=False)
        algebra._simple_cache[v] = got
    return got


def projective(algebra, v: int) -> Module:
    """Indecomposable projective at v: basis = paths starting at v."""
    got = algebra._projective_cache.get(v)
    if got is not None:
        return got
    nv = algebra.quiver.vertex_count
    paths_by_vertex = {w: [] for w in range(nv)}
    for p in algebra.paths_from(v):
        paths_by_vertex[p.target].append(p)
    index = {}
    for w in range(nv):
        for i, p in enumerate(paths_by_vertex[w]):
            index[(p.source, p.labels)] = i
    dims = [len(paths_by_vertex[w]) for w in range(nv)]
    field = algebra.field
    action = {}
    for a in algebra.quiver.arrows:
        mat = field.zeros(dims[a.target], dims[a.source])
        for j, p in enumerate(paths_by_vertex[a.source]):
            q = algebra.compose_arrow(a, p)
            if q is not None:
                mat[index[(q.source, q.labels)], j] = 1
        action[a.label] = mat
    mod = Module(algebra, dims, action)
    mod._proj_paths = {w: tuple(ps) for w, ps in paths_by_vertex.items()}
    algebra._projective_cache[v] = mod
    return mod


@dataclass(frozen=True)
class DirectSum:
    module: Module
    injections: tuple[Morphism, ...]
    projections: tuple[Morphism, ...]
    offsets: tuple[dict, ...]  # per summand: vertex -> start offset


def direct_sum(algebra, mods) -> DirectSum:
    mods = list(mods)
    field = algebra.field
    nv = algebra.quiver.vertex_count
    dims = [sum(m.dims[v] for m in mods) for v in range(nv)]
    offsets = []
    running = [0] * nv
    for m in mods:
        offsets.append({v: running[v] for v in range(nv)})
        for v in range(nv):
            running[v] += m.dims[v]
    action = {}
    for a in algebra.quiver.arrows:
        mat = field.zeros(dims[a.target], dims[a.source])
        for m, off in zip(mods, offsets):
            rt, cs = off[a.target], off[a.source]
            mat[rt:rt + m.dims[a.target], cs:cs + m.dims[a.source]] = m.action[a.label]
        action[a.label] = mat
    total = Module(algebra, dims, action, check=False)
    injections = []
    projections = []
    for m, off in zip(mods, offsets):
        inj = []
        proj = []
        for v in range(nv):
            mat = field.zeros(dims[v], m.dims[v])
            s = off[v]
            mat[s:s + m.dims[v], :] = field.identity(m.dims[v])
            inj.append(mat)
            proj.append(mat.T.copy())
        injections.append(Morphism(m, total, inj, check=False))
        projections.append(Morphism(total, m, proj, check=False))
    return DirectSum(total, tuple(injections), tuple(projections), tuple(offsets))


def block_morphism_from_summands(sum_data: DirectSum, target: Module, pieces) -> Morphism:
    """Assemble f: sum -> target from morphisms piece_i: summand_i -> target."""
    field = target.algebra.field
    nv = target.algebra.quiver.vertex_count
    comps = []
    for v in range(nv):
        blocks = [p.components[v] for p in pieces]
        if blocks:
            comps.append(np.concatenate(blocks, axis=1))
        else:
            comps.append(field.zeros(target.dims[v], 0))
    return Morphism(sum_data.module, target, comps)


def submodule(M: Module, bases) -> tuple[Module, Morphism]:
    """Submodule spanned per vertex by the given basis columns.

    Raises NoSolutionError if the spans are not closed under the action.
    """
    field = M.algebra.field
    nv = M.algebra.quiver.vertex_count
    bas = [field.asarray(bases[v]) if bases[v] is not None and np.size(bases[v])
           else field.zeros(M.dims[v], 0) for v in range(nv)]
    dims = [b.shape[1] for b in bas]
    action = {}
    for a in M.algebra.quiver.arrows:
        moved = field.mul(M.action[a.label], bas[a.source])
        action[a.label] = field.require_solve(bas[a.target], moved)
    sub = Module(M.algebra, dims, action)
    incl = Morphism(sub, M, bas)
    return sub, incl


def image_submodule(f: Morphism) -> tuple[Module, Morphism]:
    field = f.source.algebra.field
    bases = []
    for m in f.components:
        piv = field.column_space_pivots(m)
        bases.append(m[:, piv].copy())
    return submodule(f.target, bases)


# ---------------------------------------------------------------------------
# radical, top, cover, syzygy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cover:
    module: Module                 # the projective cover P
    surjection: Morphism           # P ->> M
    vertices: tuple[int, ...]      # one vertex per indecomposable copy
    summands: tuple[Module, ...]   # the projective copies, in block order
    offsets: tuple[dict, ...]      # coordinate offsets per copy


def radical_bases(M: Module) -> list[np.ndarray]:
    """Per-vertex basis of rad M = sum of images of all arrow actions."""
    field = M.algebra.field
    nv = M.algebra.quiver.vertex_count
    incoming = {v: [] for v in range(nv)}
    for a in M.algebra.quiver.arrows:
        incoming[a.target].append(M.action[a.label])
    out = []
    for v in range(nv):
        mats = [m for m in incoming[v] if m.shape[1]]
        if not mats:
            out.append(field.zeros(M.dims[v], 0))
            continue
        stacked = np.concatenate(mats, axis=1)
        piv = field.column_space_pivots(stacked)
        out.append(stacked[:, piv].copy())
    return out


def top_dims(M: Module) -> tuple[int, ...]:
    rads = radical_bases(M)
    return tuple(M.dims[v] - rads[v].shape[1] for v in range(len(M.dims)))


def top_and_cover(M: Module) -> Cover:
    """Projective cover of M, minimal by construction (one copy per top basis
    vector, the basis extending rad M by unit coordinates)."""
    if M._cover is not None:
        return M._cover
    algebra = M.algebra
    field = algebra.field
    nv = algebra.quiver.vertex_count
    rads = radical_bases(M)
    copies = []  # (vertex, generator coordinate)
    for v in range(nv):
        for j in field.complement_unit_coords(rads[v]):
            copies.append((v, j))
    projs = [projective(algebra, v) for v, _ in copies]
    sm = direct_sum(algebra, projs)
    pieces = []
    for (v, j), P in zip(copies, projs):
        paths_by_vertex = P._proj_paths  # type: ignore[attr-defined]
        comps = []
        for w in range(nv):
            paths = paths_by_vertex[w]
            mat = field.zeros(M.dims[w], len(paths))
            for col, p in enumerate(paths):
                mat[:, col] = M.path_action(p)[:, j]
            comps.append(mat)
        pieces.append(Morphism(P, M, comps))
    surj = block_morphism_from_summands(sm, M, pieces)
    if not surj.is_surjective():
        raise RuntimeError("projective cover construction failed to surject")
    cover = Cover(sm.module, surj, tuple(v for v, _ in copies), tuple(projs), sm.offsets)
    M._cover = cover
    return cover


@dataclass(frozen=True)
class Syzygy:
    module: Module
    inclusion: Morphism  # into the cover


def syzygy(M: Module) -> Syzygy:
    """Kernel of the projective cover, with its inclusion."""
    if M._syzygy is not None:
        return M._syzygy
    field = M.algebra.field
    cover = top_and_cover(M)
    kers = [field.kernel_basis(m) for m in cover.surjection.components]
    sub, incl = submodule(cover.module, kers)
    out = Syzygy(sub, incl)
    M._syzygy = out
    return out


def syzygy_module(M: Module, t: int = 1) -> Module:
    out = M
    for _ in range(t):
        out = syzygy(out).module
    return out


def is_projective(M: Module) -> bool:
    return syzygy(M).module.total_dim == 0


# ---------------------------------------------------------------------------
# Hom spaces
# ---------------------------------------------------------------------------

def hom_basis(M: Module, N: Module) -> list[Morphism]:
    """Basis of Hom(M, N), via the projective presentation of M.

    A homomorphism is parameterized by the images of the cover generators;
    the constraint is vanishing on the syzygy, imposed at the generators of
    the syzygy's own cover.
    """
    if M.algebra is not N.algebra and not _same_algebra(M.algebra, N.algebra):
        raise ValueError("hom over different algebras")
    field = M.algebra.field
    if M.total_dim == 0 or N.total_dim == 0:
        return []
    cov = top_and_cover(M)
    syz = syzygy(M)
    ncopies = len(cov.vertices)
    col_off = []
    total_cols = 0
    for v in cov.vertices:
        col_off.append(total_cols)
        total_cols += N.dims[v]
    if total_cols == 0:
        return []

    # relation rows: one block per generator of the cover of the syzygy
    rows = []
    if syz.module.total_dim:
        kcov = top_and_cover(syz.module)
        for j, w in enumerate(kcov.vertices):
            gpos = kcov.offsets[j][w]  # trivial path is coordinate 0 of its copy
            y = field.mul(syz.inclusion.components[w],
                          kcov.surjection.components[w][:, gpos:gpos + 1])
            block = field.zeros(N.dims[w], total_cols)
            for i, v in enumerate(cov.vertices):
                paths = _get_paths_by_vertex(cov.summands[i])[w]
                if not paths:
                    continue
                start = cov.offsets[i][w]
                acc = None
                for k, p in enumerate(paths):
                    c = int(y[start + k, 0])
                    if c == 0:
                        continue
                    term = field.scale(c, N.path_action(p))
                    acc = term if acc is None else field.add(acc, term)
                if acc is not None:
                    block[:, col_off[i]:col_off[i] + N.dims[v]] = acc
            rows.append(block)
    system = np.concatenate(rows, axis=0) if rows else field.zeros(0, total_cols)
    kern = field.kernel_basis(system)

    out = []
    for s in range(kern.shape[1]):
        u = kern[:, s]
        comps = []
        for w in range(len(M.dims)):
            psi = field.zeros(N.dims[w], cov.module.dims[w])
            for i, v in enumerate(cov.vertices):
                ui = u[col_off[i]:col_off[i] + N.dims[v]].reshape(-1, 1)
                paths = _get_paths_by_vertex(cov.summands[i])[w]
                start = cov.offsets[i][w]
                for k, p in enumerate(paths):
                    psi[:, start + k] = field.mul(N.path_action(p), ui)[:, 0]
            f0 = cov.surjection.components[w]
            phi_t = field.require_solve(f0.T.copy(), psi.T.copy())
            comps.append(phi_t.T.copy())
        out.append(Morphism(M, N, comps))
    return out


def _get_paths_by_vertex(P: Module):
    return P._proj_paths  # type: ignore[attr-defined]


def _same_algebra(a, b):
    return a is b


def end_basis(M: Module) -> list[Morphism]:
    if M._end is None:
        M._end = hom_basis(M, M)
    return M._end


def hom_dim(M: Module, N: Module) -> int:
    return len(hom_basis(M, N))


# ---------------------------------------------------------------------------
# visible direct-sum structure
# ---------------------------------------------------------------------------

def visible_blocks(M: Module) -> list[tuple[Module, Morphism]]:
    """Finest coordinate-aligned direct-sum decomposition visible in the
    current basis (connected components of the coordinate interaction graph).
    Always a certified decomposition; usually coarser than Krull-Schmidt."""
    nv = len(M.dims)
    offsets = [0] * nv
    t = 0
    for v in range(nv):
        offsets[v] = t
        t += M.dims[v]
    if t == 0:
        return []
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

    for a in M.algebra.quiver.arrows:
        mat = M.action[a.label]
        for i, j in zip(*np.nonzero(mat)):
            union(offsets[a.target] + int(i), offsets[a.source] + int(j))
    groups: dict[int, list[int]] = {}
    for x in range(t):
        groups.setdefault(find(x), []).append(x)
    if len(groups) == 1:
        return [(M, identity_morphism(M))]
    field = M.algebra.field
    out = []
    for key in sorted(groups, key=lambda k: min(groups[k])):
        coords = groups[key]
        bases = []
        for v in range(nv):
            cols = [c - offsets[v] for c in coords if offsets[v] <= c < offsets[v] + M.dims[v]]
            mat = field.zeros(M.dims[v], len(cols))
            for j, c in enumerate(cols):
                mat[c, j] = 1
            bases.append(mat)
        out.append(submodule(M, bases))
    return out


# ---------------------------------------------------------------------------
# Krull-Schmidt decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Decomposition:
    module: Module
    summands: tuple[tuple[Module, int], ...]
    iso: Morphism  # from the expanded direct sum onto the module

    def expanded(self) -> list[Module]:
        out = []
        for rep, mult in self.summands:
            out.extend([rep] * mult)
        return out

    def dims_multiset(self):
        return sorted((rep.dims, mult) for rep, mult in self.summands)


def _flatten_morphism(f: Morphism) -> np.ndarray:
    parts = [c.ravel() for c in f.components if c.size]
    if not parts:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(parts)


class _EndAlgebra:
    """Multiplication and radical-quotient coordinates for End(M)."""

    def __init__(self, M: Module):
        self.M = M
        self.field = M.algebra.field
        self.basis = end_basis(M)
        self.e = len(self.basis)
        field = self.field
        if field.p <= self.e:
            raise FieldConfigError(
                f"modulus {field.p} must exceed dim End = {self.e}")
        flat = np.stack([_flatten_morphism(b) for b in self.basis])  # e x D
        piv = field.column_space_pivots(flat)  # coordinates that separate the basis
        self._coords = piv
        self._solve_mat = field.inv(flat[:, piv].T.copy())
        if self._solve_mat is None:
            raise RuntimeError("endomorphism basis is not independent")
        # trace form and radical
        tr = field.zeros(self.e, self.e)
        for i in range(self.e):
            for j in range(i, self.e):
                s = 0
                for ci, cj in zip(self.basis[i].components, self.basis[j].components):
                    if ci.size:
                        s += int(np.einsum("ij,ji->", ci, cj) % field.p)
                tr[i, j] = tr[j, i] = s % field.p
        self.rad = field.kernel_basis(tr)  # e x r
        self.sdim = self.e - self.rad.shape[1]
        comp = field.complement_unit_coords(self.rad)
        self._comp_idx = comp
        basis_mat = np.concatenate([field.identity(self.e)[:, comp], self.rad], axis=1)
        self._basis_inv = field.inv(basis_mat)

    def coeffs_of(self, f: Morphism) -> np.ndarray:
        vec = _flatten_morphism(f)[self._coords].reshape(-1, 1)
        return self.field.mul(self._solve_mat, vec)[:, 0]

    def morphism_of(self, coeffs: np.ndarray) -> Morphism:
        field = self.field
        comps = []
        for v in range(len(self.M.dims)):
            acc = field.zeros(self.M.dims[v], self.M.dims[v])
            for i, c in enumerate(coeffs):
                c = int(c) % field.p
                if c:
                    acc = field.add(acc, field.scale(c, self.basis[i].components[v]))
            comps.append(acc)
        return Morphism(self.M, self.M, comps, check=False)

    def quotient_coords(self, coeffs: np.ndarray) -> np.ndarray:
        z = self.field.mul(self._basis_inv, coeffs.reshape(-1, 1))[:, 0]
        return z[: self.sdim]

    def lift_quotient(self, qc: np.ndarray) -> np.ndarray:
        coeffs = np.zeros(self.e, dtype=np.int64)
        for pos, i in enumerate(self._comp_idx):
            coeffs[i] = qc[pos] % self.field.p
        return coeffs

    def q_mult(self, q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
        f = self.morphism_of(self.lift_quotient(q1)) @ self.morphism_of(self.lift_quotient(q2))
        return self.quotient_coords(self.coeffs_of(f))

    def q_identity(self) -> np.ndarray:
        return self.quotient_coords(self.coeffs_of(identity_morphism(self.M)))


def _min_poly_quotient(endo: _EndAlgebra, q: np.ndarray):
    """Monic minimal polynomial of the class q in End/rad, low degree first."""
    field = endo.field
    vecs = [endo.q_identity()]
    cur = vecs[0]
    while True:
        cur = endo.q_mult(q, cur)
        stack = np.stack(vecs, axis=1)
        sol = field.solve_right(stack, cur.reshape(-1, 1))
        if sol is not None:
            coeffs = [int(-sol[i, 0]) % field.p for i in range(len(vecs))]
            coeffs.append(1)  # monic
            return coeffs
        vecs.append(cur)
        if len(vecs) > endo.sdim + 1:
            raise RuntimeError("minimal polynomial search exceeded quotient dimension")


_X = Symbol("x")


def _poly_from_coeffs(coeffs_low_first, p):
    return Poly(list(reversed([c % p for c in coeffs_low_first])), _X, modulus=p)


def _eval_poly_quotient(endo: _EndAlgebra, poly: Poly, q: np.ndarray) -> np.ndarray:
    field = endo.field
    coeffs = [int(c) % field.p for c in reversed(poly.all_coeffs())]  # low first
    acc = np.zeros(endo.sdim, dtype=np.int64)
    one = endo.q_identity()
    power = one
    for k, c in enumerate(coeffs):
        if k > 0:
            power = endo.q_mult(q, power)
        if c:
            acc = field.add(acc, field.scale(c, power))
    return acc % field.p


def _try_split(M: Module, rng: np.random.Generator, tries: int = 60):
    """None when End(M) is local (M indecomposable); otherwise a 2-part split
    (submodule, inclusion) x 2 obtained from a lifted idempotent."""
    endo = _EndAlgebra(M)
    if endo.e == 1 or endo.sdim == 1:
        return None
    field = endo.field
    for _ in range(tries):
        q = rng.integers(0, field.p, size=endo.sdim, dtype=np.int64)
        coeffs = _min_poly_quotient(endo, q)
        mu = _poly_from_coeffs(coeffs, field.p)
        factors = mu.factor_list()[1]
        if len(factors) == 1:
            poly, exp = factors[0]
            if exp == 1 and poly.degree() == endo.sdim:
                return None  # End/rad is the field generated by q: local
            continue
        f1 = factors[0][0] ** factors[0][1]
        f2 = mu.quo(f1)
        s, t, h = f1.gcdex(f2)
        hinv = field.inv_scalar(int(h.all_coeffs()[-1])) if h.degree() == 0 else None
        if hinv is None:
            continue
        eps_poly = (s * f1 * hinv).rem(mu)
        q_e = _eval_poly_quotient(endo, eps_poly, q)
        e_mor = endo.morphism_of(endo.lift_quotient(q_e))
        lifted = _lift_idempotent(e_mor)
        if lifted is None:
            continue
        ident = identity_morphism(M)
        if lifted.is_zero() or lifted.equals(ident):
            continue
        comp = ident.add(lifted.scale(-1))
        part1 = image_submodule(lifted)
        part2 = image_submodule(comp)
        if part1[0].total_dim + part2[0].total_dim != M.total_dim:
            continue
        return part1, part2
    raise DecompositionFailure(
        f"could not split or certify End(M) local after {tries} attempts (dim End = {endo.e})")


def _lift_idempotent(e: Morphism, max_iter: int = 64):
    """Newton lifting e <- 3e^2 - 2e^3 until exactly idempotent."""
    for _ in range(max_iter):
        e2 = e @ e
        if e2.equals(e):
            return e
        e3 = e2 @ e
        e = e2.scale(3).add(e3.scale(-2))
    return None


def decompose(M: Module, rng: np.random.Generator) -> Decomposition:
    """Full Krull-Schmidt decomposition with an explicit direct-sum witness."""
    algebra = M.algebra
    if M.total_dim == 0:
        sm = direct_sum(algebra, [])
        empty = Morphism(sm.module, M,
                         [algebra.field.zeros(0, 0) for _ in M.dims], check=False)
        return Decomposition(M, (), empty)
    leaves: list[tuple[Module, Morphism]] = []
    stack: list[tuple[Module, Morphism]] = [(M, identity_morphism(M))]
    while stack:
        N, inc = stack.pop()
        if N.total_dim == 0:
            continue
        blocks = visible_blocks(N)
        if len(blocks) > 1:
            for S, sinc in blocks:
                stack.append((S, inc @ sinc))
            continue
        split = _try_split(N, rng)
        if split is None:
            leaves.append((N, inc))
            continue
        (a_mod, a_inc), (b_mod, b_inc) = split
        stack.append((a_mod, inc @ a_inc))
        stack.append((b_mod, inc @ b_inc))

    groups: list[dict] = []
    for leaf, inc in leaves:
        placed = False
        for g in groups:
            ok, wit = is_isomorphic(g["rep"], leaf, rng)
            if ok:
                g["items"].append((inc, wit))
                placed = True
                break
        if not placed:
            groups.append({"rep": leaf, "items": [(inc, identity_morphism(leaf))]})

    groups.sort(key=lambda g: (g["rep"].total_dim, g["rep"].dims, _rank_profile(g["rep"])))
    expanded = []
    pieces = []
    for g in groups:
        for inc, wit in g["items"]:
            expanded.append(g["rep"])
            pieces.append(inc @ wit)
    sm = direct_sum(algebra, expanded)
    iso = block_morphism_from_summands(sm, M, pieces)
    if not iso.is_invertible():
        raise DecompositionFailure("assembled decomposition witness is not invertible")
    summands = tuple((g["rep"], len(g["items"])) for g in groups)
    return Decomposition(M, summands, iso)


def _rank_profile(M: Module):
    field = M.algebra.field
    return tuple(sorted((l, field.rank(m)) for l, m in M.action.items()))


# ---------------------------------------------------------------------------
# isomorphism testing
# ---------------------------------------------------------------------------

def is_isomorphic(M: Module, N: Module, rng: np.random.Generator,
                  trials: int = 20, strategy: str = "auto") -> tuple[bool, Morphism | None]:
    """Isomorphism test with an exact verified witness on success.

    "random" samples Hom(M, N) and tests invertibility (error probability
    <= (dim/p)^trials for a false negative, zero for a false positive);
    "decompose" matches Krull-Schmidt decompositions and assembles the
    witness blockwise, making the negative answer exact as well.
    """
    if M.dims != N.dims:
        return False, None
    if M.total_dim == 0:
        return True, zero_morphism(M, N)
    if strategy == "auto":
        strategy = "random" if M.total_dim <= 160 else "decompose"
    if strategy == "random":
        basis = hom_basis(M, N)
        if not basis:
            return False, None
        field = M.algebra.field
        for _ in range(trials):
            coeffs = rng.integers(0, field.p, size=len(basis), dtype=np.int64)
            cand = _combine(basis, coeffs)
            if cand.is_invertible():
                return True, cand
        # M iso N would force dim End M = dim End N = dim Hom(M, N); when the
        # dimensions already disagree the sampling verdict is exact
        _ = (len(end_basis(M)), len(end_basis(N)), len(basis))
        return False, None
    if strategy == "decompose":
        dm = decompose(M, rng)
        dn = decompose(N, rng)
        matched = _match_decompositions(dm, dn, rng)
        if matched is None:
            return False, None
        wit = dn.iso @ matched @ dm.iso.inverse()
        if not wit.is_invertible():
            raise RuntimeError("assembled isomorphism witness is not invertible")
        return True, wit
    raise ValueError(f"unknown strategy {strategy!r}")


def _combine(basis: list[Morphism], coeffs) -> Morphism:
    field = basis[0].source.algebra.field
    comps = []
    for v in range(len(basis[0].source.dims)):
        acc = field.zeros(basis[0].target.dims[v], basis[0].source.dims[v])
        for b, c in zip(basis, coeffs):
            c = int(c) % field.p
            if c:
                acc = field.add(acc, field.scale(c, b.components[v]))
        comps.append(acc)
    return Morphism(basis[0].source, basis[0].target, comps, check=False)


def _match_decompositions(dm: Decomposition, dn: Decomposition, rng):
    """Blockwise morphism sum(dm) -> sum(dn) pairing isomorphic summands."""
    if len(dm.summands) != len(dn.summands):
        return None
    pairs = []
    used = [False] * len(dn.summands)
    for rep_m, mult_m in dm.summands:
        hit = None
        for j, (rep_n, mult_n) in enumerate(dn.summands):
            if used[j] or mult_m != mult_n or rep_m.dims != rep_n.dims:
                continue
            ok, wit = is_isomorphic(rep_m, rep_n, rng)
            if ok:
                hit = (j, wit)
                break
        if hit is None:
            return None
        used[hit[0]] = True
        pairs.append((rep_m, mult_m, hit[0], hit[1]))
    # both expansions enumerate summands in their own group order
    sm = direct_sum(dm.module.algebra, dm.expanded())
    sn = direct_sum(dn.module.algebra, dn.expanded())
    # block index of each copy in dn's expansion
    start_n = []
    t = 0
    for rep_n, mult_n in dn.summands:
        start_n.append(t)
        t += mult_n
    pieces = []
    for rep_m, mult_m, j, wit in pairs:
        for c in range(mult_m):
            pieces.append(sn.injections[start_n[j] + c] @ wit)
    return block_morphism_from_summands(sm, sn.module, pieces)


# ---------------------------------------------------------------------------
# randomized module generators (testing support)
# ---------------------------------------------------------------------------

def random_module(algebra, rng: np.random.Generator, max_top: int = 2,
                  max_rad: int = 2) -> Module:
    """Random module with radical-square-zero action pattern.

    Vertex spaces split as top + radical coordinates; arrows map top of the
    source into radical of the target, so every length >= 2 path acts as
    zero and all monomial relations hold automatically.
    """
    field = algebra.field
    nv = algebra.quiver.vertex_count
    tops = [int(rng.integers(0, max_top + 1)) for _ in range(nv)]
    rads = [int(rng.integers(0, max_rad + 1)) for _ in range(nv)]
    dims = [t + r for t, r in zip(tops, rads)]
    action = {}
    for a in algebra.quiver.arrows:
        mat = field.zeros(dims[a.target], dims[a.source])
        if tops[a.source] and rads[a.target]:
            blk = field.random_matrix(rng, rads[a.target], tops[a.source])
            mat[tops[a.target]:, : tops[a.source]] = blk
        action[a.label] = mat
    return Module(algebra, dims, action)


def random_basis_change(M: Module, rng: np.random.Generator) -> tuple[Module, Morphism]:
    """Conjugate the action by random invertible per-vertex matrices."""
    field = M.algebra.field
    gs = []
    for d in M.dims:
        while True:
            g = field.random_matrix(rng, d, d)
            if field.is_invertible(g) or d == 0:
                gs.append(g)
                break
    inv = [field.inv(g) if g.shape[0] else g for g in gs]
    action = {}
    for a in M.algebra.quiver.arrows:
        action[a.label] = field.mul_many(gs[a.target], M.action[a.label], inv[a.source])
    M2 = Module(M.algebra, M.dims, action)
    iso = Morphism(M, M2, gs)
    return M2, iso
