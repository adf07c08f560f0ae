"""Quivers, monomial bound quiver algebras, and the oriented-3-cycle tensor.

An algebra here is a quotient of a path algebra KQ/I presented by a quiver
and a finite set of relations.  Two concrete kinds are provided:

* ``MonomialAlgebra`` -- relations are forbidden paths of length >= 2; the
  algebra has a finite monomial path basis when the ideal is admissible.
* ``CycleTensorAlgebra`` -- the tensor product of a monomial algebra with the
  radical-square-zero algebra of the oriented 3-cycle.  Its commutativity
  relations are binomial, so it is *not* monomial; the basis consists of
  pairs (base path, cycle path).

Both expose the same surface consumed by the module layer: the ambient
quiver, a deterministic path basis, per-vertex projective path lists, left
composition of an arrow with a basis path, and the relation list evaluated
by module validation.

Paths store their arrows in order of application (index 0 acts first).  The
presentation file format lists composite relations leftmost-applied-last,
i.e. in the order maps are written in diagrams, and is reversed on parse.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .primefield import PrimeField


class NonAdmissibleError(ValueError):
    """The relation ideal does not cut the path algebra down to finite dimension."""


@dataclass(frozen=True)
class Arrow:
    source: int
    target: int
    label: str


@dataclass(frozen=True)
class Path:
    """A composable sequence of arrow labels; empty = trivial path at a vertex."""

    source: int
    target: int
    labels: tuple[str, ...]

    def __len__(self):
        return len(self.labels)

    def is_trivial(self):
        return not self.labels

    def __str__(self):
        if not self.labels:
            return f"e{self.source + 1}"
        return "*".join(reversed(self.labels))


class Quiver:
    def __init__(self, vertex_count: int, arrows):
        if vertex_count <= 0:
            raise ValueError("quiver needs at least one vertex")
        self.vertex_count = vertex_count
        self.arrows: tuple[Arrow, ...] = tuple(
            a if isinstance(a, Arrow) else Arrow(*a) for a in arrows
        )
        self.by_label: dict[str, Arrow] = {}
        for a in self.arrows:
            if not (0 <= a.source < vertex_count and 0 <= a.target < vertex_count):
                raise ValueError(f"arrow {a} out of range")
            if a.label in self.by_label:
                raise ValueError(f"duplicate arrow label {a.label!r}")
            self.by_label[a.label] = a
        self._from = {v: [] for v in range(vertex_count)}
        for a in self.arrows:
            self._from[a.source].append(a)

    def arrows_from(self, v: int) -> list[Arrow]:
        return self._from[v]

    def trivial_path(self, v: int) -> Path:
        return Path(v, v, ())

    def path(self, labels) -> Path:
        """Path from arrow labels listed in order of application."""
        labels = tuple(labels)
        if not labels:
            raise ValueError("use trivial_path for length-0 paths")
        arrows = [self.by_label[l] for l in labels]
        for x, y in zip(arrows, arrows[1:]):
            if x.target != y.source:
                raise ValueError(f"path not composable at {x.label}->{y.label}")
        return Path(arrows[0].source, arrows[-1].target, labels)

    def extend(self, path: Path, arrow: Arrow) -> Path:
        if arrow.source != path.target:
            raise ValueError("arrow does not compose with path")
        return Path(path.source, arrow.target, path.labels + (arrow.label,))


def _path_sort_key(p: Path):
    return (len(p), p.source, p.labels)


class MonomialAlgebra:
    """KQ / (monomial relations), with its finite path basis."""

    def __init__(self, quiver: Quiver, relations, field: PrimeField, name: str = "algebra"):
        self.quiver = quiver
        self.field = field
        self.name = name
        self.relations: tuple[Path, ...] = tuple(relations)
        for r in self.relations:
            if len(r) < 2:
                raise ValueError("monomial relations must have length >= 2")
        self._forbidden = {r.labels for r in self.relations}
        self.basis: tuple[Path, ...] = tuple(self._enumerate_basis())
        self._basis_keys = {(p.source, p.labels) for p in self.basis}
        self._paths_from = {
            v: tuple(p for p in self.basis if p.source == v)
            for v in range(quiver.vertex_count)
        }
        self._projective_cache: dict[int, object] = {}
        self._simple_cache: dict[int, object] = {}

    # longest admissible path cannot exceed this without the ideal failing
    def _length_bound(self):
        rel_max = max((len(r) for r in self.relations), default=0)
        return self.quiver.vertex_count * (1 + rel_max)

    def _dead(self, p: Path) -> bool:
        for labels in self._forbidden:
            n = len(labels)
            if len(p.labels) >= n and p.labels[-n:] == labels:
                return True
        return False

    def _enumerate_basis(self):
        bound = self._length_bound()
        out = []
        frontier = [self.quiver.trivial_path(v) for v in range(self.quiver.vertex_count)]
        while frontier:
            out.extend(frontier)
            nxt = []
            for p in frontier:
                for a in self.quiver.arrows_from(p.target):
                    q = self.quiver.extend(p, a)
                    if not self._dead(q):
                        nxt.append(q)
            if nxt and len(nxt[0]) > bound:
                raise NonAdmissibleError(
                    f"paths of length {len(nxt[0])} survive; ideal is not admissible"
                )
            frontier = nxt
        return sorted(out, key=_path_sort_key)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def vertex_label(self, v: int) -> str:
        return str(v + 1)

    def paths_from(self, v: int) -> tuple[Path, ...]:
        return self._paths_from[v]

    def compose_arrow(self, arrow: Arrow, path: Path) -> Path | None:
        """arrow . path, or None when the product is zero in the algebra."""
        q = self.quiver.extend(path, arrow)
        if (q.source, q.labels) in self._basis_keys:
            return q
        return None

    def relations_linear(self):
        """Relations as K-linear combinations [(coeff, path), ...]."""
        return [((1, r),) for r in self.relations]

    def __repr__(self):
        return f"<MonomialAlgebra {self.name}: {self.quiver.vertex_count} vertices, dim {self.dim}>"


def rad2_algebra(quiver: Quiver, field: PrimeField, name: str = "rad2") -> MonomialAlgebra:
    """KQ / rad^2: every composition of two arrows vanishes."""
    rels = []
    for a in quiver.arrows:
        for b in quiver.arrows_from(a.target):
            rels.append(quiver.path((a.label, b.label)))
    return MonomialAlgebra(quiver, rels, field, name=name)


def path_basis(algebra) -> tuple[Path, ...]:
    return algebra.basis


# ---------------------------------------------------------------------------
# tensor with the radical-square-zero oriented 3-cycle
# ---------------------------------------------------------------------------

# cyclic structure of the 3-cycle: the d-arrow starting at level c ends at
# _D_TARGET[c]; composing two consecutive d's is zero
_D_TARGET = {1: 3, 2: 1, 3: 2}


class CycleTensorAlgebra:
    """base (x) K C_3 / rad^2, as a bound quiver algebra on Q x C_3.

    Vertices are pairs (v, c) with c in {1, 2, 3}; c indexes the three
    degree classes of a 3-periodic chain complex ([-1], [0], [1] in that
    order).  Arrows are the three copies of each base arrow plus one d-arrow
    per vertex; relations are the copied base relations, d^2 = 0, and the
    commutativity of d with each copied arrow.  Not monomial: the
    commutativity relations are binomial.
    """

    def __init__(self, base: MonomialAlgebra, name: str | None = None):
        self.base = base
        self.field = base.field
        self.name = name or f"{base.name}_tensor_A3CT"
        nv = base.quiver.vertex_count
        arrows = []
        for c in (1, 2, 3):
            for a in base.quiver.arrows:
                arrows.append(Arrow(self.vertex_index(a.source, c),
                                    self.vertex_index(a.target, c),
                                    f"{a.label}@{c}"))
        for c in (1, 2, 3):
            for v in range(nv):
                arrows.append(Arrow(self.vertex_index(v, c),
                                    self.vertex_index(v, _D_TARGET[c]),
                                    f"d{c}@{v + 1}"))
        self.quiver = Quiver(3 * nv, arrows)
        self.relations = self._build_relations()
        self.basis: tuple[Path, ...] = tuple(self._enumerate_basis())
        self._basis_keys = {(p.source, p.labels) for p in self.basis}
        self._paths_from = {
            v: tuple(p for p in self.basis if p.source == v)
            for v in range(self.quiver.vertex_count)
        }
        self._projective_cache: dict[int, object] = {}
        self._simple_cache: dict[int, object] = {}

    # vertex (v, c) with c in {1,2,3}
    def vertex_index(self, v: int, c: int) -> int:
        return 3 * v + (c - 1)

    def vertex_pair(self, idx: int) -> tuple[int, int]:
        return idx // 3, idx % 3 + 1

    def vertex_label(self, idx: int) -> str:
        v, c = self.vertex_pair(idx)
        return f"({v + 1},{c})"

    def _copied(self, path: Path, c: int) -> Path:
        labels = tuple(f"{l}@{c}" for l in path.labels)
        return Path(self.vertex_index(path.source, c),
                    self.vertex_index(path.target, c), labels)

    def _d_label(self, v: int, c: int) -> str:
        return f"d{c}@{v + 1}"

    def _build_relations(self):
        rels = []
        # copied base relations, one per level
        for r in self.base.relations:
            for c in (1, 2, 3):
                rels.append(((1, self._copied(r, c)),))
        # d^2 = 0
        for v in range(self.base.quiver.vertex_count):
            for c in (1, 2, 3):
                c2 = _D_TARGET[c]
                labels = (self._d_label(v, c), self._d_label(v, c2))
                rels.append(((1, Path(self.vertex_index(v, c),
                                      self.vertex_index(v, _D_TARGET[c2]), labels)),))
        # commutativity of d with each copied arrow
        for a in self.base.quiver.arrows:
            for c in (1, 2, 3):
                c2 = _D_TARGET[c]
                src = self.vertex_index(a.source, c)
                dst = self.vertex_index(a.target, c2)
                first = Path(src, dst, (f"{a.label}@{c}", self._d_label(a.target, c)))
                second = Path(src, dst, (self._d_label(a.source, c), f"{a.label}@{c2}"))
                rels.append(((1, first), (-1, second)))
        return tuple(rels)

    def _enumerate_basis(self):
        # normal form: base path at its level, then at most one d-arrow
        out = []
        for p in self.base.basis:
            for c in (1, 2, 3):
                out.append(self._copied(p, c))
                cp = self._copied(p, c)
                d = self._d_label(p.target, c)
                out.append(Path(cp.source, self.vertex_index(p.target, _D_TARGET[c]),
                                cp.labels + (d,)))
        return sorted(out, key=_path_sort_key)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def paths_from(self, v: int) -> tuple[Path, ...]:
        return self._paths_from[v]

    def _split_form(self, path: Path):
        """Decompose a normal-form path into (base labels, number of d's)."""
        base_labels = tuple(l.split("@")[0] for l in path.labels if not l.startswith("d"))
        nd = sum(1 for l in path.labels if l.startswith("d"))
        return base_labels, nd

    def compose_arrow(self, arrow: Arrow, path: Path) -> Path | None:
        if arrow.source != path.target:
            raise ValueError("arrow does not compose with path")
        base_labels, nd = self._split_form(path)
        v, c = self.vertex_pair(path.target)
        if arrow.label.startswith("d"):
            if nd >= 1:
                return None
            return Path(path.source, arrow.target, path.labels + (arrow.label,))
        # copied base arrow: commute it past any trailing d into the base part
        base_arrow_label = arrow.label.split("@")[0]
        a = self.base.quiver.by_label[base_arrow_label]
        src_v, src_c = self.vertex_pair(path.source)
        if base_labels:
            base_path = self.base.quiver.path(base_labels)
        else:
            base_path = self.base.quiver.trivial_path(src_v)
        new_base = self.base.compose_arrow(a, base_path)
        if new_base is None:
            return None
        cp = self._copied(new_base, src_c)
        if nd == 0:
            return cp
        d = self._d_label(a.target, src_c)
        return Path(cp.source, self.vertex_index(a.target, _D_TARGET[src_c]),
                    cp.labels + (d,))

    def relations_linear(self):
        return list(self.relations)

    def __repr__(self):
        return f"<CycleTensorAlgebra {self.name}: {self.quiver.vertex_count} vertices, dim {self.dim}>"


def tensor_cycle3(base: MonomialAlgebra, name: str | None = None) -> CycleTensorAlgebra:
    return CycleTensorAlgebra(base, name=name)


# ---------------------------------------------------------------------------
# presentation file format
# ---------------------------------------------------------------------------

def parse_presentation(text: str, field: PrimeField, name: str = "algebra") -> MonomialAlgebra:
    """Quiver presentation format:

    vertices N
    arrow <label> <src> <dst>          (vertices 1-indexed)
    relation <label> <label> ...       (composite path, leftmost applied last)
    rad2                               (shorthand: all length-2 paths vanish)
    """
    vertex_count = None
    arrows = []
    relation_specs = []
    rad2 = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "vertices":
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: vertices takes one argument")
            vertex_count = int(parts[1])
        elif kind == "arrow":
            if len(parts) != 4:
                raise ValueError(f"line {lineno}: arrow <label> <src> <dst>")
            arrows.append(Arrow(int(parts[2]) - 1, int(parts[3]) - 1, parts[1]))
        elif kind == "relation":
            if len(parts) < 3:
                raise ValueError(f"line {lineno}: relation needs at least two labels")
            relation_specs.append(parts[1:])
        elif kind == "rad2":
            rad2 = True
        else:
            raise ValueError(f"line {lineno}: unknown directive {kind!r}")
    if vertex_count is None:
        raise ValueError("presentation missing 'vertices' line")
    quiver = Quiver(vertex_count, arrows)
    if rad2:
        if relation_specs:
            raise ValueError("rad2 cannot be combined with explicit relations")
        return rad2_algebra(quiver, field, name=name)
    relations = [quiver.path(tuple(reversed(spec))) for spec in relation_specs]
    return MonomialAlgebra(quiver, relations, field, name=name)


def load_presentation_file(path, field: PrimeField, name: str | None = None) -> MonomialAlgebra:
    from pathlib import Path as _P

    p = _P(path)
    return parse_presentation(p.read_text(), field, name=name or p.stem)


_BUILTIN_FILES = {"A": "A.quiver", "A3CT": "A3CT.quiver"}


def builtin_algebra(name: str, field: PrimeField | None = None):
    """Bundled algebras: A, A3CT, and A_tensor_A3CT."""
    field = field or PrimeField()
    if name == "A_tensor_A3CT":
        return tensor_cycle3(builtin_algebra("A", field))
    if name not in _BUILTIN_FILES:
        raise KeyError(f"unknown builtin algebra {name!r}")
    text = resources.files("philab.data").joinpath(_BUILTIN_FILES[name]).read_text()
    return parse_presentation(text, field, name=name)
