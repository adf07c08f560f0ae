import pytest

from philab.primefield import PrimeField
from philab.quivers import (
    Arrow,
    MonomialAlgebra,
    NonAdmissibleError,
    Quiver,
    builtin_algebra,
    parse_presentation,
    path_basis,
    rad2_algebra,
    tensor_cycle3,
)

F = PrimeField()


@pytest.fixture(scope="module")
def A():
    return builtin_algebra("A", F)


@pytest.fixture(scope="module")
def A3(A):
    return builtin_algebra("A3CT", F)


def test_builtin_A_shape(A):
    assert A.quiver.vertex_count == 4
    assert len(A.quiver.arrows) == 5
    # rad^2 basis: trivial paths plus arrows
    assert A.dim == 9
    assert len(A.relations) == 6  # the six composable 2-paths of Q


def test_builtin_A3CT_shape(A3):
    assert A3.quiver.vertex_count == 3
    assert len(A3.quiver.arrows) == 3
    assert A3.dim == 6


def test_single_vertex_rad2():
    q = Quiver(1, [])
    alg = rad2_algebra(q, F)
    assert alg.dim == 1
    assert alg.basis[0].is_trivial()


def test_path_basis_sorted_and_deterministic(A):
    b1 = path_basis(A)
    b2 = path_basis(builtin_algebra("A", F))
    assert [str(p) for p in b1] == [str(p) for p in b2]
    lens = [len(p) for p in b1]
    assert lens == sorted(lens)


def test_no_relation_acyclic_quiver():
    q = Quiver(2, [Arrow(0, 1, "a")])
    alg = MonomialAlgebra(q, [], F)
    assert alg.dim == 3  # e1, e2, a


def test_cycle_without_relations_is_not_admissible():
    q = Quiver(3, [Arrow(0, 2, "y1"), Arrow(2, 1, "y3"), Arrow(1, 0, "y2")])
    with pytest.raises(NonAdmissibleError):
        MonomialAlgebra(q, [], F)


def test_rad2_kills_all_two_paths(A):
    for a in A.quiver.arrows:
        for b in A.quiver.arrows_from(a.target):
            p = A.quiver.trivial_path(a.source)
            p = A.compose_arrow(a, p)
            assert p is not None
            assert A.compose_arrow(b, p) is None


def test_tensor_quiver_shape(A):
    T = tensor_cycle3(A)
    assert T.quiver.vertex_count == 12
    assert len(T.quiver.arrows) == 27  # 5*3 copied + 4*3 d-arrows
    assert T.dim == 6 * A.dim


def test_tensor_relation_counts(A):
    # six rad^2 monomials copied at three levels, d^2 at every vertex,
    # one commutativity binomial per arrow per level
    T = tensor_cycle3(A)
    counts = {1: 0, 2: 0, 3: 0}
    for rel in T.relations_linear():
        if len(rel) == 2:
            counts[3] += 1
        elif all(l.startswith("d") for l in rel[0][1].labels):
            counts[2] += 1
        else:
            counts[1] += 1
    assert counts == {1: 18, 2: 12, 3: 15}


def test_tensor_of_point_is_the_cycle_algebra(A3):
    point = MonomialAlgebra(Quiver(1, []), [], F, name="K")
    T = tensor_cycle3(point)
    assert T.quiver.vertex_count == 3
    assert len(T.quiver.arrows) == 3
    assert T.dim == 6
    assert len(T.relations_linear()) == 3  # d^2 relations only
    assert T.dim == A3.dim


def test_tensor_compose_arrow_normal_form(A):
    T = tensor_cycle3(A)
    # start at (1,1): apply x1@1 then d1@2 -- and in the other order;
    # both normal forms are the same pair (x1, d)
    p0 = T.quiver.trivial_path(T.vertex_index(0, 1))
    x1 = T.quiver.by_label["x1@1"]
    d_at_1 = T.quiver.by_label["d1@1"]
    via_arrow = T.compose_arrow(x1, p0)
    via_arrow = T.compose_arrow(T.quiver.by_label["d1@2"], via_arrow)
    via_d = T.compose_arrow(d_at_1, p0)
    via_d = T.compose_arrow(T.quiver.by_label["x1@3"], via_d)
    assert via_arrow is not None and via_d is not None
    assert via_arrow.source == via_d.source and via_arrow.target == via_d.target
    # d^2 vanishes
    dd = T.compose_arrow(T.quiver.by_label["d3@1"], T.compose_arrow(d_at_1, p0))
    assert dd is None


def test_parse_presentation_relations():
    text = """
    vertices 3
    arrow a 1 2
    arrow b 2 3
    relation b a
    """
    alg = parse_presentation(text, F)
    # relation "b a" means b after a, so the composite path dies
    assert alg.dim == 5  # e1,e2,e3,a,b
    a = alg.quiver.by_label["a"]
    b = alg.quiver.by_label["b"]
    p = alg.compose_arrow(a, alg.quiver.trivial_path(0))
    assert alg.compose_arrow(b, p) is None


def test_parse_presentation_errors():
    with pytest.raises(ValueError):
        parse_presentation("arrow a 1 2", F)
    with pytest.raises(ValueError):
        parse_presentation("vertices 2\nfrobnicate", F)


def test_builtin_tensor_algebra():
    T = builtin_algebra("A_tensor_A3CT", F)
    assert T.dim == 54
