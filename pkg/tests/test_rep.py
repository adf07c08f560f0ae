import numpy as np
import pytest

from philab.primefield import PrimeField
from philab.quivers import Arrow, MonomialAlgebra, Quiver, builtin_algebra, rad2_algebra, tensor_cycle3
from philab.rep import (
    DecompositionFailure,
    Module,
    Morphism,
    RelationViolation,
    decompose,
    direct_sum,
    end_basis,
    hom_basis,
    identity_morphism,
    is_isomorphic,
    is_projective,
    projective,
    random_basis_change,
    random_module,
    simple,
    submodule,
    syzygy,
    syzygy_module,
    top_and_cover,
    top_dims,
    visible_blocks,
    zero_module,
)

F = PrimeField()


@pytest.fixture(scope="module")
def A():
    return builtin_algebra("A", F)


@pytest.fixture(scope="module")
def A3(A):
    return builtin_algebra("A3CT", F)


def rng():
    return np.random.default_rng(123)


# -- constructions -----------------------------------------------------------

def test_simple_dims(A, A3):
    assert simple(A, 2).dims == (0, 0, 1, 0)
    assert simple(A3, 0).dims == (1, 0, 0)
    point = MonomialAlgebra(Quiver(1, []), [], F)
    s = simple(point, 0)
    assert s.dims == (1,) and s.total_dim == 1


def test_projective_dims(A, A3):
    # P3 has basis e3, x3 and radical S1
    assert projective(A, 2).dims == (1, 0, 1, 0)
    assert projective(A, 2).total_dim == 2
    # P2 has top S2 and radical S3 + S4
    assert projective(A, 1).dims == (0, 1, 1, 1)
    for v in range(3):
        assert projective(A3, v).total_dim == 2


def test_module_validates_relations(A):
    # a nonzero composite x3 . x2 is illegal over a rad^2-zero algebra
    dims = (1, 1, 1, 0)
    action = {"x2": [[1]], "x3": [[1]]}
    with pytest.raises(RelationViolation):
        Module(A, dims, action)


def test_morphism_validates_commutation(A):
    # P3 has coordinates e3 (vertex 3) and x3 (vertex 1); a morphism P3 -> S1
    # must kill the radical coordinate, so only the zero map exists
    P = projective(A, 2)
    S = simple(A, 0)
    zero = Morphism(P, S, [[[0]], F.zeros(0, 0), F.zeros(0, 1), F.zeros(0, 0)])
    assert zero.is_zero()
    with pytest.raises(ValueError):
        Morphism(P, S, [[[1]], F.zeros(0, 0), F.zeros(0, 1), F.zeros(0, 0)])


# -- covers and syzygies ------------------------------------------------------

def test_cover_of_projective_is_identity_sized(A):
    P = projective(A, 1)
    cov = top_and_cover(P)
    assert cov.module.dims == P.dims
    assert cov.surjection.is_invertible()
    assert is_projective(P)


def test_cover_of_simple(A):
    cov = top_and_cover(simple(A, 1))
    assert cov.vertices == (1,)
    assert cov.module.dims == projective(A, 1).dims


def test_top_is_additive(A):
    s = direct_sum(A, [simple(A, 2), simple(A, 3)])
    cov = top_and_cover(s.module)
    assert sorted(cov.vertices) == [2, 3]


def test_base_syzygy_cycle(A):
    # over A: syzygies of the four simples per the radical-square-zero structure
    r = rng()
    s3, s1 = syzygy(simple(A, 2)).module, simple(A, 0)
    ok, wit = is_isomorphic(s3, s1, r)
    assert ok and wit.is_invertible()
    ok, _ = is_isomorphic(syzygy(simple(A, 3)).module, simple(A, 0), r)
    assert ok
    ok, _ = is_isomorphic(syzygy(simple(A, 0)).module, simple(A, 1), r)
    assert ok
    om2 = syzygy(simple(A, 1)).module
    assert om2.dims == (0, 0, 1, 1)  # S3 + S4


def test_syzygy_of_projective_is_zero(A):
    assert syzygy(projective(A, 0)).module.total_dim == 0


def test_syzygy_additive(A):
    r = rng()
    s = direct_sum(A, [simple(A, 2), simple(A, 1)])
    om = syzygy(s.module).module
    expect = direct_sum(A, [syzygy(simple(A, 2)).module, syzygy(simple(A, 1)).module])
    ok, _ = is_isomorphic(om, expect.module, r)
    assert ok


def test_syzygy_inclusion_is_kernel(A):
    M = simple(A, 1)
    cov = top_and_cover(M)
    syz = syzygy(M)
    for v in range(4):
        comp = F.mul(cov.surjection.components[v], syz.inclusion.components[v])
        assert not np.any(comp)
        assert syz.inclusion.components[v].shape[1] == \
            cov.module.dims[v] - F.rank(cov.surjection.components[v])


# -- hom spaces ---------------------------------------------------------------

def test_hom_simples_disjoint_support(A):
    assert hom_basis(simple(A, 0), simple(A, 1)) == []


def test_hom_projective_to_simple(A):
    # Hom(P3, S3) is the top projection line
    assert len(hom_basis(projective(A, 2), simple(A, 2))) == 1


def test_end_of_simple(A):
    assert len(end_basis(simple(A, 2))) == 1


def test_hom_projective_counts_dims(A):
    # Hom(P_v, N) has dimension = dim N at v
    P = projective(A, 1)
    N = projective(A, 2)
    assert len(hom_basis(P, N)) == N.dims[1]


def test_hom_members_are_valid_morphisms(A):
    r = rng()
    M = random_module(A, r)
    N = random_module(A, r)
    for f in hom_basis(M, N):
        f._check_commutes()


# -- decomposition ------------------------------------------------------------

def test_decompose_projective_plus_simple(A):
    r = rng()
    s = direct_sum(A, [projective(A, 0), simple(A, 0)])
    dec = decompose(s.module, r)
    assert len(dec.summands) == 2
    assert sorted(m for _, m in dec.summands) == [1, 1]
    assert dec.iso.is_invertible()


def test_decompose_multiplicity(A):
    r = rng()
    s = direct_sum(A, [simple(A, 2), simple(A, 2)])
    dec = decompose(s.module, r)
    assert len(dec.summands) == 1
    assert dec.summands[0][1] == 2


def test_decompose_after_basis_change_stable(A):
    r = rng()
    s = direct_sum(A, [projective(A, 1), simple(A, 2), simple(A, 2)])
    base = decompose(s.module, r).dims_multiset()
    for _ in range(5):
        twisted, _ = random_basis_change(s.module, r)
        assert decompose(twisted, r).dims_multiset() == base


def test_decompose_indecomposable_projective(A):
    r = rng()
    dec = decompose(projective(A, 1), r)
    assert len(dec.summands) == 1 and dec.summands[0][1] == 1


def test_visible_blocks_split(A):
    s = direct_sum(A, [simple(A, 0), simple(A, 2)])
    blocks = visible_blocks(s.module)
    assert len(blocks) == 2


def test_decompose_tensor_module(A):
    # decomposition machinery works over the non-monomial tensor algebra too
    T = tensor_cycle3(A)
    r = rng()
    s = direct_sum(T, [projective(T, 0), simple(T, 5), simple(T, 5)])
    dec = decompose(s.module, r)
    assert sorted(m for _, m in dec.summands) == [1, 2]


# -- isomorphism testing ------------------------------------------------------

def test_iso_reflexive_with_witness(A):
    r = rng()
    M = random_module(A, r)
    ok, wit = is_isomorphic(M, M, r)
    assert ok
    assert wit.is_invertible()


def test_iso_rejects_different_dims(A):
    r = rng()
    assert is_isomorphic(simple(A, 2), simple(A, 3), r) == (False, None)


def test_iso_after_basis_change(A):
    r = rng()
    M = random_module(A, r)
    M2, _ = random_basis_change(M, r)
    ok, wit = is_isomorphic(M, M2, r)
    assert ok and wit.is_invertible()


def test_iso_distinguishes_nonisomorphic_same_dims(A):
    r = rng()
    # P3 and S1 + S3 have the same dimension vector (1,0,1,0)
    M = projective(A, 2)
    s = direct_sum(A, [simple(A, 0), simple(A, 2)])
    assert M.dims == s.module.dims
    ok, _ = is_isomorphic(M, s.module, r)
    assert not ok


def test_iso_decompose_strategy(A):
    r = rng()
    left = direct_sum(A, [projective(A, 2), simple(A, 1)]).module
    right_twisted, _ = random_basis_change(
        direct_sum(A, [simple(A, 1), projective(A, 2)]).module, r)
    ok, wit = is_isomorphic(left, right_twisted, r, strategy="decompose")
    assert ok and wit.is_invertible()


def test_iso_equivalence_on_small_family(A):
    r = rng()
    mods = [random_module(A, r) for _ in range(4)]
    verdicts = {}
    for i, m in enumerate(mods):
        for j, n in enumerate(mods):
            verdicts[i, j] = is_isomorphic(m, n, r)[0]
    for i in range(4):
        assert verdicts[i, i]
        for j in range(4):
            assert verdicts[i, j] == verdicts[j, i]
    for i in range(4):
        for j in range(4):
            for k in range(4):
                if verdicts[i, j] and verdicts[j, k]:
                    assert verdicts[i, k]


# -- serialization ------------------------------------------------------------

def test_module_roundtrip(A):
    r = rng()
    M = random_module(A, r)
    M2 = Module.from_dict(A, M.to_dict())
    assert M.equals(M2)


def test_zero_module_behaviour(A):
    z = zero_module(A)
    assert is_projective(z)
    r = rng()
    dec = decompose(z, r)
    assert dec.summands == ()
