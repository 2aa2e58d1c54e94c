import random

import pytest

from reptile.errors import DimensionError
from reptile.isometry import (
    LatticeIsometry,
    SignedPermMatrix,
    apply,
    compose,
    enumerate_matrices,
    inverse,
    is_identity,
    sup_norm,
)


def random_isometry(dim, rng, span=5):
    mats = enumerate_matrices(dim)
    return LatticeIsometry(
        mats[rng.randrange(len(mats))],
        tuple(rng.randint(-span, span) for _ in range(dim)),
    )


def test_enumeration_sizes():
    assert len(enumerate_matrices(2)) == 8
    assert len(enumerate_matrices(3)) == 48


def test_enumeration_no_duplicates_and_canonical_order():
    for dim in (2, 3):
        mats = enumerate_matrices(dim)
        assert len(set(mats)) == len(mats)
        keys = [m.sort_key() for m in mats]
        assert keys == sorted(keys)


def test_identity_comes_first():
    first = enumerate_matrices(2)[0]
    assert first.perm == (0, 1) and first.signs == (1, 1)
    assert first.is_identity()
    assert enumerate_matrices(3)[0].is_identity()


def test_unsupported_dimension():
    with pytest.raises(DimensionError):
        enumerate_matrices(4)
    with pytest.raises(DimensionError):
        enumerate_matrices(1)


def test_matrices_are_orthogonal():
    # M * M^T = I, i.e. composing with the inverse gives the identity, and
    # every matrix preserves the sup norm of integer vectors.
    rng = random.Random(1)
    for dim in (2, 3):
        for m in enumerate_matrices(dim):
            assert m.compose(m.inverse()).is_identity()
            assert m.inverse().compose(m).is_identity()
            assert m.det() in (-1, 1)
            for _ in range(5):
                x = tuple(rng.randint(-9, 9) for _ in range(dim))
                assert sup_norm(m.apply(x)) == sup_norm(x) if any(x) else True
                assert sum(c * c for c in m.apply(x)) == sum(c * c for c in x)


def test_dense_round_trip_and_validation():
    for m in enumerate_matrices(3):
        assert SignedPermMatrix.from_rows(m.rows()) == m
    with pytest.raises(ValueError):
        SignedPermMatrix.from_rows(((1, 0), (1, 0)))
    with pytest.raises(ValueError):
        SignedPermMatrix.from_rows(((2, 0), (0, 1)))
    with pytest.raises(ValueError):
        SignedPermMatrix((0, 0), (1, 1))
    with pytest.raises(ValueError):
        SignedPermMatrix((0, 1), (1, 2))


def test_apply_translation_only():
    h = LatticeIsometry.from_translation((1, 2))
    assert apply(h, (0, 0)) == (1, 2)


def test_apply_rotation_preserves_norm():
    # 90-degree rotation: e_0 -> e_1, e_1 -> -e_0.
    m = SignedPermMatrix((1, 0), (1, -1))
    h = LatticeIsometry(m, (0, 0))
    y = apply(h, (1, 0))
    assert sorted(abs(c) for c in y) == [0, 1]
    assert apply(h, (1, 0)) == (0, 1)
    assert apply(h, (0, 1)) == (-1, 0)


def test_apply_dimension_mismatch():
    h = LatticeIsometry.from_translation((1, 2))
    with pytest.raises(DimensionError):
        apply(h, (1, 2, 3))
    with pytest.raises(DimensionError):
        compose(h, LatticeIsometry.identity(3))


def test_group_laws_on_random_samples():
    rng = random.Random(2)
    for dim in (2, 3):
        ident = LatticeIsometry.identity(dim)
        for _ in range(200):
            a = random_isometry(dim, rng)
            b = random_isometry(dim, rng)
            c = random_isometry(dim, rng)
            x = tuple(rng.randint(-7, 7) for _ in range(dim))
            # definition of composition
            assert apply(compose(a, b), x) == apply(a, apply(b, x))
            # associativity
            assert compose(a, compose(b, c)) == compose(compose(a, b), c)
            # inverses
            assert compose(a, inverse(a)) == ident
            assert compose(inverse(a), a) == ident
            assert apply(inverse(a), apply(a, x)) == x
            assert inverse(inverse(a)) == a
            assert compose(ident, a) == a and compose(a, ident) == a


def test_inverse_of_translation():
    h = LatticeIsometry.from_translation((3, -1))
    assert inverse(h).translation == (-3, 1)
    assert inverse(LatticeIsometry.identity(2)) == LatticeIsometry.identity(2)


def test_is_identity():
    assert is_identity(LatticeIsometry.identity(3))
    assert not is_identity(LatticeIsometry.from_translation((1, 0, 0)))
    reflect = SignedPermMatrix((0, 1), (-1, 1))
    assert not is_identity(LatticeIsometry(reflect, (0, 0)))


def test_isometries_hashable_and_structural_equality():
    a = LatticeIsometry.from_translation((1, 2))
    b = LatticeIsometry.from_translation((1, 2))
    assert a == b and hash(a) == hash(b)
    assert len({a, b}) == 1
