import random
from fractions import Fraction

import pytest

from reptile.errors import ParseError, ValidationError
from reptile.isometry import LatticeIsometry, SignedPermMatrix, enumerate_matrices
from reptile.known import cube_block, cube_system, square_system
from reptile.system import (
    BlockSystem,
    RepTileSystem,
    block_expand,
    bounding_radius,
    data_space_count,
    emit_system,
    g_conjugate,
    parse_system,
    system_to_document,
    word_map,
)

T = LatticeIsometry.from_translation
ID3 = LatticeIsometry.identity(3)


def random_system(dim, rng, span=1):
    mats = enumerate_matrices(dim)
    return RepTileSystem(
        tuple(
            LatticeIsometry(
                mats[rng.randrange(len(mats))],
                tuple(rng.randint(-span, span) for _ in range(dim)),
            )
            for _ in range(2**dim)
        )
    )


# -- block expansion ---------------------------------------------------------


def test_block_expand_identity():
    b = BlockSystem(ID3, ID3, ID3, ID3)
    assert block_expand(b).maps == (ID3,) * 8


def test_block_expand_translations_compose_additively():
    w, u, t = (1, 2, 3), (-1, 0, 4), (0, 5, -2)
    b = BlockSystem(T(w), T(u), ID3, T(t))
    vs = [h.translation for h in block_expand(b).maps]
    add = lambda *xs: tuple(sum(c) for c in zip(*xs))
    assert vs == [
        (0, 0, 0),
        t,
        u,
        add(u, t),
        w,
        add(w, t),
        add(w, u),
        add(w, u, t),
    ]


def test_block_expand_enumerates_box_corners():
    b = BlockSystem(T((4, 0, 0)), T((0, 2, 0)), ID3, T((0, 0, 1)))
    got = {h.translation for h in block_expand(b).maps}
    assert got == {(x, y, z) for x in (0, 4) for y in (0, 2) for z in (0, 1)}


def test_block_expand_order_matches_composition():
    rng = random.Random(3)
    mats = enumerate_matrices(3)
    for _ in range(20):
        f = [
            LatticeIsometry(
                mats[rng.randrange(48)], tuple(rng.randint(-3, 3) for _ in range(3))
            )
            for _ in range(4)
        ]
        f1, f2, f3, f4 = f
        expanded = block_expand(BlockSystem(*f)).maps
        expected = (
            f3,
            f4,
            f2.compose(f3),
            f2.compose(f4),
            f1.compose(f3),
            f1.compose(f4),
            f1.compose(f2).compose(f3),
            f1.compose(f2).compose(f4),
        )
        assert expanded == expected


# -- word maps ---------------------------------------------------------------


def test_word_map_single_letter():
    s = cube_system()
    for k in range(8):
        assert word_map(s, (k,)) == s.maps[k]


def test_word_map_identity_system():
    s = RepTileSystem((ID3,) * 8)
    assert word_map(s, (0, 3, 7, 1)) == ID3


def test_word_map_cube_pairs():
    s = cube_system()
    for k in range(8):
        for j in range(8):
            got = word_map(s, (k, j))
            vk, vj = s.maps[k].translation, s.maps[j].translation
            assert got.translation == tuple(2 * a + b for a, b in zip(vk, vj))
            assert got.matrix.is_identity()


def test_word_map_validates():
    s = square_system()
    with pytest.raises(ValueError):
        word_map(s, ())
    with pytest.raises(ValueError):
        word_map(s, (4,))


def _exact_word_map(s, w):
    """Independent oracle: compose the contractions with exact rationals,
    then scale by 2^n."""
    dim = s.dim
    n = len(w)
    # affine map as (matrix rows of Fractions, translation of Fractions)
    mat = [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
    vec = [Fraction(0)] * dim
    for k in w:
        h = s.maps[k]
        rows = h.matrix.rows()
        half_rows = [[Fraction(rows[i][j], 2) for j in range(dim)] for i in range(dim)]
        half_v = [Fraction(c, 2) for c in h.translation]
        # current := current o f_k   (f_k = x -> (Mx + v)/2)
        new_mat = [
            [
                sum(mat[i][l] * half_rows[l][j] for l in range(dim))
                for j in range(dim)
            ]
            for i in range(dim)
        ]
        new_vec = [
            sum(mat[i][l] * half_v[l] for l in range(dim)) + vec[i] for i in range(dim)
        ]
        mat, vec = new_mat, new_vec
    scale = 2**n
    out_rows = tuple(tuple(int(scale * mat[i][j]) for j in range(dim)) for i in range(dim))
    out_v = tuple(int(scale * vec[i]) for i in range(dim))
    return out_rows, out_v


def test_word_map_against_exact_rational_composition():
    rng = random.Random(4)
    for dim in (2, 3):
        for _ in range(40):
            s = random_system(dim, rng, span=2)
            n = rng.randint(1, 4)
            w = tuple(rng.randrange(s.m) for _ in range(n))
            h = word_map(s, w)
            rows, v = _exact_word_map(s, w)
            assert h.matrix.rows() == rows
            assert h.translation == v


def test_word_map_concatenation_identity():
    # H_(u v) = (translation of H_u scaled by 2^|v|) o H_v, exactly.
    rng = random.Random(5)
    for _ in range(60):
        s = random_system(2, rng, span=2)
        u = tuple(rng.randrange(4) for _ in range(rng.randint(1, 3)))
        v = tuple(rng.randrange(4) for _ in range(rng.randint(1, 3)))
        lhs = word_map(s, u + v)
        rhs = g_conjugate(word_map(s, u), len(v)).compose(word_map(s, v))
        assert lhs == rhs


def test_word_map_translation_bound():
    rng = random.Random(6)
    for _ in range(50):
        s = random_system(3, rng, span=3)
        r = bounding_radius(s)
        n = rng.randint(1, 4)
        w = tuple(rng.randrange(8) for _ in range(n))
        t = word_map(s, w).translation
        assert max(abs(c) for c in t) <= (2**n - 1) * r


# -- bounding radius ---------------------------------------------------------


def test_bounding_radius():
    assert bounding_radius(RepTileSystem((ID3,) * 8)) == 1
    assert bounding_radius(cube_system()) == 1
    maps = list(cube_system().maps)
    maps[3] = T((-7, 3, 10))
    assert bounding_radius(RepTileSystem(tuple(maps))) == 10


# -- data space counting ------------------------------------------------------


def test_data_space_count_paper_values():
    n = data_space_count(3, 10, 1)
    assert n == 48 * 21**3 == 444528
    assert data_space_count(3, 10, 8) == n**8
    assert data_space_count(3, 10, 4) == n**4


def test_data_space_count_independent_oracle():
    # repeated multiplication vs builtin exponentiation
    for dim, r, k in [(2, 1, 4), (3, 2, 8), (3, 10, 4)]:
        per_map = len(enumerate_matrices(dim)) * (2 * r + 1) ** dim
        slow = 1
        for _ in range(k):
            slow *= per_map
        assert data_space_count(dim, r, k) == slow


def test_data_space_count_validates():
    with pytest.raises(ValueError):
        data_space_count(2, -1, 1)
    with pytest.raises(ValueError):
        data_space_count(2, 1, 0)


# -- file format --------------------------------------------------------------


def test_emit_parse_round_trip():
    for s in (square_system(), cube_system()):
        assert parse_system(emit_system(s)) == s
    b = cube_block()
    assert parse_system(emit_system(b)) == b


def test_emit_is_deterministic():
    s = cube_system()
    assert emit_system(s) == emit_system(s)
    b = cube_block()
    assert emit_system(b) == emit_system(b)


def test_emit_canonical_golden():
    s = square_system()
    text = emit_system(s).decode("utf-8")
    assert text.startswith('{\n  "kind": "system",\n  "dim": 2,\n  "maps": [')
    # canonical field order inside a map record
    i_perm = text.index('"perm"')
    i_signs = text.index('"signs"')
    i_v = text.index('"v"')
    assert i_perm < i_signs < i_v


def test_parse_rejects_wrong_map_count():
    doc = system_to_document(cube_system())
    doc["maps"] = doc["maps"][:7]
    import json

    with pytest.raises(ValidationError, match="expected 8 maps"):
        parse_system(json.dumps(doc))


def test_parse_rejects_bad_sign():
    doc = system_to_document(square_system())
    doc["maps"][0]["signs"][0] = 2
    import json

    with pytest.raises(ValidationError):
        parse_system(json.dumps(doc))


def test_parse_rejects_unknown_fields():
    import json

    doc = system_to_document(square_system())
    doc["extra"] = 1
    with pytest.raises(ValidationError, match="unknown"):
        parse_system(json.dumps(doc))
    doc = system_to_document(square_system())
    doc["maps"][0]["w"] = [0, 0]
    with pytest.raises(ValidationError, match="unknown"):
        parse_system(json.dumps(doc))


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as err:
        parse_system(b'{"kind": "system",\n  broken')
    assert err.value.line == 2


def test_parse_rejects_block_dim2():
    import json

    doc = system_to_document(cube_block())
    doc["dim"] = 2
    with pytest.raises(ValidationError):
        parse_system(json.dumps(doc))


def test_block_document_round_trip_and_expansion():
    from reptile.system import load_system

    b = cube_block()
    assert block_expand(b) == cube_system()
