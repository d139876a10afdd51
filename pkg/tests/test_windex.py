"""Word index: factor algebra against direct string oracles."""

import itertools
import random

import pytest

from helpers import all_spans, all_substrings, binary_words, brute_binary_relation
from wordcq.errors import ContractError, RangeError
from wordcq.windex import UNIVERSE, BinaryShape, Span, build_index


def factors_of(idx):
    return [idx.factor(s) for s in idx.enumerate_factors()]


def test_papaya_goldens():
    idx = build_index("papaya")
    assert idx.lcp(2, 4) == 1
    assert idx.lcp(4, 1) == 0
    assert idx.lcp(3, 3) == 4
    facs = factors_of(idx)
    assert len(facs) == 18
    assert facs == sorted(facs) == all_substrings("papaya")
    # the block generated from the suffix at position 2
    assert facs[:6] == ["", "a", "ap", "apa", "apay", "apaya"]
    # suffixes in lexicographic order, the empty suffix included
    suffixes = sorted("papaya"[i:] for i in range(7))
    assert suffixes == ["", "a", "apaya", "aya", "papaya", "paya", "ya"]


def test_empty_and_unary_words():
    idx = build_index("")
    assert factors_of(idx) == [""]
    assert [idx.factor(s) for s in idx.enumerate_squares()] == [""]
    assert len(factors_of(build_index("aaa"))) == 4


def test_lcp_errors_and_symmetry():
    idx = build_index("abab")
    with pytest.raises(RangeError):
        idx.lcp(0, 1)
    with pytest.raises(RangeError):
        idx.lcp(1, 5)
    for i in range(1, 5):
        assert idx.lcp(i, i) == 4 - i + 1
        for j in range(1, 5):
            assert idx.lcp(i, j) == idx.lcp(j, i)


def test_factor_eq_examples():
    idx = build_index("abab")
    assert idx.factor_eq(Span(1, 3), Span(3, 5))
    assert not idx.factor_eq(Span(1, 3), Span(2, 4))
    # "ap" vs "ay" in papaya
    assert not build_index("papaya").factor_eq(Span(2, 4), Span(4, 6))
    with pytest.raises(RangeError):
        idx.factor_eq(Span(0, 2), Span(1, 3))


def test_factor_eq_exhaustive_small_and_long():
    for w in binary_words(6):
        idx = build_index(w)
        for s1 in all_spans(len(w)):
            for s2 in all_spans(len(w)):
                assert idx.factor_eq(s1, s2) == (idx.factor(s1) == idx.factor(s2))
    rng = random.Random(5)
    for w in ["".join(rng.choice("ab") for _ in range(30)), "papaya" * 5]:
        idx = build_index(w)
        spans = all_spans(len(w))
        for _ in range(20000):
            s1 = rng.choice(spans)
            s2 = rng.choice(spans)
            assert idx.factor_eq(s1, s2) == (idx.factor(s1) == idx.factor(s2))


def test_enumerate_factors_matches_brute():
    assert [build_index("aab").factor(s) for s in build_index("aab").enumerate_factors()] == [
        "",
        "a",
        "aa",
        "aab",
        "ab",
        "b",
    ]
    for w in binary_words(8):
        facs = factors_of(build_index(w))
        assert facs == all_substrings(w)
    rng = random.Random(11)
    for _ in range(20):
        w = "".join(rng.choice("ab") for _ in range(rng.randint(9, 20)))
        assert factors_of(build_index(w)) == all_substrings(w)


def brute_squares(w):
    out = {""}
    for s in all_substrings(w):
        half, odd = divmod(len(s), 2)
        if s and not odd and s[:half] == s[half:]:
            out.add(s)
    return sorted(out)


def test_enumerate_squares():
    assert [build_index("aa").factor(s) for s in build_index("aa").enumerate_squares()] == ["", "aa"]
    assert [build_index("abab").factor(s) for s in build_index("abab").enumerate_squares()] == ["", "abab"]
    sq = [build_index("aabaab").factor(s) for s in build_index("aabaab").enumerate_squares()]
    assert "aa" in sq and "aabaab" in sq
    for w in binary_words(8):
        idx = build_index(w)
        assert [idx.factor(s) for s in idx.enumerate_squares()] == brute_squares(w)


def test_holds_binary_examples_and_errors():
    idx = build_index("abab")
    shape = BinaryShape("x", "y", "z")
    assert idx.holds_binary(shape, {"x": Span(1, 5), "y": Span(1, 3), "z": Span(3, 5)})
    assert not idx.holds_binary(shape, {"x": Span(1, 5), "y": Span(1, 2), "z": Span(3, 5)})
    with pytest.raises(ContractError):
        idx.holds_binary(shape, {"x": Span(1, 5), "y": Span(1, 3)})
    with pytest.raises(ContractError):
        idx.holds_binary(
            BinaryShape(UNIVERSE, "y", "z"),
            {UNIVERSE: Span(1, 2), "y": Span(1, 1), "z": Span(1, 2)},
        )


def test_holds_binary_exhaustive():
    shape = BinaryShape("x", "y", "z")
    for w in binary_words(5):
        idx = build_index(w)
        spans = all_spans(len(w))
        for s1 in spans:
            for s2 in spans:
                for s3 in spans:
                    got = idx.holds_binary(shape, {"x": s1, "y": s2, "z": s3})
                    want = idx.factor(s1) == idx.factor(s2) + idx.factor(s3)
                    assert got == want


def test_enumerate_binary_golden_examples():
    idx = build_index("aa")
    sols = list(idx.enumerate_binary(BinaryShape(UNIVERSE, "y", "y")))
    assert [{k: idx.factor(v) for k, v in s.items()} for s in sols] == [{"y": "a"}]
    assert list(build_index("ab").enumerate_binary(BinaryShape(UNIVERSE, "y", "y"))) == []
    idx2 = build_index("ab")
    got = {
        (idx2.factor(s["x"]), idx2.factor(s["y"]), idx2.factor(s["z"]))
        for s in idx2.enumerate_binary(BinaryShape("x", "y", "z"))
    }
    _cols, want = brute_binary_relation("ab", "x", "y", "z")
    assert got == want


def test_enumerate_binary_all_shapes_small():
    names = ["x", "y", "z", UNIVERSE]
    shapes = [BinaryShape(*combo) for combo in itertools.product(names, repeat=3)]
    for w in binary_words(5):
        idx = build_index(w)
        for shape in shapes:
            cols, want = brute_binary_relation(w, shape.lhs, shape.rhs1, shape.rhs2)
            seen = []
            for asg in idx.enumerate_binary(shape):
                seen.append(tuple(idx.factor(asg[c]) for c in cols))
            assert len(seen) == len(set(seen)), (w, shape)
            assert set(seen) == want, (w, shape)


def test_enumeration_order_is_factor_lex_then_split():
    idx = build_index("aba")
    rows = [
        (idx.factor(a["x"]), idx.factor(a["y"]))
        for a in idx.enumerate_binary(BinaryShape("x", "y", "z"))
    ]
    xs = [x for x, _y in rows]
    assert xs == sorted(xs)
    for _x, group in itertools.groupby(rows, key=lambda r: r[0]):
        lens = [len(y) for _x2, y in group]
        assert lens == sorted(lens)


def test_value_keys_and_canonical_spans():
    idx = build_index("banana")
    for s in all_spans(6):
        canon = idx.canonicalize(s)
        assert idx.factor(canon) == idx.factor(s)
        assert idx.value_key(canon) == idx.value_key(s)
    keys = [idx.value_key(s) for s in idx.enumerate_factors()]
    assert len(set(keys)) == len(keys)
    assert keys == sorted(keys)
