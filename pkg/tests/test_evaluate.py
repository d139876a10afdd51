"""Join-tree evaluation against the string oracle."""

import random

from helpers import binary_words, brute_binary_relation
from wordcq.evaluate import _Evaluation, enumerate_answers, materialize, model_check
from wordcq.model import Query, RegexConstraint, WordEquation
from wordcq.oracle import oracle_eval
from wordcq.parser import parse_query
from wordcq.querydecomp import decompose_query
from wordcq.regexlang import AnyLetter, Star, parse_regex
from wordcq.windex import UNIVERSE, WordIndex


def test_materialize_examples():
    idx = WordIndex("aab")
    rel = materialize(RegexConstraint("x", parse_regex("a*")), idx)
    values = {idx.value_str(t[0]) for t in rel.tuples}
    assert values == {"", "a", "aa"}

    rel2 = materialize(WordEquation("x", ("y",)), idx)
    assert rel2.columns == ("x", "y")
    assert all(a == b for a, b in rel2.tuples)
    assert len(rel2.tuples) == 6

    idx2 = WordIndex("aa")
    rel3 = materialize(WordEquation("z", ("x", "y")), idx2)
    cols, want = brute_binary_relation("aa", "z", "x", "y")
    got = {tuple(idx2.value_str(k) for k in t) for t in rel3.tuples}
    assert rel3.columns == tuple(cols) and got == want


def test_model_check_examples():
    assert model_check(decompose_query(parse_query("Ans() :- U = x.y")), "ab")
    assert not model_check(decompose_query(parse_query("Ans() :- U = x.x")), "ab")


def test_intro_query_instances():
    # product mentioned twice inside the sentence plus a positive term
    q = parse_query(
        "Ans(x,y) :- z = z2.x.z3.x.z4, z = z5.y.z6, z in /SS*/, x in /bb*/, y in /c/"
    )
    qd = decompose_query(q)
    assert model_check(qd, "ababc")
    assert not model_check(qd, "abc")
    for w in ["ababc", "abc", "bbcbb"]:
        assert set(enumerate_answers(qd, w)) == oracle_eval(q, w)


def test_enumerate_examples():
    qd = decompose_query(parse_query("Ans(x) :- U = x.x"))
    assert list(enumerate_answers(qd, "aaaa")) == [("aa",)]
    qd2 = decompose_query(parse_query("Ans(x,y) :- U = x.y"))
    assert list(enumerate_answers(qd2, "ab")) == [("", "ab"), ("a", "b"), ("ab", "")]
    qd3 = decompose_query(parse_query("Ans(x) :- U = p.x.s, x in /aa*/"))
    assert list(enumerate_answers(qd3, "baab")) == [("a",), ("aa",)]


def test_enumeration_order_and_no_duplicates():
    qd = decompose_query(parse_query("Ans(x,y) :- U = x.y, z = x.y"))
    for w in ["abab", "aabb"]:
        rows = list(enumerate_answers(qd, w))
        assert rows == sorted(rows)
        assert len(rows) == len(set(rows))


def _random_query_with_constraints(rng):
    pool = [f"v{i}" for i in range(rng.randint(2, 6))]
    eqs = []
    seen = set()
    for _ in range(rng.randint(1, 3)):
        for _attempt in range(40):
            lhs = rng.choice(pool + [UNIVERSE])
            rhs = tuple(rng.choice(pool) for _ in range(rng.randint(1, 4)))
            if lhs in rhs or rhs in seen:
                continue
            seen.add(rhs)
            eqs.append(WordEquation(lhs, rhs))
            break
    regexes = ["a*", "ab*", "S*", "a|b", "(ab)*", "_", "aa*"]
    cons = []
    vars_used = sorted({v for eq in eqs for v in (eq.lhs,) + eq.rhs if v != UNIVERSE})
    for v in vars_used:
        if rng.random() < 0.35:
            cons.append(RegexConstraint(v, parse_regex(rng.choice(regexes))))
    head = tuple(rng.sample(vars_used, min(len(vars_used), rng.randint(0, 3))))
    return Query(head, tuple(eqs), tuple(cons))


def test_oracle_equivalence_randomized():
    rng = random.Random(2024)
    words = list(binary_words(5))
    cache = {w: WordIndex(w) for w in words}
    done = 0
    while done < 60:
        q = _random_query_with_constraints(rng)
        qd = decompose_query(q)
        if qd is None:
            continue
        done += 1
        for w in words:
            want = oracle_eval(q, w)
            got = list(enumerate_answers(qd, cache[w]))
            assert len(got) == len(set(got))
            assert set(got) == want, (q, w)
            assert model_check(qd, cache[w]) == bool(want)


def test_semijoin_safety():
    rng = random.Random(4096)
    checked = 0
    while checked < 25:
        q = _random_query_with_constraints(rng)
        qd = decompose_query(q)
        if qd is None:
            continue
        for w in ["abab", "aab"]:
            ev = _Evaluation(qd, WordIndex(w))
            if not ev.feasible or not qd.tree.atoms:
                continue
            if not ev._semijoin_reduce(full=True):
                continue
            checked += 1
            # every surviving tuple occurs in some full solution
            for rel in ev.relations:
                if not rel.columns:
                    continue
                answers = oracle_eval(
                    Query(tuple(rel.columns), qd.query2.equations, qd.query2.constraints),
                    w,
                )
                for t in rel.tuples:
                    row = tuple(ev.idx.value_str(k) for k in t)
                    assert row in answers


def test_monotone_sigma_star_filter():
    q = parse_query("Ans(x,y) :- U = x.y")
    qd = decompose_query(q)
    with_filter = Query(
        q.head, q.equations, q.constraints + (RegexConstraint("x", Star(AnyLetter())),)
    )
    qd2 = decompose_query(with_filter)
    for w in ["", "a", "abba"]:
        assert list(enumerate_answers(qd, w)) == list(enumerate_answers(qd2, w))


def test_constraint_only_variables_and_empty_tree():
    q = parse_query("Ans(x) :- x in /a*/, U = y.z")
    qd = decompose_query(q)
    assert set(enumerate_answers(qd, "aab")) == oracle_eval(q, "aab")
    boolean = parse_query("Ans() :- U in /a*/")
    qd2 = decompose_query(boolean)
    assert model_check(qd2, "aaa") and not model_check(qd2, "ab")
    assert list(enumerate_answers(qd2, "aaa")) == [()]
    assert list(enumerate_answers(qd2, "ab")) == []
