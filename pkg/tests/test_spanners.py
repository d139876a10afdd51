"""Regex formulas, spanner semantics, and compilation."""

import pytest

from helpers import SERCQ_CORPUS, binary_words
from wordcq.errors import ContractError, ParseError
from wordcq.oracle import oracle_eval
from wordcq.parser import parse_query, query_to_text
from wordcq.querydecomp import validate_join_tree
from wordcq.spanners import (
    SpannerQuery,
    express,
    formula_to_text,
    is_pseudo_acyclic,
    parse_regex_formula,
    parse_spanner_query,
    pseudo_acyclic_query,
    pseudo_acyclic_to_fccq,
    semantically_functional,
    sercq_to_fccq,
    spanner_eval_oracle,
)


def test_formula_flags():
    f = parse_regex_formula("S* x{(EBDT)|(ICDT)} S*")
    assert f.functional and f.synchronized and set(f.svars) == {"x"}
    f2 = parse_regex_formula("S* x{a|(b)*} y{S*} S*")
    assert f2.functional and f2.synchronized
    f3 = parse_regex_formula("(x{a})|(b)")
    assert not f3.synchronized
    f4 = parse_regex_formula("(x{a})*")
    assert not f4.functional
    f5 = parse_regex_formula("x{a} S* x{b}")
    assert not f5.functional
    f6 = parse_regex_formula("x{y{a*}b}")
    assert f6.functional and f6.synchronized and set(f6.svars) == {"x", "y"}


def test_formula_roundtrip_and_errors():
    for text in ["S* x{SS*} a S*", "x{a|b}(ab)*", "a x{_} b"]:
        f = parse_regex_formula(text)
        f2 = parse_regex_formula(formula_to_text(f.ast))
        assert f2.ast == f.ast
    with pytest.raises(ParseError):
        parse_regex_formula("x{a")
    with pytest.raises(ParseError):
        parse_spanner_query("proj[x] join( x{a} ")
    with pytest.raises(ParseError):
        parse_spanner_query("proj[q] join( x{a} )")


def test_functionality_flag_matches_semantics():
    texts = [
        "S* x{a|(b)*} y{S*} S*",
        "x{a} S*",
        "(x{a})*",
        "x{a} x{b}",
        "x{a}|(b x{a})",
        "x{S*} y{S*}",
        "x{y{a}b} S*",
        "a* x{b*} a*",
        "(a|b)* x{ab}",
        "x{a}|y{b}",
        "x{%}|y{b}",
        "x{_} S*",
    ]
    for text in texts:
        f = parse_regex_formula(text)
        semantic = all(semantically_functional(f, w) for w in binary_words(6))
        assert f.functional == semantic, text


def test_spanner_oracle_example3():
    p = parse_spanner_query(
        "proj[x1,x2] eq[x1,x2] join( S* x1{SS*} a S* ; S* x2{SS*} b S* )"
    )
    out = spanner_eval_oracle(p, "cacb")
    assert out == {(("x1", (1, 2)), ("x2", (3, 4)))}
    assert spanner_eval_oracle(p, "") == set()
    # single formula, no equalities: raw match set
    single = parse_spanner_query("proj[x] join( x{a} S* )")
    assert spanner_eval_oracle(single, "ab") == {(("x", (1, 2)),)}


def test_express():
    sub = express({"x": (2, 4)}, "papaya")
    assert sub.value("x_P") == "p" and sub.value("x_C") == "ap"
    sub2 = express({"x": (1, 1)}, "papaya")
    assert sub2.value("x_P") == "" and sub2.value("x_C") == ""
    # round trip: prefix length recovers the start, content length the end
    for i in range(1, 5):
        for j in range(i, 5):
            sub3 = express({"x": (i, j)}, "abab")
            start = len(sub3.value("x_P")) + 1
            end = start + len(sub3.value("x_C"))
            assert (start, end) == (i, j)


def test_compile_rejects_bad_input():
    not_sync = SpannerQuery((), (), (parse_regex_formula("(x{a})|(b)"),))
    with pytest.raises(ContractError):
        sercq_to_fccq(not_sync)
    not_func = SpannerQuery((), (), (parse_regex_formula("(x{a})*"),))
    with pytest.raises(ContractError):
        sercq_to_fccq(not_func)


def test_compiled_query_parses_and_realizes():
    p = parse_spanner_query(SERCQ_CORPUS[1])
    q = sercq_to_fccq(p)
    reparsed = parse_query(query_to_text(q))
    assert reparsed == q
    for w in ["", "ab", "aab", "cacb"]:
        mus = spanner_eval_oracle(p, w)
        want = {
            tuple(express(dict(mu), w).value(h) for h in q.head) for mu in mus
        }
        assert oracle_eval(q, w) == want


def test_zero_binding_formula():
    p = parse_spanner_query("proj[x] join( x{S*} ; a S* )")
    q = sercq_to_fccq(p)
    for w in ["", "a", "ab", "ba"]:
        mus = spanner_eval_oracle(p, w)
        want = {
            tuple(express(dict(mu), w).value(h) for h in q.head) for mu in mus
        }
        assert oracle_eval(q, w) == want


def test_pseudo_acyclic_detection():
    yes = parse_spanner_query("proj[x1] join( S* x1{SS*} a S* )")
    assert is_pseudo_acyclic(yes)
    two = parse_spanner_query("proj[x,y] join( S* x{a} S* y{b} S* )")
    assert not is_pseudo_acyclic(two)
    nested = parse_spanner_query("proj[x,y] join( S* x{y{a}} S* )")
    assert not is_pseudo_acyclic(nested)


def test_pseudo_acyclic_construction():
    p = parse_spanner_query("proj[x1] join( S* x1{SS*} a S* )")
    q = pseudo_acyclic_query(p)
    text = query_to_text(q)
    assert "U = x1_P.$p1" in text and "$p1 = x1_C.x1_S" in text
    qd = pseudo_acyclic_to_fccq(p)
    assert validate_join_tree(qd.tree, qd.query2)
    with pytest.raises(ContractError):
        pseudo_acyclic_query(
            parse_spanner_query("proj[x,y] join( S* x{a} S* y{b} S* )")
        )


def test_equality_cycle_spanning_forest():
    p = parse_spanner_query(
        "proj[x] eq[x,y] eq[y,z] eq[z,x] join( x{SS*} ; y{SS*} ; z{SS*} )"
    )
    q = pseudo_acyclic_query(p)
    copies = [eq for eq in q.equations if len(eq.rhs) == 1]
    assert len(copies) == 2  # one equality dropped by the spanning forest
    qd = pseudo_acyclic_to_fccq(p)
    from wordcq.evaluate import enumerate_answers

    for w in binary_words(4):
        mus = spanner_eval_oracle(p, w)
        want = {
            tuple(express(dict(mu), w).value(h) for h in q.head) for mu in mus
        }
        assert set(enumerate_answers(qd, w)) == want


def test_equality_forest_choice_preserves_oracle():
    base = parse_spanner_query(
        "proj[x] eq[x,y] eq[y,z] join( x{S*} y{S*} z{S*} )"
    )
    alt = parse_spanner_query(
        "proj[x] eq[y,z] eq[x,z] join( x{S*} y{S*} z{S*} )"
    )
    for w in binary_words(4):
        assert spanner_eval_oracle(base, w) == spanner_eval_oracle(alt, w)
