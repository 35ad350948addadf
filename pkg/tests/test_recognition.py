import itertools

import pytest

from zext import abelian, extensions as E
from zext.core import words as W
from zext.core.presentation import GenMap, parse_presentation
from zext.core.tietze import canonical_form
from zext.recognition import (descriptor_key, enumerate_standard, match_standard_scheme,
                              recognize_standard, verify_automorphism, verify_endomorphism)


def only_match(text, t="t"):
    (m,) = [m for m in match_standard_scheme(parse_presentation(text)) if m.stable_letter == t]
    return m


def test_match_examples():
    m = only_match("<a,b,t | t*a*t^-1*b^-1, t*b*t^-1*b^-1*a^-1>")
    assert m.stable_letter == "t"
    assert m.images == (m.base.word("b"), m.base.word("a*b"))
    assert match_standard_scheme(parse_presentation("<a,b | a*b*a*b>")) == []
    m = only_match("<x,t | x^2, t*x*t^-1*x^-1>")
    assert m.base == parse_presentation("<x | x^2>") and m.images == ((0,),)


def test_match_is_modulo_rotation_and_inversion():
    # t x t^-1 = x written rotated and inverted, then t x t^-1 = x^-1
    m = only_match("<x,t | x^3, (x^-1*t*x*t^-1)^-1>")
    assert m.images == ((0,),)
    m = only_match("<x,t | x^3, x*t*x*t^-1>")
    assert m.images == ((1,),)
    # the t^-1-conjugation form is not part of the scheme
    assert match_standard_scheme(parse_presentation("<x,t | t^-1*x*t*x^-2>")) == []


def test_match_tries_every_generator():
    # both a and b can serve as the stable letter of Z^2
    matches = match_standard_scheme(parse_presentation("<a,b | a*b*a^-1*b^-1>"))
    assert sorted(m.stable_letter for m in matches) == ["a", "b"]


def test_verify_endomorphism_examples():
    assert verify_endomorphism(only_match("<x,t | x^2, t*x*t^-1*x^-1>"), 10).is_yes
    m = only_match("<x,t | x^2, t*x*t^-1 = x^3>")
    assert verify_endomorphism(m, 1_000).is_yes
    m = only_match("<a,b,t | a*b*a^-1*b^-1, t*a*t^-1 = a^2, t*b*t^-1 = b>")
    assert verify_endomorphism(m, 1_000).is_yes
    m = only_match("<x,t | x^2, t*x*t^-1 = x*x*x*x*x>")
    assert verify_endomorphism(m, 1_000).is_yes
    m = only_match("<x,t | x^4, t*x*t^-1 = x^2*x^0>")
    assert verify_endomorphism(m, 1_000).is_yes
    m = only_match("<x,y,t | x^2, t*x*t^-1 = y, t*y*t^-1 = y>")
    assert verify_endomorphism(m, 100).is_no


def test_verify_automorphism_examples():
    m = only_match("<x,t | x^2, t*x*t^-1*x^-1>")
    v = verify_automorphism(m, 10)
    assert v.is_yes and v.payload[0] == ((0,),)
    m = only_match("<a,b,t | t*a*t^-1*b^-1, t*b*t^-1*(a*b)^-1>")
    v = verify_automorphism(m, 10_000)
    assert v.is_yes
    inv = v.payload[0]
    assert inv == (m.base.word("b*a^-1"), m.base.word("a"))
    for i in range(2):
        assert W.substitute(W.substitute((2 * i,), inv), m.images) == (2 * i,)
    m = only_match("<a,b,t | t*a*t^-1 = a^2, t*b*t^-1 = b>")
    for fuel in (10, 1_000, 20_000):
        assert verify_automorphism(m, fuel).is_unknown


def test_recognize_examples():
    assert recognize_standard(parse_presentation("<a,b | a*b>"), 10_000).is_no
    P = parse_presentation("<a,b,t | t*a*t^-1*b^-1, t*b*t^-1*(a*b)^-1>")
    v = recognize_standard(P, 10_000)
    assert v.is_yes and v.payload.validated and v.payload.standard == P
    v = recognize_standard(parse_presentation("<x,t | x^2, t*x*t^-1*x^-1>"), 100)
    assert v.is_yes
    D = v.payload
    assert D.base == parse_presentation("<x|x^2>") and D.auto == GenMap.identity(D.base)


def test_recognize_zero_fuel():
    v = recognize_standard(parse_presentation("<x,t | x^2, t*x*t^-1*x^-1>"), 0)
    assert v.is_unknown


def test_recognize_monotone_in_fuel():
    cases = ["<a,b,t | t*a*t^-1*b^-1, t*b*t^-1*(a*b)^-1>", "<a,b | a*b>",
             "<x,t | x^2, t*x*t^-1*x^-1>", "<a,b,t | t*a*t^-1 = a^2, t*b*t^-1 = b>"]
    for text in cases:
        P = parse_presentation(text)
        settled = None
        for fuel in (0, 10, 100, 1_000, 10_000):
            v = recognize_standard(P, fuel)
            if settled is not None:
                assert v.status == settled
            elif not v.is_unknown:
                settled = v.status


def first(stream, n=1):
    return list(itertools.islice(stream, n))


def test_enumerate_trivial_base():
    (D,) = first(enumerate_standard(parse_presentation("<x,t | x>"), 10_000))
    assert D.standard == parse_presentation("<t|>") and D.base.n == 0


def test_enumerate_first_emission_is_the_input():
    P = parse_presentation("<a,b,t | t*a*t^-1*b^-1, t*b*t^-1*(a*b)^-1>")
    (D,) = first(enumerate_standard(P, 10_000))
    assert canonical_form(D.standard) == canonical_form(P)


def test_enumerate_eliminates_to_cyclic_base():
    P = parse_presentation("<a,b,t | t*a*t^-1*b^-1, t*b*t^-1*a^-1, a*b^-1>")
    found = list(enumerate_standard(P, 50_000, limit=5))
    assert any(D.base.n == 1 and not D.base.relators for D in found)


def test_enumerate_properties():
    P = parse_presentation("<a,b,t | t*a*t^-1*b^-1, t*b*t^-1*a^-1, a*b^-1>")
    inv = abelian.abelian_invariants(P)
    run1 = list(enumerate_standard(P, 20_000, limit=4))
    run2 = list(enumerate_standard(P, 20_000, limit=4))
    assert [D.to_json() for D in run1] == [D.to_json() for D in run2]
    assert len({descriptor_key(D) for D in run1}) == len(run1)
    for D in run1:
        di = abelian.abelian_invariants(D.standard)
        assert (di.betti, di.torsion) == (inv.betti, inv.torsion)
        assert E.is_deranged(D.base, D.auto) == (inv.betti == 1)


def test_enumerate_betti_two_gives_non_deranged():
    P = parse_presentation("<a,t | t*a*t^-1*a^-1>")
    found = list(enumerate_standard(P, 5_000, limit=3))
    assert found
    assert not any(E.is_deranged(D.base, D.auto) for D in found)


def test_enumerate_argument_checks():
    P = parse_presentation("<t|>")
    with pytest.raises(ValueError):
        list(enumerate_standard(P, -1))
    with pytest.raises(ValueError):
        list(enumerate_standard(P, 10, limit=0))
    assert list(enumerate_standard(P, 0)) == []
