import pytest

from zext import abelian, extensions as E
from zext.core import words as W
from zext.core.closure import normal_closure_contains
from zext.core.presentation import GenMap, Presentation, parse_presentation
from zext.isomorphism import braid_inversion, inner

from conftest import A5, F, Z2, braid, random_pairs


def test_semidirect_examples():
    F2 = F(2)
    D = E.semidirect_presentation(F2, GenMap.from_strings(F2, {"a": "b", "b": "a*b"}))
    assert D.standard == parse_presentation("<a,b,t | t*a*t^-1*b^-1, t*b*t^-1*(a*b)^-1>")
    H = parse_presentation("<x | x^2>")
    D = E.semidirect_presentation(H, GenMap.identity(H))
    assert D.standard == parse_presentation("<x,t | x^2, t*x*t^-1*x^-1>")
    T = Presentation((), ())
    D = E.semidirect_presentation(T, GenMap(T, T, ()))
    assert D.standard == parse_presentation("<t|>")
    with pytest.raises(ValueError):
        E.semidirect_presentation(F2, GenMap.identity(F2), "a")


def test_descriptor_json_round_trip():
    F2 = F(2)
    D = E.semidirect_presentation(F2, GenMap.from_strings(F2, {"a": "b", "b": "a*b"}))
    data = D.to_json()
    assert data["validated"] is False
    assert E.ExtensionDescriptor.from_json(data) == D


def test_deranged_examples():
    F2 = F(2)
    assert not E.is_deranged(F2, GenMap.identity(F2))
    for n in range(2, 7):
        assert E.is_deranged(braid(n), braid_inversion(n))
    assert E.is_deranged(F2, GenMap.from_strings(F2, {"a": "b", "b": "a*b"}))
    A = parse_presentation(A5)
    assert E.is_deranged(A, GenMap.identity(A))


def test_ext_abelianization_examples():
    F2 = F(2)
    inv = E.ext_abelianization(F2, GenMap.from_strings(F2, {"a": "b", "b": "a*b"}))
    assert (inv.betti, inv.torsion) == (1, ())
    inv = E.ext_abelianization(Z2(), GenMap.identity(Z2()))
    assert (inv.betti, inv.torsion) == (3, ())
    inv = E.ext_abelianization(braid(3), braid_inversion(3))
    assert (inv.betti, inv.torsion) == (1, (2,))


def test_betti_formula_and_derangedness_on_random_corpus():
    import sympy
    for H, alpha in random_pairs(120, seed=3):
        D = E.semidirect_presentation(H, alpha)
        direct = abelian.abelian_invariants(D.standard)
        formula = E.ext_abelianization(H, alpha)
        assert (direct.betti, direct.torsion) == (formula.betti, formula.torsion)
        M = abelian.induced_abf_matrix(H, alpha)
        r = M.rows
        kernel = r - (sympy.Matrix((M - abelian.IntMatrix.identity(r)).to_rows()).rank() if r else 0)
        assert direct.betti == kernel + 1
        assert E.is_deranged(H, alpha) == (direct.betti == 1)


def test_derangedness_is_an_outer_property():
    for H, alpha in random_pairs(40, seed=5):
        if H.n < 2:
            continue
        g = (0, 2, 1)
        assert E.is_deranged(H, alpha) == E.is_deranged(H, inner(H, g).compose(alpha))


def test_free_product_with_Z():
    K = parse_presentation("<x | x>")
    assert E.free_product_with_Z(K) == parse_presentation("<x,t | x>")
    G = E.free_product_with_Z(parse_presentation(A5))
    assert G == parse_presentation("<x,y,t | x^2, y^3, (x*y)^5>")
    assert abelian.betti(G) == 1
    for P in (braid(3), Z2(), F(3), parse_presentation("<x|x^5>")):
        assert abelian.betti(E.free_product_with_Z(P)) == abelian.betti(P) + 1
    with pytest.raises(ValueError):
        E.free_product_with_Z(parse_presentation("<t|>"))


def test_triviality_reduction():
    v = E.triviality_reduction(parse_presentation("<a|>"))
    assert v.is_no and v.payload["betti"] == 1
    v = E.triviality_reduction(parse_presentation("<x | x>"))
    assert v.is_yes and v.payload["gadget"] == parse_presentation("<x,t | x>")
    v = E.triviality_reduction(parse_presentation(A5))
    assert v.is_yes and v.payload["betti"] == 1 and "trivial" in v.payload["claim"]
    assert E.triviality_reduction(parse_presentation("<x|x^2>")).is_no


def _maps_respect(src: Presentation, dst: Presentation, m: GenMap, fuel: int) -> bool:
    return all(normal_closure_contains(dst, m(r), fuel).is_yes for r in src.relators)


@pytest.mark.parametrize("H, images", [
    (F(1), {"a": "a"}),
    (F(2), {"a": "b", "b": "a*b"}),
])
def test_swap_product(H, images):
    phi = GenMap.from_strings(H, images)
    sp = E.swap_product(H, phi)
    li, ri = abelian.abelian_invariants(sp.left), abelian.abelian_invariants(sp.right)
    assert (li.betti, li.torsion) == (ri.betti, ri.torsion)
    assert _maps_respect(sp.left, sp.right, sp.forward, 10_000)
    assert _maps_respect(sp.right, sp.left, sp.backward, 10_000)
    for i in range(sp.left.n):
        assert sp.backward(sp.forward(W.generator(i))) == W.generator(i)
    if H.n == 1:
        assert abelian.betti(sp.left) == 3


def test_swap_invariants_agree_on_random_pairs():
    for H, phi in random_pairs(30, seed=11):
        sp = E.swap_product(H, phi)
        li, ri = abelian.abelian_invariants(sp.left), abelian.abelian_invariants(sp.right)
        assert (li.betti, li.torsion) == (ri.betti, ri.torsion)
