"""Shared corpora for the test suite.

Randomized corpora use a seeded ``random.Random`` so runs are reproducible.
"""

from __future__ import annotations

import random
from math import gcd

import pytest

from zext.core import words as W
from zext.core.presentation import GenMap, Presentation, parse_presentation


def braid(n: int) -> Presentation:
    from zext.isomorphism import braid_presentation
    return braid_presentation(n)


A5 = "<x,y | x^2, y^3, (x*y)^5>"
A5_GADGET = "<x,y,t | x^2, y^3, (x*y)^5>"


def F(n: int) -> Presentation:
    return Presentation(tuple("abc"[:n]), ())


def cyclic(n: int) -> Presentation:
    return parse_presentation(f"<x | x^{n}>")


def Z2() -> Presentation:
    return parse_presentation("<a,b | a*b*a^-1*b^-1>")


def elementary_pair(H: Presentation, rng: random.Random) -> tuple[GenMap, GenMap]:
    """One elementary automorphism of ``H`` and its inverse.

    Nielsen moves on free groups and on Z^2 (they descend since every
    automorphism of F_2 sends [a,b] to a conjugate of [a,b]^(+-1)); powers
    coprime to n on <x | x^n>.
    """
    n = H.n
    ident = [W.generator(i) for i in range(n)]
    if n == 1:
        order = H.relators[0].count(0) if H.relators else 0
        if not order:
            m = GenMap(H, H, (W.inverse(ident[0]),))
            return m, m
        k = rng.choice([k for k in range(-order + 1, order) if k and gcd(k, order) == 1])
        k_inv = pow(k, -1, order)
        return (GenMap(H, H, (W.power(ident[0], k),)), GenMap(H, H, (W.power(ident[0], k_inv),)))
    kind = rng.choice(["mul", "lmul", "inv", "swap"])
    i, j = rng.sample(range(n), 2)
    imgs, back = list(ident), list(ident)
    s = rng.choice([1, -1])
    if kind == "mul":
        imgs[i] = W.mul(ident[i], W.power(ident[j], s))
        back[i] = W.mul(ident[i], W.power(ident[j], -s))
    elif kind == "lmul":
        imgs[i] = W.mul(W.power(ident[j], s), ident[i])
        back[i] = W.mul(W.power(ident[j], -s), ident[i])
    elif kind == "inv":
        imgs[i] = back[i] = W.inverse(ident[i])
    else:
        imgs[i], imgs[j] = ident[j], ident[i]
        back = imgs
    return GenMap(H, H, tuple(imgs)), GenMap(H, H, tuple(back))


def elementary(H: Presentation, rng: random.Random) -> GenMap:
    return elementary_pair(H, rng)[0]


def random_automorphism_pair(H: Presentation, rng: random.Random, factors: int = 2) -> tuple[GenMap, GenMap]:
    m = inv = GenMap.identity(H)
    for _ in range(rng.randint(1, factors)):
        e, e_inv = elementary_pair(H, rng)
        m, inv = e.compose(m), inv.compose(e_inv)
    return m, inv


def random_automorphism(H: Presentation, rng: random.Random, factors: int = 2) -> GenMap:
    return random_automorphism_pair(H, rng, factors)[0]


def random_bases(rng: random.Random):
    return [F(2), F(3), cyclic(rng.randint(2, 6)), Z2()]


def random_pairs(count: int, seed: int = 7, factors: int = 3):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        H = rng.choice(random_bases(rng))
        out.append((H, random_automorphism(H, rng, factors)))
    return out


def dicks_pair():
    H = F(3)
    alpha = GenMap.from_strings(H, {"a": "b", "b": "c", "c": "b^-1*a*b^-2*c^3"})
    beta = GenMap.from_strings(H, {"a": "b", "b": "c", "c": "a^-1*b^2*c*b^-1"})
    return H, alpha, beta


@pytest.fixture
def rng():
    return random.Random(12345)


# acceptance criteria record their outcome here; the summary hook prints them
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}")


_WITNESSES: list = []


@pytest.fixture
def witnesses():
    """Audit bundles shared across acceptance criteria within one run."""
    return _WITNESSES
