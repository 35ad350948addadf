"""Real characters of presented groups, restricted to rational ones.

A character factors through the free part of the abelianization, so it is
stored as a rational vector in the fixed basis of that free part; evaluating
it on a word is a dot product with the word's free-part coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Sequence

from zext import abelian
from zext.core import words as W
from zext.core.closure import closure_search
from zext.core.presentation import Presentation
from zext.core.verdict import Search, Task, Verdict, drive
from zext.core.words import Word
from zext.extensions import ExtensionDescriptor


@dataclass(frozen=True)
class Character:
    presentation: Presentation
    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        r = abelian.betti(self.presentation)
        if len(coeffs) != r:
            raise ValueError(f"expected {r} coefficients, got {len(coeffs)}")

    @classmethod
    def from_generator_values(cls, P: Presentation, values: Sequence) -> "Character":
        """The character taking the given values on the generators, if one exists."""
        if len(values) != P.n:
            raise ValueError(f"expected {P.n} generator values")
        vals = [Fraction(v) for v in values]
        inv = abelian.abelian_invariants(P)
        Vi = inv.snf.V_inv.to_rows()
        coeffs = tuple(sum((Vi[k][j] * vals[j] for j in range(P.n)), Fraction(0))
                       for k in range(inv.rank, P.n))
        chi = cls(P, coeffs)
        for j in range(P.n):
            if chi(W.generator(j)) != vals[j]:
                raise ValueError("values do not vanish on the relators")
        return chi

    def __call__(self, w: Word) -> Fraction:
        return eval_character(self, w)

    @property
    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def generator_values(self) -> list[Fraction]:
        return [self(W.generator(j)) for j in range(self.presentation.n)]

    def to_json(self) -> dict:
        return {"num": [c.numerator for c in self.coefficients],
                "den": [c.denominator for c in self.coefficients]}

    @classmethod
    def from_json(cls, P: Presentation, data: dict) -> "Character":
        return cls(P, tuple(Fraction(n, d) for n, d in zip(data["num"], data["den"])))


def character_basis(P: Presentation) -> list[Character]:
    r = abelian.betti(P)
    return [Character(P, tuple(int(i == k) for i in range(r))) for k in range(r)]


def eval_character(chi: Character, w: Word) -> Fraction:
    inv = abelian.abelian_invariants(chi.presentation)
    free = inv.free_image(W.exponent_vector(w, chi.presentation.n))
    return sum((c * x for c, x in zip(chi.coefficients, free)), Fraction(0))


def cone_membership(chi: Character, w: Word) -> bool:
    return eval_character(chi, w) >= 0


def normalize_rank_one(chi: Character | Sequence) -> tuple[int, ...]:
    """Primitive integer vector on the ray of ``chi`` (positive scaling only)."""
    coeffs = [Fraction(c) for c in (chi.coefficients if isinstance(chi, Character) else chi)]
    if not any(coeffs):
        raise ValueError("the zero character has no sphere point")
    den = reduce(lcm, (c.denominator for c in coeffs), 1)
    ints = [int(c * den) for c in coeffs]
    g = reduce(gcd, ints, 0)
    return tuple(x // g for x in ints)


def betti1_characters(P: Presentation) -> tuple[tuple[int, ...], tuple[int, ...]]:
    r = abelian.betti(P)
    if r != 1:
        raise ValueError(f"the character sphere is a pair of points only when betti = 1, here betti = {r}")
    return (1,), (-1,)


def projection_character(D: ExtensionDescriptor) -> Character:
    """The character of the standard presentation killing the base and sending t to 1."""
    values = [0] * D.base.n + [1]
    return Character.from_generator_values(D.standard, values)


def fg_kernel_certificate(D: ExtensionDescriptor) -> dict:
    """Both sphere points of the projection onto Z lie in the BNS invariant.

    A derived statement: the kernel of the projection is the base, which is
    finitely generated, so the criterion for finitely generated kernels
    applies.  Nothing about the invariant is computed.
    """
    if not D.validated:
        raise ValueError("descriptor has not been validated by recognition")
    chi = projection_character(D)
    plus = normalize_rank_one(chi)
    minus = tuple(-x for x in plus)
    return {
        "points": [list(plus), list(minus)],
        "character": chi.to_json(),
        "generator_values": [str(v) for v in chi.generator_values()],
        "reason": "base-fg",
        "base_generators": list(D.base.generators),
        "statement": "the kernel of the projection is finitely generated, "
                     "so both of its sphere points lie in the BNS invariant",
    }


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> bool:
        a, b = self.find(i), self.find(j)
        if a == b:
            return False
        self.parent[max(a, b)] = min(a, b)
        return True


def cone_ball_search(P: Presentation, chi: Character, radius: int) -> Search:
    """Connectivity of the nonnegative part of a Cayley-graph ball, as evidence.

    Vertices are reduced words of length at most ``radius``; one unit per
    vertex, then word-problem queries are dovetailed to merge equal vertices.
    Never answers No.
    """
    if radius < 1:
        raise ValueError("radius must be at least 1")
    verts: list[Word] = []
    for w in W.words_upto(P.n, radius):
        yield
        verts.append(w)
    index = {w: i for i, w in enumerate(verts)}
    keep = [i for i, w in enumerate(verts) if chi(w) >= 0]
    uf = _UnionFind(len(verts))
    for i in keep:
        w = verts[i]
        for c in range(2 * P.n):
            nb = W.mul(w, (c,))
            j = index.get(nb)
            if j is not None and chi(nb) >= 0:
                uf.union(i, j)

    def components() -> int:
        return len({uf.find(i) for i in keep})

    def evidence(resolved: bool) -> dict:
        return {"evidence_only": True, "vertices": len(verts), "nonnegative": len(keep),
                "components": components(), "queries_resolved": resolved}

    if components() <= 1:
        return Verdict.yes(evidence(True))
    inv = abelian.abelian_invariants(P)
    pending = []
    for a in range(len(keep)):
        for b in range(a + 1, len(keep)):
            u, v = verts[keep[a]], verts[keep[b]]
            diff = W.mul(u, W.inverse(v))
            if not inv.word_image_trivial(diff):
                continue
            pending.append(Task(closure_search(P, diff), (keep[a], keep[b])))
    while True:
        live = []
        for t in pending:
            if t.done:
                if t.result.is_yes and uf.union(*t.label) and components() <= 1:
                    return Verdict.yes(evidence(True))
            else:
                live.append(t)
        pending = live
        if not pending:
            # every query settled and the cone part is still disconnected
            return Verdict.unknown(payload=evidence(True))
        for t in pending:
            yield
            t.grant()


def cone_ball_connectivity(P: Presentation, chi: Character, radius: int, fuel: int) -> Verdict:
    if chi.presentation != P:
        raise ValueError("character belongs to a different presentation")
    v = drive(cone_ball_search(P, chi, radius), fuel)
    if v.is_unknown and v.payload is None:
        return Verdict.unknown(v.steps, {"evidence_only": True, "queries_resolved": False})
    return v
