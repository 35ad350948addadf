"""Fuel-bounded membership in the normal closure of the relators.

Negative answers come only from the abelianization (or from the group being
free).  Positive answers come from a best-first rewriting search: a cyclic
word is rewritten by replacing a subword ``p`` that begins some cyclic
permutation ``p q`` of a relator (or its inverse) with ``q^-1``.  Every such
step peels off one conjugate of a relator, so a path to the empty word is a
derivation ``w = prod g_i r_i^(s_i) g_i^-1``.  Words are explored in shortlex
order of the current cyclic word, so the search is deterministic, and in the
limit it reaches every element of the normal closure.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

from zext.core import words as W
from zext.core.presentation import Presentation
from zext.core.verdict import Search, Task, Verdict, drive, run_all
from zext.core.words import Word


class Factor(NamedTuple):
    """The conjugate ``conjugator * relators[relator]^sign * conjugator^-1``."""

    conjugator: Word
    relator: int
    sign: int

    def word(self, P: Presentation) -> Word:
        r = P.relators[self.relator]
        return W.conjugate(self.conjugator, r if self.sign > 0 else W.inverse(r))

    def to_json(self) -> dict:
        return {"conjugator": list(self.conjugator), "relator": self.relator, "sign": self.sign}

    @classmethod
    def from_json(cls, data: dict) -> "Factor":
        return cls(tuple(data["conjugator"]), int(data["relator"]), int(data["sign"]))


def derivation_product(P: Presentation, factors: Sequence[Factor]) -> Word:
    return W.mul(*(f.word(P) for f in factors))


def check_derivation(P: Presentation, w: Word, factors: Sequence[Factor]) -> bool:
    for f in factors:
        if not 0 <= f.relator < len(P.relators) or f.sign not in (1, -1):
            return False
    return derivation_product(P, factors) == W.free_reduce(w)


@dataclass(frozen=True)
class _Piece:
    rest_inverse: Word  # q^-1 for the cyclic permutation p q
    relator: int
    sign: int
    shift: Word         # h with p q == h^-1 r^sign h


class _Table:
    def __init__(self, P: Presentation):
        self.prefixes: dict[Word, list[_Piece]] = {}
        self.full: list[_Piece] = []
        self.max_len = 0
        seen: set[tuple[Word, int]] = set()
        for idx, r in enumerate(P.relators):
            if not r:
                continue
            for sign in (1, -1):
                rel = r if sign > 0 else W.inverse(r)
                core, c = W.cyclic_reduce(rel)
                L = len(core)
                self.max_len = max(self.max_len, L)
                for k in range(L):
                    rot = core[k:] + core[:k]
                    if (rot, idx) in seen:
                        continue
                    seen.add((rot, idx))
                    h = W.mul(c, core[:k])
                    self.full.append(_Piece(W.inverse(rot), idx, sign, h))
                    for j in range(1, L + 1):
                        self.prefixes.setdefault(rot[:j], []).append(
                            _Piece(W.inverse(rot[j:]), idx, sign, h))
        self.min_len = min((len(p.rest_inverse) for p in self.full), default=0)


@lru_cache(maxsize=1024)
def _table(P: Presentation) -> _Table:
    return _Table(P)


def abelian_certificate(P: Presentation, w: Word) -> dict | None:
    """Certificate that ``w`` has nontrivial image in the abelianization, or None."""
    from zext import abelian

    inv = abelian.abelian_invariants(P)
    vec = W.exponent_vector(w, P.n)
    if inv.is_trivial_image(vec):
        return None
    return {
        "kind": "abelian",
        "exponents": vec,
        "coordinates": inv.coordinates(vec),
        "diagonal": inv.snf.diagonal + [0] * (P.n - len(inv.snf.diagonal)),
        "free_image": inv.free_image(vec),
    }


def closure_search(P: Presentation, w: Word) -> Search:
    """Search for a derivation of ``w`` from the relators of ``P``.

    Yields once per candidate word produced.  Returns Yes with a list of
    :class:`Factor`, or No with an abelian certificate.
    """
    if w and max(w) >= 2 * P.n:
        raise ValueError("word is not over the presentation's alphabet")
    w = W.free_reduce(w)
    if not w:
        return Verdict.yes([])
    cert = abelian_certificate(P, w)
    if cert is not None:
        return Verdict.no(cert)
    table = _table(P)
    if not table.full:
        # no nontrivial relators: the group is free on the generators
        return Verdict.no({"kind": "free", "word": list(w)})

    core, c = W.cyclic_reduce(w)
    # node -> (parent, conjugator update, factor or None); the root has parent None
    parents: dict[Word, tuple[Word | None, Word, tuple | None]] = {core: (None, c, None)}
    heap: list[tuple[int, Word, int]] = [(len(core), core, 0)]

    def derivation(node: Word) -> list[Factor]:
        chain = []
        while node is not None:
            parent, step, fac = parents[node]
            chain.append((step, fac))
            node = parent
        chain.reverse()
        g: Word = ()
        out = []
        for step, fac in chain:
            # fac (if any) was peeled off the parent word, before conjugating by step
            if fac is not None:
                shift, idx, sign = fac
                out.append(Factor(W.mul(g, shift), idx, sign))
            g = W.mul(g, step)
        return out

    def offer(parent: Word, new: Word, step_fac: tuple | None):
        # new is freely reduced; pass to its cyclic core
        inner, conj = W.cyclic_reduce(new)
        if inner in parents:
            return False
        parents[inner] = (parent, conj, step_fac)
        heapq.heappush(heap, (len(inner), inner, 0))
        return True

    while heap:
        _, u, kind = heapq.heappop(heap)
        n = len(u)
        if kind == 0:
            candidates = []
            for i in range(n):
                for k in range(1, min(table.max_len, n - i) + 1):
                    for piece in table.prefixes.get(u[i:i + k], ()):
                        candidates.append((i, k, piece))
            if n > 1:
                candidates.append(None)  # rotation by one letter
            for cand in candidates:
                yield
                if cand is None:
                    rot = u[1:] + u[:1]
                    if rot not in parents:
                        parents[rot] = (u, u[:1], None)
                        heapq.heappush(heap, (n, rot, 0))
                    continue
                i, k, piece = cand
                new = W.mul(u[:i], piece.rest_inverse, u[i + k:])
                shift = W.mul(u[:i], W.inverse(piece.shift))
                fac = (shift, piece.relator, piece.sign)
                if not new:
                    parents[new] = (u, (), fac)
                    return Verdict.yes(derivation(new))
                offer(u, new, fac)
            heapq.heappush(heap, (n + table.min_len, u, 1))
        else:
            # insertions of a whole relator conjugate at the front; with
            # rotations this reaches every position
            for piece in table.full:
                yield
                new = W.mul(piece.rest_inverse, u)
                fac = (W.inverse(piece.shift), piece.relator, piece.sign)
                if not new:
                    parents[new] = (u, (), fac)
                    return Verdict.yes(derivation(new))
                offer(u, new, fac)
    return Verdict.unknown()


def normal_closure_contains(P: Presentation, w: Word, fuel: int) -> Verdict:
    return drive(closure_search(P, w), fuel)


def equal_in_group(P: Presentation, u: Word, v: Word) -> Search:
    """Search for a proof that ``u == v`` in the group presented by ``P``."""
    return closure_search(P, W.mul(u, W.inverse(v)))


def all_hold(queries: Sequence[tuple[Presentation, Word]]) -> Search:
    """Dovetail membership queries ``(P, w)``; No as soon as one is refuted.

    Yes carries one derivation per query, in order.
    """
    tasks = [Task(closure_search(P, w), i) for i, (P, w) in enumerate(queries)]
    yield from run_all(tasks)
    for t in tasks:
        if t.result is not None and t.result.is_no:
            return Verdict.no({"index": t.label, "certificate": t.result.payload})
    if all(t.result is not None and t.result.is_yes for t in tasks):
        return Verdict.yes([tuple(t.result.payload) for t in tasks])
    return Verdict.unknown()
