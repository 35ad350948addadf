"""Canonical forms of presentations and bounded elementary Tietze moves.

The four move classes:

* ``T1`` adjoin a relator that is a product of boundedly many conjugates of
  existing relators;
* ``T2`` drop a relator that is such a product of the others;
* ``T3`` adjoin a generator ``y`` with the relator ``y w^-1``;
* ``T4`` drop a generator occurring once in some relator, substituting its
  solution everywhere else.

Every move returns a presentation in canonical form.
"""

from __future__ import annotations

from bisect import insort
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Callable, Iterator

from zext.core import words as W
from zext.core.presentation import Presentation
from zext.core.words import Word


@dataclass(frozen=True)
class TietzeBounds:
    max_new_generators: int = 1
    max_relator_length: int = 4
    max_derivation_factors: int = 2
    max_conjugator_length: int = 1

    def __post_init__(self):
        if min(self.max_new_generators, self.max_relator_length,
               self.max_derivation_factors, self.max_conjugator_length) < 0:
            raise ValueError("Tietze bounds must be nonnegative")

    @classmethod
    def parse(cls, text: str) -> "TietzeBounds":
        parts = [int(p) for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError("expected four comma-separated integers")
        return cls(*parts)

    def to_json(self) -> list[int]:
        return [self.max_new_generators, self.max_relator_length,
                self.max_derivation_factors, self.max_conjugator_length]


def _sorted_relators(rels) -> tuple[Word, ...]:
    return tuple(sorted(rels, key=W.shortlex_key))


def canonical_form(P: Presentation) -> Presentation:
    rels = {W.cyclic_canonical(r) for r in P.relators}
    rels.discard(W.EMPTY)
    return Presentation.trusted(P.generators, _sorted_relators(rels))


def is_canonical(P: Presentation) -> bool:
    return canonical_form(P) == P


def _with_relator(P: Presentation, c: Word, generators: tuple[str, ...] | None = None) -> Presentation:
    """Add the canonical relator ``c`` to the canonical ``P``."""
    rels = list(P.relators)
    if c and c not in P.relators:
        insort(rels, c, key=W.shortlex_key)
    return Presentation.trusted(generators or P.generators, tuple(rels))


# --- moves ------------------------------------------------------------------

def _conjugates(P: Presentation, max_conj: int, skip: int | None = None) -> list[Word]:
    """Distinct conjugates ``g r^s g^-1`` of relators other than ``skip``."""
    out = []
    seen = set()
    for idx, r in enumerate(P.relators):
        if not r or idx == skip:
            continue
        for s in (1, -1):
            rel = r if s > 0 else W.inverse(r)
            for g in W.words_upto(P.n, max_conj):
                c = W.conjugate(g, rel)
                if c not in seen:
                    seen.add(c)
                    out.append(c)
    return out


def _products(P: Presentation, bounds: TietzeBounds, skip: int | None = None) -> Iterator[Word]:
    """Products of at most ``max_derivation_factors`` conjugates."""
    conj = _conjugates(P, bounds.max_conjugator_length, skip)
    for k in range(1, bounds.max_derivation_factors + 1):
        for combo in combinations_with_replacement(conj, k):
            yield W.mul(*combo)


def add_relator_moves(P: Presentation, bounds: TietzeBounds) -> Iterator[Presentation | None]:
    """T1 on a canonical presentation; None marks a rejected candidate."""
    have = set(P.relators)
    for w in _products(P, bounds):
        c = W.cyclic_canonical(w)
        if not c or len(c) > bounds.max_relator_length or c in have:
            yield None
            continue
        have.add(c)
        yield _with_relator(P, c)


def remove_relator_moves(P: Presentation, bounds: TietzeBounds) -> Iterator[Presentation | None]:
    """T2 on a canonical presentation; None marks a rejected candidate."""
    for i, r in enumerate(P.relators):
        for w in _products(P, bounds, skip=i):
            if W.cyclic_canonical(w) == r:
                yield Presentation.trusted(P.generators, P.relators[:i] + P.relators[i + 1:])
                break
            yield None


def add_generator_moves(P: Presentation, bounds: TietzeBounds,
                        generator_cap: int | None = None) -> Iterator[Presentation]:
    """T3 on a canonical presentation; ``y`` is appended as the last generator."""
    cap = generator_cap if generator_cap is not None else P.n + bounds.max_new_generators
    if P.n >= cap or bounds.max_relator_length < 2:
        return
    gens = P.generators + (P.fresh_name("y"),)
    y = W.generator(P.n)
    for length in range(1, bounds.max_relator_length):
        for w in W.words_of_length(P.n, length):
            rel = W.cyclic_canonical(W.mul(y, W.inverse(w)))
            yield _with_relator(P, rel, gens)


def eliminate_generator_moves(P: Presentation) -> Iterator[Presentation]:
    """T4: if ``x`` occurs once in some relator, solve for it and substitute."""
    for i in range(P.n):
        for j, r in enumerate(P.relators):
            core, _ = W.cyclic_reduce(r)
            if W.occurrences(core, i) != 1:
                continue
            pos = next(k for k, c in enumerate(core) if c >> 1 == i)
            rot = core[pos:] + core[:pos]
            rest = rot[1:]
            # rot = x^s * rest == 1, so x = rest^(-s)
            value = W.inverse(rest) if rot[0] & 1 == 0 else rest
            images = [W.generator(k) for k in range(P.n)]
            images[i] = value
            mapping = [k - (k > i) for k in range(P.n)]
            rels = [W.reindex(W.substitute(s, images), mapping)
                    for k, s in enumerate(P.relators) if k != j]
            gens = P.generators[:i] + P.generators[i + 1:]
            yield canonical_form(Presentation.trusted(gens, tuple(rels)))
            break


MOVE_CLASSES = ("T4", "T2", "T1", "T3")


def moves(P: Presentation, kind: str, bounds: TietzeBounds,
          generator_cap: int | None = None) -> Iterator[Presentation | None]:
    """Neighbors of the canonical ``P`` by one move of the given class.

    Rejected candidates appear as None so callers can meter the work.
    """
    table: dict[str, Callable[[], Iterator[Presentation]]] = {
        "T1": lambda: add_relator_moves(P, bounds),
        "T2": lambda: remove_relator_moves(P, bounds),
        "T3": lambda: add_generator_moves(P, bounds, generator_cap),
        "T4": lambda: eliminate_generator_moves(P),
    }
    try:
        return table[kind]()
    except KeyError:
        raise ValueError(f"unknown move class {kind!r}") from None


def neighbor_stream(P: Presentation, bounds: TietzeBounds,
                    generator_cap: int | None = None) -> Iterator[Presentation]:
    """Neighbors of the canonical ``P``, simplifying moves first; may repeat."""
    for kind in MOVE_CLASSES:
        for Q in moves(P, kind, bounds, generator_cap):
            if Q is not None:
                yield Q


def tietze_neighbors(P: Presentation, bounds: TietzeBounds | None = None,
                     generator_cap: int | None = None) -> list[Presentation]:
    bounds = bounds or TietzeBounds()
    P = canonical_form(P)
    out, seen = [], {P}
    for Q in neighbor_stream(P, bounds, generator_cap):
        if Q not in seen:
            seen.add(Q)
            out.append(Q)
    return out
