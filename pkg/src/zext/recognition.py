"""Recognizing standard presentations and enumerating them by Tietze search.

A presentation matches the standard scheme when some generator ``t`` splits
the relators into ``t``-free ones (the base relators) and exactly one relator
``t x t^-1 = w_x`` per remaining generator ``x``.  The match is then checked
in two semi-decidable stages: ``x -> w_x`` respects the base relators, and
some tuple of words is a two-sided inverse.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterator, Sequence

from zext.core import words as W
from zext.core.closure import Factor, all_hold
from zext.core.presentation import GenMap, Presentation
from zext.core.tietze import MOVE_CLASSES, TietzeBounds, canonical_form, moves
from zext.core.verdict import Search, Task, Verdict, drive
from zext.core.words import Word
from zext.extensions import ExtensionDescriptor, semidirect_presentation


@dataclass(frozen=True)
class SchemeMatch:
    source: Presentation
    stable: int                 # index of t in ``source``
    base: Presentation          # generators of ``source`` other than t, in order
    images: tuple[Word, ...]    # w_x over the base alphabet

    @property
    def stable_letter(self) -> str:
        return self.source.generators[self.stable]

    @property
    def auto(self) -> GenMap:
        return GenMap(self.base, self.base, self.images)

    def descriptor(self, witness=None) -> ExtensionDescriptor:
        d = semidirect_presentation(self.base, self.auto, self.stable_letter)
        return ExtensionDescriptor(d.base, d.auto, d.stable_letter, d.standard, witness)


def _conjugation_image(core: Word, t: int) -> tuple[int, Word] | None:
    """If ``core`` is cyclically ``t x^e t^-1 n`` with ``n`` free of t, return ``(x, w_x)``."""
    tp, tm = 2 * t, 2 * t + 1
    if core.count(tp) != 1 or core.count(tm) != 1:
        return None
    k = core.index(tp)
    rot = core[k:] + core[:k]
    j = rot.index(tm)
    if j != 2:
        return None
    m, n = rot[1], rot[3:]
    x = m >> 1
    if x == t:
        return None
    # t x t^-1 n = 1 gives t x t^-1 = n^-1; t x^-1 t^-1 n = 1 gives t x t^-1 = n
    return x, (W.inverse(n) if m & 1 == 0 else n)


def match_standard_scheme(P: Presentation) -> list[SchemeMatch]:
    out = []
    for t in range(P.n):
        base_rels: list[Word] = []
        images: dict[int, Word] = {}
        ok = True
        for r in P.relators:
            if not r:
                continue
            core, _ = W.cyclic_reduce(r)
            if W.occurrences(core, t) == 0:
                base_rels.append(r)
                continue
            found = _conjugation_image(core, t)
            if found is None or found[0] in images:
                ok = False
                break
            images[found[0]] = found[1]
        if not ok or len(images) != P.n - 1:
            continue
        mapping = [k - (k > t) if k != t else -1 for k in range(P.n)]
        base = Presentation(P.generators[:t] + P.generators[t + 1:],
                            tuple(W.reindex(r, mapping) for r in base_rels))
        imgs = tuple(W.reindex(images[x], mapping) for x in range(P.n) if x != t)
        out.append(SchemeMatch(P, t, base, imgs))
    return out


@dataclass(frozen=True)
class AutomorphismWitness:
    """Everything needed to re-check that the images define an automorphism."""

    inverse: tuple[Word, ...]
    endo_derivations: tuple[tuple[Factor, ...], ...]     # one per base relator
    inverse_endo_derivations: tuple[tuple[Factor, ...], ...]
    left_derivations: tuple[tuple[Factor, ...], ...]     # alpha(v_i) x_i^-1
    right_derivations: tuple[tuple[Factor, ...], ...]    # v(w_i) x_i^-1

    def inverse_map(self, base: Presentation) -> GenMap:
        return GenMap(base, base, self.inverse)

    def to_json(self) -> dict:
        def ders(ds):
            return [[f.to_json() for f in d] for d in ds]
        return {
            "inverse": [list(v) for v in self.inverse],
            "endo_derivations": ders(self.endo_derivations),
            "inverse_endo_derivations": ders(self.inverse_endo_derivations),
            "left_derivations": ders(self.left_derivations),
            "right_derivations": ders(self.right_derivations),
        }


def all_in_closure(P: Presentation, words: Sequence[Word]) -> Search:
    """Dovetail membership of every word; No as soon as one is refuted."""
    return (yield from all_hold([(P, w) for w in words]))


def endomorphism_checks(base: Presentation, images: Sequence[Word]) -> list[Word]:
    return [W.substitute(r, images) for r in base.relators]


def inverse_checks(images: Sequence[Word], inverse: Sequence[Word]) -> tuple[list[Word], list[Word]]:
    left = [W.mul(W.substitute(v, images), W.inverse(W.generator(i))) for i, v in enumerate(inverse)]
    right = [W.mul(W.substitute(w, inverse), W.inverse(W.generator(i))) for i, w in enumerate(images)]
    return left, right


def endomorphism_search(base: Presentation, images: Sequence[Word]) -> Search:
    return (yield from all_in_closure(base, endomorphism_checks(base, images)))


def _candidate_search(base: Presentation, images: Sequence[Word], v: tuple[Word, ...]) -> Search:
    left, right = inverse_checks(images, v)
    checks = endomorphism_checks(base, v) + left + right
    verdict = yield from all_in_closure(base, checks)
    if not verdict.is_yes:
        return verdict
    ders = verdict.payload
    k, n = len(base.relators), len(v)
    return Verdict.yes((ders[:k], ders[k:k + n], ders[k + n:]))


def inverse_search(base: Presentation, images: Sequence[Word]) -> Search:
    """Dovetail candidate inverse tuples; each admission costs one unit. Never says No."""
    stream = W.tuples_by_total_length(base.n, base.n)
    active: list[Task] = []
    exhausted = False
    while True:
        if not exhausted:
            yield
            v = next(stream, None)
            if v is None:
                exhausted = True
            else:
                task = Task(_candidate_search(base, images, v), v)
                if task.done and task.result.is_yes:
                    return Verdict.yes((v, task.result.payload))
                if not task.done:
                    active.append(task)
        still = []
        for task in active:
            yield
            task.grant()
            if task.done:
                if task.result.is_yes:
                    return Verdict.yes((task.label, task.result.payload))
            else:
                still.append(task)
        active = still
        if exhausted and not active:
            return Verdict.unknown()


class RecognitionTask:
    """Staged check of one scheme match: ``scheme`` -> ``endo`` -> ``auto``."""

    def __init__(self, match: SchemeMatch):
        self.match = match
        self.stage = "scheme"

    def search(self) -> Search:
        m = self.match
        self.stage = "endo"
        endo = yield from endomorphism_search(m.base, m.images)
        if not endo.is_yes:
            return endo
        self.stage = "auto"
        auto = yield from inverse_search(m.base, m.images)
        if not auto.is_yes:
            return auto
        v, (inv_endo, left, right) = auto.payload
        witness = AutomorphismWitness(v, tuple(endo.payload), tuple(inv_endo),
                                      tuple(left), tuple(right))
        return Verdict.yes(m.descriptor(witness))


def verify_endomorphism(match: SchemeMatch, fuel: int) -> Verdict:
    return drive(endomorphism_search(match.base, match.images), fuel)


def verify_automorphism(match: SchemeMatch, fuel: int) -> Verdict:
    """Yes carries ``(inverse images, derivations)``; otherwise Unknown."""
    return drive(inverse_search(match.base, match.images), fuel)


def recognition_search(P: Presentation) -> Search:
    matches = match_standard_scheme(P)
    if not matches:
        return Verdict.no({"reason": "no generator splits the relators into the standard scheme"})
    tasks = [Task(RecognitionTask(m).search(), m) for m in matches]
    while True:
        for t in tasks:
            if t.done and t.result.is_yes:
                return t.result
        pending = [t for t in tasks if not t.done]
        if not pending:
            if all(t.result.is_no for t in tasks):
                return Verdict.no({"reason": "every scheme match was refuted",
                                   "refutations": [t.result.payload for t in tasks]})
            return Verdict.unknown()
        for t in pending:
            yield
            t.grant()
            if t.done and t.result.is_yes:
                return t.result


def recognize_standard(P: Presentation, fuel: int) -> Verdict:
    return drive(recognition_search(P), fuel)


def descriptor_key(d: ExtensionDescriptor) -> tuple:
    return d.stable_letter, canonical_form(d.standard)


MOVE_COSTS = {"T4": 1, "T2": 1, "T1": 2, "T3": 2}


def enumerate_standard(P0: Presentation, fuel: int, limit: int | None = None,
                       bounds: TietzeBounds | None = None) -> Iterator[ExtensionDescriptor]:
    """Tietze search from ``P0`` with a recognition task per matching presentation.

    Presentations are explored in order of accumulated move cost (eliminating
    moves are cheaper than adjoining ones), ties broken by discovery order.
    The exploration is dovetailed with the recognition tasks: each turn it
    examines as many candidate neighbors as there are live tasks (at least
    one), then every live task gets one unit.
    """
    if fuel < 0:
        raise ValueError("fuel must be nonnegative")
    if limit is not None and limit < 1:
        raise ValueError("limit must be positive")
    bounds = bounds or TietzeBounds()
    cap = P0.n + bounds.max_new_generators
    start = canonical_form(P0)
    visited = {start}
    queue: list[tuple[int, int, Presentation, str]] = []
    counter = 0
    tasks: list[Task] = []
    emitted: set = set()
    spent = 0

    def discover(Q: Presentation, cost: int) -> None:
        nonlocal counter
        for kind in MOVE_CLASSES:
            heapq.heappush(queue, (cost + MOVE_COSTS[kind], counter, Q, kind))
            counter += 1
        for m in match_standard_scheme(Q):
            tasks.append(Task(RecognitionTask(m).search(), m))

    def harvest() -> Iterator[ExtensionDescriptor]:
        nonlocal tasks
        live = []
        for task in tasks:
            if not task.done:
                live.append(task)
            elif task.result.is_yes:
                d = task.result.payload
                key = descriptor_key(d)
                if key not in emitted:
                    emitted.add(key)
                    yield d
        tasks = live

    def explore() -> Iterator[tuple[int, Presentation | None]]:
        while queue:
            cost, _, node, kind = heapq.heappop(queue)
            for Q in moves(node, kind, bounds, cap):
                yield cost, Q

    discover(start, 0)
    exploration = explore()
    exploring = True
    while True:
        for d in harvest():
            yield d
            if limit is not None and len(emitted) >= limit:
                return
        if spent >= fuel or (not exploring and not tasks):
            return
        # the exploration gets as many units per turn as all tasks together
        for _ in range(max(1, len(tasks))):
            if not exploring or spent >= fuel:
                break
            step = next(exploration, None)
            if step is None:
                exploring = False
                break
            spent += 1
            cost, Q = step
            if Q is not None and Q not in visited:
                visited.add(Q)
                discover(Q, cost)
        for task in list(tasks):
            if spent >= fuel:
                break
            spent += 1
            task.grant()
