"""Free-group words.

A word is a tuple of letter codes.  Generator ``i`` is encoded as ``2*i`` and
its inverse as ``2*i + 1``, so the inverse of a letter is ``c ^ 1`` and plain
tuple comparison of equal-length words is lexicographic in the letter order
``x0 < x0^-1 < x1 < x1^-1 < ...``.  Shortlex order is ``(len(w), w)``.

Every function returning a ``Word`` returns it freely reduced.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Iterator, Sequence

Word = tuple  # tuple[int, ...], freely reduced

EMPTY: Word = ()


def letter(index: int, sign: int = 1) -> int:
    if index < 0:
        raise ValueError(f"negative generator index {index}")
    if sign not in (1, -1):
        raise ValueError(f"exponent sign must be +1 or -1, got {sign}")
    return 2 * index + (sign < 0)


def generator(index: int) -> Word:
    return (2 * index,)


def split_letter(code: int) -> tuple[int, int]:
    """Return ``(generator index, sign)`` for a letter code."""
    return code >> 1, -1 if code & 1 else 1


def free_reduce(letters: Iterable[int], n_gens: int | None = None) -> Word:
    out: list[int] = []
    limit = None if n_gens is None else 2 * n_gens
    for c in letters:
        if c < 0 or (limit is not None and c >= limit):
            raise ValueError(f"letter code {c} outside alphabet of {n_gens} generators")
        if out and out[-1] == c ^ 1:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


def from_pairs(pairs: Iterable[tuple[int, int]], n_gens: int | None = None) -> Word:
    """Build a word from ``(generator index, exponent)`` syllables.

    Exponents may be any nonzero integer; they are expanded to signed letters.
    """
    raw: list[int] = []
    for index, exp in pairs:
        if exp == 0:
            raise ValueError("zero exponent in syllable")
        if n_gens is not None and not 0 <= index < n_gens:
            raise ValueError(f"generator index {index} outside alphabet of {n_gens}")
        raw.extend([letter(index, 1 if exp > 0 else -1)] * abs(exp))
    return free_reduce(raw, n_gens)


def to_pairs(w: Word) -> list[list[int]]:
    """Syllable form ``[[index, exponent], ...]`` with maximal runs collapsed."""
    out: list[list[int]] = []
    for c in w:
        i, s = split_letter(c)
        if out and out[-1][0] == i and (out[-1][1] > 0) == (s > 0):
            out[-1][1] += s
        else:
            out.append([i, s])
    return out


def inverse(w: Word) -> Word:
    return tuple(c ^ 1 for c in reversed(w))


def mul(*words: Sequence[int]) -> Word:
    out: list[int] = []
    for w in words:
        for c in w:
            if out and out[-1] == c ^ 1:
                out.pop()
            else:
                out.append(c)
    return tuple(out)


def power(w: Word, k: int) -> Word:
    if k < 0:
        w, k = inverse(w), -k
    return mul(*([w] * k))


def conjugate(g: Word, w: Word) -> Word:
    """``g w g^-1``."""
    return mul(g, w, inverse(g))


def commutator(u: Word, v: Word) -> Word:
    """``u v u^-1 v^-1``."""
    return mul(u, v, inverse(u), inverse(v))


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split ``w`` as ``u c u^-1`` with ``c`` cyclically reduced.

    Returns ``(c, u)``.
    """
    i, j = 0, len(w) - 1
    while i < j and w[i] == w[j] ^ 1:
        i += 1
        j -= 1
    return w[i:j + 1], w[:i]


def rotations(w: Word) -> Iterator[Word]:
    for k in range(len(w)):
        yield w[k:] + w[:k]


def cyclic_canonical(w: Word) -> Word:
    """Least rotation of the cyclic core of ``w`` or of its inverse."""
    core, _ = cyclic_reduce(w)
    n = len(core)
    if n == 0:
        return EMPTY
    dbl = core + core
    best = min(dbl[k:k + n] for k in range(n))
    inv = inverse(core)
    dbl = inv + inv
    return min(best, min(dbl[k:k + n] for k in range(n)))


def shortlex_key(w: Word) -> tuple[int, Word]:
    return len(w), w


def substitute(w: Word, images: Sequence[Word]) -> Word:
    """Replace every letter of ``w`` by its image (inverted for inverse letters)."""
    out: list[int] = []
    for c in w:
        img = images[c >> 1]
        if c & 1:
            img = inverse(img)
        for d in img:
            if out and out[-1] == d ^ 1:
                out.pop()
            else:
                out.append(d)
    return tuple(out)


def exponent_vector(w: Word, n_gens: int) -> list[int]:
    vec = [0] * n_gens
    for c in w:
        vec[c >> 1] += -1 if c & 1 else 1
    return vec


def occurrences(w: Word, index: int) -> int:
    return sum(1 for c in w if c >> 1 == index)


def reindex(w: Word, mapping: Sequence[int]) -> Word:
    """Rename generators: generator ``i`` becomes generator ``mapping[i]``."""
    return tuple(2 * mapping[c >> 1] + (c & 1) for c in w)


def words_of_length(n_gens: int, length: int) -> Iterator[Word]:
    """All reduced words of the given length, in lexicographic order."""
    if length == 0:
        yield EMPTY
        return
    letters = range(2 * n_gens)

    def extend(prefix: tuple, remaining: int) -> Iterator[Word]:
        if remaining == 0:
            yield prefix
            return
        last = prefix[-1] if prefix else None
        for c in letters:
            if last is not None and c == last ^ 1:
                continue
            yield from extend(prefix + (c,), remaining - 1)

    yield from extend((), length)


def words_upto(n_gens: int, max_length: int) -> Iterator[Word]:
    """Reduced words in shortlex order up to ``max_length``."""
    for length in range(max_length + 1):
        yield from words_of_length(n_gens, length)


def tuples_by_total_length(n_gens: int, arity: int, start: int = 0) -> Iterator[tuple[Word, ...]]:
    """Endless stream of ``arity``-tuples of reduced words.

    Ordered by total length, then by the length profile, then shortlex
    componentwise.
    """
    return mixed_tuples([n_gens] * arity, start)


def mixed_tuples(alphabets: Sequence[int], start: int = 0) -> Iterator[tuple[Word, ...]]:
    """Like :func:`tuples_by_total_length`, slot ``i`` ranging over words in ``alphabets[i]`` generators.

    Finite only when every alphabet is empty.
    """
    arity = len(alphabets)
    total = start
    while True:
        for profile in _compositions(total, arity):
            if any(k and not n for k, n in zip(profile, alphabets)):
                continue
            pools = [list(words_of_length(n, k)) for n, k in zip(alphabets, profile)]
            yield from product(*pools)
        if not any(alphabets):
            return
        total += 1


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest
