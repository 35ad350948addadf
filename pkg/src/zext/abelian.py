"""Exact integer linear algebra for abelianizations.

Smith normal form with unimodular witnesses, abelian invariants and Betti
numbers of presented groups, the membership tests for ``*-by-Z^k`` and
``!-by-Z^k``, and the matrices that maps induce on the free part of the
abelianization.  All arithmetic uses Python integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from zext.core import words as W
from zext.core.presentation import GenMap, Presentation
from zext.core.words import Word


class InconsistentMapError(ValueError):
    """The map does not induce a well-defined map on the free abelianization."""


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length does not match shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("column count needed for a matrix without rows")
            cols = len(rows[0])
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        a, b = self.to_rows(), other.to_rows()
        out = [[sum(a[i][k] * b[k][j] for k in range(self.cols)) for j in range(other.cols)]
               for i in range(self.rows)]
        return IntMatrix.from_rows(out, other.cols)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return IntMatrix(self.rows, self.cols,
                         tuple(x - y for x, y in zip(self.entries, other.entries)))

    def transpose(self) -> "IntMatrix":
        r = self.to_rows()
        return IntMatrix.from_rows([[r[i][j] for i in range(self.rows)] for j in range(self.cols)],
                                   self.rows)

    def columns(self, start: int, stop: int | None = None) -> "IntMatrix":
        stop = self.cols if stop is None else stop
        return IntMatrix.from_rows([r[start:stop] for r in self.to_rows()], stop - start)

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return bareiss_det(self.to_rows())

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.to_rows()]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[str]], cols: int | None = None) -> "IntMatrix":
        return cls.from_rows([[int(x) for x in r] for r in data], cols)


def bareiss_det(rows: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class SnfWitness:
    """``U @ M @ V == S`` with ``U``, ``V`` unimodular; ``V_inv`` is ``V``'s inverse."""

    S: IntMatrix
    U: IntMatrix
    V: IntMatrix
    V_inv: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return [self.S[i, i] for i in range(min(self.S.rows, self.S.cols))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(M: IntMatrix) -> SnfWitness:
    m, n = M.rows, M.cols
    A = M.to_rows()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, q):  # row dst += q * row src
        A[dst] = [x + q * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col dst += q * col src
        for r in A:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]
        Vi[src] = [x - q * y for x, y in zip(Vi[src], Vi[dst])]

    for t in range(min(m, n)):
        nonzero = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nonzero:
            break
        _, i, j = min(nonzero)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = A[t][t]
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
            rest = [(abs(A[i][t]), i, None) for i in range(t + 1, m) if A[i][t]]
            rest += [(abs(A[t][j]), None, j) for j in range(t + 1, n) if A[t][j]]
            if rest:
                _, i, j = min(rest, key=lambda x: (x[0], x[1] is None, x[1] or 0, x[2] or 0))
                if i is not None:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return SnfWitness(IntMatrix.from_rows(A, n), IntMatrix.from_rows(U, m),
                      IntMatrix.from_rows(V, n), IntMatrix.from_rows(Vi, n))


def relation_matrix(P: Presentation) -> IntMatrix:
    return IntMatrix.from_rows([W.exponent_vector(r, P.n) for r in P.relators], P.n)


@dataclass(frozen=True)
class AbelianInvariants:
    """``G^ab = Z^betti + sum Z/torsion[i]`` with the witnesses realizing it.

    ``projection`` is the ``n x betti`` matrix sending a generator exponent row
    vector to its coordinates in the free part ``G^abf``.
    """

    betti: int
    torsion: tuple[int, ...]
    snf: SnfWitness
    projection: IntMatrix

    @property
    def rank(self) -> int:
        return self.snf.rank

    def coordinates(self, vec: Sequence[int]) -> list[int]:
        V = self.snf.V
        return [sum(vec[k] * V[k, j] for k in range(V.rows)) for j in range(V.cols)]

    def free_image(self, vec: Sequence[int]) -> list[int]:
        return self.coordinates(vec)[self.rank:]

    def is_trivial_image(self, vec: Sequence[int]) -> bool:
        coords = self.coordinates(vec)
        diag = self.snf.diagonal
        for i, c in enumerate(coords):
            d = diag[i] if i < self.rank else 0
            if (d == 0 and c != 0) or (d > 1 and c % d):
                return False
        return True

    def word_image_trivial(self, w: Word) -> bool:
        return self.is_trivial_image(W.exponent_vector(w, self.projection.rows))

    @property
    def is_trivial_group(self) -> bool:
        return self.betti == 0 and not self.torsion

    def free_basis_preimages(self) -> list[list[int]]:
        """Exponent vectors mapping to the free-part unit vectors."""
        Vi = self.snf.V_inv.to_rows()
        return [Vi[k] for k in range(self.rank, len(Vi))]

    def to_json(self) -> dict:
        return {"betti": self.betti, "torsion": list(self.torsion),
                "projection": self.projection.to_json()}


@lru_cache(maxsize=4096)
def abelian_invariants(P: Presentation) -> AbelianInvariants:
    snf = smith_normal_form(relation_matrix(P))
    rank = snf.rank
    return AbelianInvariants(
        betti=P.n - rank,
        torsion=tuple(d for d in snf.diagonal if d > 1),
        snf=snf,
        projection=snf.V.columns(rank),
    )


def betti(P: Presentation) -> int:
    return abelian_invariants(P).betti


def is_star_by_zk(P: Presentation, k: int) -> bool:
    """Whether the group maps onto ``Z^k``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return betti(P) >= k


def is_bang_by_zk(P: Presentation, k: int) -> bool:
    """Whether the group has exactly one normal subgroup with quotient ``Z^k``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return betti(P) == k


def exponent_matrix(m: GenMap) -> list[list[int]]:
    """Row ``j`` is the exponent vector of the image of generator ``j``."""
    return [W.exponent_vector(w, m.codomain.n) for w in m.images]


def induced_abf_matrix(P: Presentation, m: GenMap) -> IntMatrix:
    """Matrix of the map induced on ``G^abf``; column ``k`` is the image of basis vector ``k``."""
    if m.domain.generators != P.generators or m.codomain.generators != P.generators:
        raise ValueError("map is not an endomap of the presentation")
    inv = abelian_invariants(P)
    E = exponent_matrix(m)
    n = P.n

    def push(vec):
        return [sum(vec[i] * E[i][j] for i in range(n)) for j in range(n)]

    for r in P.relators:
        if any(inv.free_image(push(W.exponent_vector(r, n)))):
            raise InconsistentMapError(
                f"relator {P.format_word(r)} has an image of infinite order in the abelianization")
    cols = [inv.free_image(push(x)) for x in inv.free_basis_preimages()]
    r = inv.betti
    return IntMatrix.from_rows([[cols[k][i] for k in range(r)] for i in range(r)], r)


def direct_sum(P1: Presentation, P2: Presentation) -> Presentation:
    """``P1 x P2``: disjoint generators and relators plus all cross commutators."""
    names2 = []
    for g in P2.generators:
        name = g
        while name in P1.generators or name in names2:
            name += "_"
        names2.append(name)
    off = P1.n
    shifted = [W.reindex(r, [off + i for i in range(P2.n)]) for r in P2.relators]
    cross = [W.commutator(W.generator(i), W.generator(off + j))
             for i in range(P1.n) for j in range(P2.n)]
    return Presentation(P1.generators + tuple(names2), P1.relators + tuple(shifted) + tuple(cross))
