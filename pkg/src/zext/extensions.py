"""Infinite cyclic extensions: standard presentations and their invariants.

Also the ``K * Z`` gadget, the product-swap presentations and the triviality
reduction built from that gadget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from zext import abelian
from zext.abelian import AbelianInvariants, IntMatrix
from zext.core import words as W
from zext.core.presentation import GenMap, Presentation
from zext.core.verdict import Verdict


@dataclass(frozen=True)
class ExtensionDescriptor:
    """``base`` extended by the stable letter acting as ``auto``.

    ``witness`` is set only when recognition has verified that ``auto`` is an
    automorphism; it holds the inverse images and derivations.
    """

    base: Presentation
    auto: GenMap
    stable_letter: str
    standard: Presentation
    witness: Any = field(default=None, compare=False, hash=False)

    @property
    def validated(self) -> bool:
        return self.witness is not None

    def to_json(self) -> dict:
        out = {
            "base": self.base.to_json(),
            "alpha": self.auto.to_json(),
            "stable_letter": self.stable_letter,
            "standard": self.standard.to_json(),
            "validated": self.validated,
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ExtensionDescriptor":
        base = Presentation.from_json(data["base"])
        auto = GenMap.from_json(data["alpha"], base)
        return semidirect_presentation(base, auto, data["stable_letter"])


def _check_endo(H: Presentation, alpha: GenMap) -> None:
    if alpha.domain.generators != H.generators or alpha.codomain.generators != H.generators:
        raise ValueError("alpha must be an endomap of the base presentation")


def conjugation_relator(t: int, x: int, image: W.Word) -> W.Word:
    """``t x t^-1 image^-1`` for generator indices ``t`` and ``x``."""
    return W.mul(W.generator(t), W.generator(x), W.inverse(W.generator(t)), W.inverse(image))


def semidirect_presentation(H: Presentation, alpha: GenMap, t_name: str = "t") -> ExtensionDescriptor:
    _check_endo(H, alpha)
    if t_name in H.generators:
        raise ValueError(f"stable letter {t_name!r} collides with a base generator")
    t = H.n
    rels = H.relators + tuple(conjugation_relator(t, i, alpha.images[i]) for i in range(H.n))
    standard = Presentation(H.generators + (t_name,), rels)
    return ExtensionDescriptor(H, alpha, t_name, standard)


def abf_matrix(H: Presentation, alpha: GenMap) -> IntMatrix:
    _check_endo(H, alpha)
    return abelian.induced_abf_matrix(H, alpha)


def is_deranged(H: Presentation, alpha: GenMap) -> bool:
    M = abf_matrix(H, alpha)
    if M.rows == 0:
        return True
    return (M - IntMatrix.identity(M.rows)).det() != 0


def ext_abelianization(H: Presentation, alpha: GenMap) -> AbelianInvariants:
    """Invariants of ``H^ab / im(alpha^ab - id)`` plus one free factor."""
    _check_endo(H, alpha)
    n = H.n
    E = abelian.exponent_matrix(alpha)
    rows = [W.exponent_vector(r, n) for r in H.relators]
    rows += [[E[i][j] - (i == j) for j in range(n)] for i in range(n)]
    # the extra column is the stable letter, which no relation involves
    M = IntMatrix.from_rows([r + [0] for r in rows], n + 1)
    snf = abelian.smith_normal_form(M)
    rank = snf.rank
    return AbelianInvariants(
        betti=n + 1 - rank,
        torsion=tuple(d for d in snf.diagonal if d > 1),
        snf=snf,
        projection=snf.V.columns(rank),
    )


def free_product_with_Z(K: Presentation, t_name: str = "t") -> Presentation:
    """``<X, t | R>``: both ``K * Z`` and the shift extension of infinitely many copies of ``K``."""
    if t_name in K.generators:
        raise ValueError(f"generator name {t_name!r} already used")
    return Presentation(K.generators + (t_name,), K.relators)


@dataclass(frozen=True)
class SwapProduct:
    left: Presentation   # (H x|_phi Z) x Z
    right: Presentation  # (H x Z) x|_Phi Z
    forward: GenMap
    backward: GenMap


def swap_product(H: Presentation, phi: GenMap, t_name: str = "t", s_name: str = "s") -> SwapProduct:
    _check_endo(H, phi)
    for name in (t_name, s_name):
        if name in H.generators:
            raise ValueError(f"generator name {name!r} already used")
    if t_name == s_name:
        raise ValueError("stable letters must differ")
    n = H.n
    # left: X, t, s
    t, s = n, n + 1
    left_rels = list(H.relators)
    left_rels += [conjugation_relator(t, i, phi.images[i]) for i in range(n)]
    left_rels += [W.commutator(W.generator(i), W.generator(s)) for i in range(n)]
    left_rels.append(W.commutator(W.generator(t), W.generator(s)))
    left = Presentation(H.generators + (t_name, s_name), tuple(left_rels))
    # right: X, s, t with base H x <s> and Phi = phi on X, identity on s
    s2, t2 = n, n + 1
    right_rels = list(H.relators)
    right_rels += [W.commutator(W.generator(i), W.generator(s2)) for i in range(n)]
    right_rels += [conjugation_relator(t2, i, phi.images[i]) for i in range(n)]
    right_rels.append(conjugation_relator(t2, s2, W.generator(s2)))
    right = Presentation(H.generators + (s_name, t_name), tuple(right_rels))
    fwd = [W.generator(i) for i in range(n)] + [W.generator(t2), W.generator(s2)]
    bwd = [W.generator(i) for i in range(n)] + [W.generator(s), W.generator(t)]
    return SwapProduct(left, right, GenMap(left, right, tuple(fwd)), GenMap(right, left, tuple(bwd)))


GADGET_CLAIM = ("the gadget is finitely-generated-by-Z if and only if K is trivial; "
                "since K is perfect it is unique-Z-extension either way")


def triviality_reduction(K: Presentation, t_name: str = "t") -> Verdict:
    """Reject non-perfect ``K``; otherwise emit the gadget ``K * Z`` and its claim."""
    gadget = free_product_with_Z(K, t_name)
    inv = abelian.abelian_invariants(K)
    if not inv.is_trivial_group:
        return Verdict.no({"betti": inv.betti, "torsion": list(inv.torsion)})
    return Verdict.yes({"gadget": gadget, "betti": abelian.betti(gadget), "claim": GADGET_CLAIM})
