"""Isomorphisms between infinite cyclic extensions.

Stable homomorphisms ``x -> phi(x), t -> h0 t^eps`` between standard
presentations, semi-conjugacy of automorphisms (invariants, bounded search,
and the isomorphism a witness produces), the reduction for deranged
extensions, the braid table, and expressing an automorphism as a formal word
in given ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import sympy

from zext import abelian
from zext.abelian import InconsistentMapError, IntMatrix
from zext.core import words as W
from zext.core.closure import Factor, all_hold
from zext.core.presentation import GenMap, Presentation, parse_presentation
from zext.core.verdict import Search, Task, Transcript, Verdict, drive
from zext.core.words import Word
from zext.extensions import ExtensionDescriptor, is_deranged, semidirect_presentation
from zext.recognition import inverse_search


# --- helpers ----------------------------------------------------------------

def map_power(m: GenMap, k: int) -> GenMap:
    """``m`` composed with itself ``k >= 0`` times."""
    if k < 0:
        raise ValueError("negative powers need an inverse")
    out = GenMap.identity(m.domain)
    for _ in range(k):
        out = m.compose(out)
    return out


def inner(P: Presentation, g: Word) -> GenMap:
    """Conjugation ``x -> g x g^-1``."""
    return GenMap(P, P, tuple(W.conjugate(g, W.generator(i)) for i in range(P.n)))


def _derivations_json(ders) -> list:
    return [[f.to_json() for f in d] for d in ders]


# --- stable homomorphisms ---------------------------------------------------

@dataclass(frozen=True)
class StableHom:
    """``x -> phi(x)`` on the base and ``t -> h0 t^epsilon``."""

    epsilon: int
    phi: GenMap
    h0: Word = ()

    def as_genmap(self, A: ExtensionDescriptor, B: ExtensionDescriptor) -> GenMap:
        """The map between the standard presentations (t is the last generator on both sides)."""
        t = B.base.n
        images = list(self.phi.images) + [W.mul(self.h0, W.power(W.generator(t), self.epsilon))]
        return GenMap(A.standard, B.standard, tuple(images))

    def to_json(self) -> dict:
        return {"epsilon": self.epsilon, "phi": self.phi.to_json(),
                "h0": self.phi.codomain.format_word(self.h0)}


def stable_hom_checks(A: ExtensionDescriptor, B: ExtensionDescriptor,
                      S: StableHom) -> list[tuple[Presentation, Word]]:
    """Words that must lie in the normal closure of B's base relators."""
    if S.phi.domain.generators != A.base.generators or S.phi.codomain.generators != B.base.generators:
        raise ValueError("phi must map the base of A to the base of B")
    if S.h0 and max(S.h0) >= 2 * B.base.n:
        raise ValueError("h0 is not a word over the base of B")
    K = B.base
    phi, alpha, beta = S.phi, A.auto, B.auto
    queries = [(K, phi(r)) for r in A.base.relators]
    if S.epsilon >= 0:
        beta_e = map_power(beta, S.epsilon)
        for i in range(A.base.n):
            x = W.generator(i)
            lhs = W.conjugate(S.h0, beta_e(phi(x)))
            queries.append((K, W.mul(lhs, W.inverse(phi(alpha(x))))))
    else:
        # h0 b^-k(phi(x)) h0^-1 = phi(alpha(x)), moved through b^k
        beta_k = map_power(beta, -S.epsilon)
        h = beta_k(S.h0)
        for i in range(A.base.n):
            x = W.generator(i)
            rhs = W.mul(W.inverse(h), beta_k(phi(alpha(x))), h)
            queries.append((K, W.mul(phi(x), W.inverse(rhs))))
    return queries


def stable_hom_search(A: ExtensionDescriptor, B: ExtensionDescriptor, S: StableHom) -> Search:
    return (yield from all_hold(stable_hom_checks(A, B, S)))


def verify_stable_hom(A: ExtensionDescriptor, B: ExtensionDescriptor, S: StableHom, fuel: int) -> Verdict:
    return drive(stable_hom_search(A, B, S), fuel)


# --- semi-conjugacy ---------------------------------------------------------

def _charpoly(M: IntMatrix) -> list[str]:
    if M.rows == 0:
        return ["1"]
    x = sympy.Symbol("x")
    poly = sympy.Matrix(M.to_rows()).charpoly(x)
    return [str(c) for c in poly.all_coeffs()]


def _inverse_charpoly(M: IntMatrix) -> list[str]:
    if M.rows == 0:
        return ["1"]
    x = sympy.Symbol("x")
    inv = sympy.Matrix(M.to_rows()).inv()
    return [str(c) for c in inv.charpoly(x).all_coeffs()]


def matrix_invariants(H: Presentation, m: GenMap) -> dict:
    M = abelian.induced_abf_matrix(H, m)
    det = M.det()
    if M.rows and det == 0:
        raise ValueError("induced matrix is singular; the map is not an automorphism")
    return {"matrix": M.to_json(), "det": det, "charpoly": _charpoly(M),
            "inverse_charpoly": _inverse_charpoly(M) if M.rows else ["1"]}


def semiconj_invariant_check(H: Presentation, alpha: GenMap, beta: GenMap) -> Verdict:
    """No when the free-part matrices rule out semi-conjugacy, else Unknown."""
    a = matrix_invariants(H, alpha)
    b = matrix_invariants(H, beta)
    payload = {"alpha": a, "beta": b}
    # det(M^-1) = det(M) since both are +-1 for automorphisms
    if a["det"] != b["det"]:
        return Verdict.no({**payload, "reason": "determinant"})
    if a["charpoly"] not in (b["charpoly"], b["inverse_charpoly"]):
        return Verdict.no({**payload, "reason": "characteristic polynomial"})
    return Verdict.unknown(payload=payload)


@dataclass(frozen=True)
class SemiConjWitness:
    """``beta = gamma_g xi alpha^sign xi^-1`` checked generator-wise."""

    sign: int
    xi: GenMap
    g: Word
    xi_inverse: tuple[Word, ...] | None = None
    transcript: Transcript = field(default_factory=Transcript, compare=False, hash=False)
    derivations: tuple = field(default=(), compare=False, hash=False)

    def to_json(self) -> dict:
        P = self.xi.domain
        out = {"sign": self.sign, "xi": self.xi.to_json(), "g": P.format_word(self.g),
               "transcript": self.transcript.to_json(),
               "derivations": _derivations_json(self.derivations)}
        if self.xi_inverse is not None:
            out["xi_inverse"] = GenMap(P, P, self.xi_inverse).to_json()
        return out


def semiconj_relation_checks(H: Presentation, alpha: GenMap, beta: GenMap,
                             xi: GenMap, g: Word, sign: int) -> list[Word]:
    """For sign +1: beta(xi(x)) = g xi(alpha(x)) g^-1; for -1: beta(xi(alpha(x))) = g xi(x) g^-1."""
    out = []
    for i in range(H.n):
        x = W.generator(i)
        if sign > 0:
            lhs, rhs = beta(xi(x)), W.conjugate(g, xi(alpha(x)))
        else:
            lhs, rhs = beta(xi(alpha(x))), W.conjugate(g, xi(x))
        out.append(W.mul(lhs, W.inverse(rhs)))
    return out


def _semiconj_candidate(H: Presentation, alpha: GenMap, beta: GenMap,
                        xi: GenMap, g: Word, sign: int) -> Search:
    hom = [W.substitute(r, xi.images) for r in H.relators]
    rel = semiconj_relation_checks(H, alpha, beta, xi, g, sign)
    first = yield from all_hold([(H, w) for w in hom + rel])
    if not first.is_yes:
        return first
    inv = yield from inverse_search(H, xi.images)
    if not inv.is_yes:
        return inv
    v, (inv_endo, left, right) = inv.payload
    return Verdict.yes((v, tuple(first.payload) + tuple(inv_endo) + tuple(left) + tuple(right)))


def semiconjugacy_search_gen(H: Presentation, alpha: GenMap, beta: GenMap,
                             trust_automorphisms: bool = True) -> Search:
    transcript = Transcript()
    if trust_automorphisms:
        transcript.trusted.append("alpha and beta are automorphisms")
    obstruction = semiconj_invariant_check(H, alpha, beta)
    if obstruction.is_no:
        return obstruction
    r = abelian.betti(H)
    stream = W.tuples_by_total_length(H.n, H.n + 1)
    active: list[Task] = []
    exhausted = False
    while True:
        if not exhausted:
            yield
            cand = next(stream, None)
            if cand is None:
                exhausted = True
            else:
                xi = GenMap(H, H, cand[:-1])
                g = cand[-1]
                ok = True
                if r:
                    try:
                        ok = abs(abelian.induced_abf_matrix(H, xi).det()) == 1
                    except InconsistentMapError:
                        ok = False
                if ok:
                    for sign in (1, -1):
                        task = Task(_semiconj_candidate(H, alpha, beta, xi, g, sign), (xi, g, sign))
                        if task.done:
                            if task.result.is_yes:
                                return _semiconj_yes(task, transcript)
                        else:
                            active.append(task)
        still = []
        for task in active:
            yield
            task.grant()
            if task.done:
                if task.result.is_yes:
                    return _semiconj_yes(task, transcript)
            else:
                still.append(task)
        active = still
        if exhausted and not active:
            return Verdict.unknown()


def _semiconj_yes(task: Task, transcript: Transcript) -> Verdict:
    xi, g, sign = task.label
    v, ders = task.result.payload
    transcript.checks.append({"check": "semiconjugacy", "steps": task.steps})
    return Verdict.yes(SemiConjWitness(sign, xi, g, v, transcript, ders))


def semiconjugacy_search(H: Presentation, alpha: GenMap, beta: GenMap, fuel: int,
                         trust_automorphisms: bool = True) -> Verdict:
    return drive(semiconjugacy_search_gen(H, alpha, beta, trust_automorphisms), fuel)


@dataclass(frozen=True)
class IsoPair:
    forward: StableHom    # A -> B
    backward: StableHom   # B -> A
    A: ExtensionDescriptor
    B: ExtensionDescriptor

    def maps(self) -> tuple[GenMap, GenMap]:
        return self.forward.as_genmap(self.A, self.B), self.backward.as_genmap(self.B, self.A)

    def to_json(self) -> dict:
        f, b = self.maps()
        return {"forward": f.to_json(), "backward": b.to_json(),
                "forward_stable": self.forward.to_json(), "backward_stable": self.backward.to_json()}


def build_iso_from_semiconj(H: Presentation, alpha: GenMap, beta: GenMap,
                            witness: SemiConjWitness, fuel: int = 10_000) -> IsoPair:
    """Mutually inverse stable homomorphisms between the two extensions."""
    if witness.xi_inverse is None:
        raise ValueError("witness carries no inverse for xi")
    A = semidirect_presentation(H, alpha, "t")
    B = semidirect_presentation(H, beta, "t")
    xi = witness.xi
    xi_inv = GenMap(H, H, witness.xi_inverse)
    g = witness.g
    back_h0 = xi_inv(g)
    if witness.sign > 0:
        forward = StableHom(1, xi, W.inverse(g))
        backward = StableHom(1, xi_inv, back_h0)
    else:
        forward = StableHom(-1, xi, xi(alpha(xi_inv(g))))
        backward = StableHom(-1, xi_inv, back_h0)
    pair = IsoPair(forward, backward, A, B)
    for name, v in (("forward", verify_stable_hom(A, B, forward, fuel)),
                    ("backward", verify_stable_hom(B, A, backward, fuel))):
        if not v.is_yes:
            raise ValueError(f"witness did not re-verify: {name} map gave {v.status.value}")
    return pair


# --- deranged extensions ----------------------------------------------------

def _base_iso_search(A: Presentation, B: Presentation) -> Search:
    """Dovetail pairs of mutually inverse maps ``A -> B``, ``B -> A``; identity first."""
    stream = W.mixed_tuples([B.n] * A.n + [A.n] * B.n)
    if A.generators == B.generators:
        ident = tuple(W.generator(i) for i in range(A.n))
        stream = _prepend(ident + ident, stream)
    active: list[Task] = []
    exhausted = False
    while True:
        if not exhausted:
            yield
            cand = next(stream, None)
            if cand is None:
                exhausted = True
            else:
                psi, back = cand[:A.n], cand[A.n:]
                queries = [(B, W.substitute(r, psi)) for r in A.relators]
                queries += [(A, W.substitute(r, back)) for r in B.relators]
                queries += [(A, W.mul(W.substitute(p, back), W.inverse(W.generator(i))))
                            for i, p in enumerate(psi)]
                queries += [(B, W.mul(W.substitute(q, psi), W.inverse(W.generator(j))))
                            for j, q in enumerate(back)]
                task = Task(all_hold(queries), (psi, back))
                if task.done and task.result.is_yes:
                    return Verdict.yes(task.label)
                if not task.done:
                    active.append(task)
        still = []
        for task in active:
            yield
            task.grant()
            if task.done:
                if task.result.is_yes:
                    return Verdict.yes(task.label)
            else:
                still.append(task)
        active = still
        if exhausted and not active:
            return Verdict.unknown()


def _prepend(first, stream):
    yield first
    yield from stream


def _invariants_key(P: Presentation) -> tuple:
    inv = abelian.abelian_invariants(P)
    return inv.betti, inv.torsion


def deranged_iso_search(A: ExtensionDescriptor, B: ExtensionDescriptor,
                        base_iso: tuple[GenMap, GenMap] | GenMap | None = None) -> Search:
    for D, name in ((A, "A"), (B, "B")):
        if not is_deranged(D.base, D.auto):
            raise ValueError(f"extension {name} is not deranged; the reduction does not apply")
    if _invariants_key(A.base) != _invariants_key(B.base):
        return Verdict.no({"reason": "base abelian invariants differ",
                           "A": list(_invariants_key(A.base)), "B": list(_invariants_key(B.base))})
    if _invariants_key(A.standard) != _invariants_key(B.standard):
        return Verdict.no({"reason": "extension abelian invariants differ",
                           "A": list(_invariants_key(A.standard)), "B": list(_invariants_key(B.standard))})
    # similar matrices share det and charpoly, so compare before choosing psi
    if abelian.betti(A.base):
        ia, ib = matrix_invariants(A.base, A.auto), matrix_invariants(B.base, B.auto)
        if ia["det"] != ib["det"] or ia["charpoly"] not in (ib["charpoly"], ib["inverse_charpoly"]):
            return Verdict.no({"reason": "automorphisms are not semi-conjugate on the free abelianization",
                               "alpha": ia, "beta": ib})
    if base_iso is None:
        found = yield from _base_iso_search(A.base, B.base)
        if not found.is_yes:
            return found
        psi_imgs, back_imgs = found.payload
    elif isinstance(base_iso, GenMap):
        back = yield from inverse_search_between(base_iso)
        if not back.is_yes:
            return back
        psi_imgs, back_imgs = base_iso.images, back.payload
    else:
        psi_imgs, back_imgs = base_iso[0].images, base_iso[1].images
    psi = GenMap(A.base, B.base, tuple(psi_imgs))
    back = GenMap(B.base, A.base, tuple(back_imgs))
    beta_prime = back.compose(B.auto.compose(psi))
    sc = yield from semiconjugacy_search_gen(A.base, A.auto, beta_prime)
    if sc.is_yes:
        return Verdict.yes({"psi": psi, "psi_inverse": back, "beta_prime": beta_prime, "witness": sc.payload})
    return sc


def inverse_search_between(psi: GenMap) -> Search:
    """Search for an inverse of ``psi`` when domain and codomain differ."""
    A, B = psi.domain, psi.codomain
    if A.generators == B.generators:
        found = yield from inverse_search(A, psi.images)
        if found.is_yes:
            return Verdict.yes(found.payload[0])
        return found
    stream = W.tuples_by_total_length(A.n, B.n)
    active: list[Task] = []
    while True:
        yield
        back = next(stream)
        queries = [(A, W.substitute(r, back)) for r in B.relators]
        queries += [(A, W.mul(W.substitute(p, back), W.inverse(W.generator(i))))
                    for i, p in enumerate(psi.images)]
        queries += [(B, W.mul(W.substitute(q, psi.images), W.inverse(W.generator(j))))
                    for j, q in enumerate(back)]
        task = Task(all_hold(queries), back)
        if task.done and task.result.is_yes:
            return Verdict.yes(back)
        if not task.done:
            active.append(task)
        still = []
        for task in active:
            yield
            task.grant()
            if task.done:
                if task.result.is_yes:
                    return Verdict.yes(task.label)
            else:
                still.append(task)
        active = still


def deranged_iso_decide(A: ExtensionDescriptor, B: ExtensionDescriptor,
                        base_iso: tuple[GenMap, GenMap] | GenMap | None = None,
                        fuel: int = 10_000) -> Verdict:
    return drive(deranged_iso_search(A, B, base_iso), fuel)


# --- braid groups -----------------------------------------------------------

def braid_presentation(n: int) -> Presentation:
    """Artin presentation of the braid group on ``n`` strands."""
    if n < 1:
        raise ValueError("n must be positive")
    gens = [f"s{i}" for i in range(1, n)]
    rels = []
    for i in range(1, n - 1):
        a, b = f"s{i}", f"s{i + 1}"
        rels.append(f"{a}*{b}*{a}={b}*{a}*{b}")
    for i in range(1, n):
        for j in range(i + 2, n):
            rels.append(f"s{i}*s{j}=s{j}*s{i}")
    return parse_presentation(f"<{','.join(gens)} | {', '.join(rels)}>")


def braid_inversion(n: int) -> GenMap:
    """``s_i -> s_i^-1``."""
    P = braid_presentation(n)
    return GenMap(P, P, tuple(W.inverse(W.generator(i)) for i in range(P.n)))


BRAID_KINDS = ("product", "iota")


def braid_extension(n: int, kind: str) -> Presentation:
    if kind not in BRAID_KINDS:
        raise ValueError(f"kind must be one of {BRAID_KINDS}")
    if kind == "iota":
        return semidirect_presentation(braid_presentation(n), braid_inversion(n), "t").standard
    return abelian.direct_sum(braid_presentation(n), Presentation(("t",), ()))


def braid_invariants(n: int, kind: str) -> tuple[int, tuple[int, ...]]:
    """Betti number of the extension and the abelianization of the braid group mod its center."""
    if n < 2:
        raise ValueError("braid index must be at least 2")
    ext = braid_extension(n, kind)
    B = braid_presentation(n)
    full_twist = W.power(W.mul(*(W.generator(i) for i in range(B.n))), n)
    quotient = Presentation(B.generators, B.relators + (full_twist,))
    return abelian.betti(ext), abelian.abelian_invariants(quotient).torsion


def braid_iso(left: tuple[int, str], right: tuple[int, str]) -> bool:
    return braid_invariants(*left) == braid_invariants(*right)


# --- expressing automorphisms ----------------------------------------------

def formal_words(n_symbols: int, invertible: Sequence[bool]) -> Iterator[Word]:
    """Reduced formal words in shortlex order; inverse letters only where allowed."""
    letters = [c for c in range(2 * n_symbols) if not c & 1 or invertible[c >> 1]]

    def extend(prefix: Word, remaining: int) -> Iterator[Word]:
        if not remaining:
            yield prefix
            return
        for c in letters:
            if not prefix or c != prefix[-1] ^ 1:
                yield from extend(prefix + (c,), remaining - 1)

    length = 0
    while True:
        yield from extend((), length)
        length += 1


def evaluate_formal(word: Word, gens: Sequence[GenMap], inverses: Sequence[GenMap | None]) -> GenMap:
    """``word`` read as a composition, leftmost letter applied last."""
    return drive_unmetered(_evaluate(word, gens, inverses))


def _evaluate(word: Word, gens: Sequence[GenMap], inverses: Sequence[GenMap | None]):
    """Compose step by step, yielding once per step and per block of image letters."""
    H = gens[0].domain
    out = GenMap.identity(H)
    for c in reversed(word):
        m = gens[c >> 1] if not c & 1 else inverses[c >> 1]
        out = m.compose(out)
        for _ in range(1 + sum(map(len, out.images)) // _LETTERS_PER_UNIT):
            yield
    return out


_LETTERS_PER_UNIT = 256


def drive_unmetered(gen):
    while True:
        try:
            next(gen)
        except StopIteration as stop:
            return stop.value


def format_formal(word: Word) -> str:
    if not word:
        return "id"
    return "*".join(f"a{c >> 1}" + ("^-1" if c & 1 else "") for c in word)


def express_search(H: Presentation, target: GenMap, gens: Sequence[GenMap],
                   inverses: Sequence[GenMap | None] | None = None) -> Search:
    if not gens:
        raise ValueError("no generating automorphisms given")
    for m in list(gens) + [target]:
        if m.domain.generators != H.generators or m.codomain.generators != H.generators:
            raise ValueError("all maps must be endomaps of H")
    inverses = list(inverses) if inverses is not None else [None] * len(gens)
    invertible = [m is not None for m in inverses]
    active: list[Task] = []
    for w in formal_words(len(gens), invertible):
        yield
        # composing can blow up image lengths, so the work is metered too
        m = yield from _evaluate(w, gens, inverses)
        queries = [(H, W.mul(a, W.inverse(b))) for a, b in zip(m.images, target.images)]
        task = Task(all_hold(queries), w)
        if task.done and task.result.is_yes:
            return _express_yes(task)
        if not task.done:
            active.append(task)
        still = []
        for task in active:
            yield
            task.grant()
            if task.done:
                if task.result.is_yes:
                    return _express_yes(task)
            else:
                still.append(task)
        active = still
    return Verdict.unknown()


def _express_yes(task: Task) -> Verdict:
    return Verdict.yes({"word": list(task.label), "formal": format_formal(task.label),
                        "derivations": _derivations_json(task.result.payload)})


def determinant_advisory(H: Presentation, target: GenMap, gens: Sequence[GenMap]) -> dict:
    """Whether the free-part determinant already rules the target out."""
    if abelian.betti(H) == 0:
        return {"dets": [], "target_det": None, "obstructed": False}
    dets = [abelian.induced_abf_matrix(H, m).det() for m in gens]
    target_det = abelian.induced_abf_matrix(H, target).det()
    reachable = {1}
    for d in dets:
        if abs(d) == 1:
            reachable |= {x * d for x in reachable}
    obstructed = all(abs(d) == 1 for d in dets) and target_det not in reachable
    return {"dets": dets, "target_det": target_det, "obstructed": obstructed}


def express_in_generators(H: Presentation, target: GenMap, gens: Sequence[GenMap], fuel: int,
                          inverses: Sequence[GenMap | None] | None = None) -> Verdict:
    v = drive(express_search(H, target, gens, inverses), fuel)
    if v.is_unknown:
        return Verdict.unknown(v.steps, {"advisory": determinant_advisory(H, target, gens)})
    return v
