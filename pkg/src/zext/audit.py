"""Independent re-checking of serialized certificates.

Everything here works from plain JSON: words are lists of letter codes
(generator ``i`` is ``2i``, its inverse ``2i + 1``), presentations carry
relators as ``[index, exponent]`` syllables and maps carry images as text
``a^-1*b^2``.  The reduction, substitution and text decoding below share no
code with the engines that produced the certificates.
"""

from __future__ import annotations

import re
from typing import Any, Callable, Sequence

Letters = list[int]


class AuditError(ValueError):
    pass


def reduce_letters(letters: Sequence[int]) -> Letters:
    stack: Letters = []
    for c in letters:
        if stack and stack[-1] == c ^ 1:
            stack.pop()
        else:
            stack.append(c)
    return stack


def invert(letters: Sequence[int]) -> Letters:
    return [c ^ 1 for c in reversed(letters)]


def concat(*parts: Sequence[int]) -> Letters:
    out: Letters = []
    for p in parts:
        out.extend(p)
    return reduce_letters(out)


def substitute(letters: Sequence[int], images: Sequence[Sequence[int]]) -> Letters:
    out: Letters = []
    for c in letters:
        img = images[c // 2]
        out.extend(img if c % 2 == 0 else invert(img))
    return reduce_letters(out)


def from_syllables(pairs) -> Letters:
    out: Letters = []
    for i, e in pairs:
        out.extend([2 * i + (e < 0)] * abs(e))
    return reduce_letters(out)


_SYLLABLE = re.compile(r"^([A-Za-z][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


def decode_text(text: str, names: Sequence[str]) -> Letters:
    """Decode the ``*``-separated syllable text written by the engines."""
    text = text.strip()
    if text == "1":
        return []
    out: Letters = []
    for part in text.split("*"):
        m = _SYLLABLE.match(part.strip())
        if not m or m.group(1) not in names:
            raise AuditError(f"cannot decode syllable {part!r}")
        i = list(names).index(m.group(1))
        e = int(m.group(2) or 1)
        out.extend([2 * i + (e < 0)] * abs(e))
    return reduce_letters(out)


def relators_of(pres: dict) -> list[Letters]:
    return [from_syllables(r) for r in pres.get("relators", [])]


def decode_map(data: dict, domain: Sequence[str], codomain: Sequence[str]) -> list[Letters]:
    images = data["images"]
    if sorted(images) != sorted(domain):
        raise AuditError("map images do not match the domain generators")
    return [decode_text(images[g], codomain) for g in domain]


def compose(outer: Sequence[Sequence[int]], inner: Sequence[Sequence[int]]) -> list[Letters]:
    """``outer o inner``."""
    return [substitute(w, outer) for w in inner]


def identity(n: int) -> list[Letters]:
    return [[2 * i] for i in range(n)]


def derivation_holds(relators: Sequence[Sequence[int]], word: Sequence[int], factors: Sequence[dict]) -> bool:
    product: Letters = []
    for f in factors:
        idx, sign = f["relator"], f["sign"]
        if not 0 <= idx < len(relators) or sign not in (1, -1):
            return False
        r = relators[idx] if sign == 1 else invert(relators[idx])
        g = list(f["conjugator"])
        product.extend(g + list(r) + invert(g))
    return reduce_letters(product) == reduce_letters(word)


def _all_derive(relators, words, derivations, what: str) -> list[str]:
    if len(words) != len(derivations):
        return [f"{what}: expected {len(words)} derivations, found {len(derivations)}"]
    return [f"{what} #{i} does not derive"
            for i, (w, d) in enumerate(zip(words, derivations))
            if not derivation_holds(relators, w, d)]


# --- per-certificate checkers -----------------------------------------------

def check_membership(data: dict) -> list[str]:
    rels = relators_of(data["presentation"])
    return _all_derive(rels, [data["word"]], [data["derivation"]], "word")


def _automorphism_problems(rels, n, images, witness) -> list[str]:
    inv = [list(v) for v in witness["inverse"]]
    gens = identity(n)
    problems = []
    problems += _all_derive(rels, [substitute(r, images) for r in rels],
                            witness["endo_derivations"], "endomorphism relator")
    problems += _all_derive(rels, [substitute(r, inv) for r in rels],
                            witness["inverse_endo_derivations"], "inverse relator")
    problems += _all_derive(rels, [concat(substitute(v, images), invert(x)) for v, x in zip(inv, gens)],
                            witness["left_derivations"], "alpha(v_i) x_i^-1")
    problems += _all_derive(rels, [concat(substitute(w, inv), invert(x)) for w, x in zip(images, gens)],
                            witness["right_derivations"], "v(w_i) x_i^-1")
    return problems


def check_automorphism(data: dict) -> list[str]:
    """A validated extension descriptor: the stable letter acts by an automorphism."""
    base = data["base"]
    names = base["generators"]
    if "witness" not in data:
        return ["descriptor carries no witness"]
    images = decode_map(data["alpha"], names, names)
    problems = _automorphism_problems(relators_of(base), len(names), images, data["witness"])
    # the standard presentation must be the one the automorphism determines
    n = len(names)
    t = 2 * n
    expected = relators_of(base) + [concat([t, 2 * i, t + 1], invert(images[i])) for i in range(n)]
    std = data["standard"]
    if std["generators"] != names + [data["stable_letter"]] or relators_of(std) != expected:
        problems.append("standard presentation does not match base and automorphism")
    return problems


def _power(m: list[Letters], k: int, n: int) -> list[Letters]:
    out = identity(n)
    for _ in range(k):
        out = compose(m, out)
    return out


def stable_hom_words(A: dict, B: dict, S: dict) -> list[Letters]:
    """Words that must vanish in B's base for ``S`` to be a homomorphism ``A -> B``."""
    na, nb = A["base"]["generators"], B["base"]["generators"]
    alpha = decode_map(A["alpha"], na, na)
    beta = decode_map(B["alpha"], nb, nb)
    phi = decode_map(S["phi"], na, nb)
    h0 = decode_text(S["h0"], nb)
    eps = S["epsilon"]
    words = [substitute(r, phi) for r in relators_of(A["base"])]
    for i in range(len(na)):
        x = [2 * i]
        phi_ax = substitute(substitute(x, alpha), phi)
        if eps >= 0:
            lhs = concat(h0, substitute(substitute(x, phi), _power(beta, eps, len(nb))), invert(h0))
            words.append(concat(lhs, invert(phi_ax)))
        else:
            bk = _power(beta, -eps, len(nb))
            h = substitute(h0, bk)
            rhs = concat(invert(h), substitute(phi_ax, bk), h)
            words.append(concat(substitute(x, phi), invert(rhs)))
    return words


def check_stable_hom(data: dict) -> list[str]:
    words = stable_hom_words(data["A"], data["B"], data["S"])
    return _all_derive(relators_of(data["B"]["base"]), words, data["derivations"], "stable relation")


def check_semiconjugacy(data: dict) -> list[str]:
    H = data["H"]
    names = H["generators"]
    n = len(names)
    rels = relators_of(H)
    alpha = decode_map(data["alpha"], names, names)
    beta = decode_map(data["beta"], names, names)
    wit = data["witness"]
    xi = decode_map(wit["xi"], names, names)
    g = decode_text(wit["g"], names)
    if "xi_inverse" not in wit:
        return ["witness carries no inverse for xi"]
    xi_inv = decode_map(wit["xi_inverse"], names, names)
    words = [substitute(r, xi) for r in rels]
    for i in range(n):
        x = [2 * i]
        if wit["sign"] == 1:
            lhs = substitute(substitute(x, xi), beta)
            rhs = concat(g, substitute(substitute(x, alpha), xi), invert(g))
        elif wit["sign"] == -1:
            lhs = substitute(substitute(substitute(x, alpha), xi), beta)
            rhs = concat(g, substitute(x, xi), invert(g))
        else:
            return ["sign must be 1 or -1"]
        words.append(concat(lhs, invert(rhs)))
    words += [substitute(r, xi_inv) for r in rels]
    words += [concat(substitute(v, xi), [2 * i + 1]) for i, v in enumerate(xi_inv)]
    words += [concat(substitute(w, xi_inv), [2 * i + 1]) for i, w in enumerate(xi)]
    return _all_derive(rels, words, wit["derivations"], "semi-conjugacy relation")


def check_expression(data: dict) -> list[str]:
    H = data["H"]
    names = H["generators"]
    target = decode_map(data["target"], names, names)
    gens = [decode_map(m, names, names) for m in data["gens"]]
    invs = [decode_map(m, names, names) if m is not None else None
            for m in data.get("inverses", [None] * len(gens))]
    m = identity(len(names))
    for c in reversed(data["word"]):
        step = gens[c // 2] if c % 2 == 0 else invs[c // 2]
        if step is None:
            return [f"letter {c} uses an inverse that was not supplied"]
        m = compose(step, m)
    words = [concat(a, invert(b)) for a, b in zip(m, target)]
    return _all_derive(relators_of(H), words, data["derivations"], "generator image")


CHECKERS: dict[str, Callable[[dict], list[str]]] = {
    "membership": check_membership,
    "automorphism": check_automorphism,
    "stable_hom": check_stable_hom,
    "semiconjugacy": check_semiconjugacy,
    "expression": check_expression,
}


def audit(bundle: dict) -> list[str]:
    """Problems found in a certificate bundle; empty means it re-verifies."""
    kind = bundle.get("kind")
    if kind not in CHECKERS:
        return [f"unknown certificate kind {kind!r}"]
    try:
        return CHECKERS[kind](bundle)
    except (KeyError, TypeError, IndexError, AuditError) as exc:
        return [f"malformed certificate: {exc!r}"]


# --- bundle builders (engine objects to JSON) -------------------------------

def membership_bundle(P, word, derivation) -> dict[str, Any]:
    return {"kind": "membership", "presentation": P.to_json(), "word": list(word),
            "derivation": [f.to_json() for f in derivation]}


def automorphism_bundle(descriptor) -> dict[str, Any]:
    return {"kind": "automorphism", **descriptor.to_json()}


def stable_hom_bundle(A, B, S, derivations) -> dict[str, Any]:
    return {"kind": "stable_hom", "A": A.to_json(), "B": B.to_json(), "S": S.to_json(),
            "derivations": [[f.to_json() for f in d] for d in derivations]}


def semiconjugacy_bundle(H, alpha, beta, witness) -> dict[str, Any]:
    return {"kind": "semiconjugacy", "H": H.to_json(), "alpha": alpha.to_json(),
            "beta": beta.to_json(), "witness": witness.to_json()}


def expression_bundle(H, target, gens, payload, inverses=None) -> dict[str, Any]:
    out = {"kind": "expression", "H": H.to_json(), "target": target.to_json(),
           "gens": [m.to_json() for m in gens], "word": list(payload["word"]),
           "derivations": payload["derivations"]}
    if inverses is not None:
        out["inverses"] = [m.to_json() if m is not None else None for m in inverses]
    return out
