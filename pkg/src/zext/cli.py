"""Command-line interface.

Exit codes: 0 yes/success, 1 no, 2 unknown (fuel exhausted), 3 usage or
parse error.  ``--json`` prints one envelope ``{command, status, exit_code,
result}``; ``enumerate`` streams one descriptor per line instead.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Any, Sequence

from zext import abelian, audit, characters, extensions, isomorphism, recognition
from zext.core.closure import normal_closure_contains
from zext.core.presentation import GenMap, ParseError, Presentation, load_presentation
from zext.core.tietze import TietzeBounds
from zext.core.verdict import Status, Verdict

EXIT = {Status.YES: 0, Status.NO: 1, Status.UNKNOWN: 2}
USAGE_ERROR = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


# --- argument decoding ------------------------------------------------------

def read_presentation(arg: str) -> Presentation:
    """Inline grammar text, inline JSON, or a path to a file holding either."""
    text = arg
    if not arg.lstrip().startswith(("<", "{")) and os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return load_presentation(text)
    except ParseError as exc:
        raise UsageError(str(exc)) from None
    except (ValueError, KeyError) as exc:
        raise UsageError(f"bad presentation: {exc}") from None


def read_map(arg: str, domain: Presentation, codomain: Presentation | None = None) -> GenMap:
    """``a=b,b=a*b`` or the JSON form ``{"images": {...}}``."""
    text = arg.strip()
    try:
        if text.startswith("{"):
            return GenMap.from_json(json.loads(text), domain, codomain)
        images = {}
        if text:
            for part in text.split(","):
                name, sep, word = part.partition("=")
                if not sep:
                    raise ValueError(f"expected name=word, got {part.strip()!r}")
                images[name.strip()] = word.strip()
        return GenMap.from_strings(domain, images, codomain)
    except ParseError as exc:
        raise UsageError(str(exc)) from None
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"bad map: {exc}") from None


def read_character(arg: str, P: Presentation) -> characters.Character:
    try:
        coeffs = [Fraction(x.strip()) for x in arg.split(",") if x.strip()]
        return characters.Character(P, tuple(coeffs))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad character: {exc}") from None


def nonnegative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def bounds_arg(text: str) -> TietzeBounds:
    try:
        return TietzeBounds.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# --- output -----------------------------------------------------------------

class Outcome:
    """What a command produced: a status, a JSON result and a text rendering."""

    def __init__(self, status: str, code: int, result: Any, text: str):
        self.status, self.code, self.result, self.text = status, code, result, text

    @classmethod
    def ok(cls, result: Any, text: str) -> "Outcome":
        return cls("ok", 0, result, text)

    @classmethod
    def boolean(cls, value: bool, result: Any, text: str) -> "Outcome":
        return cls("yes" if value else "no", 0 if value else 1, result, text)

    @classmethod
    def verdict(cls, v: Verdict, result: Any, text: str) -> "Outcome":
        return cls(v.status.value, EXIT[v.status], result, text)


def dump(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _verdict_text(v: Verdict) -> str:
    return {Status.YES: "yes", Status.NO: "no", Status.UNKNOWN: f"unknown (after {v.steps} steps)"}[v.status]


# --- commands ---------------------------------------------------------------

def cmd_parse(a) -> Outcome:
    P = read_presentation(a.presentation)
    return Outcome.ok({"presentation": P.to_json(), "text": str(P)}, str(P))


def _invariants_json(inv: abelian.AbelianInvariants) -> dict:
    return {"betti": inv.betti, "torsion": list(inv.torsion)}


def _invariants_text(inv: abelian.AbelianInvariants) -> str:
    parts = [] if not inv.betti else ["Z" if inv.betti == 1 else f"Z^{inv.betti}"]
    parts += [f"Z/{d}" for d in inv.torsion]
    return " + ".join(parts) if parts else "0"


def cmd_abelian(a) -> Outcome:
    P = read_presentation(a.presentation)
    inv = abelian.abelian_invariants(P)
    result = _invariants_json(inv)
    result["relation_matrix"] = abelian.relation_matrix(P).to_json()
    result["smith_diagonal"] = [str(d) for d in inv.snf.diagonal]
    return Outcome.ok(result, f"betti {inv.betti}, torsion {list(inv.torsion)}: {_invariants_text(inv)}")


def cmd_betti(a) -> Outcome:
    r = abelian.betti(read_presentation(a.presentation))
    return Outcome.ok({"betti": r}, str(r))


def cmd_member(a) -> Outcome:
    P = read_presentation(a.presentation)
    r = abelian.betti(P)
    if a.unique:
        value, family = abelian.is_bang_by_zk(P, a.k), f"!-by-Z^{a.k}"
    else:
        value, family = abelian.is_star_by_zk(P, a.k), f"*-by-Z^{a.k}"
    return Outcome.boolean(value, {"family": family, "k": a.k, "betti": r, "member": value},
                           f"{'yes' if value else 'no'}: betti {r}, family {family}")


def cmd_deranged(a) -> Outcome:
    H = read_presentation(a.presentation)
    alpha = read_map(a.map, H)
    M = extensions.abf_matrix(H, alpha)
    value = extensions.is_deranged(H, alpha)
    result = {"deranged": value, "matrix": M.to_json()}
    return Outcome.boolean(value, result, f"{'deranged' if value else 'not deranged'}; abf matrix {M.to_rows()}")


def cmd_semidirect(a) -> Outcome:
    H = read_presentation(a.presentation)
    D = extensions.semidirect_presentation(H, read_map(a.map, H), a.t)
    inv = extensions.ext_abelianization(H, D.auto)
    result = {"descriptor": D.to_json(), "abelianization": _invariants_json(inv),
              "deranged": extensions.is_deranged(H, D.auto)}
    return Outcome.ok(result, str(D.standard))


def cmd_gadget(a) -> Outcome:
    K = read_presentation(a.presentation)
    G = extensions.free_product_with_Z(K, a.t)
    return Outcome.ok({"presentation": G.to_json(), "betti": abelian.betti(G)},
                      f"{G}  (betti {abelian.betti(G)})")


def cmd_reduce_triviality(a) -> Outcome:
    K = read_presentation(a.presentation)
    v = extensions.triviality_reduction(K, a.t)
    payload = dict(v.payload)
    if v.is_yes:
        gadget = payload["gadget"]
        payload["gadget"] = gadget.to_json()
        text = f"gadget {gadget}: {payload['claim']}"
    else:
        text = f"no: K is not perfect (betti {payload['betti']}, torsion {payload['torsion']})"
    return Outcome.verdict(v, payload, text)


def cmd_recognize(a) -> Outcome:
    P = read_presentation(a.presentation)
    v = recognition.recognize_standard(P, a.fuel)
    result: dict[str, Any] = {"steps": v.steps}
    if v.is_yes:
        D = v.payload
        result["descriptor"] = D.to_json()
        text = f"yes: base {D.base}, stable letter {D.stable_letter}, alpha {D.auto}"
    else:
        if v.is_no:
            result["certificate"] = v.payload
        text = _verdict_text(v)
    return Outcome.verdict(v, result, text)


def cmd_enumerate(a, out) -> int:
    P = read_presentation(a.presentation)
    found = 0
    for D in recognition.enumerate_standard(P, a.fuel, a.limit, a.tietze_bounds):
        found += 1
        if a.json:
            out.write(dump(D.to_json()) + "\n")
        else:
            out.write(f"{D.standard}  [base {D.base}, stable letter {D.stable_letter}]\n")
        out.flush()
    code = 0 if found else EXIT[Status.UNKNOWN]
    if not a.json:
        out.write(f"{found} descriptor(s) emitted\n")
    return code


def cmd_characters(a) -> Outcome:
    P = read_presentation(a.presentation)
    basis = characters.character_basis(P)
    result: dict[str, Any] = {
        "betti": len(basis),
        "basis": [chi.to_json() for chi in basis],
        "generator_values": [[str(x) for x in chi.generator_values()] for chi in basis],
    }
    lines = [f"betti {len(basis)}"]
    for k, chi in enumerate(basis):
        lines.append(f"chi{k}: " + ", ".join(f"{g} -> {x}" for g, x in zip(P.generators, chi.generator_values())))
    if len(basis) == 1:
        plus, minus = characters.betti1_characters(P)
        result["sphere"] = [list(plus), list(minus)]
        lines.append("sphere: {+1, -1}")
    return Outcome.ok(result, "\n".join(lines))


def cmd_cone(a) -> Outcome:
    P = read_presentation(a.presentation)
    chi = read_character(a.chi, P)
    v = characters.cone_ball_connectivity(P, chi, a.radius, a.fuel)
    text = ("connected within the ball (evidence only)" if v.is_yes
            else f"inconclusive after {v.steps} steps (evidence only)")
    return Outcome.verdict(v, {"steps": v.steps, "evidence": v.payload}, text)


def cmd_semiconj(a) -> Outcome:
    H = read_presentation(a.presentation)
    alpha, beta = read_map(a.alpha, H), read_map(a.beta, H)
    v = isomorphism.semiconjugacy_search(H, alpha, beta, a.fuel)
    result: dict[str, Any] = {"steps": v.steps}
    if v.is_yes:
        w = v.payload
        result["witness"] = w.to_json()
        pair = isomorphism.build_iso_from_semiconj(H, alpha, beta, w, max(a.fuel, 1))
        result["isomorphism"] = pair.to_json()
        f, b = pair.maps()
        text = f"yes: sign {w.sign}, xi {w.xi}, g {H.format_word(w.g)}\nforward {f}\nbackward {b}"
    elif v.is_no:
        result["certificate"] = v.payload
        text = f"no: {v.payload['reason']} obstruction"
    else:
        text = _verdict_text(v)
    return Outcome.verdict(v, result, text)


def cmd_iso_deranged(a) -> Outcome:
    HA, HB = read_presentation(a.base_a), read_presentation(a.base_b)
    A = extensions.semidirect_presentation(HA, read_map(a.alpha, HA), a.t)
    B = extensions.semidirect_presentation(HB, read_map(a.beta, HB), a.t)
    psi = read_map(a.psi, HA, HB) if a.psi else None
    try:
        v = isomorphism.deranged_iso_decide(A, B, psi, a.fuel)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result: dict[str, Any] = {"steps": v.steps}
    if v.is_yes:
        p = v.payload
        result.update({"psi": p["psi"].to_json(), "psi_inverse": p["psi_inverse"].to_json(),
                       "witness": p["witness"].to_json()})
        text = f"yes: psi {p['psi']}, semi-conjugacy sign {p['witness'].sign}"
    elif v.is_no:
        result["certificate"] = v.payload
        text = f"no: {v.payload['reason']}"
    else:
        text = _verdict_text(v)
    return Outcome.verdict(v, result, text)


def cmd_braid_iso(a) -> Outcome:
    for n in (a.n, a.m):
        if n < 2:
            raise UsageError("braid index must be at least 2")
    left, right = (a.n, a.kind), (a.m, a.kind2)
    value = isomorphism.braid_iso(left, right)
    li, ri = isomorphism.braid_invariants(*left), isomorphism.braid_invariants(*right)
    result = {"isomorphic": value,
              "left": {"betti": li[0], "center_quotient_torsion": list(li[1])},
              "right": {"betti": ri[0], "center_quotient_torsion": list(ri[1])}}
    return Outcome.boolean(value, result, "isomorphic" if value else "not isomorphic")


def cmd_express(a) -> Outcome:
    H = read_presentation(a.presentation)
    target = read_map(a.target, H)
    gens = [read_map(g, H) for g in a.gen]
    inverses = [None] * len(gens)
    for spec in a.inverse or []:
        k, _, m = spec.partition(":")
        try:
            idx = int(k)
            inverses[idx] = read_map(m, H)
        except (ValueError, IndexError):
            raise UsageError(f"bad --inverse {spec!r}; expected INDEX:MAP") from None
    v = isomorphism.express_in_generators(H, target, gens, a.fuel, inverses)
    result: dict[str, Any] = {"steps": v.steps}
    if v.is_yes:
        result.update(v.payload)
        text = f"yes: {v.payload['formal']}"
    else:
        result["advisory"] = v.payload["advisory"]
        note = " (determinant rules it out)" if v.payload["advisory"]["obstructed"] else ""
        text = _verdict_text(v) + note
    return Outcome.verdict(v, result, text)


def cmd_swap(a) -> Outcome:
    H = read_presentation(a.presentation)
    phi = read_map(a.map, H)
    sp = extensions.swap_product(H, phi, a.t, a.s)
    result = {"left": sp.left.to_json(), "right": sp.right.to_json(),
              "forward": sp.forward.to_json(), "backward": sp.backward.to_json()}
    text = f"left  {sp.left}\nright {sp.right}\nforward {sp.forward}\nbackward {sp.backward}"
    return Outcome.ok(result, text)


def cmd_member_word(a) -> Outcome:
    P = read_presentation(a.presentation)
    try:
        w = P.word(a.word)
    except ParseError as exc:
        raise UsageError(str(exc)) from None
    v = normal_closure_contains(P, w, a.fuel)
    result: dict[str, Any] = {"steps": v.steps}
    if v.is_yes:
        result["derivation"] = [f.to_json() for f in v.payload]
        result["audit"] = audit.audit(audit.membership_bundle(P, w, v.payload))
    elif v.is_no:
        result["certificate"] = v.payload
    return Outcome.verdict(v, result, _verdict_text(v))


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="zext", description="Infinite cyclic extensions of finitely presented groups.")
    p.add_argument("--version", action="version", version="zext 0.1.0")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    fuel = argparse.ArgumentParser(add_help=False)
    fuel.add_argument("--fuel", type=nonnegative, default=10_000, help="step budget (default 10000)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help, *parents):
        sp = sub.add_parser(name, help=help, parents=[common, *parents])
        sp.set_defaults(func=func)
        return sp

    def pres(sp, name="presentation"):
        sp.add_argument(name, help="presentation text, JSON, or a file holding either")

    sp = add("parse", cmd_parse, "parse and echo a presentation"); pres(sp)
    sp = add("abelian", cmd_abelian, "abelian invariants"); pres(sp)
    sp = add("betti", cmd_betti, "first Betti number"); pres(sp)
    sp = add("member", cmd_member, "membership in *-by-Z^k (or !-by-Z^k with --unique)"); pres(sp)
    sp.add_argument("--k", type=nonnegative, default=1)
    sp.add_argument("--unique", action="store_true")
    sp = add("deranged", cmd_deranged, "is the automorphism deranged"); pres(sp)
    sp.add_argument("--map", required=True, help="images, e.g. 'a=b,b=a*b'")
    sp = add("semidirect", cmd_semidirect, "standard presentation of H x| Z"); pres(sp)
    sp.add_argument("--map", required=True)
    sp.add_argument("--t", default="t", help="stable letter name")
    sp = add("gadget", cmd_gadget, "the free product K * Z"); pres(sp)
    sp.add_argument("--t", default="t")
    sp = add("reduce-triviality", cmd_reduce_triviality, "reduce triviality of K to the gadget"); pres(sp)
    sp.add_argument("--t", default="t")
    sp = add("recognize", cmd_recognize, "recognize a standard presentation", fuel); pres(sp)
    sp = add("enumerate", cmd_enumerate, "enumerate standard presentations by Tietze search", fuel); pres(sp)
    sp.add_argument("--limit", type=positive, default=None)
    sp.add_argument("--tietze-bounds", type=bounds_arg, default=TietzeBounds(),
                    help="new-generators,relator-length,derivation-factors,conjugator-length (default 1,4,2,1)")
    sp = add("characters", cmd_characters, "basis of rational characters"); pres(sp)
    sp = add("cone", cmd_cone, "ball connectivity of a positive cone (evidence only)", fuel); pres(sp)
    sp.add_argument("--chi", required=True, help="coefficients in the free-part basis, e.g. '1,0'")
    sp.add_argument("--radius", type=positive, required=True)
    sp = add("semiconj", cmd_semiconj, "semi-conjugacy of two automorphisms", fuel); pres(sp)
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--beta", required=True)
    sp = add("iso-deranged", cmd_iso_deranged, "isomorphism of two deranged extensions", fuel)
    sp.add_argument("base_a")
    sp.add_argument("base_b")
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--beta", required=True)
    sp.add_argument("--psi", default=None, help="an isomorphism from the first base to the second")
    sp.add_argument("--t", default="t")
    sp = add("braid-iso", cmd_braid_iso, "isomorphism of B_n x Z and B_n x|_iota Z extensions")
    sp.add_argument("n", type=int)
    sp.add_argument("kind", choices=isomorphism.BRAID_KINDS)
    sp.add_argument("m", type=int)
    sp.add_argument("kind2", choices=isomorphism.BRAID_KINDS)
    sp = add("express", cmd_express, "express an automorphism in given ones", fuel); pres(sp)
    sp.add_argument("--target", required=True)
    sp.add_argument("--gen", action="append", required=True)
    sp.add_argument("--inverse", action="append", help="INDEX:MAP, the inverse of --gen number INDEX")
    sp = add("swap", cmd_swap, "the two presentations of (H x|_phi Z) x Z"); pres(sp)
    sp.add_argument("--map", required=True)
    sp.add_argument("--t", default="t")
    sp.add_argument("--s", default="s")
    sp = add("word", cmd_member_word, "is a word trivial (normal closure membership)", fuel); pres(sp)
    sp.add_argument("word")
    return p


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else USAGE_ERROR
    try:
        if args.command == "enumerate":
            return cmd_enumerate(args, out)
        outcome = args.func(args)
    except (UsageError, ValueError) as exc:
        if getattr(args, "json", False):
            out.write(dump({"command": args.command, "status": "error", "exit_code": USAGE_ERROR,
                            "result": {"message": str(exc)}}) + "\n")
        else:
            err.write(f"zext {args.command}: error: {exc}\n")
        return USAGE_ERROR
    if args.json:
        out.write(dump({"command": args.command, "status": outcome.status,
                        "exit_code": outcome.code, "result": outcome.result}) + "\n")
    else:
        out.write(outcome.text + "\n")
    return outcome.code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
