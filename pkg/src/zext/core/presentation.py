"""Finite presentations, generator maps, and their text/JSON forms."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from zext.core import words as W
from zext.core.words import Word

IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class ParseError(ValueError):
    """Malformed presentation or word text; ``pos`` is a 0-based offset."""

    def __init__(self, message: str, text: str, pos: int):
        self.message = message
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}: {text!r}")


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...] = ()

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        if len(set(gens)) != len(gens):
            raise ValueError(f"duplicate generator names in {gens}")
        for g in gens:
            if not IDENT.match(g):
                raise ValueError(f"invalid generator name {g!r}")
        n = len(gens)
        rels = tuple(W.free_reduce(r, n) for r in self.relators)
        object.__setattr__(self, "relators", rels)

    @classmethod
    def trusted(cls, generators: tuple[str, ...], relators: tuple[Word, ...]) -> "Presentation":
        """Build without validation; callers guarantee names and reduced relators."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "generators", generators)
        object.__setattr__(obj, "relators", relators)
        return obj

    @property
    def n(self) -> int:
        return len(self.generators)

    def index(self, name: str) -> int:
        try:
            return self.generators.index(name)
        except ValueError:
            raise KeyError(f"no generator named {name!r}") from None

    def word(self, text: str) -> Word:
        return parse_word(text, self.generators)

    def fresh_name(self, stem: str = "y") -> str:
        if stem not in self.generators:
            return stem
        k = 1
        while f"{stem}{k}" in self.generators:
            k += 1
        return f"{stem}{k}"

    def format_word(self, w: Word) -> str:
        return format_word(w, self.generators)

    def __str__(self) -> str:
        rels = ", ".join(self.format_word(r) for r in self.relators)
        return f"<{','.join(self.generators)} | {rels}>"

    def to_json(self) -> dict:
        return {"generators": list(self.generators),
                "relators": [W.to_pairs(r) for r in self.relators]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Presentation":
        gens = tuple(data["generators"])
        rels = tuple(W.from_pairs(map(tuple, r), len(gens)) for r in data.get("relators", []))
        return cls(gens, rels)


@dataclass(frozen=True)
class GenMap:
    """A map between presented groups given by images of the domain generators.

    Whether it defines a homomorphism is established separately.
    """

    domain: Presentation
    codomain: Presentation
    images: tuple[Word, ...]

    def __post_init__(self):
        imgs = tuple(W.free_reduce(w, self.codomain.n) for w in self.images)
        if len(imgs) != self.domain.n:
            raise ValueError(f"{len(imgs)} images for {self.domain.n} domain generators")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, P: Presentation) -> "GenMap":
        return cls(P, P, tuple(W.generator(i) for i in range(P.n)))

    @classmethod
    def from_strings(cls, domain: Presentation, images: Mapping[str, str] | Sequence[str],
                     codomain: Presentation | None = None) -> "GenMap":
        codomain = domain if codomain is None else codomain
        if isinstance(images, Mapping):
            unknown = set(images) - set(domain.generators)
            if unknown:
                raise ValueError(f"images given for unknown generators {sorted(unknown)}")
            missing = [g for g in domain.generators if g not in images]
            if missing:
                raise ValueError(f"no image given for {missing}")
            texts = [images[g] for g in domain.generators]
        else:
            texts = list(images)
        return cls(domain, codomain, tuple(codomain.word(t) for t in texts))

    def apply(self, w: Word) -> Word:
        return W.substitute(w, self.images)

    def __call__(self, w: Word) -> Word:
        return self.apply(w)

    def compose(self, inner: "GenMap") -> "GenMap":
        """``self o inner`` (apply ``inner`` first)."""
        if inner.codomain.generators != self.domain.generators:
            raise ValueError("cannot compose: alphabet mismatch")
        return GenMap(inner.domain, self.codomain, tuple(self.apply(w) for w in inner.images))

    def is_endo(self) -> bool:
        return self.domain == self.codomain

    def to_json(self) -> dict:
        return {"images": {g: self.codomain.format_word(w)
                           for g, w in zip(self.domain.generators, self.images)}}

    @classmethod
    def from_json(cls, data: Mapping, domain: Presentation,
                  codomain: Presentation | None = None) -> "GenMap":
        return cls.from_strings(domain, data["images"], codomain)

    def __str__(self) -> str:
        return ", ".join(f"{g} -> {self.codomain.format_word(w)}"
                         for g, w in zip(self.domain.generators, self.images))


def apply_map(m: GenMap, w: Word) -> Word:
    if w and max(w) >= 2 * m.domain.n:
        raise ValueError("word is not over the map's domain alphabet")
    return m.apply(w)


def format_word(w: Word, names: Sequence[str]) -> str:
    if not w:
        return "1"
    parts = []
    for i, e in W.to_pairs(w):
        parts.append(names[i] if e == 1 else f"{names[i]}^{e}")
    return "*".join(parts)


# --- text grammar -----------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<int>[+-]?\d+)|(?P<sym>[<>|,=*^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, generators: Sequence[str] | None = None):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.generators = list(generators) if generators is not None else None

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self, value: str | None = None, kind: str | None = None) -> tuple[str, str, int]:
        tok = self.peek()
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = repr(value) if value is not None else kind
            got = repr(tok[1]) if tok[0] != "end" else "end of input"
            raise ParseError(f"expected {want}, found {got}", self.text, tok[2])
        self.i += 1
        return tok

    def at(self, value: str) -> bool:
        return self.peek()[1] == value and self.peek()[0] == "sym"

    def presentation(self) -> Presentation:
        self.take("<")
        gens: list[str] = []
        if not self.at("|"):
            gens.append(self.take(kind="ident")[1])
            while self.at(","):
                self.take(",")
                gens.append(self.take(kind="ident")[1])
        seen = set()
        for g in gens:
            if g in seen:
                raise ParseError(f"duplicate generator {g!r}", self.text, 0)
            seen.add(g)
        self.generators = gens
        self.take("|")
        rels: list[Word] = []
        if not self.at(">"):
            rels.append(self.relation())
            while self.at(","):
                self.take(",")
                rels.append(self.relation())
        self.take(">")
        self.take(kind="end")
        return Presentation(tuple(gens), tuple(rels))

    def relation(self) -> Word:
        lhs = self.word()
        if self.at("="):
            self.take("=")
            rhs = self.word()
            return W.mul(lhs, W.inverse(rhs))
        return lhs

    def word(self) -> Word:
        parts = [self.term()]
        while True:
            if self.at("*"):
                self.take("*")
                parts.append(self.term())
            elif self.peek()[0] in ("ident", "int") or self.at("("):
                parts.append(self.term())
            else:
                break
        return W.mul(*parts)

    def term(self) -> Word:
        kind, value, pos = self.peek()
        if kind == "ident":
            self.take()
            if value not in self.generators:
                raise ParseError(f"unknown generator {value!r}", self.text, pos)
            base = W.generator(self.generators.index(value))
        elif kind == "int" and value == "1":
            self.take()
            base = W.EMPTY
        elif self.at("("):
            self.take("(")
            base = self.word()
            self.take(")")
        else:
            got = repr(value) if kind != "end" else "end of input"
            raise ParseError(f"expected a generator, '1' or '(', found {got}", self.text, pos)
        if self.at("^"):
            self.take("^")
            exp = int(self.take(kind="int")[1])
            return W.power(base, exp)
        return base


def parse_presentation(text: str) -> Presentation:
    """Parse ``<gens | rels>``; ``u = v`` is stored as the relator ``u v^-1``."""
    return _Parser(text).presentation()


def parse_word(text: str, generators: Sequence[str]) -> Word:
    p = _Parser(text, generators)
    w = p.word()
    p.take(kind="end")
    return w


def load_presentation(data: str) -> Presentation:
    """Accept grammar text or a JSON object."""
    stripped = data.strip()
    if stripped.startswith("{"):
        return Presentation.from_json(json.loads(stripped))
    return parse_presentation(stripped)
