"""Formula trees, parsing and printing for the strict-implication language
and the classical bimodal language.

Both languages share the propositional node classes (``Atom``, ``Top``,
``Bot``, ``And``, ``Or``, ``Imp``).  ``Sto`` only occurs in the
strict-implication language; ``Not``, ``BoxI`` and ``BoxM`` only in the
bimodal one.  Negation and the unary box of the strict-implication language
are definitional and expand on construction (see :func:`neg` and
:func:`box`).

ASCII tokens::

    T  F  ~  &  |  ->  ~>  []  [i]  [m]  <i>  <m>

Binding, strongest first: unary, ``~>``, ``&``, ``|``, ``->``.  ``~>`` and
``->`` associate to the right, ``&`` and ``|`` to the left.  Putting ``&``
above ``|`` is a convention of this package; it only affects parsing.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

STO = "sto"
BI = "bi"


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Sto:
    """Strict implication ``left ~> right``."""

    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Not:
    """Classical negation (bimodal language only)."""

    arg: "Formula"


@dataclass(frozen=True)
class BoxI:
    arg: "Formula"


@dataclass(frozen=True)
class BoxM:
    arg: "Formula"


Formula = Union[Atom, Top, Bot, And, Or, Imp, Sto, Not, BoxI, BoxM]
BiFormula = Formula

BINARY = (And, Or, Imp, Sto)
UNARY = (Not, BoxI, BoxM)


def neg(f: Formula) -> Formula:
    """Intuitionistic negation, ``f -> F``."""
    return Imp(f, Bot())


def box(f: Formula) -> Formula:
    """The unary box of the strict-implication language, ``T ~> f``."""
    return Sto(Top(), f)


def dia_i(f: Formula) -> Formula:
    return Not(BoxI(Not(f)))


def dia_m(f: Formula) -> Formula:
    return Not(BoxM(Not(f)))


def children(f: Formula) -> tuple:
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, UNARY):
        return (f.arg,)
    return ()


def atoms(f: Formula) -> list[str]:
    """Atom names occurring in ``f``, sorted."""
    found = {g.name for g in subformulas(f) if isinstance(g, Atom)}
    return sorted(found)


def subformulas(f: Formula) -> tuple:
    """All subformulas of ``f`` in post-order of first occurrence.

    ``f`` itself is always the last entry.
    """
    seen: dict = {}
    stack = [(f, False)]
    while stack:
        node, expanded = stack.pop()
        if node in seen:
            continue
        if expanded:
            seen[node] = None
            continue
        stack.append((node, True))
        for c in reversed(children(node)):
            if c not in seen:
                stack.append((c, False))
    return tuple(seen)


def substitute(f: Formula, sigma: Mapping[str, Formula]) -> Formula:
    """Simultaneous substitution of formulas for atoms."""
    if isinstance(f, Atom):
        return sigma.get(f.name, f)
    if isinstance(f, BINARY):
        return type(f)(substitute(f.left, sigma), substitute(f.right, sigma))
    if isinstance(f, UNARY):
        return type(f)(substitute(f.arg, sigma))
    return f


def language_of(f: Formula) -> str | None:
    """``"sto"`` or ``"bi"`` if ``f`` pins the language down, else ``None``.

    Raises ``ValueError`` for formulas mixing ``Sto`` with bimodal nodes.
    """
    kinds = {type(g) for g in subformulas(f)}
    has_sto = Sto in kinds
    has_bi = bool(kinds & set(UNARY))
    if has_sto and has_bi:
        raise ValueError("formula mixes ~> with bimodal connectives")
    if has_sto:
        return STO
    if has_bi:
        return BI
    return None


# ---------------------------------------------------------------------------
# printing

_PREC = {Imp: 1, Or: 2, And: 3, Sto: 4}
_SYM = {Imp: "->", Or: "|", And: "&", Sto: "~>"}
_RIGHT_ASSOC = (Imp, Sto)
_UNARY_PREC = 5


def _prec(f: Formula, lang: str) -> int:
    if lang == STO and _is_sto_unary(f):
        return _UNARY_PREC
    if isinstance(f, BINARY):
        return _PREC[type(f)]
    return _UNARY_PREC + 1 if not isinstance(f, UNARY) else _UNARY_PREC


def _is_sto_unary(f: Formula) -> bool:
    return (isinstance(f, Imp) and isinstance(f.right, Bot)) or (
        isinstance(f, Sto) and isinstance(f.left, Top)
    )


def to_text(f: Formula, lang: str = STO) -> str:
    """Render ``f`` with the fewest parentheses that parse back to ``f``.

    In the strict-implication language ``Imp(x, F)`` prints as ``~x`` and
    ``Sto(T, x)`` as ``[]x``; in the bimodal language ``~`` is the primitive
    ``Not``.
    """
    if lang not in (STO, BI):
        raise ValueError(f"unknown language {lang!r}")
    return _render(f, lang)


def _render(f: Formula, lang: str) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Bot):
        return "F"
    if lang == STO and isinstance(f, Imp) and isinstance(f.right, Bot):
        return "~" + _operand(f.left, lang)
    if lang == STO and isinstance(f, Sto) and isinstance(f.left, Top):
        return "[]" + _operand(f.right, lang)
    if isinstance(f, UNARY):
        if lang == STO:
            raise ValueError(f"{type(f).__name__} is not in the ~> language")
        prefix = {Not: "~", BoxI: "[i]", BoxM: "[m]"}[type(f)]
        return prefix + _operand(f.arg, lang)
    if isinstance(f, Sto) and lang == BI:
        raise ValueError("~> is not in the bimodal language")
    p = _PREC[type(f)]
    left = _render(f.left, lang)
    right = _render(f.right, lang)
    lp, rp = _prec(f.left, lang), _prec(f.right, lang)
    if lp < p or (lp == p and isinstance(f, _RIGHT_ASSOC)):
        left = f"({left})"
    if rp < p or (rp == p and not isinstance(f, _RIGHT_ASSOC)):
        right = f"({right})"
    return f"{left} {_SYM[type(f)]} {right}"


def _operand(f: Formula, lang: str) -> str:
    s = _render(f, lang)
    return s if _prec(f, lang) >= _UNARY_PREC else f"({s})"


# ---------------------------------------------------------------------------
# parsing


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<op>->|~>|\[\]|\[i\]|\[m\]|<i>|<m>|[~&|()])|(?P<ident>[A-Za-z_][A-Za-z0-9_']*))"
)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    """Split ``text`` into ``(kind, value, byte_offset)`` triples."""
    data = text
    tokens = []
    pos = 0
    while True:
        while pos < len(data) and data[pos].isspace():
            pos += 1
        if pos >= len(data):
            break
        m = _TOKEN_RE.match(data, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {data[pos]!r}", _byte_offset(text, pos))
        start = m.start("op") if m.group("op") else m.start("ident")
        if m.group("op"):
            tokens.append(("op", m.group("op"), _byte_offset(text, start)))
        else:
            ident = m.group("ident")
            kind = "const" if ident in ("T", "F") else "ident"
            tokens.append((kind, ident, _byte_offset(text, start)))
        pos = m.end()
    tokens.append(("eof", "", _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


class _Parser:
    def __init__(self, text: str, lang: str):
        if lang not in (STO, BI):
            raise ValueError(f"unknown language {lang!r}")
        self.tokens = tokenize(text)
        self.i = 0
        self.lang = lang

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def accept(self, value: str) -> bool:
        kind, v, _ = self.peek()
        if kind == "op" and v == value:
            self.i += 1
            return True
        return False

    def parse(self) -> Formula:
        f = self.imp()
        kind, v, off = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected token {v!r}", off)
        return f

    def imp(self) -> Formula:
        left = self.disj()
        if self.accept("->"):
            return Imp(left, self.imp())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.accept("|"):
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.sto()
        while self.accept("&"):
            f = And(f, self.sto())
        return f

    def sto(self) -> Formula:
        left = self.unary()
        kind, v, off = self.peek()
        if kind == "op" and v == "~>":
            if self.lang == BI:
                raise ParseError("'~>' is not allowed in the bimodal language", off)
            self.i += 1
            return Sto(left, self.sto())
        return left

    def unary(self) -> Formula:
        kind, v, off = self.peek()
        if kind == "op":
            if v == "~":
                self.i += 1
                arg = self.unary()
                return neg(arg) if self.lang == STO else Not(arg)
            if v == "[]":
                if self.lang == BI:
                    raise ParseError("'[]' is not allowed in the bimodal language", off)
                self.i += 1
                return box(self.unary())
            if v in ("[i]", "[m]", "<i>", "<m>"):
                if self.lang == STO:
                    raise ParseError(f"{v!r} is not allowed in the ~> language", off)
                self.i += 1
                arg = self.unary()
                return {"[i]": BoxI, "[m]": BoxM, "<i>": dia_i, "<m>": dia_m}[v](arg)
        return self.atomic()

    def atomic(self) -> Formula:
        kind, v, off = self.take()
        if kind == "ident":
            return Atom(v)
        if kind == "const":
            return Top() if v == "T" else Bot()
        if kind == "op" and v == "(":
            f = self.imp()
            kind2, v2, off2 = self.take()
            if not (kind2 == "op" and v2 == ")"):
                raise ParseError("expected ')'", off2)
            return f
        if kind == "eof":
            raise ParseError("unexpected end of input", off)
        raise ParseError(f"unexpected token {v!r}", off)


def parse(text: str, lang: str = STO) -> Formula:
    """Parse ``text`` in the given language (``"sto"`` or ``"bi"``)."""
    return _Parser(text, lang).parse()


# ---------------------------------------------------------------------------
# random formulas


def random_formula(
    rng: random.Random,
    depth: int,
    lang: str = STO,
    atom_names: tuple = ("p", "q"),
) -> Formula:
    """A random formula of depth at most ``depth``."""
    if depth <= 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.1:
            return Top()
        if r < 0.2:
            return Bot()
        return Atom(rng.choice(atom_names))
    if lang == STO:
        op = rng.choice((And, Or, Imp, Sto, Sto))
        return op(
            random_formula(rng, depth - 1, lang, atom_names),
            random_formula(rng, depth - 1, lang, atom_names),
        )
    op = rng.choice((And, Or, Imp, Not, BoxI, BoxM, BoxM))
    if op in UNARY:
        return op(random_formula(rng, depth - 1, lang, atom_names))
    return op(
        random_formula(rng, depth - 1, lang, atom_names),
        random_formula(rng, depth - 1, lang, atom_names),
    )


def formula_set(
    count: int, seed: int = 0, lang: str = STO, depth: int = 3, atom_names: tuple = ("p", "q")
) -> list:
    """``count`` distinct random formulas, reproducible from ``seed``."""
    rng = random.Random(seed)
    out: dict = {}
    while len(out) < count:
        out.setdefault(random_formula(rng, depth, lang, atom_names), None)
    return list(out)


def iter_nodes(f: Formula) -> Iterator[Formula]:
    yield f
    for c in children(f):
        yield from iter_nodes(c)
