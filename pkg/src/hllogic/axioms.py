"""Named axioms over the atoms ``p``, ``q``, ``r``.

``AXIOMS`` maps an identifier to ``(lang, formula)``.  The arrow
necessitation rule is not a formula; it is kept as a premise/conclusion
pair in ``NA_RULE``.
"""

from __future__ import annotations

from .syntax import BI, STO, Formula, parse

_SOURCES = {
    "Ka": (STO, "(p ~> q) & (p ~> r) -> p ~> (q & r)"),
    "Di": (STO, "(p ~> r) & (q ~> r) -> (p | q) ~> r"),
    "Tr": (STO, "(p ~> q) & (q ~> r) -> p ~> r"),
    "Sa": (STO, "(p -> q) -> p ~> q"),
    "Sb": (STO, "p -> []p"),
    "IR": (STO, "p ~> q -> ~~(p -> q)"),
    "Box": (STO, "p ~> q -> [](p -> q)"),
    "Hug": (STO, "(p -> []q) -> p ~> q"),
    "P": (STO, "p ~> q -> [](p ~> q)"),
    "T": (STO, "[]p -> p"),
    "Four": (STO, "[]p -> [][]p"),
    "C4": (STO, "[][]p -> []p"),
    "SL": (STO, "([]p -> p) -> p"),
    "L": (STO, "[]([]p -> p) -> []p"),
    "AppA": (STO, "(p & (p ~> q)) ~> q"),
    "BHL": (BI, "[m]p -> [i][m]p"),
    "GrzI": (BI, "[i]([i](p -> [i]p) -> p) -> p"),
    "GrzM": (BI, "[m]([m](p -> [m]p) -> p) -> p"),
    "FourM": (BI, "[m]p -> [m][m]p"),
    "Mix": (BI, "[m]p -> [i][m][i]p"),
    "Sc": (BI, "[i]p -> [m]p"),
}

AXIOMS: dict[str, tuple[str, Formula]] = {
    name: (lang, parse(text, lang)) for name, (lang, text) in _SOURCES.items()
}

# Base axioms of the strict-implication logic; valid on every frame.
IA_AXIOMS = ("Ka", "Di", "Tr")

NA_RULE = (parse("p -> q"), parse("p ~> q"))


def axiom(name: str) -> Formula:
    try:
        return AXIOMS[name][1]
    except KeyError:
        raise KeyError(f"unknown axiom {name!r}; known: {', '.join(AXIOMS)}") from None


def axiom_lang(name: str) -> str:
    return AXIOMS[name][0]
