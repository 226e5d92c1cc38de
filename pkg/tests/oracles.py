"""Slow reference implementations used to cross-check the package.

Nothing here imports the package's semantics, frames or parser: worlds are
plain labels, relations are sets of pairs, truth sets are frozensets.
"""

from __future__ import annotations

import itertools
import re

from hllogic.syntax import And, Atom, Bot, BoxI, BoxM, Imp, Not, Or, Sto, Top


# -- parsing: precedence climbing, a different technique from the package --

_TOK = re.compile(r"\s*(~>|->|\[\]|\[i\]|\[m\]|<i>|<m>|[~&|()]|[A-Za-z_][A-Za-z0-9_]*)")
_BIN = {"->": (1, "right", Imp), "|": (2, "left", Or), "&": (3, "left", And), "~>": (4, "right", Sto)}


def ref_parse(text: str, lang: str = "sto"):
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOK.match(text, pos)
        if not m:
            raise SyntaxError(pos)
        toks.append(m.group(1))
        pos = m.end()
    toks.append(None)
    i = 0

    def peek():
        return toks[i]

    def take():
        nonlocal i
        i += 1
        return toks[i - 1]

    def primary():
        t = take()
        if t == "(":
            f = expr(0)
            if take() != ")":
                raise SyntaxError("paren")
            return f
        if t == "~":
            f = primary()
            return Not(f) if lang == "bi" else Imp(f, Bot())
        if t == "[]" and lang == "sto":
            return Sto(Top(), primary())
        if t == "[i]" and lang == "bi":
            return BoxI(primary())
        if t == "[m]" and lang == "bi":
            return BoxM(primary())
        if t == "<i>" and lang == "bi":
            return Not(BoxI(Not(primary())))
        if t == "<m>" and lang == "bi":
            return Not(BoxM(Not(primary())))
        if t == "T":
            return Top()
        if t == "F":
            return Bot()
        if t and re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", t):
            return Atom(t)
        raise SyntaxError(t)

    def expr(min_prec):
        left = primary()
        while peek() in _BIN and (peek() != "~>" or lang == "sto"):
            prec, assoc, ctor = _BIN[peek()]
            if prec < min_prec:
                break
            take()
            right = expr(prec if assoc == "right" else prec + 1)
            left = ctor(left, right)
        return left

    f = expr(0)
    if peek() is not None:
        raise SyntaxError(peek())
    return f


# -- frames as pair sets ----------------------------------------------------


def all_relations(worlds):
    pairs = [(a, b) for a in worlds for b in worlds]
    for bitsel in range(1 << len(pairs)):
        yield frozenset(p for k, p in enumerate(pairs) if bitsel >> k & 1)


def is_preorder(worlds, r) -> bool:
    return all((a, a) in r for a in worlds) and all(
        (a, c) in r for (a, b) in r for (b2, c) in r if b == b2
    )


def is_poset(worlds, r) -> bool:
    return is_preorder(worlds, r) and all(not ((a, b) in r and (b, a) in r) or a == b for a in worlds for b in worlds)


def coherent(prec, sq) -> bool:
    return all((x, z) in sq for (x, y) in prec for (y2, z) in sq if y == y2)


def sto_frames(n: int):
    """All labeled strict-implication frames on ``w0..w{n-1}`` by generate and test."""
    worlds = [f"w{i}" for i in range(n)]
    for prec in all_relations(worlds):
        if not is_poset(worlds, prec):
            continue
        for sq in all_relations(worlds):
            if coherent(prec, sq):
                yield worlds, prec, sq


def subsets(worlds):
    for k in range(len(worlds) + 1):
        for c in itertools.combinations(worlds, k):
            yield frozenset(c)


def upsets(worlds, prec):
    return [s for s in subsets(worlds) if all(b in s for (a, b) in prec if a in s)]


# -- truth by recursion on the formula ----------------------------------------


def truth(worlds, r1, r2, val, f) -> frozenset:
    X = frozenset(worlds)

    def box(r, s):
        return frozenset(x for x in worlds if all(y in s for (a, y) in r if a == x))

    def go(g):
        if isinstance(g, Atom):
            return frozenset(val.get(g.name, ()))
        if isinstance(g, Top):
            return X
        if isinstance(g, Bot):
            return frozenset()
        if isinstance(g, And):
            return go(g.left) & go(g.right)
        if isinstance(g, Or):
            return go(g.left) | go(g.right)
        if isinstance(g, Imp):
            return box(r1, (X - go(g.left)) | go(g.right))
        if isinstance(g, Sto):
            return box(r2, (X - go(g.left)) | go(g.right))
        if isinstance(g, Not):
            return X - go(g.arg)
        if isinstance(g, BoxI):
            return box(r1, go(g.arg))
        if isinstance(g, BoxM):
            return box(r2, go(g.arg))
        raise TypeError(g)

    return go(f)


def truth_bi(worlds, ri, rm, val, f) -> frozenset:
    """Classical clauses: implication is material here."""
    X = frozenset(worlds)

    def box(r, s):
        return frozenset(x for x in worlds if all(y in s for (a, y) in r if a == x))

    def go(g):
        if isinstance(g, Atom):
            return frozenset(val.get(g.name, ()))
        if isinstance(g, Top):
            return X
        if isinstance(g, Bot):
            return frozenset()
        if isinstance(g, And):
            return go(g.left) & go(g.right)
        if isinstance(g, Or):
            return go(g.left) | go(g.right)
        if isinstance(g, Imp):
            return (X - go(g.left)) | go(g.right)
        if isinstance(g, Not):
            return X - go(g.arg)
        if isinstance(g, BoxI):
            return box(ri, go(g.arg))
        if isinstance(g, BoxM):
            return box(rm, go(g.arg))
        raise TypeError(g)

    return go(f)


def atom_names(f):
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            out.add(g.name)
        for k in ("left", "right", "arg"):
            if hasattr(g, k):
                stack.append(getattr(g, k))
    return sorted(out)


def valid(worlds, r1, r2, f, candidates, bimodal=False) -> bool:
    names = atom_names(f)
    ev = truth_bi if bimodal else truth
    X = frozenset(worlds)
    for choice in itertools.product(candidates, repeat=len(names)):
        if ev(worlds, r1, r2, dict(zip(names, choice)), f) != X:
            return False
    return True


# -- lattices -----------------------------------------------------------------


def lattice_filters(elements, le):
    """Prime filters by brute force over all subsets."""
    out = []
    for s in subsets(elements):
        s = set(s)
        if not s or len(s) == len(elements):
            continue
        if any(b not in s for a in s for b in elements if le(a, b)):
            continue
        ok = True
        for a in s:
            for b in s:
                m = [c for c in elements if le(c, a) and le(c, b)]
                meet = next(c for c in m if all(le(d, c) for d in m))
                if meet not in s:
                    ok = False
        for a in elements:
            for b in elements:
                j = [c for c in elements if le(a, c) and le(b, c)]
                join = next(c for c in j if all(le(c, d) for d in j))
                if join in s and a not in s and b not in s:
                    ok = False
        if ok:
            out.append(frozenset(s))
    return out


def s4k_admissible_closure(frame, seeds):
    """Least family containing ``seeds`` that is a Boolean algebra closed
    under both boxes, as masks.  Works on the frame's public fields only."""
    n = frame.n
    full = (1 << n) - 1

    def box(rel, a):
        return sum(1 << x for x in range(n) if rel[x] & ~a & full == 0)

    fam = {0, full} | set(seeds)
    while True:
        new = set(fam)
        for a in fam:
            new |= {full & ~a, box(frame.rel1, a), box(frame.rel2, a)}
            for b in fam:
                new.add(a & b)
        if new == fam:
            return tuple(sorted(fam))
        fam = new
