"""Finite HL-algebras, complex algebras and prime-filter duality.

Elements are referred to by index; ``leq[a]`` is the bitmask of elements
above ``a`` and ``sto[a][b]`` the index of ``a ~> b``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .frames import (
    GeneralStoFrame,
    StoFrame,
    bits,
    popcount,
)


class AlgebraError(ValueError):
    """Carries every violated law as ``(kind, witness)``."""

    def __init__(self, violations: list):
        self.violations = list(violations)
        shown = ", ".join(f"{k}{w}" for k, w in self.violations[:5])
        super().__init__(f"invalid algebra: {shown}")

    @property
    def kinds(self) -> set:
        return {k for k, _ in self.violations}


class NotDescriptive(ValueError):
    def __init__(self, witness):
        super().__init__(f"general frame is not refined: {witness}")
        self.witness = witness


@dataclass(frozen=True)
class HLAlgebra:
    elements: tuple
    leq: tuple  # leq[a] = mask of b with a <= b
    sto: tuple  # sto[a][b] = index of a ~> b
    sets: tuple | None = field(default=None, compare=False)  # world masks, for set algebras

    @property
    def size(self) -> int:
        return len(self.elements)

    def le(self, a: int, b: int) -> bool:
        return bool((self.leq[a] >> b) & 1)

    @cached_property
    def index(self) -> dict:
        return {e: i for i, e in enumerate(self.elements)}

    @cached_property
    def top(self) -> int:
        return next(a for a in range(self.size) if all(self.le(b, a) for b in range(self.size)))

    @cached_property
    def bot(self) -> int:
        return next(a for a in range(self.size) if all(self.le(a, b) for b in range(self.size)))

    @cached_property
    def meet(self) -> tuple:
        return _bound_table(self.leq, self.size, lower=True)

    @cached_property
    def join(self) -> tuple:
        return _bound_table(self.leq, self.size, lower=False)

    @cached_property
    def himp(self) -> tuple:
        n = self.size
        out = []
        for a in range(n):
            row = []
            for b in range(n):
                cands = [c for c in range(n) if self.le(self.meet[a][c], b)]
                row.append(_greatest(self, cands))
            out.append(tuple(row))
        return tuple(out)

    def label(self, a: int):
        return self.elements[a]

    def to_json(self) -> dict:
        e = self.elements
        n = self.size
        return {
            "elements": list(e),
            "leq": [[e[a], e[b]] for a in range(n) for b in bits(self.leq[a])],
            "sto": [[e[a], e[b], e[self.sto[a][b]]] for a in range(n) for b in range(n)],
        }


def _greatest(alg, cands):
    for c in cands:
        if all(alg.le(d, c) for d in cands):
            return c
    return None


def _bound_table(leq, n, lower: bool) -> tuple:
    def le(a, b):
        return (leq[a] >> b) & 1

    out = []
    for a in range(n):
        row = []
        for b in range(n):
            if lower:
                cands = [c for c in range(n) if le(c, a) and le(c, b)]
                best = [c for c in cands if all(le(d, c) for d in cands)]
            else:
                cands = [c for c in range(n) if le(a, c) and le(b, c)]
                best = [c for c in cands if all(le(c, d) for d in cands)]
            row.append(best[0] if best else None)
        out.append(tuple(row))
    return tuple(out)


# ---------------------------------------------------------------------------
# validation


def algebra_violations(alg: HLAlgebra, first_only: bool = False) -> list:
    n = alg.size
    out = []
    le = alg.le
    for a in range(n):
        if not le(a, a):
            out.append(("NotLattice", ("reflexivity", alg.elements[a])))
        for b in range(n):
            if a != b and le(a, b) and le(b, a):
                out.append(("NotLattice", ("antisymmetry", alg.elements[a], alg.elements[b])))
            for c in range(n):
                if le(a, b) and le(b, c) and not le(a, c):
                    out.append(("NotLattice", ("transitivity",) + tuple(alg.elements[i] for i in (a, b, c))))
    if out:
        return out
    meet, join = alg.meet, alg.join
    for a in range(n):
        for b in range(n):
            if meet[a][b] is None or join[a][b] is None:
                out.append(("NotLattice", ("bounds", alg.elements[a], alg.elements[b])))
    if out:
        return out
    E = alg.elements
    for a, b, c in itertools.product(range(n), repeat=3):
        if meet[a][join[b][c]] != join[meet[a][b]][meet[a][c]]:
            out.append(("NotDistributive", (E[a], E[b], E[c])))
            if first_only:
                return out
    himp = alg.himp
    for a in range(n):
        for b in range(n):
            if himp[a][b] is None:
                out.append(("NoHeytingImp", (E[a], E[b])))
    if out:
        return out
    top = alg.top
    s = alg.sto
    for a in range(n):
        if s[a][a] != top:
            out.append(("CAxiomViolation", (4, (E[a],))))
    for a, b, c in itertools.product(range(n), repeat=3):
        if meet[s[a][b]][s[a][c]] != s[a][meet[b][c]]:
            out.append(("CAxiomViolation", (1, (E[a], E[b], E[c]))))
        if meet[s[a][c]][s[b][c]] != s[join[a][b]][c]:
            out.append(("CAxiomViolation", (2, (E[a], E[b], E[c]))))
        if not le(meet[s[a][b]][s[b][c]], s[a][c]):
            out.append(("CAxiomViolation", (3, (E[a], E[b], E[c]))))
        if first_only and out:
            return out
    return out


def validate_algebra(elements: Sequence, leq: Iterable, sto: Iterable) -> HLAlgebra:
    """Build an algebra from element labels, order pairs and ``(a, b, a~>b)``
    triples, raising ``AlgebraError`` with every violated law."""
    elements = tuple(elements)
    if len(set(elements)) != len(elements):
        raise AlgebraError([("DuplicateElement", ())])
    idx = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    rows = [0] * n
    try:
        for a, b in leq:
            rows[idx[a]] |= 1 << idx[b]
        table = [[None] * n for _ in range(n)]
        for a, b, c in sto:
            table[idx[a]][idx[b]] = idx[c]
    except KeyError as exc:
        raise AlgebraError([("UnknownElement", (exc.args[0],))]) from None
    missing = [(elements[a], elements[b]) for a in range(n) for b in range(n) if table[a][b] is None]
    if missing:
        raise AlgebraError([("IncompleteTable", tuple(missing))])
    alg = HLAlgebra(elements, tuple(rows), tuple(tuple(r) for r in table))
    problems = algebra_violations(alg)
    if problems:
        raise AlgebraError(problems)
    return alg


# ---------------------------------------------------------------------------
# complex algebras


def set_label(frame, mask: int) -> str:
    return "{" + ",".join(frame.names(mask)) + "}"


def algebra_of(g: GeneralStoFrame) -> HLAlgebra:
    """The algebra of admissible sets of a general frame, ordered by inclusion."""
    f = g.frame
    sets = tuple(g.admissible)
    pos = {m: i for i, m in enumerate(sets)}
    n = len(sets)
    leq = tuple(sum(1 << j for j in range(n) if sets[i] & ~sets[j] == 0) for i in range(n))
    full = f.full
    table = f.box2
    sto = tuple(tuple(pos[int(table[(~a | b) & full])] for b in sets) for a in sets)
    return HLAlgebra(tuple(set_label(f, m) for m in sets), leq, sto, sets)


def complex_algebra(frame: StoFrame) -> HLAlgebra:
    """Upsets of ``frame`` with the frame's strict implication."""
    return algebra_of(GeneralStoFrame.full(frame))


# ---------------------------------------------------------------------------
# prime filters and the dual frame


def is_prime_filter(alg: HLAlgebra, fmask: int) -> bool:
    n = alg.size
    if fmask == 0 or (fmask >> alg.bot) & 1:
        return False
    for a in bits(fmask):
        if alg.leq[a] & ~fmask:
            return False
        for b in bits(fmask):
            if not (fmask >> alg.meet[a][b]) & 1:
                return False
    for a in range(n):
        for b in range(n):
            if (fmask >> alg.join[a][b]) & 1 and not ((fmask >> a) & 1 or (fmask >> b) & 1):
                return False
    return True


def prime_filters(alg: HLAlgebra) -> list:
    """Prime filters as element-index masks, smallest first.

    In a finite lattice every filter is principal, so the candidates are the
    up-sets of single non-bottom elements.
    """
    found = {alg.leq[a] for a in range(alg.size) if a != alg.bot and is_prime_filter(alg, alg.leq[a])}
    return sorted(found, key=lambda m: (popcount(m), sorted(bits(m))))


def filter_label(alg: HLAlgebra, fmask: int) -> str:
    return "up(" + str(alg.elements[_least(alg, fmask)]) + ")"


def _least(alg, fmask):
    for a in bits(fmask):
        if alg.leq[a] & fmask == fmask:
            return a
    raise ValueError("filter is not principal")


@dataclass(frozen=True)
class DualFrame:
    general: GeneralStoFrame
    filters: tuple  # filter masks, aligned with worlds
    hat: tuple  # hat[a] = world mask of filters containing a


def dual(alg: HLAlgebra) -> DualFrame:
    fs = prime_filters(alg)
    k = len(fs)
    n = alg.size
    prec = tuple(sum(1 << j for j in range(k) if fs[i] & ~fs[j] == 0) for i in range(k))
    s = alg.sto
    sq = []
    for p in fs:
        row = 0
        for j, q in enumerate(fs):
            ok = True
            for a in bits(q):
                for b in range(n):
                    if (p >> s[a][b]) & 1 and not (q >> b) & 1:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                row |= 1 << j
        sq.append(row)
    worlds = tuple(filter_label(alg, m) for m in fs)
    frame = StoFrame(worlds, prec, tuple(sq))
    hat = tuple(sum(1 << j for j in range(k) if (fs[j] >> a) & 1) for a in range(n))
    g = GeneralStoFrame(frame, tuple(sorted(set(hat))))
    return DualFrame(g, tuple(fs), hat)


def dual_frame(alg: HLAlgebra) -> GeneralStoFrame:
    """Prime filters ordered by inclusion, with admissible sets ``{p | a in p}``."""
    return dual(alg).general


# ---------------------------------------------------------------------------
# round trips


@dataclass
class IsoReport:
    iso: bool
    failures: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.iso


def round_trip_algebra(alg: HLAlgebra) -> IsoReport:
    """Check that ``a -> {p | a in p}`` is an isomorphism onto the algebra of
    admissible sets of the dual frame."""
    d = dual(alg)
    f = d.general.frame
    hat = d.hat
    full = f.full
    fails = []
    n = alg.size
    E = alg.elements
    if len(set(hat)) != n:
        fails.append(("NotInjective", [E[a] for a in range(n) if hat.count(hat[a]) > 1]))
    if set(hat) != set(d.general.admissible):
        fails.append(("NotSurjective", ()))
    if hat[alg.top] != full:
        fails.append(("Top", ()))
    if hat[alg.bot] != 0:
        fails.append(("Bottom", ()))
    for a in range(n):
        for b in range(n):
            ha, hb = hat[a], hat[b]
            checks = (
                ("meet", hat[alg.meet[a][b]], ha & hb),
                ("join", hat[alg.join[a][b]], ha | hb),
                ("imp", hat[alg.himp[a][b]], int(f.box1[(~ha | hb) & full])),
                ("sto", hat[alg.sto[a][b]], int(f.box2[(~ha | hb) & full])),
            )
            for op, lhs, rhs in checks:
                if lhs != rhs:
                    fails.append((op, (E[a], E[b])))
    return IsoReport(not fails, fails)


def key_identity_failures(alg: HLAlgebra) -> list:
    """Pairs where the set of filters containing ``a ~> b`` differs from the
    strict implication of the two element sets in the dual frame."""
    d = dual(alg)
    f = d.general.frame
    full = f.full
    out = []
    for a in range(alg.size):
        for b in range(alg.size):
            lhs = d.hat[alg.sto[a][b]]
            rhs = int(f.box2[(~d.hat[a] | d.hat[b]) & full])
            if lhs != rhs:
                out.append((alg.elements[a], alg.elements[b]))
    return out


def round_trip_frame(g: GeneralStoFrame) -> IsoReport:
    """Check that ``x -> {a in P | x in a}`` is an isomorphism from ``g`` onto
    the dual of its algebra of admissible sets."""
    if g.prec_refinement_failures:
        raise NotDescriptive(("preceq",) + g.prec_refinement_failures[0])
    if g.sq_refinement_failures:
        raise NotDescriptive(("sqsubset",) + g.sq_refinement_failures[0])
    f = g.frame
    alg = algebra_of(g)
    d = dual(alg)
    df = d.general.frame
    pos = {m: i for i, m in enumerate(d.filters)}
    fails = []
    image = []
    for x in range(f.n):
        xhat = sum(1 << i for i, a in enumerate(alg.sets) if (a >> x) & 1)
        if xhat not in pos:
            fails.append(("NotPrimeFilter", f.worlds[x]))
            image.append(None)
        else:
            image.append(pos[xhat])
    if fails:
        return IsoReport(False, fails)
    if len(set(image)) != f.n:
        fails.append(("NotInjective", ()))
    if len(set(image)) != df.n:
        fails.append(("NotSurjective", ()))
    for x in range(f.n):
        for y in range(f.n):
            for tag, src, dst in (("preceq", f.rel1, df.rel1), ("sqsubset", f.rel2, df.rel2)):
                if bool((src[x] >> y) & 1) != bool((dst[image[x]] >> image[y]) & 1):
                    fails.append((tag, (f.worlds[x], f.worlds[y])))
    for i, a in enumerate(alg.sets):
        mapped = sum(1 << image[x] for x in bits(a))
        if mapped != d.hat[i]:
            fails.append(("admissible", tuple(f.names(a))))
    return IsoReport(not fails, fails)


# ---------------------------------------------------------------------------
# small corpus


def chain_lattice(k: int) -> tuple:
    labels = tuple(str(i) for i in range(k))
    leq = tuple(sum(1 << j for j in range(i, k)) for i in range(k))
    return labels, leq


def boolean_square() -> tuple:
    labels = ("0", "a", "b", "1")
    leq = (0b1111, 0b1010, 0b1100, 0b1000)
    return labels, leq


SMALL_LATTICES = {
    "chain2": chain_lattice(2),
    "chain3": chain_lattice(3),
    "chain4": chain_lattice(4),
    "square": boolean_square(),
}


def _irreducibles(alg: HLAlgebra) -> tuple:
    n = alg.size
    ji = [
        a
        for a in range(n)
        if a != alg.bot and not any(alg.join[b][c] == a and b != a and c != a for b in range(n) for c in range(n))
    ]
    mi = [
        a
        for a in range(n)
        if a != alg.top and not any(alg.meet[b][c] == a and b != a and c != a for b in range(n) for c in range(n))
    ]
    return ji, mi


def sto_tables(labels: Sequence, leq: Sequence[int]) -> list:
    """All strict-implication tables on a finite distributive lattice that
    satisfy the four laws, as tuples of rows.

    Such a table is determined by its values on (join-irreducible,
    meet-irreducible) pairs, so only those are enumerated; the laws are then
    checked on the full table in bulk.
    """
    base = HLAlgebra(tuple(labels), tuple(leq), ())
    n = base.size
    ji, mi = _irreducibles(base)
    pairs = [(j, m) for j in ji for m in mi]
    meet = np.array(base.meet, dtype=np.int64)
    join = np.array(base.join, dtype=np.int64)
    leqm = np.array([[(leq[a] >> b) & 1 for b in range(n)] for a in range(n)], dtype=bool)
    top = base.top
    below = {a: [j for j in ji if base.le(j, a)] for a in range(n)}
    above = {b: [m for m in mi if base.le(b, m)] for b in range(n)}
    combos = np.array(list(itertools.product(range(n), repeat=len(pairs))), dtype=np.int64).reshape(-1, len(pairs))
    count = combos.shape[0]
    tables = np.full((count, n, n), top, dtype=np.int64)
    col = {pm: i for i, pm in enumerate(pairs)}
    for a in range(n):
        for b in range(n):
            acc = np.full(count, top, dtype=np.int64)
            for j in below[a]:
                for m in above[b]:
                    acc = meet[acc, combos[:, col[(j, m)]]]
            tables[:, a, b] = acc
    ok = np.ones(count, dtype=bool)
    for a in range(n):
        ok &= tables[:, a, a] == top
        for b in range(n):
            for c in range(n):
                sab, sac, sbc = tables[:, a, b], tables[:, a, c], tables[:, b, c]
                ok &= meet[sab, sac] == tables[:, a, meet[b, c]]
                ok &= meet[sac, tables[:, b, c]] == tables[:, join[a, b], c]
                ok &= leqm[meet[sab, sbc], sac]
    found = {tuple(tuple(int(v) for v in r) for r in tables[i]) for i in np.nonzero(ok)[0]}
    return sorted(found)


def algebra_corpus() -> list:
    """Every HL-algebra on each non-trivial distributive lattice with at most
    four elements, validated."""
    out = []
    for name, (labels, leq) in SMALL_LATTICES.items():
        for table in sto_tables(labels, leq):
            alg = HLAlgebra(labels, leq, table)
            problems = algebra_violations(alg, first_only=True)
            if problems:  # pragma: no cover - the bulk filter already applied the laws
                raise AssertionError(problems)
            out.append(alg)
    return out


def monotonicity_failures(alg: HLAlgebra) -> list:
    """Instances of ``a~>b <= (a&c)~>b`` or ``a~>b <= (a&c)~>(b&c)`` that fail."""
    n = alg.size
    s, meet = alg.sto, alg.meet
    out = []
    for a, b, c in itertools.product(range(n), repeat=3):
        if not alg.le(s[a][b], s[meet[a][c]][b]):
            out.append(("antitone", a, b, c))
        if not alg.le(s[a][b], s[meet[a][c]][meet[b][c]]):
            out.append(("meet-both", a, b, c))
    return out
