"""Finite frames for both semantics.

World sets are Python ints used as bitmasks over the frame's world order;
a relation is stored as a tuple of successor masks (``rel[i]`` is the set of
``j`` with ``i R j``).  Constructors never repair their input: use the
``validate_*`` functions to check invariants and :func:`sto_closure` to
repair coherence explicitly.
"""

from __future__ import annotations

import enum
import itertools
import os
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

DEFAULT_MAX_CANDIDATES = 10**7

STO = "sto"
S4K = "s4k"


class FrameError(ValueError):
    """Raised with every violated invariant, as ``(kind, witness)`` pairs."""

    def __init__(self, violations: list):
        self.violations = list(violations)
        kinds = ", ".join(f"{k}{w}" for k, w in self.violations[:5])
        more = "" if len(self.violations) <= 5 else f" (+{len(self.violations) - 5} more)"
        super().__init__(f"invalid frame: {kinds}{more}")

    @property
    def kinds(self) -> set:
        return {k for k, _ in self.violations}


class KindMismatch(ValueError):
    pass


class BoundTooLarge(ValueError):
    pass


class BhlRequired(ValueError):
    pass


# ---------------------------------------------------------------------------
# bit helpers


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def rel_from_pairs(index: dict, pairs: Iterable, what: str = "relation") -> tuple:
    succ = [0] * len(index)
    for pair in pairs:
        a, b = pair
        try:
            succ[index[a]] |= 1 << index[b]
        except KeyError as exc:
            raise FrameError([("UnknownWorld", (what, exc.args[0]))]) from None
    return tuple(succ)


def rel_pairs(worlds: Sequence, rel: Sequence[int]) -> list:
    return [(worlds[i], worlds[j]) for i in range(len(rel)) for j in bits(rel[i])]


def compose(r: Sequence[int], s: Sequence[int]) -> tuple:
    """Relational composition ``x (r;s) z`` iff ``x r y s z`` for some ``y``."""
    out = []
    for m in r:
        acc = 0
        for y in bits(m):
            acc |= s[y]
        out.append(acc)
    return tuple(out)


def converse(r: Sequence[int]) -> tuple:
    n = len(r)
    out = [0] * n
    for i, m in enumerate(r):
        for j in bits(m):
            out[j] |= 1 << i
    return tuple(out)


def subrel(r: Sequence[int], s: Sequence[int]) -> bool:
    return all((a & ~b) == 0 for a, b in zip(r, s))


def reflexive_violations(r: Sequence[int]) -> list:
    return [i for i, m in enumerate(r) if not (m >> i) & 1]


def transitive_violation(r: Sequence[int]):
    for x, m in enumerate(r):
        for y in bits(m):
            missing = r[y] & ~m
            if missing:
                return (x, y, next(bits(missing)))
    return None


def antisymmetric_violation(r: Sequence[int]):
    for x, m in enumerate(r):
        for y in bits(m):
            if y != x and (r[y] >> x) & 1:
                return (x, y)
    return None


def transitive_closure(r: Sequence[int]) -> tuple:
    r = list(r)
    n = len(r)
    for k in range(n):
        for i in range(n):
            if (r[i] >> k) & 1:
                r[i] |= r[k]
    return tuple(r)


@lru_cache(maxsize=8192)
def box_table(succ: tuple) -> np.ndarray:
    """``table[a]`` is the mask of worlds all of whose successors lie in ``a``."""
    n = len(succ)
    arr = np.arange(1 << n, dtype=np.int64)
    table = np.zeros(1 << n, dtype=np.int64)
    for x, s in enumerate(succ):
        table |= ((arr & s) == s).astype(np.int64) << x
    table.setflags(write=False)
    return table


def up_closed_masks(succ: tuple) -> tuple:
    """All masks ``a`` with ``succ[x] <= a`` for every ``x`` in ``a``."""
    return _up_closed(tuple(succ))


@lru_cache(maxsize=4096)
def _up_closed(succ: tuple) -> tuple:
    n = len(succ)
    arr = np.arange(1 << n, dtype=np.int64)
    ok = np.ones(1 << n, dtype=bool)
    for x, s in enumerate(succ):
        ok &= (((arr >> x) & 1) == 0) | ((arr & s) == s)
    return tuple(int(v) for v in np.nonzero(ok)[0])


def up_closure(succ: Sequence[int], mask: int) -> int:
    out = mask
    for x in bits(mask):
        out |= succ[x]
    return out


# ---------------------------------------------------------------------------
# frame types


@dataclass(frozen=True)
class _Frame:
    worlds: tuple
    rel1: tuple
    rel2: tuple

    kind = ""

    @property
    def n(self) -> int:
        return len(self.worlds)

    @property
    def full(self) -> int:
        return (1 << len(self.worlds)) - 1

    @cached_property
    def index(self) -> dict:
        return {w: i for i, w in enumerate(self.worlds)}

    def mask(self, names: Iterable) -> int:
        m = 0
        for w in names:
            m |= 1 << self.index[w]
        return m

    def names(self, mask: int) -> list:
        return [self.worlds[i] for i in bits(mask)]

    def pairs1(self) -> list:
        return rel_pairs(self.worlds, self.rel1)

    def pairs2(self) -> list:
        return rel_pairs(self.worlds, self.rel2)

    @cached_property
    def box1(self) -> np.ndarray:
        return box_table(self.rel1)

    @cached_property
    def box2(self) -> np.ndarray:
        return box_table(self.rel2)

    def encoding(self, perm: Sequence[int] | None = None) -> tuple:
        """Adjacency encoding, optionally after renaming world ``i`` to ``perm[i]``."""
        n = self.n
        if perm is None:
            perm = range(n)
        out = []
        for rel in (self.rel1, self.rel2):
            code = 0
            for x in range(n):
                for y in bits(rel[x]):
                    code |= 1 << (perm[x] * n + perm[y])
            out.append(code)
        return tuple(out)

    def canonical_encoding(self) -> tuple:
        return min(self.encoding(p) for p in itertools.permutations(range(self.n)))


@dataclass(frozen=True)
class StoFrame(_Frame):
    """Poset ``rel1`` (the order) with a second relation ``rel2``."""

    kind = STO

    @classmethod
    def from_pairs(cls, worlds, prec, sq) -> "StoFrame":
        worlds = tuple(worlds)
        index = {w: i for i, w in enumerate(worlds)}
        return cls(worlds, rel_from_pairs(index, prec, "preceq"), rel_from_pairs(index, sq, "sqsubset"))

    @property
    def prec(self) -> tuple:
        return self.rel1

    @property
    def sq(self) -> tuple:
        return self.rel2

    @cached_property
    def upsets(self) -> tuple:
        return up_closed_masks(self.rel1)

    def is_upset(self, mask: int) -> bool:
        return up_closure(self.rel1, mask) == mask

    def as_s4k(self) -> "S4KFrame":
        return S4KFrame(self.worlds, self.rel1, self.rel2)


@dataclass(frozen=True)
class S4KFrame(_Frame):
    """Preorder ``rel1`` (R_i) with an arbitrary relation ``rel2`` (R_m)."""

    kind = S4K

    @classmethod
    def from_pairs(cls, worlds, ri, rm) -> "S4KFrame":
        worlds = tuple(worlds)
        index = {w: i for i, w in enumerate(worlds)}
        return cls(worlds, rel_from_pairs(index, ri, "Ri"), rel_from_pairs(index, rm, "Rm"))

    @property
    def ri(self) -> tuple:
        return self.rel1

    @property
    def rm(self) -> tuple:
        return self.rel2

    @property
    def is_partial_order(self) -> bool:
        return antisymmetric_violation(self.rel1) is None

    @property
    def is_bhl(self) -> bool:
        return subrel(compose(self.rel1, self.rel2), self.rel2)

    @property
    def is_m_transitive(self) -> bool:
        return transitive_violation(self.rel2) is None


@dataclass(frozen=True)
class GeneralStoFrame:
    frame: StoFrame
    admissible: tuple = field(default=())

    kind = STO

    @classmethod
    def full(cls, frame: StoFrame) -> "GeneralStoFrame":
        """Every upset admissible."""
        return cls(frame, tuple(frame.upsets))

    @cached_property
    def prec_refinement_failures(self) -> list:
        f = self.frame
        out = []
        for x in range(f.n):
            for y in range(f.n):
                if (f.rel1[x] >> y) & 1:
                    continue
                if not any((a >> x) & 1 and not (a >> y) & 1 for a in self.admissible):
                    out.append((f.worlds[x], f.worlds[y]))
        return out

    @cached_property
    def sq_refinement_failures(self) -> list:
        f = self.frame
        table = f.box2
        full = f.full
        out = []
        for x in range(f.n):
            for y in range(f.n):
                if (f.rel2[x] >> y) & 1:
                    continue
                found = False
                for a in self.admissible:
                    if not (a >> y) & 1:
                        continue
                    for b in self.admissible:
                        if (b >> y) & 1:
                            continue
                        if (int(table[(~a | b) & full]) >> x) & 1:
                            found = True
                            break
                    if found:
                        break
                if not found:
                    out.append((f.worlds[x], f.worlds[y]))
        return out

    @property
    def prec_refined(self) -> bool:
        return not self.prec_refinement_failures

    @property
    def sq_refined(self) -> bool:
        return not self.sq_refinement_failures

    @property
    def descriptive(self) -> bool:
        return self.prec_refined and self.sq_refined

    def admissible_names(self) -> list:
        return [self.frame.names(a) for a in self.admissible]


@dataclass(frozen=True)
class GeneralS4KFrame:
    frame: S4KFrame
    admissible: tuple = field(default=())

    kind = S4K

    @classmethod
    def full(cls, frame: S4KFrame) -> "GeneralS4KFrame":
        """Every subset admissible."""
        return cls(frame, tuple(range(1 << frame.n)))

    def _tight_failures(self, rel, table) -> list:
        f = self.frame
        out = []
        for x in range(f.n):
            for y in range(f.n):
                if (rel[x] >> y) & 1:
                    continue
                if not any((int(table[a]) >> x) & 1 and not (a >> y) & 1 for a in self.admissible):
                    out.append((f.worlds[x], f.worlds[y]))
        return out

    @cached_property
    def differentiation_failures(self) -> list:
        f = self.frame
        return [
            (f.worlds[x], f.worlds[y])
            for x in range(f.n)
            for y in range(f.n)
            if x != y and not any((a >> x) & 1 and not (a >> y) & 1 for a in self.admissible)
        ]

    @cached_property
    def tightness_failures(self) -> list:
        f = self.frame
        return [("i",) + w for w in self._tight_failures(f.rel1, f.box1)] + [
            ("m",) + w for w in self._tight_failures(f.rel2, f.box2)
        ]

    @property
    def differentiated(self) -> bool:
        return not self.differentiation_failures

    @property
    def tight(self) -> bool:
        return not self.tightness_failures

    def admissible_names(self) -> list:
        return [self.frame.names(a) for a in self.admissible]


# ---------------------------------------------------------------------------
# validation


def _order_violations(worlds, rel, antisymmetric: bool) -> list:
    out = []
    for i in reflexive_violations(rel):
        out.append(("NotReflexive", (worlds[i],)))
    t = transitive_violation(rel)
    if t is not None:
        out.append(("NotTransitive", tuple(worlds[i] for i in t)))
    if antisymmetric:
        a = antisymmetric_violation(rel)
        if a is not None:
            out.append(("NotAntisymmetric", tuple(worlds[i] for i in a)))
    return out


def coherence_violation(prec: Sequence[int], sq: Sequence[int]):
    """First ``(x, y, z)`` with ``x <= y``, ``y sq z`` but not ``x sq z``."""
    for x, m in enumerate(prec):
        for y in bits(m):
            missing = sq[y] & ~sq[x]
            if missing:
                return (x, y, next(bits(missing)))
    return None


def sto_violations(frame: StoFrame) -> list:
    out = []
    order = _order_violations(frame.worlds, frame.rel1, True)
    if order:
        out.append(("NotPoset", order))
    for x, m in enumerate(frame.rel1):
        for y in bits(m):
            for z in bits(frame.rel2[y] & ~frame.rel2[x]):
                out.append(("CoherenceViolation", tuple(frame.worlds[i] for i in (x, y, z))))
    return out


def _check_raw(worlds) -> tuple:
    worlds = tuple(worlds)
    if not worlds:
        raise FrameError([("EmptyFrame", ())])
    if len(set(worlds)) != len(worlds):
        raise FrameError([("DuplicateWorld", tuple(w for w in worlds if worlds.count(w) > 1))])
    return worlds


def validate_sto(worlds, prec, sq) -> StoFrame:
    """Build a strict-implication frame from pair lists, or raise ``FrameError``."""
    frame = StoFrame.from_pairs(_check_raw(worlds), prec, sq)
    problems = sto_violations(frame)
    if problems:
        raise FrameError(problems)
    return frame


def sto_closure(worlds, prec, sq) -> StoFrame:
    """Least coherent extension of ``sq`` over the poset ``prec``."""
    frame = StoFrame.from_pairs(_check_raw(worlds), prec, sq)
    order = _order_violations(frame.worlds, frame.rel1, True)
    if order:
        raise FrameError([("NotPoset", order)])
    return close_sto(frame)


def close_sto(frame: StoFrame) -> StoFrame:
    # x <= y sq z  =>  x sq z, i.e. sq[x] absorbs sq[y] for every y above x
    sq = tuple(_union(frame.rel2[y] for y in bits(frame.rel1[x])) for x in range(frame.n))
    return StoFrame(frame.worlds, frame.rel1, sq)


def _union(masks) -> int:
    out = 0
    for m in masks:
        out |= m
    return out


def s4k_violations(frame: S4KFrame) -> list:
    order = _order_violations(frame.worlds, frame.rel1, False)
    return [("NotPreorder", order)] if order else []


def validate_s4k(worlds, ri, rm) -> S4KFrame:
    frame = S4KFrame.from_pairs(_check_raw(worlds), ri, rm)
    problems = s4k_violations(frame)
    if problems:
        raise FrameError(problems)
    return frame


def general_sto_violations(g: GeneralStoFrame) -> list:
    f = g.frame
    out = []
    adm = set(g.admissible)
    for a in g.admissible:
        if not f.is_upset(a):
            out.append(("NotUpset", tuple(f.names(a))))
    if 0 not in adm:
        out.append(("MissingEmpty", ()))
    if f.full not in adm:
        out.append(("MissingTop", ()))
    full = f.full
    for a in g.admissible:
        for b in g.admissible:
            for op, val in (
                ("meet", a & b),
                ("join", a | b),
                ("imp", int(f.box1[(~a | b) & full])),
                ("sto", int(f.box2[(~a | b) & full])),
            ):
                if val not in adm:
                    out.append(("NotClosed", (op, tuple(f.names(a)), tuple(f.names(b)))))
    return out


def validate_general_sto(frame: StoFrame, admissible: Iterable) -> GeneralStoFrame:
    problems = sto_violations(frame)
    g = GeneralStoFrame(frame, tuple(sorted(set(admissible))))
    problems += general_sto_violations(g)
    if problems:
        raise FrameError(problems)
    return g


def general_s4k_violations(g: GeneralS4KFrame) -> list:
    f = g.frame
    full = f.full
    adm = set(g.admissible)
    out = []
    if 0 not in adm:
        out.append(("MissingEmpty", ()))
    for a in g.admissible:
        for op, val in (("not", full & ~a), ("[i]", int(f.box1[a])), ("[m]", int(f.box2[a]))):
            if val not in adm:
                out.append(("NotClosed", (op, tuple(f.names(a)))))
        for b in g.admissible:
            if a & b not in adm:
                out.append(("NotClosed", ("meet", tuple(f.names(a)), tuple(f.names(b)))))
    return out


def validate_general_s4k(frame: S4KFrame, admissible: Iterable) -> GeneralS4KFrame:
    problems = s4k_violations(frame)
    g = GeneralS4KFrame(frame, tuple(sorted(set(admissible))))
    problems += general_s4k_violations(g)
    if problems:
        raise FrameError(problems)
    return g


def boolean_closure(n: int, sets: Iterable[int]) -> tuple:
    """Smallest family of subsets of ``n`` worlds containing ``sets`` and closed
    under complement and intersection.

    Built from the atoms of the generated algebra, so the cost is linear in
    the output size.
    """
    full = (1 << n) - 1
    blocks = [full]
    for s in sets:
        nxt = []
        for b in blocks:
            for part in (b & s, b & ~s & full):
                if part:
                    nxt.append(part)
        blocks = nxt
    out = []
    for choice in range(1 << len(blocks)):
        m = 0
        for i in bits(choice):
            m |= blocks[i]
        out.append(m)
    return tuple(sorted(out))


# ---------------------------------------------------------------------------
# frame conditions


class FrameCondition(enum.Enum):
    SubPrec = "SubPrec"
    IrSucc = "IrSucc"
    PTrans = "PTrans"
    Bhl = "Bhl"
    SemiTrans = "SemiTrans"
    Strength = "Strength"
    PartialOrder = "PartialOrder"
    MTrans = "MTrans"


_STO_ONLY = {FrameCondition.SubPrec, FrameCondition.IrSucc, FrameCondition.PTrans}
_S4K_ONLY = {
    FrameCondition.Bhl,
    FrameCondition.SemiTrans,
    FrameCondition.PartialOrder,
    FrameCondition.MTrans,
}


def _frame_of(f):
    return f.frame if isinstance(f, (GeneralStoFrame, GeneralS4KFrame)) else f


def _sub_witness(f, r, s):
    for x, (a, b) in enumerate(zip(r, s)):
        extra = a & ~b
        if extra:
            return (f.worlds[x], f.worlds[next(bits(extra))])
    return None


def check_condition(frame, cond) -> tuple:
    """``(holds, witness)``; ``witness`` is ``None`` when the condition holds.

    ``cond`` is a :class:`FrameCondition` or any callable taking the frame and
    returning a bool or a ``(bool, witness)`` pair.
    """
    f = _frame_of(frame)
    if callable(cond) and not isinstance(cond, FrameCondition):
        res = cond(f)
        return res if isinstance(res, tuple) else (bool(res), None)
    cond = FrameCondition(cond)
    if cond in _STO_ONLY and f.kind != STO:
        raise KindMismatch(f"{cond.value} applies to strict-implication frames")
    if cond in _S4K_ONLY and f.kind != S4K:
        raise KindMismatch(f"{cond.value} applies to bimodal frames")
    w = f.worlds
    if cond in (FrameCondition.SubPrec, FrameCondition.Strength):
        wit = _sub_witness(f, f.rel2, f.rel1)
    elif cond is FrameCondition.IrSucc:
        bad = [x for x in range(f.n) if not (f.rel1[x] & f.rel2[x])]
        wit = (w[bad[0]],) if bad else None
    elif cond in (FrameCondition.PTrans, FrameCondition.MTrans):
        t = transitive_violation(f.rel2)
        wit = None if t is None else tuple(w[i] for i in t)
    elif cond is FrameCondition.Bhl:
        wit = None
        for x in range(f.n):
            for y in bits(f.rel1[x]):
                missing = f.rel2[y] & ~f.rel2[x]
                if missing:
                    wit = (w[x], w[y], w[next(bits(missing))])
                    break
            if wit:
                break
    elif cond is FrameCondition.SemiTrans:
        wit = _sub_witness(f, compose(f.rel2, f.rel2), compose(f.rel2, f.rel1))
    elif cond is FrameCondition.PartialOrder:
        a = antisymmetric_violation(f.rel1)
        wit = None if a is None else tuple(w[i] for i in a)
    else:  # pragma: no cover
        raise ValueError(cond)
    return (wit is None, wit)


# ---------------------------------------------------------------------------
# enumeration


def max_candidates() -> int:
    env = os.environ.get("HL_MAX_CANDIDATES")
    return int(env) if env else DEFAULT_MAX_CANDIDATES


@lru_cache(maxsize=None)
def preorders(n: int, antisymmetric: bool = False) -> tuple:
    """All reflexive transitive relations on ``n`` points, as successor tuples,
    in ascending order of their off-diagonal bit pattern."""
    off = [(i, j) for i in range(n) for j in range(n) if i != j]
    out = []
    for code in range(1 << len(off)):
        rel = [1 << i for i in range(n)]
        for k in bits(code):
            i, j = off[k]
            rel[i] |= 1 << j
        rel = tuple(rel)
        if transitive_violation(rel) is not None:
            continue
        if antisymmetric and antisymmetric_violation(rel) is not None:
            continue
        out.append(rel)
    return tuple(out)


def _generation_plan(n: int, kind: str, filters: Sequence) -> list:
    """For each admissible ``rel1``, the list of candidate ``rel2`` rows per world.

    ``rel2`` is produced column by column: ``choices[z]`` lists the allowed
    predecessor sets of world ``z``.
    """
    conds = {c for c in filters if isinstance(c, FrameCondition)}
    antisym = kind == STO or FrameCondition.PartialOrder in conds
    downward = kind == STO or FrameCondition.Bhl in conds
    plan = []
    for rel1 in preorders(n, antisym):
        if downward:
            cols = up_closed_masks(converse(rel1))
        else:
            cols = tuple(range(1 << n))
        plan.append((rel1, cols))
    return plan


def estimate_count(n: int, kind: str, filters: Sequence = ()) -> int:
    if n >= 6:
        # Even the discrete order alone admits 2^(n*n) second relations.
        return 1 << (n * n)
    return sum(len(cols) ** n for _, cols in _generation_plan(n, kind, filters))


def enumerate_frames(
    n: int,
    kind: str = STO,
    filters: Sequence = (),
    dedup: bool = False,
    cap: int | None = None,
) -> Iterator:
    """Every labeled frame on worlds ``w0..w{n-1}`` passing ``filters``.

    With ``dedup`` only the representative whose adjacency encoding is least
    among all renamings is kept, so each isomorphism class appears once.
    """
    if n < 1:
        raise ValueError("size must be at least 1")
    if kind not in (STO, S4K):
        raise ValueError(f"unknown frame kind {kind!r}")
    for c in filters:
        if isinstance(c, FrameCondition):
            if kind == S4K and c in _STO_ONLY:
                raise KindMismatch(f"{c.value} applies to strict-implication frames")
            if kind == STO and c in _S4K_ONLY:
                raise KindMismatch(f"{c.value} applies to bimodal frames")
    cap = max_candidates() if cap is None else cap
    est = estimate_count(n, kind, filters)
    if est > cap:
        raise BoundTooLarge(f"{est} candidate frames exceed the cap {cap} (set HL_MAX_CANDIDATES)")
    worlds = tuple(f"w{i}" for i in range(n))
    cls = StoFrame if kind == STO else S4KFrame
    perms = list(itertools.permutations(range(n))) if dedup else None
    for rel1, cols in _generation_plan(n, kind, filters):
        for preds in itertools.product(cols, repeat=n):
            rel2 = converse(preds)
            frame = cls(worlds, rel1, rel2)
            if not all(check_condition(frame, c)[0] for c in filters):
                continue
            if dedup:
                enc = frame.encoding()
                if any(frame.encoding(p) < enc for p in perms):
                    continue
            yield frame


def enumerate_upto(max_n: int, kind: str = STO, filters: Sequence = (), dedup: bool = False):
    for n in range(1, max_n + 1):
        yield from enumerate_frames(n, kind, filters, dedup)


# ---------------------------------------------------------------------------
# cluster quotient


def clusters(rel: Sequence[int]) -> list:
    """Mutual-reachability classes of a preorder as masks, ordered by least member."""
    n = len(rel)
    seen = 0
    out = []
    for x in range(n):
        if (seen >> x) & 1:
            continue
        c = 0
        for y in range(n):
            if (rel[x] >> y) & 1 and (rel[y] >> x) & 1:
                c |= 1 << y
        c |= 1 << x
        seen |= c
        out.append(c)
    return out


def cluster_label(worlds: Sequence, mask: int) -> str:
    members = [worlds[i] for i in bits(mask)]
    return members[0] if len(members) == 1 else "[" + ",".join(members) + "]"


def cluster_quotient(frame: S4KFrame) -> tuple:
    """Quotient by ``R_i``-clusters.

    Returns ``(quotient, mapping)`` where ``mapping`` sends each world name to
    its cluster's name.  Singleton clusters keep the world's own name.
    """
    f = _frame_of(frame)
    ok, wit = check_condition(f, FrameCondition.Bhl) if f.kind == S4K else (True, None)
    if not ok:
        raise BhlRequired(f"R_i;R_m is not contained in R_m: {wit}")
    cls = clusters(f.rel1)
    k = len(cls)
    where = {}
    for ci, c in enumerate(cls):
        for x in bits(c):
            where[x] = ci

    def lift(rel):
        out = [0] * k
        for x in range(f.n):
            for y in bits(rel[x]):
                out[where[x]] |= 1 << where[y]
        return tuple(out)

    names = tuple(cluster_label(f.worlds, c) for c in cls)
    q = S4KFrame(names, lift(f.rel1), lift(f.rel2))
    mapping = {f.worlds[x]: names[where[x]] for x in range(f.n)}
    return q, mapping


def is_pmorphism(src, dst, mapping: dict) -> tuple:
    """Check the forth and back clauses for both relations.

    Returns ``(ok, witness)``; ``witness`` names the failing clause.
    """
    src, dst = _frame_of(src), _frame_of(dst)
    h = [dst.index[mapping[w]] for w in src.worlds]
    for tag, rs, rd in (("rel1", src.rel1, dst.rel1), ("rel2", src.rel2, dst.rel2)):
        for x in range(src.n):
            image = 0
            for y in bits(rs[x]):
                image |= 1 << h[y]
            if image & ~rd[h[x]]:
                return False, ("forth", tag, src.worlds[x])
            if rd[h[x]] & ~image:
                return False, ("back", tag, src.worlds[x])
    return True, None


# ---------------------------------------------------------------------------
# fixtures

FIX_PT = StoFrame.from_pairs(["a"], [("a", "a")], [("a", "a")])

FIX_CHAIN2 = StoFrame.from_pairs(
    ["a", "b"], [("a", "a"), ("a", "b"), ("b", "b")], [("a", "b"), ("b", "b")]
)

_CHAIN4 = ["w", "x", "y", "z"]
FIG1_WORLDS = tuple(_CHAIN4)
FIG1_PREC = tuple((a, b) for i, a in enumerate(_CHAIN4) for b in _CHAIN4[i:])
FIG1_SQ = (("w", "x"), ("x", "y"), ("y", "y"), ("z", "z"))

FIX_IELE = sto_closure(FIG1_WORLDS, FIG1_PREC, FIG1_SQ)

# A three-point frame satisfying SubPrec and IrSucc on which the Box axiom fails.
FIX_IELE3 = validate_sto(
    ["a", "b", "c"],
    [("a", "a"), ("a", "b"), ("a", "c"), ("b", "b"), ("b", "c"), ("c", "c")],
    [("a", "a"), ("a", "c"), ("b", "c"), ("c", "c")],
)
