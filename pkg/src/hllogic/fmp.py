"""Selective filtration on finite bimodal models.

Worlds are grouped by agreement on all subformulas of a formula; witnesses
are then selected class by class so that the chosen subset keeps the truth
of every subformula.  Whenever the construction says "pick", the choice is
deterministic: an already selected world if one qualifies, otherwise the
least world that is maximal in its class, otherwise the least world whose
same-class successors all see it back.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .frames import (
    FrameCondition,
    GeneralS4KFrame,
    S4KFrame,
    bits,
    check_condition,
    popcount,
    transitive_closure,
)
from .semantics import Model, plain, truth_sets
from .syntax import Formula, random_formula, subformulas, to_text


class NotRefuted(ValueError):
    pass


class RmNotTransitive(ValueError):
    pass


class BhlRequired(ValueError):
    pass


# ---------------------------------------------------------------------------
# phi-equivalence


@dataclass(frozen=True)
class PhiPartition:
    classes: tuple  # class id per world index
    count: int

    def members(self, cid: int) -> int:
        return sum(1 << x for x, c in enumerate(self.classes) if c == cid)

    def same(self, x: int, y: int) -> bool:
        return self.classes[x] == self.classes[y]


def phi_partition(model: Model, phi: Formula) -> PhiPartition:
    """Classes of worlds agreeing on every subformula, numbered by least member."""
    f = plain(model.frame)
    subs = subformulas(phi)
    sets = truth_sets(model, subs)
    sig = {}
    classes = []
    for x in range(f.n):
        key = tuple((s >> x) & 1 for s in sets)
        classes.append(sig.setdefault(key, len(sig)))
    return PhiPartition(tuple(classes), len(sig))


def _rel(f, which: str):
    if which == "i":
        return f.rel1
    if which == "m":
        return f.rel2
    raise ValueError(f"relation must be 'i' or 'm', not {which!r}")


def _require_m_transitive(f):
    ok, wit = check_condition(f, FrameCondition.MTrans)
    if not ok:
        raise RmNotTransitive(f"R_m is not transitive: {wit}")


def maximal_states(model: Model, phi: Formula, rel: str = "i", part: PhiPartition | None = None) -> int:
    """Worlds with no distinct same-class successor along ``rel``."""
    f = plain(model.frame)
    if rel == "m":
        _require_m_transitive(f)
    part = part or phi_partition(model, phi)
    r = _rel(f, rel)
    out = 0
    for x in range(f.n):
        same = part.members(part.classes[x]) & ~(1 << x)
        if not r[x] & same:
            out |= 1 << x
    return out


def _cluster_maximal(r, part: PhiPartition, x: int) -> bool:
    same = part.members(part.classes[x])
    return all((r[z] >> x) & 1 for z in bits(r[x] & same))


class _Picker:
    def __init__(self, model: Model, part: PhiPartition):
        f = plain(model.frame)
        self.f = f
        self.part = part
        self.maximal = {k: self._max(_rel(f, k)) for k in ("i", "m")}

    def _max(self, r):
        out = 0
        for x in range(self.f.n):
            same = self.part.members(self.part.classes[x]) & ~(1 << x)
            if not r[x] & same:
                out |= 1 << x
        return out

    def pick(self, eligible: int, rel: str, chosen: int) -> int:
        reuse = eligible & chosen
        if reuse:
            return next(bits(reuse))
        strict = eligible & self.maximal[rel]
        if strict:
            return next(bits(strict))
        r = _rel(self.f, rel)
        for z in bits(eligible):
            if _cluster_maximal(r, self.part, z):
                return z
        raise AssertionError("no maximal witness; relation not transitive?")  # pragma: no cover

    def witnesses(self, x: int, rel: str, chosen: int) -> list:
        """``(class, witness)`` for each class reachable from ``x`` along ``rel``."""
        r = _rel(self.f, rel)[x]
        out = []
        seen = set()
        for z in bits(r):
            c = self.part.classes[z]
            if c in seen:
                continue
            seen.add(c)
            w = self.pick(r & self.part.members(c), rel, chosen)
            chosen |= 1 << w
            out.append((c, w))
        return out


def _preconditions(model: Model):
    f = plain(model.frame)
    _require_m_transitive(f)
    ok, wit = check_condition(f, FrameCondition.Bhl)
    if not ok:
        raise BhlRequired(f"R_i;R_m is not contained in R_m: {wit}")


# ---------------------------------------------------------------------------
# X_omega


@dataclass
class Construction:
    worlds: int  # selected world mask
    x0: int | None = None
    trace: list = field(default_factory=list)

    def names(self, model: Model) -> list:
        return plain(model.frame).names(self.worlds)


def _close(picker: _Picker, chosen: int, first_rel: str, trace: list, label: str) -> int:
    """Alternate witness steps for the two relations until neither adds a world."""
    rels = ("i", "m") if first_rel == "i" else ("m", "i")
    idle = 0
    step = 0
    f = picker.f
    while idle < 2:
        rel = rels[step % 2]
        added = []
        new = chosen
        for x in bits(chosen):
            for c, w in picker.witnesses(x, rel, new):
                if not (new >> w) & 1:
                    added.append((f.worlds[x], c, f.worlds[w]))
                new |= 1 << w
        trace.append((label, step + 1, rel, added))
        idle = 0 if new != chosen else idle + 1
        chosen = new
        step += 1
    return chosen


def build_x_omega(model: Model, phi: Formula) -> Construction:
    """Start at a maximal refuting world, then add witnesses for ``R_i`` and
    ``R_m`` in alternation until nothing changes."""
    _preconditions(model)
    f = plain(model.frame)
    part = phi_partition(model, phi)
    truth = truth_sets(model, [phi])[0]
    refuting = f.full & ~truth
    if not refuting:
        raise NotRefuted("the formula holds at every world")
    picker = _Picker(model, part)
    x0 = _pick_start(picker, refuting)
    trace = [("base", 0, "i", [(None, part.classes[x0], f.worlds[x0])])]
    chosen = _close(picker, 1 << x0, "i", trace, "step")
    return Construction(chosen, x0, trace)


def _pick_start(picker: _Picker, refuting: int) -> int:
    strict = refuting & picker.maximal["i"]
    if strict:
        return next(bits(strict))
    r = picker.f.rel1
    for z in bits(refuting):
        if _cluster_maximal(r, picker.part, z):
            return z
    raise AssertionError("unreachable")  # pragma: no cover


# ---------------------------------------------------------------------------
# cofinal extension


def _m_cluster(rm, x: int) -> int:
    c = 1 << x
    for y in bits(rm[x]):
        if (rm[y] >> x) & 1:
            c |= 1 << y
    return c


def final_clusters(frame) -> list:
    """``R_m``-final clusters: a world with its mutual successors, closed
    under ``R_m``.  Worlds without successors form singleton final clusters."""
    f = plain(frame)
    rm = f.rel2
    out = []
    for x in range(f.n):
        c = _m_cluster(rm, x)
        if rm[x] & ~c == 0 and c not in out:
            out.append(c)
    return out


def is_rm_cofinal(frame, ys: int, strict: bool = False) -> tuple:
    """Every ``R_m`` step out of ``ys`` can be answered by a step back into it.

    With ``strict`` the target itself must step into ``ys``; otherwise a target
    inside ``ys`` also counts.  Returns ``(ok, witness)``.
    """
    f = plain(frame)
    rm = f.rel2
    for y in bits(ys):
        for z in bits(rm[y]):
            if rm[z] & ys:
                continue
            if not strict and (ys >> z) & 1:
                continue
            return False, (f.worlds[y], f.worlds[z])
    return True, None


@dataclass
class CofinalResult:
    worlds: int
    f_sets: list  # (cluster mask, F_j mask, levels)
    bound: int
    classes: int
    trace: list = field(default_factory=list)


def _build_fj(picker: _Picker, cluster: int, c: int) -> tuple:
    part = picker.part
    level = 0
    seen = set()
    for x in bits(cluster):
        k = part.classes[x]
        if k in seen:
            continue
        seen.add(k)
        level |= 1 << picker.pick(cluster & part.members(k), "m", level)
    fj = level
    levels = [level]
    for _ in range(c):
        nxt = 0
        for y in bits(level):
            for _k, w in picker.witnesses(y, "i", fj | nxt):
                if not (fj >> w) & 1:
                    nxt |= 1 << w
        nxt &= ~fj
        if not nxt:
            break
        fj |= nxt
        levels.append(nxt)
        level = nxt
    return fj, levels


def cofinal_extension(model: Model, phi: Formula, x_omega) -> CofinalResult:
    """Add a bounded set ``F_j`` inside every ``R_m``-final cluster that the
    selection reaches but does not meet, then restore witness closure."""
    _preconditions(model)
    f = plain(model.frame)
    part = phi_partition(model, phi)
    picker = _Picker(model, part)
    chosen = x_omega.worlds if isinstance(x_omega, Construction) else int(x_omega)
    c = part.count
    bound = c ** (c + 1)
    finals = final_clusters(f)
    rm = f.rel2
    f_sets = []
    trace = []
    done = set()
    while True:
        reach = 0
        for y in bits(chosen):
            reach |= rm[y]
        reach |= chosen
        # final clusters reachable from the selection
        todo = [
            cl
            for cl in finals
            if cl not in done and cl & reach and not cl & chosen
        ]
        if not todo:
            break
        for cl in todo:
            done.add(cl)
            fj, levels = _build_fj(picker, cl, c)
            f_sets.append((cl, fj, levels))
            trace.append(("F_j", f.names(cl), f.names(fj)))
            chosen |= fj
        chosen = _close(picker, chosen, "i", trace, "closure")
    return CofinalResult(chosen, f_sets, bound, c, trace)


# ---------------------------------------------------------------------------
# submodels


def submodel(model: Model, ys: int) -> Model:
    """Restriction to ``ys``: relations, admissible sets and valuation are cut
    down to the selected worlds, which keep their order."""
    f = plain(model.frame)
    keep = list(bits(ys))
    pos = {x: i for i, x in enumerate(keep)}

    def cut(mask):
        return sum(1 << pos[x] for x in bits(mask & ys))

    worlds = tuple(f.worlds[x] for x in keep)
    frame = S4KFrame(worlds, tuple(cut(f.rel1[x]) for x in keep), tuple(cut(f.rel2[x]) for x in keep))
    if isinstance(model.frame, GeneralS4KFrame):
        frame = GeneralS4KFrame(frame, tuple(sorted({cut(a) for a in model.frame.admissible})))
    val = {p: cut(m) for p, m in model.valuation.items()}
    return Model(frame, val)


@dataclass
class SubmodelReport:
    precondition_failures: list
    agreement_failures: list
    agreement_checked: bool

    @property
    def ok(self) -> bool:
        return not self.precondition_failures and not self.agreement_failures and self.agreement_checked

    def __bool__(self) -> bool:
        return self.ok


def precondition_failures(model: Model, ys: int, phi: Formula, part: PhiPartition | None = None) -> list:
    f = plain(model.frame)
    part = part or phi_partition(model, phi)
    out = []
    for rel in ("i", "m"):
        r = _rel(f, rel)
        for y in bits(ys):
            for x in bits(r[y]):
                if not r[y] & ys & part.members(part.classes[x]):
                    out.append((f.worlds[y], f.worlds[x], rel))
    return out


def verify_submodel_truth(model: Model, ys: int, phi: Formula) -> SubmodelReport:
    """Check the witness condition on ``ys`` and, when it holds, that every
    subformula has the same truth value at each selected world in the
    submodel as in the full model."""
    f = plain(model.frame)
    part = phi_partition(model, phi)
    pre = precondition_failures(model, ys, phi, part)
    if pre:
        return SubmodelReport(pre, [], False)
    subs = subformulas(phi)
    big = truth_sets(model, subs)
    sm = submodel(model, ys)
    small = truth_sets(sm, subs)
    keep = list(bits(ys))
    bad = []
    for i, x in enumerate(keep):
        for psi, a, b in zip(subs, big, small):
            if bool((a >> x) & 1) != bool((b >> i) & 1):
                bad.append((f.worlds[x], to_text(psi, "bi")))
    return SubmodelReport([], bad, True)


# ---------------------------------------------------------------------------
# random instances


def random_bhl_frame(rng: random.Random, n: int, density: float = 0.3) -> S4KFrame:
    """A random preorder ``R_i`` with a transitive ``R_m`` absorbing ``R_i;R_m``."""
    ri = [1 << x for x in range(n)]
    rm = [0] * n
    for x in range(n):
        for y in range(n):
            if x != y and rng.random() < density:
                ri[x] |= 1 << y
            if rng.random() < density:
                rm[x] |= 1 << y
    ri = list(transitive_closure(ri))
    while True:
        new = list(rm)
        for x in range(n):
            for y in bits(ri[x]):
                new[x] |= rm[y]
            for y in bits(rm[x]):
                new[x] |= rm[y]
        if new == rm:
            break
        rm = new
    return S4KFrame(tuple(f"w{i}" for i in range(n)), tuple(ri), tuple(rm))


def random_refuting_instance(rng: random.Random, max_worlds: int = 5, depth: int = 3, atom_names=("p", "q")):
    """``(model, phi)`` with ``phi`` false somewhere in the model."""
    while True:
        n = rng.randint(1, max_worlds)
        frame = random_bhl_frame(rng, n, rng.choice((0.2, 0.35, 0.5)))
        val = {p: rng.randrange(1 << n) for p in atom_names}
        model = Model(frame, val)
        phi = random_formula(rng, depth, "bi", atom_names)
        if truth_sets(model, [phi])[0] != frame.full:
            return model, phi


@dataclass
class MinimizeResult:
    x_omega: Construction
    cofinal: CofinalResult
    report: SubmodelReport
    submodel: Model
    refutes: bool


def minimize(model: Model, phi: Formula) -> MinimizeResult:
    """Run both constructions and check the resulting submodel."""
    xo = build_x_omega(model, phi)
    co = cofinal_extension(model, phi, xo)
    rep = verify_submodel_truth(model, co.worlds, phi)
    sm = submodel(model, co.worlds)
    sub_frame = plain(sm.frame)
    refutes = truth_sets(sm, [phi])[0] != sub_frame.full
    return MinimizeResult(xo, co, rep, sm, refutes)


def fj_sizes(result: CofinalResult) -> list:
    return [popcount(fj) for _, fj, _ in result.f_sets]


def class_count_bound(phi: Formula) -> int:
    return 2 ** len(subformulas(phi))


def worlds_of(model: Model, mask: int) -> Sequence:
    return plain(model.frame).names(mask)
