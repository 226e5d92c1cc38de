"""The box-prefixing translation into the bimodal language and the frame
transforms relating the two semantics.

``sigma_hat`` keeps a strict-implication frame and Boolean-closes its
admissible sets; ``rho_hat`` composes ``R_i`` into ``R_m``, collapses
``R_i``-clusters and keeps the ``[i]``-images of admissible sets.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .axioms import axiom
from .frames import (
    FrameCondition,
    GeneralS4KFrame,
    GeneralStoFrame,
    S4KFrame,
    StoFrame,
    bits,
    boolean_closure,
    check_condition,
    clusters,
    cluster_label,
    compose,
)
from .semantics import Model, batch_valid, frame_valid, frame_valid_bi, truth_sets, valid_many
from .syntax import And, Atom, Bot, BoxI, BoxM, Formula, Imp, Or, Sto, Top


class CompanionKind(enum.Enum):
    Tau = "tau"
    Sigma = "sigma"


class PreconditionFailed(ValueError):
    def __init__(self, which: str, witness=None):
        super().__init__(f"precondition failed: {which} {witness if witness is not None else ''}".strip())
        self.which = which
        self.witness = witness


def gmt(phi: Formula) -> Formula:
    """Clause-by-clause translation; no simplification."""
    if isinstance(phi, Atom):
        return BoxI(phi)
    if isinstance(phi, (Top, Bot)):
        return phi
    if isinstance(phi, (And, Or, Imp)):
        return BoxI(type(phi)(gmt(phi.left), gmt(phi.right)))
    if isinstance(phi, Sto):
        return BoxI(BoxM(Imp(gmt(phi.left), gmt(phi.right))))
    raise TypeError(f"not a strict-implication formula: {phi!r}")


def companion_axioms(gamma: Iterable[Formula], kind=CompanionKind.Tau) -> list:
    """Translated ``gamma`` followed by BHL, plus GrzI for the Sigma kind.

    The S4 axioms for ``[i]`` are not listed: they hold on every frame with a
    preorder ``R_i``.
    """
    kind = CompanionKind(kind)
    out = [gmt(g) for g in gamma] + [axiom("BHL")]
    if kind is CompanionKind.Sigma:
        out.append(axiom("GrzI"))
    return out


# ---------------------------------------------------------------------------
# frame transforms


def as_general_sto(g) -> GeneralStoFrame:
    return g if isinstance(g, GeneralStoFrame) else GeneralStoFrame.full(g)


def as_general_s4k(f) -> GeneralS4KFrame:
    if isinstance(f, GeneralS4KFrame):
        return f
    if isinstance(f, StoFrame):
        f = f.as_s4k()
    return GeneralS4KFrame.full(f)


def sigma_hat(g) -> GeneralS4KFrame:
    g = as_general_sto(g)
    f = g.frame
    return GeneralS4KFrame(f.as_s4k(), boolean_closure(f.n, g.admissible))


@dataclass(frozen=True)
class RhoResult:
    general: GeneralStoFrame
    mapping: dict  # world -> cluster name
    cluster_masks: tuple  # aligned with the quotient's worlds


def rho(fr) -> RhoResult:
    F = as_general_s4k(fr)
    f = F.frame
    rm_star = compose(f.rel1, f.rel2)
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
    q = StoFrame(names, lift(f.rel1), lift(rm_star))
    adm = set(F.admissible)
    box = q.box1
    rho_p = set()
    for cmask in range(1 << k):
        union = 0
        for ci in bits(cmask):
            union |= cls[ci]
        if union in adm:
            rho_p.add(int(box[cmask]))
    g = GeneralStoFrame(q, tuple(sorted(rho_p)))
    mapping = {f.worlds[x]: names[where[x]] for x in range(f.n)}
    return RhoResult(g, mapping, tuple(cls))


def rho_hat(fr) -> GeneralStoFrame:
    """Strict-implication frame of ``R_i``-clusters with ``R_i;R_m`` as the
    second relation; a plain frame counts as having every subset admissible."""
    return rho(fr).general


def transfer_valuation(fr, valuation: dict) -> dict:
    """Cluster valuation ``p -> clusters inside [i]V(p)``."""
    F = as_general_s4k(fr)
    r = rho(F)
    box = F.frame.box1
    out = {}
    for p, m in valuation.items():
        boxed = int(box[m])
        out[p] = sum(1 << ci for ci, c in enumerate(r.cluster_masks) if c & boxed == c)
    return out


@dataclass
class Report:
    ok: bool
    details: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def rho_sigma_identity(g) -> Report:
    """Compare ``rho_hat(sigma_hat(g))`` with ``g`` field by field."""
    g = as_general_sto(g)
    back = rho_hat(sigma_hat(g))
    f, b = g.frame, back.frame
    diffs = []
    if f.worlds != b.worlds:
        diffs.append(("worlds", f.worlds, b.worlds))
    else:
        if f.rel1 != b.rel1:
            diffs.append(("preceq", f.pairs1(), b.pairs1()))
        if f.rel2 != b.rel2:
            diffs.append(("sqsubset", f.pairs2(), b.pairs2()))
        if tuple(sorted(g.admissible)) != back.admissible:
            diffs.append(("admissible", g.admissible_names(), back.admissible_names()))
    return Report(not diffs, diffs)


def translation_preservation(fr, phi: Formula, max_atoms: int | None = 3) -> Report:
    """Evaluate ``F |= t(phi)`` and ``rho_hat F |= phi``; ok iff they agree."""
    F = as_general_s4k(fr)
    lhs = frame_valid_bi(F, gmt(phi), max_atoms)
    rg = rho_hat(F)
    rhs = frame_valid(rg, phi, max_atoms)
    details = [("bimodal", lhs.valid, lhs.valuation_names(F), lhs.world), ("sto", rhs.valid, rhs.valuation_names(rg), rhs.world)]
    return Report(lhs.valid == rhs.valid, details)


def _validity_rows(frames: Sequence, formulas: Sequence[Formula]) -> list:
    """Validity rows for many frames, batching every frame whose admissible
    family is the full default one (all upsets, or all subsets)."""
    rows: list = [None] * len(frames)
    groups: dict = {}
    for i, g in enumerate(frames):
        f = g.frame
        default = f.upsets if f.kind == "sto" else range(1 << f.n)
        if len(g.admissible) == len(default) and tuple(g.admissible) == tuple(default):
            groups.setdefault((f.kind, f.n), []).append(i)
        else:
            rows[i] = [v.valid for v in valid_many(g, formulas, None)]
    for idxs in groups.values():
        mat = batch_valid([frames[i].frame for i in idxs], formulas)
        for i, row in zip(idxs, mat):
            rows[i] = [bool(v) for v in row]
    return rows


def preservation_mismatches(frames: Iterable, formulas: Sequence[Formula]) -> tuple:
    """Sweep version of :func:`translation_preservation`.

    Returns ``(checked, mismatches)``; each mismatch is ``(frame, formula,
    bimodal_valid, sto_valid)``.  Quotients shared by several frames are
    evaluated once.
    """
    formulas = list(formulas)
    translated = [gmt(phi) for phi in formulas]
    frames = [as_general_s4k(fr) for fr in frames]
    lhs = _validity_rows(frames, translated)
    quotients = [rho_hat(F) for F in frames]
    distinct = list(dict.fromkeys(quotients))
    rhs_rows = dict(zip(distinct, _validity_rows(distinct, formulas)))
    checked = 0
    bad = []
    for F, q, left in zip(frames, quotients, lhs):
        for phi, l, r in zip(formulas, left, rhs_rows[q]):
            checked += 1
            if l != r:
                bad.append((F, phi, l, r))
    return checked, bad


def _sigma_rho_pre(F: GeneralS4KFrame):
    ok, wit = check_condition(F.frame, FrameCondition.PartialOrder)
    if not ok:
        raise PreconditionFailed("partial order", wit)
    ok, wit = check_condition(F.frame, FrameCondition.Bhl)
    if not ok:
        raise PreconditionFailed("BHL", wit)
    grz = frame_valid_bi(F, axiom("GrzI"))
    if not grz.valid:
        raise PreconditionFailed("GrzI", grz.valuation_names(F))


def sigma_rho_validity(fr, phi: Formula, max_atoms: int | None = 3) -> Report:
    """``G |= phi`` versus ``sigma_hat(rho_hat(G)) |= phi``."""
    F = as_general_s4k(fr)
    _sigma_rho_pre(F)
    back = sigma_hat(rho_hat(F))
    lhs = frame_valid_bi(F, phi, max_atoms)
    rhs = frame_valid_bi(back, phi, max_atoms)
    return Report(lhs.valid == rhs.valid, [("G", lhs.valid), ("sigma rho G", rhs.valid)])


def sigma_rho_mismatches(frames: Iterable, formulas: Sequence[Formula]) -> tuple:
    formulas = list(formulas)
    frames = [as_general_s4k(fr) for fr in frames]
    for F in frames:
        _sigma_rho_pre(F)
    backs = [sigma_hat(rho_hat(F)) for F in frames]
    lhs = _validity_rows(frames, formulas)
    rhs = _validity_rows(backs, formulas)
    checked = 0
    bad = []
    for F, left, right in zip(frames, lhs, rhs):
        for phi, l, r in zip(formulas, left, right):
            checked += 1
            if l != r:
                bad.append((F, phi, l, r))
    return checked, bad


def pointwise_transfer_failures(fr, valuation: dict, phi: Formula) -> list:
    """Worlds ``x`` where ``x |= t(phi)`` differs from ``[x] |= phi`` under the
    transferred valuation."""
    F = as_general_s4k(fr)
    r = rho(F)
    left = truth_sets(Model(F, valuation), [gmt(phi)])[0]
    right = truth_sets(Model(r.general, transfer_valuation(F, valuation)), [phi])[0]
    q = r.general.frame
    out = []
    for x, w in enumerate(F.frame.worlds):
        c = q.index[r.mapping[w]]
        if bool((left >> x) & 1) != bool((right >> c) & 1):
            out.append(w)
    return out

