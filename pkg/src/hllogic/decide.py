"""Bounded countermodel search and frame-correspondence checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .axioms import AXIOMS
from .frames import (
    S4K,
    STO,
    FrameCondition,
    check_condition,
    enumerate_frames,
)
from .semantics import Model, batch_valid, valid_many
from .syntax import BI, Formula, language_of, parse
from .translation import CompanionKind, companion_axioms, gmt, rho_hat


@dataclass
class Refuted:
    model: Model
    size: int
    world: str | None = None

    refuted = True


@dataclass
class NoCountermodelUpTo:
    bound: int

    refuted = False


def _first_hit(frames: list, gamma: Sequence[Formula], goal: Formula):
    """Index of the first frame validating ``gamma`` and refuting ``goal``."""
    if not frames:
        return None
    mat = batch_valid(frames, list(gamma) + [goal])
    hits = np.nonzero(mat[:, :-1].all(axis=1) & ~mat[:, -1])[0]
    return int(hits[0]) if hits.size else None


_BATCH = 4096


def _search(kind: str, filters, gamma, goal, max_size: int, dedup: bool):
    if max_size < 1:
        raise ValueError("max size must be at least 1")
    for n in range(1, max_size + 1):
        stream = enumerate_frames(n, kind, filters, dedup)
        while True:
            frames = list(itertools.islice(stream, _BATCH))
            if not frames:
                break
            hit = _first_hit(frames, gamma, goal)
            if hit is not None:
                frame = frames[hit]
                v = valid_many(frame, [goal], None)[0]
                return Refuted(Model(frame, dict(v.valuation)), n, v.world)
    return NoCountermodelUpTo(max_size)


def countermodel_search(gamma: Sequence[Formula], goal: Formula, max_size: int, dedup: bool = False):
    """First frame (by size, then enumeration order) validating ``gamma`` with
    a valuation refuting ``goal``; the base axioms need not be listed."""
    return _search(STO, (), gamma, goal, max_size, dedup)


# ---------------------------------------------------------------------------
# correspondence


@dataclass
class Verified:
    checked: int

    ok = True


@dataclass
class Counterexample:
    frame: object
    direction: str  # "axiom-without-condition" or "condition-without-axiom"
    witness: object = None

    ok = False


def frame_kind_for(axiom: Formula, cond) -> str:
    lang = language_of(axiom)
    if isinstance(cond, FrameCondition):
        if cond in (FrameCondition.SubPrec, FrameCondition.IrSucc, FrameCondition.PTrans):
            kind = STO
        elif cond is FrameCondition.Strength:
            kind = S4K if lang == BI else STO
        else:
            kind = S4K
    else:
        kind = S4K if lang == BI else STO
    if (lang == BI and kind == STO) or (lang == "sto" and kind == S4K):
        from .frames import KindMismatch

        raise KindMismatch("axiom language does not match the frame kind of the condition")
    return kind


def correspondence_check(axiom: Formula, cond, max_size: int, filters: Sequence = ()):
    """Compare validity of ``axiom`` with ``cond`` on every frame up to ``max_size``."""
    kind = frame_kind_for(axiom, cond)
    checked = 0
    for n in range(1, max_size + 1):
        frames = list(enumerate_frames(n, kind, filters))
        valid = batch_valid(frames, [axiom])[:, 0]
        for frame, v in zip(frames, valid):
            holds, wit = check_condition(frame, cond)
            checked += 1
            if bool(v) and not holds:
                return Counterexample(frame, "axiom-without-condition", wit)
            if holds and not bool(v):
                return Counterexample(frame, "condition-without-axiom", valid_many(frame, [axiom], None)[0])
    return Verified(checked)


# ---------------------------------------------------------------------------
# the bimodal side


@dataclass
class BridgeReport:
    sto: object
    bimodal: object
    transferred: bool | None = None  # rho_hat of the bimodal witness refutes the goal
    notes: list = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return self.sto.refuted == self.bimodal.refuted

    def __bool__(self) -> bool:
        return self.agree and self.transferred is not False


def bimodal_search(gamma: Sequence[Formula], goal: Formula, max_size: int, kind=CompanionKind.Sigma, dedup: bool = False):
    """Search partial-order BHL frames validating the companion axioms of
    ``gamma`` for a refutation of the translated goal."""
    axioms = companion_axioms(gamma, kind)
    filters = (FrameCondition.PartialOrder, FrameCondition.Bhl)
    return _search(S4K, filters, axioms, gmt(goal), max_size, dedup)


def derive_via_translation(gamma: Sequence[Formula], goal: Formula, max_size: int, dedup: bool = False) -> BridgeReport:
    left = countermodel_search(gamma, goal, max_size, dedup)
    right = bimodal_search(gamma, goal, max_size, CompanionKind.Sigma, dedup)
    transferred = None
    if right.refuted:
        g = rho_hat(right.model.frame)
        transferred = not valid_many(g, [goal], None)[0].valid
    return BridgeReport(left, right, transferred)


# ---------------------------------------------------------------------------
# axiom files


def read_axiom_lines(lines: Iterable[str], lang: str = "sto") -> list:
    """One formula per line; ``#`` starts a comment; a bare catalogue name
    such as ``Sa`` stands for that axiom."""
    out = []
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line in AXIOMS:
            out.append(AXIOMS[line][1])
        else:
            out.append(parse(line, lang))
    return out


def read_axiom_file(path: str, lang: str = "sto") -> list:
    with open(path, encoding="utf-8") as fh:
        return read_axiom_lines(fh, lang)
