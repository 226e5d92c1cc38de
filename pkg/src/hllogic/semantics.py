"""Truth sets and frame validity for both languages.

Evaluation works on bitmask world sets and is vectorised over valuations:
every atom is bound to a numpy array of masks, one entry per candidate
valuation, and each connective maps arrays to arrays through the frame's
precomputed box tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .frames import (
    S4K,
    STO,
    GeneralS4KFrame,
    GeneralStoFrame,
    KindMismatch,
    S4KFrame,
    StoFrame,
    bits,
)
from .syntax import (
    And,
    Atom,
    Bot,
    BoxI,
    BoxM,
    Formula,
    Imp,
    Not,
    Or,
    Sto,
    Top,
    atoms,
    subformulas,
)

DEFAULT_MAX_ATOMS = 3
_CHUNK = 1 << 20


class TooManyAtoms(ValueError):
    pass


class ValuationError(ValueError):
    pass


def plain(frame):
    return frame.frame if isinstance(frame, (GeneralStoFrame, GeneralS4KFrame)) else frame


def admissible_sets(frame) -> tuple:
    """Candidate values for an atom: ``P`` for general frames, otherwise all
    upsets (strict-implication frames) or all subsets (bimodal frames)."""
    if isinstance(frame, (GeneralStoFrame, GeneralS4KFrame)):
        return frame.admissible
    if frame.kind == STO:
        return frame.upsets
    return tuple(range(1 << frame.n))


@dataclass(frozen=True)
class Model:
    frame: object
    valuation: Mapping[str, int] = field(default_factory=dict)

    @classmethod
    def from_names(cls, frame, valuation: Mapping[str, Iterable]) -> "Model":
        f = plain(frame)
        return cls(frame, {p: f.mask(ws) for p, ws in valuation.items()})

    def value(self, atom: str) -> int:
        return self.valuation.get(atom, 0)

    def names(self) -> dict:
        f = plain(self.frame)
        return {p: f.names(m) for p, m in sorted(self.valuation.items())}


_ATOM, _TOP, _BOT, _AND, _OR, _IMP, _STO, _NOT, _BOXI, _BOXM = range(10)
_CODES = {And: _AND, Or: _OR, Imp: _IMP, Sto: _STO, Not: _NOT, BoxI: _BOXI, BoxM: _BOXM}


@dataclass(frozen=True)
class Program:
    """Formulas flattened into one shared list of nodes in evaluation order.

    ``ops[i]`` is ``(code, arg1, arg2)``; atoms carry their name in ``arg1``.
    ``last_use[i]`` is the last node reading node ``i``.
    """

    ops: tuple
    outputs: tuple
    last_use: tuple
    uses_sto: bool
    uses_bi: bool


@lru_cache(maxsize=512)
def compile_formulas(formulas: tuple) -> Program:
    pos: dict = {}
    ops = []
    for phi in formulas:
        for g in subformulas(phi):
            if g in pos:
                continue
            if isinstance(g, Atom):
                op = (_ATOM, g.name, None)
            elif isinstance(g, Top):
                op = (_TOP, None, None)
            elif isinstance(g, Bot):
                op = (_BOT, None, None)
            elif isinstance(g, (Not, BoxI, BoxM)):
                op = (_CODES[type(g)], pos[g.arg], None)
            else:
                op = (_CODES[type(g)], pos[g.left], pos[g.right])
            pos[g] = len(ops)
            ops.append(op)
    last = list(range(len(ops)))
    for i, (code, a, b) in enumerate(ops):
        if code >= _AND:
            last[a] = i
            if b is not None:
                last[b] = i
    codes = {c for c, _, _ in ops}
    return Program(
        tuple(ops),
        tuple(pos[phi] for phi in formulas),
        tuple(last),
        _STO in codes,
        bool(codes & {_NOT, _BOXI, _BOXM}),
    )


def run_program(prog: Program, lang: str, atom_values, zero, full, box1, box2, reduce=None) -> list:
    """Evaluate every output of ``prog``.

    ``box1``/``box2`` map an array of masks to the masks of worlds whose
    successors all lie inside.  Intermediate values are dropped after their
    last use; outputs are passed through ``reduce`` when given.
    """
    if lang == STO and prog.uses_bi:
        raise KindMismatch("bimodal connectives need a bimodal frame")
    if lang == S4K and prog.uses_sto:
        raise KindMismatch("~> is evaluated on strict-implication frames only")
    vals: list = [None] * len(prog.ops)
    keep = set(prog.outputs)
    results = {}
    sto_lang = lang == STO
    for i, (code, a, b) in enumerate(prog.ops):
        if code == _ATOM:
            v = atom_values.get(a, zero)
        elif code == _TOP:
            v = zero | full
        elif code == _BOT:
            v = zero
        elif code == _AND:
            v = vals[a] & vals[b]
        elif code == _OR:
            v = vals[a] | vals[b]
        elif code == _IMP:
            v = (~vals[a] | vals[b]) & full
            if sto_lang:
                v = box1(v)
        elif code == _STO:
            v = box2((~vals[a] | vals[b]) & full)
        elif code == _NOT:
            v = ~vals[a] & full
        elif code == _BOXI:
            v = box1(vals[a])
        else:
            v = box2(vals[a])
        vals[i] = v
        if i in keep:
            results[i] = v if reduce is None else reduce(v)
        if code >= _AND:
            for j in (a, b):
                if j is not None and prog.last_use[j] == i and j not in keep:
                    vals[j] = None
    return [results[o] for o in prog.outputs]


def _tables(f):
    t1, t2 = f.box1, f.box2
    return (lambda a: t1[a]), (lambda a: t2[a])


def _lang_for(frame, expected: str | None) -> str:
    kind = plain(frame).kind
    if expected is not None and kind != expected:
        raise KindMismatch(f"expected a {expected} frame, got {kind}")
    return kind


def _check_valuation(frame, valuation: Mapping[str, int]):
    f = plain(frame)
    for p, m in valuation.items():
        if m & ~f.full:
            raise ValuationError(f"value of {p} mentions unknown worlds")
        if f.kind == STO and not f.is_upset(m):
            raise ValuationError(f"value of {p} is not an upset: {f.names(m)}")
        if isinstance(frame, (GeneralStoFrame, GeneralS4KFrame)) and m not in frame.admissible:
            raise ValuationError(f"value of {p} is not admissible: {f.names(m)}")


def truth_sets(model: Model, formulas: Sequence[Formula], expected: str | None = None) -> list:
    lang = _lang_for(model.frame, expected)
    _check_valuation(model.frame, model.valuation)
    f = plain(model.frame)
    b1, b2 = _tables(f)
    prog = compile_formulas(tuple(formulas))
    vals = {p: np.int64(m) for p, m in model.valuation.items()}
    return [int(v) for v in run_program(prog, lang, vals, np.int64(0), f.full, b1, b2)]


def truth_set(model: Model, phi: Formula) -> int:
    """Truth set of a strict-implication formula, as a world mask."""
    return truth_sets(model, [phi], STO)[0]


def truth_set_bi(model: Model, phi: Formula) -> int:
    """Truth set of a bimodal formula, as a world mask."""
    return truth_sets(model, [phi], S4K)[0]


def truth_set_names(model: Model, phi: Formula) -> list:
    f = plain(model.frame)
    return f.names(truth_sets(model, [phi])[0])


# ---------------------------------------------------------------------------
# validity


@dataclass(frozen=True)
class Validity:
    valid: bool
    valuation: dict | None = None  # atom -> mask, least refuting valuation
    world: str | None = None  # least world refuting under that valuation

    def __bool__(self) -> bool:
        return self.valid

    def valuation_names(self, frame) -> dict | None:
        if self.valuation is None:
            return None
        f = plain(frame)
        return {p: f.names(m) for p, m in sorted(self.valuation.items())}


def _valuation_arrays(cands: Sequence[int], k: int, start: int, stop: int) -> list:
    m = len(cands)
    idx = np.arange(start, stop, dtype=np.int64)
    c = np.asarray(cands, dtype=np.int64)
    out = []
    for i in range(k):
        div = m ** (k - 1 - i)
        out.append(c[(idx // div) % m])
    return out


def valid_many(frame, formulas: Sequence[Formula], max_atoms: int | None = DEFAULT_MAX_ATOMS) -> list:
    """Validity of each formula on ``frame``, sharing work across formulas.

    Valuations range over the atoms of all formulas together, in lexicographic
    order of candidate masks with the alphabetically first atom most
    significant; the reported countervaluation is the least one and only
    mentions the formula's own atoms.
    """
    lang = _lang_for(frame, None)
    f = plain(frame)
    names = sorted({a for phi in formulas for a in atoms(phi)})
    if max_atoms is not None:
        for phi in formulas:
            if len(atoms(phi)) > max_atoms:
                raise TooManyAtoms(
                    f"{len(atoms(phi))} atoms exceed the limit of {max_atoms}"
                )
    cands = admissible_sets(frame)
    k = len(names)
    total = len(cands) ** k
    results: list = [None] * len(formulas)
    full = f.full
    prog = compile_formulas(tuple(formulas))
    b1, b2 = _tables(f)
    for start in range(0, total, _CHUNK):
        stop = min(total, start + _CHUNK)
        arrays = _valuation_arrays(cands, k, start, stop)
        outs = run_program(
            prog, lang, dict(zip(names, arrays)), np.zeros(stop - start, dtype=np.int64), full, b1, b2
        )
        for i, phi in enumerate(formulas):
            if results[i] is not None:
                continue
            res = outs[i]
            bad = np.nonzero(res != full)[0]
            if bad.size:
                j = int(bad[0])
                own = set(atoms(phi))
                val = {p: int(arr[j]) for p, arr in zip(names, arrays) if p in own}
                world = f.worlds[next(bits(full & ~int(res[j])))]
                results[i] = Validity(False, val, world)
        if all(r is not None for r in results):
            break
    return [r if r is not None else Validity(True) for r in results]


def batch_valid(frames: Sequence, formulas: Sequence[Formula], chunk: int = 2048) -> np.ndarray:
    """Validity matrix ``[frame, formula]`` for plain frames of one kind and size.

    Strict-implication frames are evaluated over all subsets with non-upset
    valuations masked out; bimodal frames range over all subsets anyway.
    """
    frames = [plain(f) for f in frames]
    out = np.zeros((len(frames), len(formulas)), dtype=bool)
    if not frames:
        return out
    n = frames[0].n
    lang = frames[0].kind
    if any(f.n != n or f.kind != lang for f in frames):
        raise ValueError("batch frames must share size and kind")
    names = sorted({a for phi in formulas for a in atoms(phi)})
    k = len(names)
    m = 1 << n
    dtype = np.int16 if n < 15 else np.int64
    full = (1 << n) - 1
    idx = np.arange(m**k, dtype=np.int64)
    arrays = {p: ((idx // m ** (k - 1 - i)) % m).astype(dtype)[None, :] for i, p in enumerate(names)}
    prog = compile_formulas(tuple(formulas))
    zero = np.zeros((1, m**k), dtype=dtype)
    for s in range(0, len(frames), chunk):
        part = frames[s : s + chunk]
        t1 = np.stack([f.box1 for f in part]).astype(dtype)
        t2 = np.stack([f.box2 for f in part]).astype(dtype)
        rows = np.arange(len(part))[:, None]
        if lang == STO:
            ups = np.zeros((len(part), m), dtype=bool)
            for r, f in enumerate(part):
                ups[r, list(f.upsets)] = True
            ok = np.ones((len(part), m**k), dtype=bool)
            for p in names:
                ok &= ups[rows, arrays[p]]

            def reduce(v, ok=ok):
                return np.all((v == full) | ~ok, axis=1)

        else:

            def reduce(v):
                return np.all(v == full, axis=1)

        res = run_program(
            prog,
            lang,
            arrays,
            zero,
            full,
            lambda a: t1[rows, a],
            lambda a: t2[rows, a],
            reduce,
        )
        for j, r in enumerate(res):
            out[s : s + len(part), j] = np.broadcast_to(r, (len(part),))
    return out


def frame_valid(frame, phi: Formula, max_atoms: int | None = DEFAULT_MAX_ATOMS) -> Validity:
    """Validity of a strict-implication formula on a (general) frame."""
    _lang_for(frame, STO)
    return valid_many(frame, [phi], max_atoms)[0]


def frame_valid_bi(frame, phi: Formula, max_atoms: int | None = DEFAULT_MAX_ATOMS) -> Validity:
    """Validity of a bimodal formula on a (general) bimodal frame."""
    _lang_for(frame, S4K)
    return valid_many(frame, [phi], max_atoms)[0]


def all_valid(frame, formulas: Sequence[Formula], max_atoms: int | None = None) -> bool:
    return all(v.valid for v in valid_many(frame, formulas, max_atoms)) if formulas else True


def refuting_model(frame, phi: Formula, max_atoms: int | None = DEFAULT_MAX_ATOMS):
    """A model on ``frame`` refuting ``phi``, or ``None``."""
    v = valid_many(frame, [phi], max_atoms)[0]
    if v.valid:
        return None
    return Model(frame, dict(v.valuation))


def is_upset(frame: StoFrame, mask: int) -> bool:
    return plain(frame).is_upset(mask)

