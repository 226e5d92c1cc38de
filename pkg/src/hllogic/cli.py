"""``hl`` command line.

Exit codes: 0 for success, validity or verification; 1 when a refutation or
counterexample is found; 2 for malformed input or usage errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import algebra as alg_mod
from . import decide, fmp, frames, io, semantics, translation
from .axioms import AXIOMS
from .syntax import BI, STO, ParseError, atoms, parse, to_text

OK, REFUTED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(args, payload: dict, text: str) -> None:
    print(io.dumps(payload) if args.json else text)


def _formula(text: str, lang: str = STO):
    """Inline formula, or a catalogue name such as ``Box``."""
    if text in AXIOMS:
        a_lang, f = AXIOMS[text]
        if a_lang != lang:
            raise UsageError(f"axiom {text} belongs to the {a_lang} language")
        return f
    return parse(text, lang)


def _lang_of_frame(fr) -> str:
    return BI if semantics.plain(fr).kind == frames.S4K else STO


def _valuation_text(names: dict | None) -> str:
    if not names:
        return ""
    return ", ".join(f"{p} = {{{','.join(ws)}}}" for p, ws in names.items())


# ---------------------------------------------------------------------------
# subcommands


def cmd_parse(args) -> int:
    f = parse(args.formula, args.lang)
    text = to_text(f, args.lang)
    _emit(args, {"formula": text, "atoms": list(atoms(f)), "lang": args.lang}, text)
    return OK


def cmd_eval(args) -> int:
    model = io.load_model(args.model)
    lang = _lang_of_frame(model.frame)
    f = _formula(args.formula, lang)
    ts = semantics.truth_sets(model, [f])[0]
    names = semantics.plain(model.frame).names(ts)
    _emit(args, {"formula": to_text(f, lang), "truth_set": names}, "{" + ",".join(names) + "}")
    return OK


def cmd_valid(args) -> int:
    fr = io.load_frame(args.frame)
    lang = _lang_of_frame(fr)
    f = _formula(args.formula, lang)
    v = semantics.valid_many(fr, [f], args.max_atoms)[0]
    names = v.valuation_names(fr)
    payload = {"formula": to_text(f, lang), "valid": v.valid, "valuation": names, "world": v.world}
    text = "valid" if v.valid else f"refuted at {v.world} under {_valuation_text(names) or 'the empty valuation'}"
    _emit(args, payload, text)
    return OK if v.valid else REFUTED


def cmd_translate(args) -> int:
    f = _formula(args.formula, STO)
    text = to_text(translation.gmt(f), BI)
    _emit(args, {"formula": to_text(f, STO), "translation": text}, text)
    return OK


def _frame_text(fr) -> str:
    f = semantics.plain(fr)
    lines = [
        f"kind: {f.kind}",
        "worlds: " + " ".join(f.worlds),
        "rel1: " + " ".join(f"{a}>{b}" for a, b in f.pairs1()),
        "rel2: " + " ".join(f"{a}>{b}" for a, b in f.pairs2()),
    ]
    adm = getattr(fr, "admissible_names", None)
    if adm is not None:
        lines.append("admissible: " + " ".join("{" + ",".join(s) + "}" for s in adm()))
    return "\n".join(lines)


def cmd_rho(args) -> int:
    r = translation.rho(io.load_frame(args.frame))
    payload = io.frame_to_json(r.general)
    payload["mapping"] = r.mapping
    text = _frame_text(r.general) + "\nmapping: " + " ".join(f"{k}->{v}" for k, v in r.mapping.items())
    _emit(args, payload, text)
    return OK


def cmd_sigma(args) -> int:
    fr = io.load_frame(args.frame)
    if semantics.plain(fr).kind != frames.STO:
        raise UsageError("sigma expects a strict-implication frame")
    g = translation.sigma_hat(fr)
    _emit(args, io.frame_to_json(g), _frame_text(g))
    return OK


def _iso(args, rep) -> int:
    payload = {"iso": rep.iso, "failures": [list(map(str, f)) for f in rep.failures]}
    text = "iso" if rep.iso else "not iso: " + "; ".join(map(str, rep.failures))
    _emit(args, payload, text)
    return OK if rep.iso else REFUTED


def cmd_roundtrip(args) -> int:
    if args.algebra:
        a = io.load_algebra(args.algebra)
        rep = alg_mod.round_trip_algebra(a)
        keys = alg_mod.key_identity_failures(a)
        if keys:
            rep = alg_mod.IsoReport(False, rep.failures + [("key", k) for k in keys])
        return _iso(args, rep)
    fr = io.load_frame(args.frame)
    if semantics.plain(fr).kind != frames.STO:
        raise UsageError("roundtrip expects a strict-implication frame")
    g = translation.as_general_sto(fr)
    try:
        rep = alg_mod.round_trip_frame(g)
    except alg_mod.NotDescriptive as e:
        _emit(args, {"iso": False, "not_descriptive": list(e.witness)}, f"not refined: {e.witness}")
        return REFUTED
    return _iso(args, rep)


def _read_gamma(args) -> list:
    gamma = []
    if args.axioms:
        gamma += decide.read_axiom_file(args.axioms)
    for a in args.gamma or ():
        gamma.append(_formula(a, STO))
    return gamma


def _result_json(res) -> dict:
    if res.refuted:
        return {"refuted": True, "size": res.size, "world": res.world, "model": io.model_to_json(res.model)}
    return {"refuted": False, "bound": res.bound}


def _result_text(res, lang: str) -> str:
    if not res.refuted:
        return f"no countermodel up to size {res.bound}"
    return f"refuted on {res.size} worlds at {res.world}\n" + _frame_text(res.model.frame) + "\nvaluation: " + _valuation_text(
        res.model.names()
    )


def cmd_decide(args) -> int:
    gamma = _read_gamma(args)
    goal = _formula(args.goal, STO)
    res = decide.countermodel_search(gamma, goal, args.max_size)
    _emit(args, _result_json(res), _result_text(res, STO))
    return REFUTED if res.refuted else OK


def cmd_bridge(args) -> int:
    gamma = _read_gamma(args)
    goal = _formula(args.goal, STO)
    rep = decide.derive_via_translation(gamma, goal, args.max_size)
    payload = {
        "agree": rep.agree,
        "transferred": rep.transferred,
        "sto": _result_json(rep.sto),
        "bimodal": _result_json(rep.bimodal),
    }
    text = (
        f"agree: {'yes' if rep.agree else 'no'}\n"
        f"sto side: {_result_text(rep.sto, STO).splitlines()[0]}\n"
        f"bimodal side: {_result_text(rep.bimodal, BI).splitlines()[0]}"
    )
    if rep.transferred is not None:
        text += f"\nquotient of the bimodal witness refutes the goal: {'yes' if rep.transferred else 'no'}"
    _emit(args, payload, text)
    return OK if rep else REFUTED


def cmd_correspond(args) -> int:
    try:
        cond = frames.FrameCondition(args.cond)
    except ValueError:
        raise UsageError(f"unknown frame condition {args.cond!r}") from None
    if args.axiom in AXIOMS:
        ax = AXIOMS[args.axiom][1]
    else:
        ax = parse(args.axiom, args.lang)
    res = decide.correspondence_check(ax, cond, args.max_size)
    if res.ok:
        _emit(args, {"verified": True, "checked": res.checked}, f"verified on {res.checked} frames")
        return OK
    payload = {"verified": False, "direction": res.direction, "frame": io.frame_to_json(res.frame), "witness": str(res.witness)}
    _emit(args, payload, f"counterexample ({res.direction})\n" + _frame_text(res.frame))
    return REFUTED


def cmd_dualize(args) -> int:
    g = alg_mod.dual_frame(io.load_algebra(args.algebra))
    _emit(args, io.frame_to_json(g), _frame_text(g))
    return OK


def cmd_algebra_check(args) -> int:
    if args.frame:
        fr = io.load_frame(args.frame)
        if semantics.plain(fr).kind != frames.STO:
            raise UsageError("algebra-check expects a strict-implication frame")
        a = alg_mod.algebra_of(translation.as_general_sto(fr))
        bad = alg_mod.algebra_violations(a)
    else:
        try:
            a = io.load_algebra(args.algebra)
            bad = []
        except alg_mod.AlgebraError as e:
            a, bad = None, e.violations
    payload = {"valid": not bad, "violations": [[k, str(w)] for k, w in bad]}
    if a is not None and args.frame:
        payload["algebra"] = a.to_json()
    text = "valid" if not bad else "\n".join(f"{k}: {w}" for k, w in bad)
    _emit(args, payload, text)
    return OK if not bad else REFUTED


def cmd_minimize(args) -> int:
    if args.model:
        model = io.load_model(args.model)
        if semantics.plain(model.frame).kind != frames.S4K:
            raise UsageError("minimize expects a bimodal model")
        if args.formula is None:
            raise UsageError("--formula is required with --model")
        phi = _formula(args.formula, BI)
    else:
        model, phi = fmp.random_refuting_instance(random.Random(args.seed))
    res = fmp.minimize(model, phi)
    sub = io.model_to_json(res.submodel)
    ok = res.report.ok and res.refutes
    trace = [" ".join(map(str, step)) for step in res.x_omega.trace + res.cofinal.trace]
    if args.json:
        payload = {
            "formula": to_text(phi, BI),
            "model": sub,
            "refutes": res.refutes,
            "ok": res.report.ok,
            "fj_sizes": fmp.fj_sizes(res.cofinal),
            "bound": res.cofinal.bound,
            "trace": trace,
        }
        print(io.dumps(payload))
    else:
        print(io.dumps(sub))
        print(f"formula: {to_text(phi, BI)}", file=sys.stderr)
        for line in trace:
            print(line, file=sys.stderr)
    return OK if ok else REFUTED


def cmd_enumerate(args) -> int:
    filters = []
    for name in args.filter or ():
        try:
            filters.append(frames.FrameCondition(name))
        except ValueError:
            raise UsageError(f"unknown frame condition {name!r}") from None
    it = frames.enumerate_frames(args.size, args.kind, filters, args.dedup)
    if args.count_only:
        n = sum(1 for _ in it)
        _emit(args, {"count": n}, str(n))
        return OK
    out = [io.frame_to_json(f) for f in it]
    if args.json:
        print(io.dumps(out))
    else:
        for f in out:
            print(json.dumps(f, sort_keys=True))
    return OK


# ---------------------------------------------------------------------------
# argument parsing


def _common(suppress: bool) -> argparse.ArgumentParser:
    # flags may come before or after the subcommand; the subcommand copy must
    # not reset a value given up front
    def d(value):
        return argparse.SUPPRESS if suppress else value

    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--json", action="store_true", default=d(False), help="structured output")
    c.add_argument("--seed", type=int, default=d(0), help="seed for randomized commands")
    c.add_argument("--jobs", type=int, default=d(1), help="worker count; current searches are vectorized in one process")
    c.add_argument("--max-atoms", type=int, default=d(semantics.DEFAULT_MAX_ATOMS))
    return c


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hl", description="Heyting-Lewis logic toolkit", parents=[_common(False)])
    sub = p.add_subparsers(dest="command", required=True)
    common = _common(True)

    def add(name, fn, help_):
        s = sub.add_parser(name, help=help_, parents=[common])
        s.set_defaults(fn=fn)
        return s

    s = add("parse", cmd_parse, "parse and pretty-print a formula")
    s.add_argument("formula")
    s.add_argument("--lang", choices=(STO, BI), default=STO)

    s = add("eval", cmd_eval, "truth set of a formula in a model")
    s.add_argument("--model", required=True)
    s.add_argument("--formula", required=True)

    s = add("valid", cmd_valid, "frame validity with a countervaluation")
    s.add_argument("--frame", required=True)
    s.add_argument("--formula", required=True)

    s = add("translate", cmd_translate, "bimodal translation of a formula")
    s.add_argument("formula")

    s = add("rho", cmd_rho, "cluster quotient of a bimodal frame")
    s.add_argument("--frame", required=True)

    s = add("sigma", cmd_sigma, "bimodal frame of a strict-implication frame")
    s.add_argument("--frame", required=True)

    s = add("roundtrip", cmd_roundtrip, "duality round trip of a frame or algebra")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--frame")
    g.add_argument("--algebra")

    for name, fn, help_ in (
        ("decide", cmd_decide, "bounded countermodel search"),
        ("bridge", cmd_bridge, "countermodel search on both sides of the translation"),
    ):
        s = add(name, fn, help_)
        s.add_argument("--axioms", help="file with one formula per line")
        s.add_argument("--gamma", action="append", help="extra axiom (repeatable)")
        s.add_argument("--goal", required=True)
        s.add_argument("--max-size", type=int, default=3)

    s = add("correspond", cmd_correspond, "axiom versus frame condition on small frames")
    s.add_argument("--axiom", required=True)
    s.add_argument("--cond", required=True, help=", ".join(c.value for c in frames.FrameCondition))
    s.add_argument("--max-size", type=int, default=3)
    s.add_argument("--lang", choices=(STO, BI), default=STO)

    s = add("dualize", cmd_dualize, "prime-filter frame of an algebra")
    s.add_argument("--algebra", required=True)

    s = add("algebra-check", cmd_algebra_check, "check the algebra laws")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--algebra")
    g.add_argument("--frame", help="check the complex algebra of a frame")

    s = add("minimize", cmd_minimize, "finite submodel construction")
    s.add_argument("--model", help="bimodal model file; a seeded random instance otherwise")
    s.add_argument("--formula")

    s = add("enumerate", cmd_enumerate, "enumerate small frames")
    s.add_argument("--size", type=int, required=True)
    s.add_argument("--kind", choices=(frames.STO, frames.S4K), default=frames.STO)
    s.add_argument("--filter", action="append", help="frame condition (repeatable)")
    s.add_argument("--dedup", action="store_true", help="one frame per isomorphism class")
    s.add_argument("--count-only", action="store_true")
    return p


_INPUT_ERRORS = (
    ParseError,
    UsageError,
    io.FormatError,
    frames.FrameError,
    frames.KindMismatch,
    frames.BoundTooLarge,
    frames.BhlRequired,
    alg_mod.AlgebraError,
    semantics.TooManyAtoms,
    semantics.ValuationError,
    translation.PreconditionFailed,
    fmp.NotRefuted,
    fmp.RmNotTransitive,
    fmp.BhlRequired,
    OSError,
    ValueError,
)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args)
    except _INPUT_ERRORS as e:
        print(f"hl {args.command}: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
