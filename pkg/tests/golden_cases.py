"""Commands whose --json output is pinned under tests/golden.

Run this module to regenerate the files after an intended format change.
"""

import contextlib
import io
import os
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent
FIX = ROOT.parent / "fixtures"
GOLDEN = ROOT / "golden"

CASES = {
    "parse": ["parse", "p ~> q & r"],
    "valid_iele3_box": ["valid", "--frame", "fix_iele3.json", "--formula", "Box"],
    "eval_iele": ["eval", "--model", "fix_iele_model.json", "--formula", "p ~> q"],
    "rho_iele3": ["rho", "--frame", "fix_iele3.json"],
    "sigma_chain2": ["sigma", "--frame", "fix_chain2.json"],
    "roundtrip_chain2": ["roundtrip", "--frame", "fix_chain2.json"],
    "decide_box": ["decide", "--gamma", "Sa", "--gamma", "IR", "--goal", "Box", "--max-size", "3"],
    "correspond_sa": ["correspond", "--axiom", "Sa", "--cond", "SubPrec", "--max-size", "2"],
    "dualize_chain3": ["dualize", "--algebra", "chain3_algebra.json"],
    "algebra_check_chain3": ["algebra-check", "--algebra", "chain3_algebra.json"],
    "enumerate_1": ["enumerate", "--size", "1"],
    "bridge_ka": ["bridge", "--goal", "Ka", "--max-size", "2"],
    "minimize_seed3": ["minimize", "--seed", "3"],
}


def run(argv):
    """``(exit code, stdout, stderr)`` of the CLI run from the fixtures directory."""
    from hllogic.cli import main

    out, err = io.StringIO(), io.StringIO()
    cwd = os.getcwd()
    os.chdir(FIX)
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            try:
                code = main(argv)
            except SystemExit as e:
                code = e.code
    finally:
        os.chdir(cwd)
    return code, out.getvalue(), err.getvalue()


if __name__ == "__main__":
    GOLDEN.mkdir(exist_ok=True)
    for name, argv in CASES.items():
        _, out, _ = run(["--json"] + argv)
        (GOLDEN / f"{name}.json").write_text(out)
