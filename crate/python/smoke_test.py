#!/usr/bin/env python3
"""Smoke test for the conepredictor Python bindings.

Build the extension first:

    cargo build -p conepredictor-py --release

then run:

    python3 python/smoke_test.py
"""

import math
import shutil
import sys
import sysconfig
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        REPO / "target" / "release" / "libconepredictor_py.so",
        REPO / "target" / "debug" / "libconepredictor_py.so",
        REPO / "target" / "release" / "libconepredictor_py.dylib",
        REPO / "target" / "debug" / "libconepredictor_py.dylib",
    ]
    built = next((c for c in candidates if c.exists()), None)
    if built is None:
        sys.exit("extension not built; run: cargo build -p conepredictor-py --release")
    stage = Path(tempfile.mkdtemp(prefix="conepredictor_py_"))
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    shutil.copy2(built, stage / f"conepredictor_py{suffix}")
    sys.path.insert(0, str(stage))
    import conepredictor_py

    return conepredictor_py


def main():
    cp = load_module()
    failures = []

    def check(name, ok, detail=""):
        print(f"{'ok  ' if ok else 'FAIL'} {name} {detail}")
        if not ok:
            failures.append(name)

    # sharp LP: solve to high accuracy, verify rate flags and the gap bound
    lp = cp.Problem.from_example("sharp_lp", m=3, n=6, seed=7)
    trace = cp.solve(lp, eps=1e-12)
    mus = trace.mu_sequence()
    check("solve terminates", mus[-1] <= 1e-12 / lp.nu, f"final_mu={mus[-1]:.3e}")
    check("mu strictly decreasing", all(b < a for a, b in zip(mus, mus[1:])))
    check("linear rate at every step", all(trace.linear_rate_flags()))
    gap = lp.f_star - trace.dual_objective
    check(
        "certified gap bound",
        -1e-10 <= gap <= trace.gap_bound * (1 + 1e-6) + 1e-12,
        f"gap={gap:.3e} bound={trace.gap_bound:.3e}",
    )
    exponent, _, pairs = trace.tail_exponent()
    check("superlinear tail", exponent >= 1.4, f"exponent={exponent:.3f} pairs={pairs}")

    # round-trip through the CONEPROB text format
    text = lp.to_text()
    lp2 = cp.Problem.from_text(text)
    check("text round-trip", lp2.to_text() == text)

    # disc example: closed forms for theta and the prediction point
    disc = cp.Problem.from_example("disc2d")
    y = [0.2, 0.3]
    theta = disc.theta(y)
    expected = math.sqrt(2 * y[1] ** 2 / (1 - y[0] ** 2 + y[1] ** 2))
    check("disc theta closed form", abs(theta - expected) < 1e-12)
    p = disc.prediction_point(y)
    scale = 2 / (1 + y[0] ** 2 + y[1] ** 2)
    check(
        "disc prediction closed form",
        max(abs(p[0] - scale * y[0]), abs(p[1] - scale * y[1])) < 1e-12,
    )

    # barrier certification report
    report = cp.check_barrier("psd(3)", seed=1, samples=25)
    check("psd barrier report", all(ok for (_, _, _, ok) in report), f"{len(report)} metrics")

    # xi / eta helper sanity
    check("xi", abs(cp.xi(1.0, 0.5) - 2.0) < 1e-15)
    check("eta", cp.eta(1.0, 0.2) == 0.4 and cp.eta(1.0, 0.5) == 0.75)

    if failures:
        sys.exit(f"smoke test failed: {failures}")
    print("smoke test passed")


if __name__ == "__main__":
    main()
