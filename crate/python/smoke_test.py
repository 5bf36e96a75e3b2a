"""Smoke test for the maxbandit_py extension module.

Builds the extension with cargo (unless MAXBANDIT_PY_LIB points at an
already-built library), loads it from a temporary directory and exercises
the main entry points.

    python3 python/smoke_test.py
"""

import os
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def built_library():
    override = os.environ.get("MAXBANDIT_PY_LIB")
    if override:
        return pathlib.Path(override)
    subprocess.run(
        ["cargo", "build", "--release", "-p", "maxbandit-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    for name in ("libmaxbandit_py.so", "libmaxbandit_py.dylib", "maxbandit_py.dll"):
        path = ROOT / "target" / "release" / name
        if path.exists():
            return path
    sys.exit("built library not found under target/release")


def main():
    lib = built_library()
    tmp = tempfile.mkdtemp()
    suffix = ".pyd" if lib.suffix == ".dll" else ".so"
    shutil.copy(lib, os.path.join(tmp, "maxbandit_py" + suffix))
    sys.path.insert(0, tmp)
    import maxbandit_py as mb

    assert mb.tau(500, 2) == 40
    assert mb.tau(100, 25) == 3
    assert abs(mb.adaetc_ucb(0.5, 1, 2, 1, 2) - 2.1651097) < 1e-6

    inst = mb.BanditInstance.bernoulli([0.2, 0.7, 0.5])
    assert inst.best_arm == 1
    assert mb.BanditInstance.from_json(inst.to_json()).means == inst.means

    ep = mb.run_episode(inst, "ada-etc", 300, seed=1, keep_trace=True)
    assert sum(ep.pulls) == 300 and len(ep.trace) == 300

    est = mb.estimate_regret(mb.fixture("equal-deterministic:2"), "ucb1", 100, 4)
    assert est.mean_regret == 50.0, est

    rows = mb.compare_policies(inst, ["ada-etc", "etc", "oracle:best"], 400, 500, seed=3)
    assert abs(rows[2].mean_regret) < 3 * rows[2].stderr + 1e-9
    print("regret at T=400:", {p: round(r.mean_regret, 3) for p, r in zip(["ada-etc", "etc", "oracle"], rows)})

    report = mb.bound_report(inst, 500)
    assert abs(sum(report["upper_terms"].values()) - report["upper_bound"]) < 1e-9
    print("bound report:", report)

    state = mb.PolicyState("etc", 2, 10)
    while True:
        kind, arm = state.select_arm()
        if kind == "commit":
            break
        state.observe(arm, 1.0 if arm == 0 else 0.0)
    assert (kind, arm) == ("commit", 0) and state.pull_counts == [3, 3]

    try:
        mb.tau(1, 2)
    except ValueError:
        pass
    else:
        raise AssertionError("invalid horizon accepted")
    print("python smoke test ok")


if __name__ == "__main__":
    main()
