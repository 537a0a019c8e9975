"""Smoke test for the `minkbilliard` extension module.

Builds the module with cargo unless MINKBILLIARD_SO points at a built
library, copies it next to this script as minkbilliard.so, and exercises
each binding once.
"""

import math
import os
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def locate_library():
    override = os.environ.get("MINKBILLIARD_SO")
    if override:
        return Path(override)
    subprocess.run(
        ["cargo", "build", "--release", "-p", "minkbilliard-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    target = Path(os.environ.get("CARGO_TARGET_DIR", ROOT / "target")) / "release"
    for name in ("libminkbilliard_py.so", "libminkbilliard_py.dylib", "minkbilliard_py.dll"):
        if (target / name).exists():
            return target / name
    sys.exit(f"no built library under {target}")


def load():
    lib = locate_library()
    moddir = Path(tempfile.mkdtemp(prefix="minkbilliard-"))
    suffix = ".pyd" if lib.suffix == ".dll" else ".so"
    shutil.copy(lib, moddir / f"minkbilliard{suffix}")
    sys.path.insert(0, str(moddir))
    import minkbilliard

    return minkbilliard


def main():
    mb = load()
    h = math.sqrt(3) / 6
    tri = mb.Body.polygon([[-0.5, -h], [0.5, -h], [0.0, 2 * h]])
    ball = mb.Body.ball(1.0, 2)
    square = mb.Body.from_json('{"kind":"polytope","vertices":[[-1,-1],[1,-1],[1,1],[-1,1]]}')
    diamond = square.polar()

    w, _ = mb.width(tri, ball)
    assert abs(w - math.sqrt(3) / 2) < 1e-9, w

    r = mb.xi(tri, ball, seed=1)
    assert abs(r["xi"] - 1.5) < 1e-6 and not r["flagged"], r
    assert abs(mb.xi(square, ball)["xi"] - 4.0) < 1e-9

    t = mb.simulate(square, diamond, q=[1.0, -0.2], p=[0.5, 0.5])
    assert t["exact"] and t["closed"] and t["period"] == 4, t
    assert abs(t["length_t"] - 4.0) < 1e-12
    try:
        mb.simulate(square, diamond, q=[1.0, 1.0], p=[0.5, 0.5])
    except mb.BilliardError:
        pass
    else:
        raise AssertionError("corner start should be rejected")

    try:
        mb.Body.polygon([[0, 0], [1, 0], [0, 1]])
    except mb.GeometryError:
        pass
    else:
        raise AssertionError("origin on the boundary should be rejected")

    cube = mb.HannerTree.cube(3)
    rep = mb.verify_hanner(cube, samples=20, seed=7)
    assert rep["all_pass"] and rep["period_2n"] == 20, rep

    bat = mb.run_battery("symmetry", seed=3, samples=4)
    assert bat["all_pass"] and len(bat["cases"]) == 4, bat
    assert "rogers-shepard-euclid" in mb.batteries()

    print(f"minkbilliard {mb.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
