"""Smoke test for the pypicard extension.

Uses an installed pypicard if there is one; otherwise builds the extension with cargo and
loads it from the target directory.
"""

import importlib
import math
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        return importlib.import_module("pypicard")
    except ImportError:
        pass
    subprocess.run(
        ["cargo", "build", "--release", "-p", "picard-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    built = ROOT / "target" / "release" / "libpypicard.so"
    tmp = pathlib.Path(tempfile.mkdtemp())
    shutil.copy(built, tmp / "pypicard.so")
    sys.path.insert(0, str(tmp))
    return importlib.import_module("pypicard")


def main():
    pp = load()

    count, distinct = pp.hecke_cosets(3, 3)
    assert (count, distinct) == (10, True), (count, distinct)

    num, den = pp.lfactor("ramified")
    assert num == "1 - b^2*X^2", num

    assert pp.is_norm("7", 3) and not pp.is_norm("-1", 3) and not pp.is_norm("2", 3)
    assert pp.torsion_order("1/6,1/6", ["1,1", "2,0"], 3) == "6"

    w = pp.whittaker_w00(1.0)
    assert abs(w - 0.52154761081954) < 1e-12, w

    e = pp.eisenstein(0.3, 0.8, complex(2.0, 0.0), 3, (1, 0))
    assert abs(e - 0.1344107134567866) < 1e-12, e

    report = pp.verify("ramified")
    assert report["pass"] and report["config"]["seed"] == 42

    report = pp.verify("klf")
    assert not report["pass"]
    assert all(c["pass"] for c in report["reports"][0]["checks"] if c["role"] == "Supporting")

    try:
        pp.hecke_cosets(3, 4)
    except ValueError:
        pass
    else:
        raise AssertionError("3 is not ramified in Q(sqrt(-4))")

    print("pypicard smoke test passed")


if __name__ == "__main__":
    main()
