#!/usr/bin/env python3
"""Smoke test for the jt_py extension module.

Builds nothing itself: it locates the compiled cdylib under target/,
copies it into a temp directory under the importable name, and checks a
handful of known values.

Usage: cargo build -p jt-py && python3 python/smoke_test.py
"""

import json
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def locate_cdylib():
    candidates = []
    for profile in ("release", "debug"):
        for name in ("libjt_py.so", "jt_py.dll", "libjt_py.dylib"):
            p = ROOT / "target" / profile / name
            if p.exists():
                candidates.append(p)
    if not candidates:
        sys.exit("no built jt_py library found; run `cargo build -p jt-py` first")
    return max(candidates, key=lambda p: p.stat().st_mtime)


def main():
    lib = locate_cdylib()
    tmp = tempfile.mkdtemp(prefix="jt-py-smoke-")
    shutil.copy(lib, pathlib.Path(tmp) / "jt_py.so")
    sys.path.insert(0, tmp)

    import jt_py

    # Term rewriting.
    assert jt_py.normalize("l(x*y)") == "x"
    assert jt_py.normalize("l(z)*r(z)") == "z"
    assert jt_py.equiv("r(x*y)", "y")
    assert not jt_py.equiv("l(x*y)", "y")

    # Base algebra arithmetic: pairing on naturals.
    base = jt_py.Algebra("cantor")
    assert base.mul("2", "3") == "18"
    assert base.left("18") == "2" and base.right("18") == "3"
    assert base.eval("x*y", {"x": "2", "y": "3"}) == "18"
    assert base.axiom_check(bound=64, samples=64, seed=1)

    # A one-layer extension and its closure/generation behaviour.
    alg = jt_py.Algebra("cantor", "A")
    assert alg.left("w") == "0"
    found = alg.closure(["w"], "w+8")
    assert set(found) >= {"0", "7", "w*1", "w*1+7"}
    assert alg.genword("w", "w") == "e"
    assert alg.jonsson("w+16")

    # Type B certificate for sigma = AB.
    cert = json.loads(jt_py.Algebra("cantor", "AB").certify_typeb("w+32"))
    assert cert["kind"] == "Generator" and cert["g"] == "w*2" and cert["complete"]

    # Word encoding and separation.
    assert jt_py.encode("01") == "AABABB"
    assert jt_py.noniso("AABAB", "AABBAB") == 3

    # Free sets of a 5-cycle set-mapping.
    images = [[1], [2], [3], [4], [0]]
    assert len(jt_py.max_free(images)) == 2
    assert len(jt_py.partition_free(images)) == 3

    print("smoke test: all checks passed")


if __name__ == "__main__":
    main()
