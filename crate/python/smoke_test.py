"""Smoke test for the sigpds extension module.

Uses an installed `sigpds` if there is one; otherwise loads the library built
by `cargo build -p sigpds-python --features extension-module`.
"""

import importlib
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIXTURES = os.path.join(ROOT, "fixtures")


def load_module():
    try:
        return importlib.import_module("sigpds")
    except ImportError:
        pass
    for profile in ("release", "debug"):
        built = os.path.join(ROOT, "target", profile, "libsigpds_py.so")
        if os.path.exists(built):
            tmp = tempfile.mkdtemp()
            shutil.copy(built, os.path.join(tmp, "sigpds.so"))
            sys.path.insert(0, tmp)
            return importlib.import_module("sigpds")
    sys.exit("sigpds not installed and no built library under target/")


def main():
    sigpds = load_module()

    pex = sigpds.System.load(os.path.join(FIXTURES, "pex.pds"))
    assert pex.domain == "minheight"
    assert pex.states == ["p0", "p1", "p2", "p3"]
    assert pex.minheight("p0", "g", "p3") == 6
    assert pex.minheight("p0", "g", "p1") is None
    edges = pex.presat()
    assert len(edges) == 6, edges
    assert ("p0", "g", "6", "p3") in edges
    assert pex.reach_target("p1", "g g", "p2", "deep")[0]

    rel = sigpds.System.load(os.path.join(FIXTURES, "relations.pds"))
    assert rel.reach("main", "m r", "done")
    assert not rel.reach("main", "m", "done")

    cond = sigpds.System.load(os.path.join(FIXTURES, "conditional.pds"))
    assert cond.reach("p", "a a", "p")
    assert not cond.reach("p", "a b a", "p")
    assert "L0" in cond.legend()

    tr = sigpds.System.load(os.path.join(FIXTURES, "trpds.pds"))
    assert tr.trreach("p", "a a b", "q")

    vec = sigpds.System.load(os.path.join(FIXTURES, "wspds_vector.pds"))
    assert vec.cover("p", "(2,0)", "r", "(2,1)")
    assert not vec.cover("p", "(2,0)", "r", "(2,2)")

    try:
        sigpds.System.load(os.path.join(FIXTURES, "conditional.pds"), closure_cap=1).presat()
    except sigpds.CapExceeded:
        pass
    else:
        raise AssertionError("expected CapExceeded")
    try:
        pex.cover("p0", "g", "p3")
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")

    a = sigpds.Signature("g/g,g", ["g"])
    b = sigpds.Signature("g/-", ["g"])
    assert str(a * b) == "g/g"
    assert sigpds.Signature("-/-", ["g"]).leq(sigpds.Signature("g/g", ["g"]))
    assert (sigpds.Signature("g/-", ["g"]).join(sigpds.Signature("-/g", ["g"]))).is_top

    for domain in sigpds.DOMAINS:
        for report in sigpds.laws(domain, samples=200, seed=3):
            assert report["passed"], report["subject"]
    print("smoke test passed")


if __name__ == "__main__":
    main()
