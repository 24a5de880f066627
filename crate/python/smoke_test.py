"""Smoke test for the qkz_lab_py extension module.

Build it first, e.g. `pip install --no-build-isolation ./crates/python`.
"""

import qkz_lab_py as q


def main():
    r = q.bare_r("0", "1")
    assert r == [["1", "0", "0", "0"], ["0", "0", "1", "0"], ["0", "1", "0", "0"], ["0", "0", "0", "1"]], r

    assert q.ybe("5", "3", hbar="1")["pass"]
    assert q.unitarity("7/2", hbar="-2")["pass"]
    assert q.crossing("3", order=4)["pass"]
    bare = q.crossing("1", hbar="1")
    assert not bare["pass"] and bare["details"]["ratio"] == "4/3"
    assert q.qdet(hbar="1")["pass"]

    sys = q.QkzSystem(["1", "4", "-9/2"], level="1", hbar="1/3")
    assert sys.n == 3 and len(sys.a_matrix(2)) == 8
    assert all(sys.flatness(i, j)["pass"] for i in range(1, 4) for j in range(i + 1, 4))
    v = [str(k) for k in range(8)]
    w, pts = sys.transport([1, 2, -1, -2], v)
    assert w == v and pts == sys.points
    for rel in ("plus_plus", "minus_plus", "minus_minus"):
        assert sys.rll(rel, "100/7", "31/11", i=1, j=3)["pass"], rel

    norm = q.QkzSystem(["0", "2"], order=3)
    assert norm.flatness(1, 2)["pass"]

    reps = q.classical(cutoff=2)
    assert [r["identity"] for r in reps] == ["classical_limit"] * 3 + ["jacobi"]
    assert all(r["pass"] for r in reps)
    assert q.classical("plus_plus", 3)[0]["pass"]
    assert not q.classical("minus_plus", 2, "transposed")[0]["pass"]

    try:
        q.QkzSystem(["0", "5"], hbar="1").transport([1, 1, 1, 1], ["1", "0", "0", "0"])
        raise AssertionError("expected a pole")
    except q.PoleError:
        pass
    try:
        q.QkzSystem(["1", "1"])
        raise AssertionError("expected a config error")
    except q.ConfigError:
        pass

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
