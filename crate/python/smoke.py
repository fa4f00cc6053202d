"""Smoke test for the epsfac extension module."""

import json
import pathlib

import epsfac

ROOT = pathlib.Path(__file__).resolve().parents[1]


def main():
    q = epsfac.BaseRing.rationals()
    dual = epsfac.BaseRing.nilpotent(2)

    triv = epsfac.FormalConnection([("0", "0", 1, 1)])
    assert triv.dr_cohomology() == (1, 1)
    e = triv.epsilon(epsfac.Series("1", q))
    assert (e.grade, e.unit) == (-1, "1")

    irr = epsfac.FormalConnection([("t^-2", "1/3", 1, 1)])
    assert irr.irregularity == 2
    assert irr.goodness_defect() == (0, 0)
    assert irr.epsilon(epsfac.Series("t^2 + t^3")).grade == -(3 + 2)

    two = triv.direct_sum(epsfac.FormalConnection([("0", "1/2", 1, 1)]))
    line = two.epsilon(epsfac.Series("1 + eps", dual))
    assert line.unit == "1 - 2*eps", line

    l1 = epsfac.Lattice([["1", "0"], ["0", "1"]])
    l2 = epsfac.Lattice([["t", "1"], ["0", "t^2"]])
    l3 = epsfac.Lattice([["t^-1", "1 + t"], ["3", "t^-1"]])
    d12, d23 = epsfac.relative_det(l1, l2), epsfac.relative_det(l2, l3)
    assert d12.tensor(d23) == epsfac.relative_det(l1, l3)
    assert epsfac.relative_det(l2, l1) == d12.inverse()

    f = epsfac.Series("1 + eps*t^-1", dual)
    lhs, rhs = epsfac.twist_identity(triv, epsfac.Series("1", dual), f)
    assert lhs == rhs
    u1 = epsfac.Series("1", dual)
    u2 = epsfac.Series("1 + eps*t^-1", dual)
    u3 = epsfac.Series("1 + eps*t^-1 + eps*t^-2", dual)
    assert epsfac.cocycle_check(triv, u1, u2, u3)
    assert epsfac.crystal_iso(triv, u1, epsfac.Series("1 + eps", dual)) == "1 - eps"

    rep = epsfac.product_formula("0", ["0", "oo"], "1")
    assert rep["holds"] and rep["euler_characteristic"] == 0
    assert [(p, g) for p, g, _ in rep["local"]] == [("0", -1), ("oo", 1)]

    try:
        epsfac.product_formula("1/t", ["oo"], "1")
    except epsfac.AdmissibilityError:
        pass
    else:
        raise AssertionError("expected an admissibility error")
    try:
        epsfac.Series("t^^2")
    except epsfac.InputError as err:
        assert "position 2" in str(err)
    else:
        raise AssertionError("expected a parse error")

    text = (ROOT / "crates" / "cli" / "corpus" / "gm_trivial.json").read_text()
    report, passed = epsfac.run_problem(text)
    assert passed and json.loads(report)["verdict"] == "pass"
    golden = (ROOT / "crates" / "cli" / "corpus" / "golden" / "gm_trivial.json").read_text()
    assert report == golden

    print("epsfac smoke test: ok")


if __name__ == "__main__":
    main()
