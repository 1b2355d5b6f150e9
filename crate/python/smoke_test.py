"""Smoke test for the compiled extension: python python/smoke_test.py"""

from fractions import Fraction

import latticeflow_py as lf


def main():
    law = lf.SideLaw(1, 1, "1/4")
    assert law.velocity("3/4") == 1
    assert law.velocity(Fraction(3, 4)) == law.orbit_velocity("3/4")
    assert law.pinning_threshold() == "8/5"
    assert law.table(2)[0] == ("0/1", "5/8", 0)
    assert law.singular_set(1) == ["5/8", "7/8"]

    half = lf.SideLaw(1, 1, "1/2")
    assert half.minimizers("7/4") == [2, 3, 4]
    try:
        half.optimal_step("7/4")
    except ValueError as e:
        assert "non-unique" in str(e)
    else:
        raise AssertionError("tie not reported")

    ladder = lf.MultiLayerLaw(1, 1, ["0.2", "0.4"])
    assert ladder.layers == 2
    assert [f for _, _, f in ladder.table("2.6")] == [0, 1, 2, 3, 4]

    discrete = lf.evolve_discrete(law, 20, 20, "1/20", "1/5")
    assert len(discrete["states"]) > 1
    ode = lf.evolve_ode(law, 1, 1, 1)
    assert ode["extinction"]["kind"] == "at"
    report = lf.compare_flows(law, 1, 1, ["1/10", "1/20"], "1/20")
    assert len(report["rows"]) == 2

    try:
        lf.SideLaw(-1, 1, 0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative alpha accepted")
    print("smoke test passed")


if __name__ == "__main__":
    main()
