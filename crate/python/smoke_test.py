"""Smoke test for the convlab Python bindings.

Build and install the extension first:

    pip install --no-build-isolation ./crates/python

then run `python python/smoke_test.py`.
"""

import convlab_py as cl

RAVEN_COMPACT = """
problem raven {
  alphabet: black, nonblack;
  hypotheses: yes, no;
  states: q0 [yes], q1 [no];
  init: q0;
  q0 --black--> q0; q0 --nonblack--> q1; q1 --*--> q1;
}
"""


def main():
    raven = cl.Problem.builtin("raven")
    assert raven.alphabet == ["black", "nonblack"]
    assert raven.truth([], ["black"]) == "yes"
    assert raven.truth(["black", "nonblack"], ["black"]) == "no"
    assert raven.possible_truths(["nonblack"]) == ["no"]

    induction = cl.Method.builtin("ordinary_induction")
    assert cl.check(induction, raven, "stable_pointwise")["verdict"] == "pass"
    v = cl.check(cl.Method.builtin("occasional_counterinduction:2"), raven, "stable_pointwise")
    assert v["verdict"] == "fail" and v["replayed"] is True, v
    assert cl.check(cl.Method.builtin("skeptic"), raven, "pointwise")["verdict"] == "fail"

    report = cl.achievability(raven)
    assert report["highest_achievable"] == "stable_pointwise", report

    parsed = cl.Problem.from_dsl(RAVEN_COMPACT)
    assert parsed.truth(["nonblack"], ["black"]) == "no"
    text = cl.format_dsl(RAVEN_COMPACT)
    assert cl.format_dsl(text) == text
    try:
        cl.compile("problem p { alphabet: a }")
    except ValueError as e:
        assert "E01 syntax" in str(e)
    else:
        raise AssertionError("malformed source accepted")

    assert cl.hoeffding_sample_size("0.1", "0.05") == 185
    assert cl.hoeffding_sample_size(0.5, 0.5) == 3
    cons = cl.consistency(seed=1, replicates=500)
    assert cons["n"] == 185 and cons["min_coverage"] >= 0.9, cons["min_coverage"]
    assert cl.consistency(seed=1, replicates=500) == cons

    prog = cl.progressiveness(seed=1, test="odd_adversary", n_grid=[10, 11, 12], replicates=500)
    assert not prog["progressive"]

    trace = cl.posterior_trace([], ["black"], horizon=10)
    assert (trace["points"][10]["mass_numerator"], trace["points"][10]["mass_denominator"]) == ("1024", "1025")
    assert cl.bayes_verdict()["pass"]

    print(f"convlab {cl.__version__} ({cl.PRNG_ID}): smoke test passed")


if __name__ == "__main__":
    main()
