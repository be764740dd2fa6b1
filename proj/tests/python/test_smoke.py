"""Smoke tests for the python bindings: geometry ops, a full scenario run,
determinism, and error surfacing. Run with PYTHONPATH pointing at the built
extension and the python/ package directory."""

import json
import os

import cyclicbp as cb


def approx(a, b, tol=1e-9):
    return abs(a - b) <= tol


def scenario(name):
    return os.path.join(os.environ["CYCLICBP_SCENARIO_DIR"], name)


def test_geometry():
    a = cb.Region.cloud([[0.0], [2.0]])
    b = cb.Region.cloud([[0.0]])
    assert approx(cb.hausdorff(a, b), 2.0)
    assert approx(cb.metric([3.0, 4.0], [0.0, 0.0]), 5.0)
    assert approx(cb.set_distance(cb.Region.interval(0.0, 1.0), cb.Region.interval(2.0, 3.0)), 1.0)
    assert approx(cb.sup_deviation(cb.Region.interval(0.0, 1.0), cb.Region.interval(2.0, 3.0)), 3.0)
    assert approx(cb.diameter(cb.Region.ball([0.0, 0.0], 3.0)), 6.0)
    assert cb.nearest_point([5.0], cb.Region.interval(0.0, 1.0)) == [1.0]
    assert cb.sample(cb.Region.interval(0.0, 1.0), 3, 1) == [[0.0], [0.5], [1.0]]
    assert cb.Region.ball([0.0], 1.0).contains([0.5])


def test_scenario_run():
    result = cb.run_scenario_file(scenario("two_interval.json"))
    doc = json.loads(result["machine_json"])
    assert doc["checks"]["contraction"]["verdict"] == "PASS"
    assert doc["checks"]["assumption4"]["verdict"] == "PASS"
    run0 = doc["runs"][0]
    assert run0["status"] == "converged"
    assert approx(run0["limits"][0]["point"][0], 1.0, 1e-8)
    assert approx(run0["limits"][1]["point"][0], 2.0, 1e-8)
    assert len(result["traces"]) == 3
    header = result["traces"][0].splitlines()[0]
    assert header == "step,subset,x0,d_n,order_certified,in_band"
    assert result["required_checks_pass"] is True

    again = cb.run_scenario_file(scenario("two_interval.json"))
    assert again["report_text"] == result["report_text"]
    assert again["traces"] == result["traces"]


def test_machine_json_for_every_scenario():
    names = [
        "two_interval.json",
        "intersecting.json",
        "ball_valued.json",
        "violating.json",
        "three_box.json",
    ]
    for name in names:
        result = cb.run_scenario_file(scenario(name))
        doc = json.loads(result["machine_json"])  # must stay valid JSON
        assert doc["scenario"] == name.removesuffix(".json")
        assert len(doc["runs"]) == len(result["traces"])
        for trace in result["traces"]:
            lines = trace.splitlines()
            columns = len(lines[0].split(","))
            assert all(len(row.split(",")) == columns for row in lines[1:])


def test_check_and_canonical():
    verdicts = cb.check_scenario_file(scenario("violating.json"))
    assert verdicts["contraction"] == "FAIL"
    assert verdicts["all_required_pass"] is False

    text = open(scenario("intersecting.json")).read()
    canonical = cb.canonical_scenario_json(text)
    assert cb.canonical_scenario_json(canonical) == canonical


def test_errors():
    try:
        cb.run_scenario_text("{ not json")
    except ValueError as e:
        assert "parse error" in str(e)
    else:
        raise AssertionError("expected a ScenarioError")

    try:
        cb.metric([0.0], [0.0, 1.0])
    except ValueError:
        pass
    else:
        raise AssertionError("expected a dimension mismatch error")


if __name__ == "__main__":
    test_geometry()
    test_scenario_run()
    test_machine_json_for_every_scenario()
    test_check_and_canonical()
    test_errors()
    print("python smoke: all checks passed")
