import contextlib
import copy
import json
import math
import warnings

import pytest

from stlfunnel.scenario import (
    ScenarioError,
    bundled_names,
    load_predicates,
    load_scenario,
    resolve,
    scenario_from_dict,
    theta_steps,
)

CASE = ("casestudy", "corollary", "fig1", "nagumo")


@pytest.fixture(scope="module")
def raw():
    with open(resolve("casestudy")) as fh:
        return json.load(fh)


@contextlib.contextmanager
def _quiet():
    # the practical gains deliberately violate the parameter condition
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


def test_bundled_scenarios_load():
    assert set(CASE) <= set(bundled_names())
    for name in CASE:
        with _quiet():
            sc = load_scenario(name)
        assert sc.name == name
        assert sc.sim.horizon >= 10.0


def test_casestudy_values():
    with _quiet():
        sc = load_scenario("casestudy")
    goal, obs = sc.predicates["goal"], sc.predicates["obs"]
    assert goal.center == (1.0, 3.5) and goal.radius == 0.2
    assert obs.center == (2.5, 2.0) and obs.radius == 1.2
    assert sc.x0 == pytest.approx((3.5, 0.3, 15 * math.pi / 16))
    assert sc.sim.input_limits == (1.0, 5.0)
    g = sc.bundle.tasks[0].funnel
    assert g.gamma(0.0) == -4.0 and g.Gamma(10.0) == pytest.approx(0.198)
    spec = sc.bundle.tasks[0].controller
    assert (spec.kind, spec.K, spec.delta, spec.kappa1.scale, spec.kappa2.scale) == ("unicycle-prac", 1.0, 0.5, 5.0, 20.0)
    assert spec.kappa_aug.kind == "exp-funnel-offset" and spec.kappa_aug.scale == 5.0
    assert sc.model.noise.cov_diag == (0.5, 0.5, 5.0)


def test_fig1_values():
    sc = load_scenario("fig1")
    spec = sc.bundle.tasks[0].controller
    assert (spec.kind, spec.K, spec.delta, spec.kappa1.scale, spec.kappa_aug.scale) == ("unicycle-aug", 1.0, 0.0, 2.0, 20.0)
    assert sc.x0[2] == pytest.approx(11 * math.pi / 16)


def test_unknown_keys_rejected(raw):
    bad = copy.deepcopy(raw)
    bad["colour"] = "red"
    with pytest.raises(ScenarioError, match="schema"):
        scenario_from_dict(bad)
    bad = copy.deepcopy(raw)
    bad["tasks"][0]["controller"]["gain"] = 3
    with pytest.raises(ScenarioError, match="tasks/0"):
        scenario_from_dict(bad)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("formula"),
        lambda d: d.__setitem__("x0", [1.0, 2.0]),
        lambda d: d.__setitem__("formula", "F[0,10] nowhere"),
        lambda d: d.__setitem__("formula", "F[3,1] goal"),
        lambda d: d["tasks"][0]["controller"].__setitem__("K", 0.5),
        lambda d: d["combiner"].__setitem__("input_limits", [1.0]),
        lambda d: d["tasks"][1]["funnel"].__setitem__("band", -1.0),
        lambda d: d["system"].__setitem__("kind", "bicycle"),
    ],
)
def test_invalid_scenarios(raw, mutate):
    bad = copy.deepcopy(raw)
    mutate(bad)
    with pytest.raises(ScenarioError):
        with _quiet():
            scenario_from_dict(bad)


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load_scenario("/nonexistent/scenario.json")


def test_overrides():
    with _quiet():
        sc = load_scenario("casestudy")
        o = sc.with_overrides(seed=7, noise=False, theta0=0.5, controller="aug")
    assert o.sim.seed == 7 and o.sim.noise is False
    assert o.x0 == (3.5, 0.3, 0.5)
    assert {t.controller.kind for t in o.bundle.tasks} == {"unicycle-aug"}
    assert sc.sim.seed == 0 and sc.bundle.tasks[0].controller.kind == "unicycle-prac"
    with pytest.raises(ScenarioError):
        load_scenario("fig1").with_overrides(controller="prac")


def test_predicate_tables(tmp_path):
    p = tmp_path / "preds.json"
    p.write_text(json.dumps({"goal": {"kind": "circle-inside", "center": [0, 0], "radius": 1}}))
    assert load_predicates(p)["goal"].radius == 1.0
    scen = resolve("casestudy")
    assert set(load_predicates(scen)) == {"goal", "obs"}
    assert set(load_predicates("casestudy")) == {"goal", "obs"}
    p.write_text(json.dumps({"goal": {"kind": "square"}}))
    with pytest.raises(ScenarioError):
        load_predicates(p)


def test_theta_steps():
    assert theta_steps("0, pi/2, 11pi/16") == pytest.approx([0.0, math.pi / 2, 11 * math.pi / 16])
    assert theta_steps("-pi/4,1.5") == pytest.approx([-math.pi / 4, 1.5])
    with pytest.raises(ValueError):
        theta_steps(" , ")
