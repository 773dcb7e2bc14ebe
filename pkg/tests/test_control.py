import json

import pytest

from roomsense.classifier import DecisionTreeModel, Leaf, fit_tree
from roomsense.control import (ActuatorBank, ControlSignal, InvalidCode, OracleClassifier,
                               Trajectory, WearableNode, apply_signal, classify_and_signal,
                               run_scenario)
from roomsense.errors import ShapeError
from roomsense.fingerprints import FingerprintDatabase, SplitSpec, split
from roomsense.link import ChannelConfig
from roomsense.radio import Point2D, collect_fingerprints, room_of
from roomsense.rng import stream
from roomsense.scenarios import default_environment, default_walk

ALL_OFF = ((False,) * 3, (False,) * 3)


@pytest.fixture(scope="module")
def env():
    return default_environment(42)


@pytest.fixture(scope="module")
def tree(env):
    db = FingerprintDatabase(env.ap_macs, collect_fingerprints(env, 50, stream(42, "fingerprint")))
    train, _ = split(db, SplitSpec(0.7, 42))
    return fit_tree(train)


@pytest.mark.parametrize("code,pattern", [
    (0, (False, False, False)),
    (1, (True, False, False)),
    (2, (False, True, False)),
    (3, (False, False, True)),
])
def test_apply_signal_table(code, pattern):
    for start in (ActuatorBank.all_off(), ActuatorBank((True, True, True), (True, True, True)),
                  ActuatorBank((False, True, False), (False, True, False))):
        bank = apply_signal(start, ControlSignal(code))
        assert bank.lights == pattern and bank.fans == pattern
        assert apply_signal(bank, ControlSignal(code)) == bank


def test_invalid_code():
    with pytest.raises(InvalidCode):
        apply_signal(ActuatorBank.all_off(), ControlSignal(4))
    with pytest.raises(InvalidCode):
        ControlSignal(256)
    with pytest.raises(InvalidCode):
        ControlSignal.from_bytes(b"")


def test_signal_bytes():
    assert ControlSignal(2).to_bytes() == b"\x02"
    assert ControlSignal.from_bytes(b"\x03") == ControlSignal(3)


def test_active_room():
    assert ActuatorBank.all_off().active_room is None
    assert apply_signal(ActuatorBank.all_off(), ControlSignal(2)).active_room == 2


def test_classify_deep_in_room_one(env, tree):
    node = WearableNode(env.floorplan[0].center, tree)
    rng = stream(42, "probe")
    assert all(classify_and_signal(node, env, rng).code == 1 for _ in range(20))


def test_classify_constant_model(env):
    node = WearableNode(Point2D(1, 1), DecisionTreeModel(Leaf({3: 4}), 3, (3,)))
    assert classify_and_signal(node, env, stream(0, "x")) == ControlSignal(3)


def test_classify_shape_mismatch(env):
    node = WearableNode(Point2D(1, 1), DecisionTreeModel(Leaf({1: 1}), 2, (1,)))
    with pytest.raises(ShapeError):
        classify_and_signal(node, env, stream(0, "x"))


def test_abstain_rule(env):
    unsure = DecisionTreeModel(Leaf({1: 1, 2: 1, 3: 1}), 3, (1, 2, 3))
    node = WearableNode(Point2D(1, 1), unsure)
    assert classify_and_signal(node, env, stream(0, "x")).code == 1
    assert classify_and_signal(node, env, stream(0, "x"), abstain_below=0.4).code == 0


def test_oracle_classifier(env):
    oracle = OracleClassifier(env.floorplan)
    assert classify_and_signal(WearableNode(Point2D(6, 1), oracle), env, None).code == 2
    assert classify_and_signal(WearableNode(Point2D(4.5, 1), oracle), env, None).code == 0


def test_trajectory_interpolation():
    tr = Trajectory(((0, Point2D(0, 0)), (10, Point2D(10, 0)), (20, Point2D(10, 10))))
    assert tr.position(-5) == Point2D(0, 0)
    assert tr.position(5) == Point2D(5, 0)
    assert tr.position(15) == Point2D(10, 5)
    assert tr.position(99) == Point2D(10, 10)
    with pytest.raises(ValueError):
        Trajectory(((0, Point2D(0, 0)), (0, Point2D(1, 1))))
    with pytest.raises(ValueError):
        WearableNode(Point2D(0, 0), None, sample_period=0)


def test_stationary_in_room_two(env, tree):
    log = run_scenario(env, tree, Trajectory.stationary(env.floorplan[1].center),
                       ChannelConfig(loss_prob=0.0, seed=1), 30, stream(1, "scenario"))
    warm = [r for r in log.ticks if r["warm"]]
    assert len(warm) == 30
    assert all(r["lights"] == [False, True, False] and r["fans"] == r["lights"] for r in warm)


def test_total_loss_keeps_all_off(env, tree):
    log = run_scenario(env, tree, default_walk(), ChannelConfig(loss_prob=1.0, seed=1), 60,
                       stream(1, "scenario"))
    assert all(r["lights"] == [False] * 3 and r["fans"] == [False] * 3 for r in log.ticks)
    assert log.summary["frames_delivered"] == 0
    assert log.summary["tracking_accuracy"] is None


def test_mutual_exclusion_and_paired_switching(env, tree):
    log = run_scenario(env, tree, default_walk(), ChannelConfig(loss_prob=0.2, seed=5), 180,
                       stream(5, "scenario"))
    for r in log.ticks:
        assert sum(r["lights"]) <= 1
        assert r["lights"] == r["fans"]


def test_state_changes_only_on_delivery(env, tree):
    log = run_scenario(env, tree, default_walk(), ChannelConfig(loss_prob=0.3, seed=8), 180,
                       stream(8, "scenario"))
    prev = [False] * 3
    for r in log.ticks:
        if r["lights"] != prev:
            assert r["frame"] == "delivered"
        prev = r["lights"]


def test_oracle_lossless_tracks_perfectly(env):
    log = run_scenario(env, OracleClassifier(env.floorplan), default_walk(),
                       ChannelConfig(loss_prob=0.0, seed=3), 180, stream(3, "scenario"))
    assert log.summary["tracking_accuracy"] == 1.0
    assert any(r["truth"] is None for r in log.ticks)  # walks through corridors


def test_reliable_mode_under_loss(env, tree):
    log = run_scenario(env, tree, default_walk(), ChannelConfig(loss_prob=0.2, seed=4), 60,
                       stream(4, "scenario"), reliable=True, retries=5)
    assert log.summary["frames_delivered"] >= 58
    assert any(r.get("attempts", 1) > 1 for r in log.ticks)


def test_log_files(tmp_path, env, tree):
    log = run_scenario(env, tree, default_walk(), ChannelConfig(loss_prob=0.05, seed=42), 20,
                       stream(42, "scenario"))
    log.write(tmp_path / "s.jsonl", tmp_path / "sum.json", tmp_path / "ev.jsonl")
    ticks = [json.loads(line) for line in (tmp_path / "s.jsonl").read_text().splitlines()]
    assert len(ticks) == 20
    assert {"truth", "predicted", "frame", "lights", "fans"} <= set(ticks[0])
    summary = json.loads((tmp_path / "sum.json").read_text())
    assert {"tracking_accuracy", "frames_lost", "mean_actuation_latency"} <= set(summary)
    events = [json.loads(line) for line in (tmp_path / "ev.jsonl").read_text().splitlines()]
    assert set(events[0]) == {"t", "event", "src", "dst", "size", "outcome"}


def test_truth_uses_room_of(env, tree):
    log = run_scenario(env, tree, default_walk(), ChannelConfig(seed=2), 180, stream(2, "scenario"))
    for r in log.ticks:
        assert r["truth"] == room_of(env.floorplan, Point2D(r["x"], r["y"]))
