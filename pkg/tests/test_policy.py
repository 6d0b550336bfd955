"""Policy state machine tests: graded response, costs, determinism."""

import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mtdlab.policy import (
    ContainerRecord,
    ContainerState,
    HostDescriptor,
    InvalidTransitionError,
    Migrate,
    NoCandidateError,
    NoOp,
    PolicyConfig,
    Restart,
    Rollback,
    SESSION_LOG_HEADER,
    apply_action,
    load_hosts,
    logical_distance,
    on_anomaly,
    run_policy_session,
    select_destination,
    write_session_log,
)

H1 = HostDescriptor("h1", "large", "dmz", "east")
H2 = HostDescriptor("h2", "large", "dmz", "east")
H3 = HostDescriptor("h3", "small", "internal", "west")
HOSTS = [H1, H2, H3]


def stateful(host="h1", **kwargs) -> ContainerRecord:
    return ContainerRecord(container_id="c1", kind="stateful", current_host=host, **kwargs)


def stateless(host="h1", **kwargs) -> ContainerRecord:
    return ContainerRecord(container_id="c1", kind="stateless", current_host=host, **kwargs)


def rng(seed=7) -> np.random.Generator:
    return np.random.default_rng(seed)


# ── logical_distance ───────────────────────────────────────────────────

def test_distance_identity():
    assert logical_distance(H1, H1) == 0
    assert logical_distance(H1, H2) == 0  # same attributes, different id


def test_distance_single_attribute():
    other = HostDescriptor("hx", "large", "dmz", "west")
    assert logical_distance(H1, other) == 1
    assert logical_distance(other, H1) == 1


def test_distance_all_attributes():
    assert logical_distance(H1, H3) == 3


# ── select_destination ─────────────────────────────────────────────────

def test_two_hosts_max_distance_picks_the_other():
    assert select_destination(H1, [H1, H3], "max_logical_distance", rng()) == "h3"


def test_max_distance_lexicographic_tie_break():
    current = HostDescriptor("h0", "a", "b", "c")
    near = HostDescriptor("h2", "a", "b", "z")          # distance 1
    far_one = HostDescriptor("h1", "x", "y", "z")       # distance 3
    far_two = HostDescriptor("h3", "p", "q", "r")       # distance 3
    got = select_destination(current, [current, near, far_one, far_two],
                             "max_logical_distance", rng())
    assert got == "h1"


def test_no_candidates_raises():
    with pytest.raises(NoCandidateError):
        select_destination(H1, [H1], "uniform_random", rng())


def test_uniform_random_deterministic_and_valid():
    picks = {select_destination(H1, HOSTS, "uniform_random", rng(s)) for s in range(40)}
    assert picks <= {"h2", "h3"}
    assert len(picks) == 2
    assert (select_destination(H1, HOSTS, "uniform_random", rng(3))
            == select_destination(H1, HOSTS, "uniform_random", rng(3)))


# ── on_anomaly ─────────────────────────────────────────────────────────

def test_stateful_first_anomaly_is_rollback():
    assert on_anomaly(stateful(), PolicyConfig(), HOSTS, rng()) == Rollback()


def test_stateful_escalates_after_budget():
    record = stateful(rollback_count=3)
    action = on_anomaly(record, PolicyConfig(rollback_limit=3), HOSTS, rng())
    assert isinstance(action, Migrate)
    assert action.destination != "h1"


def test_stateless_first_anomaly_is_restart():
    assert on_anomaly(stateless(), PolicyConfig(), HOSTS, rng()) == Restart()


def test_stateless_recurrence_after_restart_migrates():
    record = stateless()
    policy = PolicyConfig()
    apply_action(record, Restart(), policy, tick=0)
    action = on_anomaly(record, policy, HOSTS, rng())
    assert isinstance(action, Migrate)


def test_stateless_fresh_host_restarts_again():
    record = stateless()
    policy = PolicyConfig()
    apply_action(record, Restart(), policy, tick=0)
    apply_action(record, Migrate("h3"), policy, tick=1)
    assert on_anomaly(record, policy, HOSTS, rng()) == Restart()


def test_on_anomaly_requires_running():
    record = stateful()
    record.state = ContainerState.FAILED
    with pytest.raises(InvalidTransitionError):
        on_anomaly(record, PolicyConfig(), HOSTS, rng())


# ── apply_action ───────────────────────────────────────────────────────

def test_rollback_costs_checkpoint_plus_restore():
    record = stateful()
    policy = PolicyConfig(checkpoint_cost_ms=40, restore_cost_ms=60)
    apply_action(record, Rollback(), policy, tick=0)
    assert record.cumulative_downtime == 100.0
    assert record.rollback_count == 1
    assert record.state is ContainerState.RUNNING


def test_migrate_changes_host_and_resets_counter():
    record = stateful(rollback_count=2)
    apply_action(record, Migrate("h3"), PolicyConfig(), tick=5)
    assert record.current_host == "h3"
    assert record.rollback_count == 0
    assert record.cumulative_downtime == PolicyConfig().migration_downtime_ms


def test_migrate_to_self_rejected():
    with pytest.raises(InvalidTransitionError):
        apply_action(stateful(), Migrate("h1"), PolicyConfig(), tick=0)


def test_noop_logs_without_changes():
    record = stateful()
    apply_action(record, NoOp(), PolicyConfig(), tick=9)
    assert record.cumulative_downtime == 0.0
    assert record.rollback_count == 0
    assert len(record.event_log) == 1
    assert record.event_log[0].action == "NoOp"


def test_action_on_failed_container_rejected():
    record = stateful()
    record.state = ContainerState.FAILED
    with pytest.raises(InvalidTransitionError):
        apply_action(record, Rollback(), PolicyConfig(), tick=0)


# ── run_policy_session ─────────────────────────────────────────────────

def test_empty_anomaly_list_is_identity():
    record = stateful()
    run_policy_session([], record, PolicyConfig(), HOSTS, rng())
    assert record.event_log == []
    assert record.cumulative_downtime == 0.0


def test_persistent_stateful_rule():
    record = stateful()
    run_policy_session(range(5), record, PolicyConfig(rollback_limit=3), HOSTS, rng())
    assert [e.action for e in record.event_log] == \
        ["Rollback", "Rollback", "Rollback", "Migrate", "Rollback"]


def test_single_stateless_anomaly_restarts():
    record = stateless()
    run_policy_session([4], record, PolicyConfig(), HOSTS, rng())
    assert [e.action for e in record.event_log] == ["Restart"]


def test_session_deterministic():
    def run():
        record = stateful()
        run_policy_session(range(12), record, PolicyConfig(), HOSTS, rng(99))
        return [(e.action, e.dest_host) for e in record.event_log]

    assert run() == run()


def test_accounting_matches_log():
    record = stateful()
    policy = PolicyConfig(checkpoint_cost_ms=7, restore_cost_ms=11,
                          migration_downtime_ms=123, restart_cost_ms=5)
    run_policy_session(range(9), record, policy, HOSTS, rng())
    assert record.cumulative_downtime == sum(e.downtime_ms for e in record.event_log)


# ── file interfaces ────────────────────────────────────────────────────

def test_load_hosts():
    text = "# fleet\nh1,large,dmz,east\nh2,small,internal,west\n\n"
    hosts = load_hosts(io.StringIO(text))
    assert hosts == [
        HostDescriptor("h1", "large", "dmz", "east"),
        HostDescriptor("h2", "small", "internal", "west"),
    ]


def test_load_hosts_rejects_bad_line():
    with pytest.raises(ValueError):
        load_hosts(io.StringIO("h1,large,dmz\n"))
    with pytest.raises(ValueError):
        load_hosts(io.StringIO("h1,a,b,c\nh1,d,e,f\n"))


def test_session_log_csv(tmp_path):
    record = stateful()
    run_policy_session(range(4), record, PolicyConfig(rollback_limit=3), HOSTS, rng())
    out = tmp_path / "session.csv"
    write_session_log(record, out)
    lines = out.read_text().splitlines()
    assert lines[0].startswith("#")
    assert lines[1] == SESSION_LOG_HEADER
    assert len(lines) == 2 + 4
    first = lines[2].split(",")
    assert first[0] == "0" and first[1] == "c1" and first[2] == "Rollback"
    assert first[3] == first[4] == "h1"


# ── properties ─────────────────────────────────────────────────────────

@settings(max_examples=60, deadline=None)
@given(n_anomalies=st.integers(0, 60), limit=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
def test_property_bounded_rollbacks_and_liveness(n_anomalies, limit, seed):
    record = stateful()
    policy = PolicyConfig(rollback_limit=limit)
    run_policy_session(range(n_anomalies), record, policy, HOSTS, rng(seed))

    streak = 0
    for entry in record.event_log:
        if entry.action == "Rollback":
            streak += 1
            assert streak <= limit
        elif entry.action == "Migrate":
            streak = 0
    # a persistent stream migrates at least every limit+1 actions
    actions = [e.action for e in record.event_log]
    for i in range(0, len(actions) - limit, limit + 1):
        assert "Migrate" in actions[i : i + limit + 1]


@settings(max_examples=40, deadline=None)
@given(n_anomalies=st.integers(0, 40), seed=st.integers(0, 2**32 - 1),
       kind=st.sampled_from(["stateful", "stateless"]))
def test_property_migrations_change_host_and_accounting(n_anomalies, seed, kind):
    record = ContainerRecord(container_id="c1", kind=kind, current_host="h1")
    policy = PolicyConfig(destination_strategy="uniform_random")
    run_policy_session(range(n_anomalies), record, policy, HOSTS, rng(seed))
    for entry in record.event_log:
        if entry.action == "Migrate":
            assert entry.dest_host != entry.source_host
    assert record.cumulative_downtime == pytest.approx(
        sum(e.downtime_ms for e in record.event_log)
    )
    assert record.rollback_count <= policy.rollback_limit
