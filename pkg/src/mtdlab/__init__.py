"""mtdlab: a desk-scale moving-target-defense laboratory.

Four engines and a CLI:

- :mod:`mtdlab.analytic`: closed-form survival probabilities for a
  hunted container, static or relocating, with an optional detection
  stage and three attacker growth laws.
- :mod:`mtdlab.lattice`: seeded Monte Carlo pursuit on a 2-D host torus
  that cross-validates the closed forms.
- :mod:`mtdlab.detector`: bag-of-syscalls behavior learning and
  per-epoch anomaly detection over trace files.
- :mod:`mtdlab.policy`: the rollback / restart / migrate response state
  machine with a configurable downtime cost model.
- :mod:`mtdlab.cli`: the ``mtdlab`` command gluing them together.
"""

from .analytic import (
    DetectionParams,
    DomainError,
    ExponentialGrowth,
    GrowthModel,
    LogisticGrowth,
    PopulationParams,
    StaticGrowth,
    SurvivalCurve,
    attackers_at,
    detection_success_fraction,
    distinct_sites_visited,
    survival_curve,
    survival_mobile,
    survival_static,
)
from .detector import (
    DetectionReport,
    EpochConfig,
    NormalBehaviorDb,
    SyscallEvent,
    detect,
    emit_anomaly_signal,
    load_db,
    parse_trace,
    save_db,
    train,
)
from .lattice import (
    EmpiricalCurve,
    LatticeWorld,
    SimConfig,
    TrialOutcome,
    init_world,
    resolve_encounter,
    run_experiment,
    run_trial,
    step,
)
from .policy import (
    ContainerRecord,
    HostDescriptor,
    PolicyConfig,
    apply_action,
    logical_distance,
    on_anomaly,
    run_policy_session,
    select_destination,
)

__version__ = "0.1.0"
