"""Guidance for 3-DOF rendezvous with tumbling targets.

Tracking MPC over a hybrid body/LVLH state with terminal LQR and
dead-beat phases, closed-form feasibility envelopes for the equilibrium
parameter, a dense active-set QP solver, and a closed-loop simulation
harness.  A FastAPI service wraps the library; the CLI is a thin client
of that service.
"""

from .attitude import (
    AttitudeTrajectory,
    InertiaTensor,
    PolhodeInvariants,
    RotationalState,
    euler_poinsot_rate,
    polhode_invariants,
    propagate_attitude,
)
from .controller import (
    CondensedQP,
    ConstraintSet,
    ControlSchedules,
    HorizonConfig,
    Weights,
    build_qp,
    extract_control,
    reduce_constraints,
)
from .cw import ImpulseBudget, OrbitParams, StmPair, fuel_mass, hcw_stm, propagate_lvlh
from .envelope import (
    ControlPolytope,
    FeasibilityEnvelope,
    TrackingControlMatrix,
    lemma2_theta_max,
    los_cap,
    polhode_extremum,
    theta_max_envelope,
    tracking_control_matrix,
)
from .gains import GainSchedule, LqrDesign, deadbeat_gains, rotate_lqr_gain, solve_dare
from .ltv import (
    EquilibriumBasis,
    LtvStep,
    RelativeState,
    body_ltv_step,
    equilibrium_basis,
    equilibrium_trajectory,
)
from .qp import QpOptions, QpSolution, kkt_residual, solve_qp
from .simulate import (
    ScenarioConfig,
    Telemetry,
    metrics,
    prepare,
    run_closed_loop,
    table1_scenario,
)

__version__ = "0.1.0"
