"""INI scenario files mapped onto ScenarioConfig.

Flat key/value sections; every physical quantity carries its SI unit in
the key name.  Unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import configparser

import numpy as np

from .attitude import InertiaTensor
from .controller import HorizonConfig, Weights
from .cw import OrbitParams
from .simulate import ScenarioConfig, table1_scenario

_SCHEMA = {
    "orbit": {"mu_km3_s2", "orbit_radius_km", "sampling_period_s"},
    "inertia": {"i1_kg_m2", "i2_kg_m2", "i3_kg_m2"},
    "initial_state": {
        "r_body_m", "v_lvlh_m_s", "q_scalar_first", "omega_body_deg_s",
    },
    "horizon": {"control_horizon", "lqr_window"},
    "weights": {
        "q_position", "q_velocity", "r_control", "t_lateral", "t_radial",
        "q_lqr", "alpha_lqr",
    },
    "constraints": {"c_x", "c_z", "x0_m", "z0_m", "u_max_m_s"},
    "simulation": {
        "steps", "mode", "attitude_mode", "attitude_substeps",
        "isp_s", "m0_kg",
    },
    "feasibility_sweep": {
        "spin_rates_deg_s", "sampling_periods_s", "omega_direction",
    },
}


class ConfigError(ValueError):
    pass


def _vector(text: str, n: int) -> np.ndarray:
    parts = [p for chunk in text.split(",") for p in chunk.split()]
    if len(parts) != n:
        raise ConfigError(f"expected {n} components, got {text!r}")
    return np.array([float(p) for p in parts])


def load_scenario(path: str) -> ScenarioConfig:
    """Parse a scenario INI file; missing keys fall back to the preset."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        unknown = set(parser[section]) - _SCHEMA[section]
        if unknown:
            raise ConfigError(f"unknown keys in [{section}]: {sorted(unknown)}")

    base = table1_scenario()

    def get(section, key, cast=float, default=None):
        if parser.has_option(section, key):
            return cast(parser.get(section, key))
        return default

    orbit = OrbitParams(
        mu=get("orbit", "mu_km3_s2", default=base.orbit.mu),
        radius=get("orbit", "orbit_radius_km", default=base.orbit.radius),
        period=get("orbit", "sampling_period_s", default=base.orbit.period),
    )
    inertia = InertiaTensor(
        get("inertia", "i1_kg_m2", default=base.inertia.i1),
        get("inertia", "i2_kg_m2", default=base.inertia.i2),
        get("inertia", "i3_kg_m2", default=base.inertia.i3),
    )
    vec = lambda s, k, n, dflt: (
        _vector(parser.get(s, k), n) if parser.has_option(s, k) else dflt
    )
    horizon = HorizonConfig(
        N_c=get("horizon", "control_horizon", int, base.horizon.N_c),
        N=get("horizon", "lqr_window", int, base.horizon.N),
    )
    qp = get("weights", "q_position", default=float(base.weights.Q[0]))
    qv = get("weights", "q_velocity", default=float(base.weights.Q[3]))
    rc = get("weights", "r_control", default=float(base.weights.R[0]))
    t_lat = get("weights", "t_lateral", default=float(base.weights.T_w[0]))
    t_rad = get("weights", "t_radial", default=float(base.weights.T_w[1]))
    weights = Weights(
        Q=np.array([qp, qp, qp, qv, qv, qv]),
        R=np.full(3, rc),
        T_w=np.array([t_lat, t_rad, t_lat]),
    )
    return ScenarioConfig(
        orbit=orbit,
        inertia=inertia,
        r_body0=vec("initial_state", "r_body_m", 3, base.r_body0),
        v_lvlh0=vec("initial_state", "v_lvlh_m_s", 3, base.v_lvlh0),
        q0=vec("initial_state", "q_scalar_first", 4, base.q0),
        omega0=np.deg2rad(vec("initial_state", "omega_body_deg_s", 3, np.rad2deg(base.omega0))),
        horizon=horizon,
        weights=weights,
        q_lqr=get("weights", "q_lqr", default=base.q_lqr),
        alpha_lqr=get("weights", "alpha_lqr", default=base.alpha_lqr),
        c_x=get("constraints", "c_x", default=base.c_x),
        c_z=get("constraints", "c_z", default=base.c_z),
        x0=get("constraints", "x0_m", default=base.x0),
        z0=get("constraints", "z0_m", default=base.z0),
        u_max=get("constraints", "u_max_m_s", default=base.u_max),
        steps=get("simulation", "steps", int, base.steps),
        mode=get("simulation", "mode", str, base.mode),
        attitude_mode=get("simulation", "attitude_mode", str, base.attitude_mode),
        attitude_substeps=get("simulation", "attitude_substeps", int, base.attitude_substeps),
        isp=get("simulation", "isp_s", default=base.isp),
        m0=get("simulation", "m0_kg", default=base.m0),
    )


def load_sweep(path: str) -> dict:
    """Sweep grid for the feasibility map (falls back to a small default)."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read(path)
    rates = (
        _vector(parser.get("feasibility_sweep", "spin_rates_deg_s"), -1)
        if parser.has_option("feasibility_sweep", "spin_rates_deg_s")
        else None
    )
    if parser.has_option("feasibility_sweep", "spin_rates_deg_s"):
        text = parser.get("feasibility_sweep", "spin_rates_deg_s")
        rates = np.array([float(p) for p in text.replace(",", " ").split()])
    else:
        rates = np.array([1.0, 2.0, 3.0, 5.0])
    if parser.has_option("feasibility_sweep", "sampling_periods_s"):
        text = parser.get("feasibility_sweep", "sampling_periods_s")
        periods = np.array([float(p) for p in text.replace(",", " ").split()])
    else:
        periods = np.array([0.5, 1.0, 2.0])
    if parser.has_option("feasibility_sweep", "omega_direction"):
        direction = _vector(parser.get("feasibility_sweep", "omega_direction"), 3)
    else:
        direction = np.array([0.0, 1.0, 1.0])
    return {
        "spin_rates_rad_s": np.deg2rad(rates),
        "sampling_periods_s": periods,
        "omega_direction": direction,
    }


def write_example_config(path: str) -> None:
    """Emit a fully-populated example file for the case-study preset."""
    base = table1_scenario()
    text = f"""# tumbledock scenario file (all quantities SI unless suffixed otherwise)
[orbit]
mu_km3_s2 = {base.orbit.mu}
orbit_radius_km = {base.orbit.radius}
sampling_period_s = {base.orbit.period}

[inertia]
# Envisat-class principal moments, externally sourced values
i1_kg_m2 = {base.inertia.i1}
i2_kg_m2 = {base.inertia.i2}
i3_kg_m2 = {base.inertia.i3}

[initial_state]
r_body_m = 1.5, 2.5, 1.5
v_lvlh_m_s = 0, 0, 0
q_scalar_first = 1, 0, 0, 0
omega_body_deg_s = 0, 3.53, 3.53

[horizon]
control_horizon = {base.horizon.N_c}
lqr_window = {base.horizon.N}

[weights]
q_position = {base.weights.Q[0]}
q_velocity = {base.weights.Q[3]}
r_control = {base.weights.R[0]}
t_lateral = {base.weights.T_w[0]}
t_radial = {base.weights.T_w[1]}
q_lqr = {base.q_lqr}
alpha_lqr = {base.alpha_lqr}

[constraints]
c_x = {base.c_x}
c_z = {base.c_z}
x0_m = {base.x0}
z0_m = {base.z0}
u_max_m_s = {base.u_max}

[simulation]
steps = {base.steps}
mode = {base.mode}
attitude_mode = {base.attitude_mode}
attitude_substeps = {base.attitude_substeps}
isp_s = {base.isp}
m0_kg = {base.m0}

[feasibility_sweep]
spin_rates_deg_s = 1, 2, 3, 5
sampling_periods_s = 0.5, 1, 2
omega_direction = 0, 1, 1
"""
    with open(path, "w") as fh:
        fh.write(text)
