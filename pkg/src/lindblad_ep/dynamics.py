"""Fixed-step time evolution in both frames, plus a spectral propagator.

The rotating-frame path integrates the flattened linear system
dpsi/dt = -i L psi; the lab-frame path integrates the 2x2 master equation with
the oscillatory drive Hamiltonian evaluated at every stage time.  Both use
classical fourth-order Runge-Kutta with a fixed step: the state space is four
dimensional and linear, so adaptive stepping would buy nothing and cost
reproducibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NearDegenerateError, StepSizeError
from .exceptional import Region, classify
from .model import (
    LabParams,
    ModelParams,
    check_density_matrix,
    devectorize,
    hamiltonian_rwa,
    hermiticity_defect,
    max_abs,
    rotate_to_lab,
    trace_defect,
    vectorize,
)
from .spectrum import full_spectrum
from .superop import build_lindblad, equilibrium_state, lindblad_rhs

# Snapshot cadence: at most this many saved states per trajectory.
MAX_SAVED = 1001

# A trace drift past this threshold aborts the run: for these generators the
# trace is conserved exactly by any Runge-Kutta step, so visible drift means
# the iteration is unstable (dt too large), not merely inaccurate.
TRACE_BLOWUP_TOL = 1e-8


@dataclass(frozen=True)
class Trajectory:
    """Integration record: sample times, states and per-sample diagnostics.

    ``dist_eq`` is the max-norm distance to the stationary state (for
    lab-frame runs, to the stationary state carried into the lab frame at the
    sample time).
    """

    times: np.ndarray
    states: np.ndarray
    trace_dev: np.ndarray
    herm_dev: np.ndarray
    dist_eq: np.ndarray

    def final_state(self) -> np.ndarray:
        return self.states[-1]


def step_rk4(derivative, t: float, state: np.ndarray, dt: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step; works on any array state."""
    if dt <= 0:
        raise DomainError(f"dt must be positive, got {dt}")
    k1 = derivative(t, state)
    k2 = derivative(t + 0.5 * dt, state + (0.5 * dt) * k1)
    k3 = derivative(t + 0.5 * dt, state + (0.5 * dt) * k2)
    k4 = derivative(t + dt, state + dt * k3)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _suggest_dt(generator_scale: float) -> float:
    return 1e-3 * min(1.0, 1.0 / max(generator_scale, 1e-300))


def _run(rhs, state0, t_max, dt, trace_of, to_rho, rho_eq_at, scale) -> Trajectory:
    if not (dt > 0 and dt <= t_max):
        raise DomainError(f"need 0 < dt <= t_max, got dt={dt}, t_max={t_max}")
    n_steps = max(1, int(round(t_max / dt)))
    stride = max(1, math.ceil(n_steps / (MAX_SAVED - 1)))

    times = []
    states = []

    def record(i: int, state) -> None:
        times.append(i * dt)
        states.append(to_rho(state))

    record(0, state0)
    state = state0
    for i in range(1, n_steps + 1):
        state = step_rk4(rhs, (i - 1) * dt, state, dt)
        drift = abs(trace_of(state) - 1.0)
        if not (drift <= TRACE_BLOWUP_TOL):
            raise StepSizeError(
                f"trace drifted by {drift:.3e} at t = {i * dt:.6g}; "
                f"the step is unstable, try dt <= {_suggest_dt(scale):.3e}"
            )
        if i % stride == 0 or i == n_steps:
            record(i, state)

    times = np.array(times)
    states = np.array(states)
    trace_dev = np.array([trace_defect(rho) for rho in states])
    herm_dev = np.array([hermiticity_defect(rho) for rho in states])
    dist_eq = np.array(
        [max_abs(rho - rho_eq_at(t)) for t, rho in zip(times, states)]
    )
    return Trajectory(times, states, trace_dev, herm_dev, dist_eq)


def evolve_rotating(
    params: ModelParams, rho0: np.ndarray, t_max: float, dt: float
) -> Trajectory:
    """Integrate the time-independent flattened system from ``rho0``.

    Saves at most :data:`MAX_SAVED` snapshots (the final state always
    included) and aborts with :class:`StepSizeError` on trace drift.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    check_density_matrix(rho0)
    L = build_lindblad(params)
    gen = -1j * L
    rho_eq = equilibrium_state(params)

    def rhs(t, psi):
        return gen @ psi

    return _run(
        rhs,
        vectorize(rho0),
        t_max,
        dt,
        trace_of=lambda psi: complex(psi[2] + psi[3]),
        to_rho=devectorize,
        rho_eq_at=lambda t: rho_eq,
        scale=max_abs(L),
    )


def evolve_lab(
    params: LabParams, rho0: np.ndarray, t_max: float, dt: float
) -> Trajectory:
    """Integrate the lab-frame master equation with the oscillatory drive.

    The Hamiltonian is re-evaluated at every Runge-Kutta stage time.  Reduces
    exactly to :func:`evolve_rotating` when omega = 0.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    check_density_matrix(rho0)
    gamma = params.gamma
    omega = params.omega
    rho_eq_rot = equilibrium_state(params.to_rotating())

    def rhs(t, rho):
        return lindblad_rhs(hamiltonian_rwa(params, t), gamma, rho)

    scale = abs(params.Delta) + abs(params.d) + gamma
    return _run(
        rhs,
        rho0,
        t_max,
        dt,
        trace_of=lambda rho: complex(rho[0, 0] + rho[1, 1]),
        to_rho=lambda rho: rho,
        rho_eq_at=lambda t: rotate_to_lab(rho_eq_rot, omega, t),
        scale=scale,
    )


def verify_frame_equivalence(
    params: LabParams, rho0: np.ndarray, t_max: float, dt: float
) -> float:
    """Worst max-norm mismatch between the lab evolution and the rotated rotating one.

    The two trajectories solve the same physics in different frames, so the
    mismatch is pure integrator truncation: it shrinks as dt^4.
    """
    traj_lab = evolve_lab(params, rho0, t_max, dt)
    traj_rot = evolve_rotating(params.to_rotating(), rho0, t_max, dt)
    dev = 0.0
    for t, rho_lab, rho_rot in zip(traj_lab.times, traj_lab.states, traj_rot.states):
        dev = max(dev, max_abs(rho_lab - rotate_to_lab(rho_rot, params.omega, t)))
    return dev


def spectral_evolve(params: ModelParams, rho0: np.ndarray, t: float) -> np.ndarray:
    """Propagate by eigendecomposition: sum of decaying modes weighted by overlaps.

    Valid only away from exceptional points, where the biorthogonal system is
    complete; refuses EP-labelled parameter points and propagates
    :class:`NearDegenerateError` from the eigenvector construction otherwise.
    """
    point = classify(params)
    if point.region in (Region.EP2_MINUS, Region.EP2_PLUS, Region.EP3):
        raise NearDegenerateError(
            f"parameters classify as {point.region.value}; the spectral "
            "propagator has no complete mode basis there (use the integrator)"
        )
    rho0 = np.asarray(rho0, dtype=complex)
    spec = full_spectrum(params)
    psi0 = vectorize(rho0)
    psi_t = np.zeros(4, dtype=complex)
    for nu in range(4):
        weight = spec.left[nu] @ psi0
        psi_t = psi_t + np.exp(-1j * spec.eigenvalues[nu] * t) * weight * spec.right[nu]
    return devectorize(psi_t)
