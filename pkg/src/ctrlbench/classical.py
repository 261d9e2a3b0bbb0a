"""LQI design and exact margin analysis for linear loops.

The plant is augmented with an integral-of-error state,

    A_aug = [[A, 0], [-C, 0]],   B_aug = [[B], [0]],

the gain comes from the continuous Riccati solver, and the control law is
u = -K [x_p; int e].  Margins are computed on the loop broken at the plant
input, L(s) = K (sI - A_aug)^-1 B_aug.

Gain margin here is the *upward* margin: the smallest gain increase that
destabilises the loop (the probe in the metrics module searches the same
direction).  Phase-crossover candidates with |L| >= 1 (conditionally stable
loops) therefore do not produce a finite GM.  Delay margin is the minimum of
PM/w over all gain crossovers, with PM converted to radians, so it matches
the true critical delay even for loops with several crossings.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DesignFailureError, SingularMatrixError
from .metrics import MarginEstimate
from .numerics import LinearStateSpace, freq_response, solve, solve_care, zoh_discretize
from .policy import Policy

SWEEP_RANGE = (1e-3, 1e3)
SWEEP_POINTS = 2000
_REFINE_REL = 1e-6


@dataclass(frozen=True)
class LqiDesign:
    """Result of one LQI synthesis: augmented model, weights, gain, solution."""

    a_aug: np.ndarray
    b_aug: np.ndarray
    q: np.ndarray
    r: np.ndarray
    k: np.ndarray  # 1 x (n+1); last column acts on the integral channel
    p: np.ndarray

    @property
    def n_plant_states(self):
        return self.a_aug.shape[0] - 1

    def loop(self):
        """Open-loop transfer seen from the plant input."""
        return LinearStateSpace(self.a_aug, self.b_aug, self.k)

    def closed_loop(self):
        return self.a_aug - self.b_aug @ self.k

    def to_dict(self):
        return {
            "gain": [float(v) for v in self.k[0]],
            "q_diag": [float(v) for v in np.diag(self.q)],
            "r": float(self.r[0, 0]),
        }


def tracking_weights(plant, q_e, q_i):
    """Augmented-state weight matrix for error/integral channel weights.

    In deviation coordinates the tracking error is -C x_p, so weighting e^2
    by q_e corresponds to C' q_e C on the plant block, and q_i weights the
    integral channel directly.
    """
    n = plant.n_states
    q = np.zeros((n + 1, n + 1))
    q[:n, :n] = plant.c.T @ (q_e * plant.c)
    q[n, n] = q_i
    return q


def augment(plant):
    n = plant.n_states
    a_aug = np.zeros((n + 1, n + 1))
    a_aug[:n, :n] = plant.a
    a_aug[n, :n] = -plant.c[0]
    b_aug = np.vstack([plant.b, np.zeros((1, plant.n_inputs))])
    return a_aug, b_aug


def design_lqi(plant, q, r):
    """LQI gain for a SISO plant with weights on the augmented state.

    Rejects plants with a transmission zero at the origin (the integral
    augmentation would be unstabilizable there).
    """
    if plant.n_outputs != 1 or plant.n_inputs != 1:
        raise DesignFailureError("LQI design here is single-input single-output")
    n = plant.n_states
    rosenbrock = np.zeros((n + 1, n + 1))
    rosenbrock[:n, :n] = plant.a
    rosenbrock[:n, n:] = plant.b
    rosenbrock[n:, :n] = plant.c
    scale = 1.0 + float(np.max(np.abs(rosenbrock)))
    if abs(np.linalg.det(rosenbrock)) < 1e-9 * scale:
        raise DesignFailureError("plant has a transmission zero at the origin")
    a_aug, b_aug = augment(plant)
    q = np.asarray(q, dtype=float)
    r = np.atleast_2d(np.asarray(r, dtype=float))
    p, k = solve_care(a_aug, b_aug, q, r)
    return LqiDesign(a_aug=a_aug, b_aug=b_aug, q=q, r=r, k=k, p=p)


def design_for_scenario(scenario):
    """LQI design from a scenario's plant and reward weights."""
    plant = scenario.make_plant().linear_model()
    q = tracking_weights(plant, scenario.q_e, scenario.q_i)
    return design_lqi(plant, q, scenario.r_matrix)


def lqi_act(design, x_aug):
    """u = -K x_aug (stateless; the environment carries the integrator)."""
    x_aug = np.asarray(x_aug, dtype=float)
    if x_aug.shape[0] != design.k.shape[1]:
        raise DesignFailureError(
            f"augmented state dim {x_aug.shape[0]} != gain dim {design.k.shape[1]}"
        )
    return -(design.k @ x_aug)


class LqiPolicy(Policy):
    """LQI control law over the environment observation layout."""

    def __init__(self, design):
        self.design = design

    def act(self, obs):
        return lqi_act(self.design, obs[: self.design.k.shape[1]])


# -- analytic margins ------------------------------------------------------


def _bisect(fn, lo, hi, rel_tol=_REFINE_REL):
    f_lo = fn(lo)
    for _ in range(200):
        if (hi - lo) <= rel_tol * hi:
            break
        mid = 0.5 * (lo + hi)
        if (f_lo <= 0) == (fn(mid) <= 0):
            lo, f_lo = mid, fn(mid)
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _margins_from_response(l_of, omegas, endpoint_candidate=None):
    """Crossover search shared by the continuous and sampled analyses.

    Gain margin is the upward margin: the smallest negative-real-axis
    crossing with |L| < 1.  Delay margin is the minimum of PM(rad)/w over
    all gain crossovers.  Crossings are refined by bisection.
    """
    vals = np.array([l_of(w) for w in omegas])

    gm_db, omega_pc = math.inf, math.nan
    candidates = []
    im = vals.imag
    for i in range(len(omegas) - 1):
        if im[i] * im[i + 1] < 0:
            candidates.append(_bisect(lambda w: l_of(w).imag, omegas[i], omegas[i + 1]))
    if endpoint_candidate is not None:
        candidates.append(endpoint_candidate)
    for w_c in candidates:
        l_c = l_of(w_c)
        if l_c.real < 0 and abs(l_c) < 1.0:
            cand = 20.0 * math.log10(1.0 / abs(l_c))
            if cand < gm_db:
                gm_db, omega_pc = cand, w_c

    dm_s, omega_cg, pm_deg = math.nan, math.nan, math.nan
    mag = np.abs(vals)
    for i in range(len(omegas) - 1):
        if (mag[i] - 1.0) * (mag[i + 1] - 1.0) < 0:
            w_c = _bisect(lambda w: abs(l_of(w)) - 1.0, omegas[i], omegas[i + 1])
            l_c = l_of(w_c)
            pm = (math.degrees(math.atan2(l_c.imag, l_c.real)) + 180.0) % 360.0
            cand = math.radians(pm) / w_c
            if math.isnan(dm_s) or cand < dm_s:
                dm_s, omega_cg, pm_deg = cand, w_c, pm
    return MarginEstimate(gm_db=gm_db, dm_s=dm_s, omega_pc=omega_pc, omega_cg=omega_cg, pm_deg=pm_deg)


def loop_margins(loop):
    """Continuous-domain margins of a SISO open-loop state space.

    Crossovers are located on a log-spaced sweep (1e-3..1e3 rad/s, 2000
    points) and refined by bisection to 1e-6 relative accuracy.
    """
    lo, hi = SWEEP_RANGE
    omegas = np.logspace(math.log10(lo), math.log10(hi), SWEEP_POINTS)

    def l_of(w):
        try:
            return freq_response(loop, w)[0, 0]
        except SingularMatrixError:
            # Grid point landed on an imaginary-axis pole; nudge off it.
            return freq_response(loop, w * (1.0 + 1e-9) + 1e-12)[0, 0]

    return _margins_from_response(l_of, omegas)


def sampled_loop_margins(loop, dt):
    """Margins of the loop as actually run: ZOH input, state sampled at dt.

    Evaluates the discretised loop L_d(e^{j w dt}) up to the Nyquist
    frequency.  The z = -1 endpoint is always tested: that is where sampling
    caps the gain of loops whose continuous upward margin is infinite.
    """
    a_d, b_d = zoh_discretize(loop.a, loop.b, dt)
    n = a_d.shape[0]
    c = loop.c.astype(complex)
    eye = np.eye(n, dtype=complex)

    def l_of(w):
        try:
            z = cmath.exp(1j * w * dt)
            x = solve(z * eye - a_d, b_d.astype(complex))
        except SingularMatrixError:
            # Unit-circle pole at this frequency; evaluate just above it.
            z = cmath.exp(1j * (w * dt + 1e-3))
            x = solve(z * eye - a_d, b_d.astype(complex))
        return (c @ x)[0, 0]

    nyquist = math.pi / dt
    # theta floor 1e-3: keeps integrating loops (poles at z = 1) away from
    # the singular point; loop crossovers of interest sit far above it.
    thetas = np.unique(
        np.concatenate(
            [
                np.logspace(-3, math.log10(math.pi), 2500),
                np.linspace(0.05, math.pi, 1500),
            ]
        )
    )
    omegas = thetas / dt
    est = _margins_from_response(l_of, omegas, endpoint_candidate=nyquist)
    return MarginEstimate(
        gm_db=est.gm_db,
        dm_s=est.dm_s,
        omega_pc=est.omega_pc,
        omega_cg=est.omega_cg,
        pm_deg=est.pm_deg,
        method="analytic-sampled",
    )


def linear_margins(design, sample_time=None):
    """Margins of an LQI loop broken at the plant input.

    With ``sample_time`` the analysis covers the loop as implemented (the
    continuous gain executed on the sampling grid through a zero-order
    hold); without it the pure continuous loop is analysed.  Upward gain
    margin of a continuous LQI state-feedback loop is typically infinite,
    reported with the +inf sentinel; the sampled analysis is the one
    comparable with the empirical probes.
    """
    if sample_time is None:
        return loop_margins(design.loop())
    return sampled_loop_margins(design.loop(), sample_time)
