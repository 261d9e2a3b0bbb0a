"""Episodic environment: perturbation pipeline, integration, reward, tracing.

Actuator effects apply in a fixed order each step: rate limit, amplitude
saturation, input delay, unmodelled-dynamics filter, then additive input
disturbance; the plant (and the error integrator) then advances one RK4 step
with the processed control held constant.  Measurement noise corrupts only
the observation and the recorded measured output, never the integrator state
used for the dynamics.
"""

from collections import deque

import numpy as np

from ..errors import DivergenceError, UsageError
from ..numerics import RngStream, rk4_step
from .scenarios import reference_at
from .trace import EpisodeTrace


class Environment:
    """Single-owner mutable simulation of one ScenarioSpec episode.

    Observation layout: [plant states..., int e, e, ref] (the augmented
    state of the integral-action formulation plus the current reference).
    """

    def __init__(self, scenario, rng=None, plant=None):
        self.scenario = scenario
        self.plant = plant if plant is not None else scenario.make_plant()
        self.rng = rng if rng is not None else RngStream(0)
        pert = scenario.perturbation
        self._delay_steps = int(round(pert.input_delay / scenario.dt))
        self._filter = pert.unmodelled
        self._n = self.plant.state_dim
        self._nf = self._filter.n_states if self._filter is not None else 0
        self.reset()

    @property
    def obs_dim(self):
        return self._n + 3

    def reset(self):
        self.x = self.plant.initial_state().astype(float)
        self.x_f = np.zeros(self._nf)
        self.x_i = 0.0
        self.k = 0
        self.done = False
        self.terminal = None
        self.diverged_at = None
        self._u_prev = 0.0  # rate-limiter memory (actual actuator position)
        self._delay_buf = deque([0.0] * self._delay_steps, maxlen=max(self._delay_steps, 1))
        self._rows = []
        self._noise = self._draw_noise(0.0)
        return self._observation()

    # -- per-sample helpers -------------------------------------------------

    def _draw_noise(self, t):
        noise = self.scenario.perturbation.noise
        if noise is None or t < noise[1]:
            return 0.0
        return self.rng.gaussian(noise[0])

    def _disturbance(self, t):
        dist = self.scenario.perturbation.dist_step
        if dist is None or t < dist[1]:
            return 0.0
        return dist[0]

    @property
    def t(self):
        return self.k * self.scenario.dt

    def _ref(self):
        return reference_at(self.scenario.schedule, self.t)

    def _y_true(self):
        return self.plant.output(self.x)

    def _observation(self):
        ref = self._ref()
        e_meas = ref - (self._y_true() + self._noise)
        return np.concatenate([self.x, [self.x_i, e_meas, ref]])

    # -- stepping ------------------------------------------------------------

    def step(self, u_cmd):
        """Apply one control command; returns (obs, reward, done, info)."""
        if self.done:
            raise UsageError("step() called on a terminated episode")
        u_cmd = float(u_cmd)
        scenario = self.scenario
        dt = scenario.dt
        t_now = self.t
        ref = self._ref()
        pert = scenario.perturbation

        # Rate limit binds before the amplitude limit.
        u_act = u_cmd
        if pert.saturation is not None:
            amp, rate = pert.saturation
            lo, hi = self._u_prev - rate * dt, self._u_prev + rate * dt
            u_act = min(max(u_cmd, lo), hi)
            u_act = min(max(u_act, -amp), amp)
            self._u_prev = u_act

        if self._delay_steps > 0:
            u_delayed = self._delay_buf[0]
            self._delay_buf.append(u_act)
        else:
            u_delayed = u_act

        gain = pert.gain_multiplier
        dist = self._disturbance(t_now)
        noise = self._noise
        ff = self.plant.input_feedforward

        # Stage reward at the pre-step sample, on the true augmented state
        # and the commanded control (the controller's own output).
        e_true = ref - self._y_true()
        reward = -(scenario.q_e * e_true**2 + scenario.q_i * self.x_i**2 + scenario.r_u * u_cmd**2)

        y_meas = self._y_true() + noise
        self._rows.append((t_now, ref, y_meas, self._y_true(), u_act, reward))

        n, nf = self._n, self._nf
        plant = self.plant
        filt = self._filter

        def combined_derivative(z, _):
            x_p = z[:n]
            if nf:
                x_f = z[n : n + nf]
                u_path = float(filt.c[0] @ x_f)
                dx_f = filt.a @ x_f + filt.b[:, 0] * u_delayed
            else:
                u_path = u_delayed
            u_plant = gain * u_path + dist
            dx_p = plant.derivative(x_p, u_plant + ff)
            # Integrator channel: d(int e)/dt = measured tracking error.
            de = ref - (plant.output(x_p) + noise)
            if nf:
                return np.concatenate([dx_p, dx_f, [de]])
            return np.concatenate([dx_p, [de]])

        z = np.concatenate([self.x, self.x_f, [self.x_i]])
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                z = rk4_step(combined_derivative, z, None, dt, t=t_now)
        except DivergenceError:
            return self._terminate_diverged(u_cmd, u_act, np.full_like(z, np.nan))

        self.x = z[:n]
        self.x_f = z[n : n + nf]
        self.x_i = float(z[-1])
        self.k += 1
        self._noise = self._draw_noise(self.t)

        y_new = self._y_true()
        if not np.isfinite(y_new) or abs(y_new) > scenario.divergence_bound:
            return self._terminate_diverged(u_cmd, u_act, z)

        info = {
            "u_cmd": u_cmd,
            "u_act": u_act,
            "u_delayed": u_delayed,
            "u_plant": gain * (float(filt.c[0] @ self.x_f) if nf else u_delayed) + dist,
        }
        if self.k >= scenario.n_steps:
            self.done = True
            self.terminal = "completed"
            self._append_terminal_row(u_act)
        return self._observation(), reward, self.done, info

    def _append_terminal_row(self, u_act):
        ref = self._ref()
        y = self._y_true()
        e = ref - y
        reward = -(
            self.scenario.q_e * e**2
            + self.scenario.q_i * self.x_i**2
            + self.scenario.r_u * u_act**2
        )
        self._rows.append((self.t, ref, y + self._noise, y, u_act, reward))

    def _terminate_diverged(self, u_cmd, u_act, z):
        self.done = True
        self.terminal = "diverged"
        scenario = self.scenario
        self.k += 1
        self.diverged_at = self.t
        ref = self._ref()
        if np.all(np.isfinite(z)):
            self.x = z[: self._n]
            self.x_f = z[self._n : self._n + self._nf]
            self.x_i = float(z[-1])
            y = self._y_true()
            e = ref - y
            x_i = self.x_i
        else:
            # State overflowed inside the integrator: synthesise a bounded
            # worst-case sample so the divergence-time reward stays finite.
            y = np.nan
            e = 2.0 * scenario.divergence_bound
            x_i = self.x_i
        reward = -(scenario.q_e * e**2 + scenario.q_i * x_i**2 + scenario.r_u * u_cmd**2)
        self._rows.append((self.t, ref, y, y, u_act, reward))
        obs = self._observation() if np.all(np.isfinite(self.x)) else np.zeros(self.obs_dim)
        return obs, reward, True, {"u_cmd": u_cmd, "u_act": u_act, "diverged": True}

    def trace(self):
        rows = np.array(self._rows, dtype=float)
        return EpisodeTrace(
            dt=self.scenario.dt,
            t=rows[:, 0],
            ref=rows[:, 1],
            y_meas=rows[:, 2],
            y_true=rows[:, 3],
            u=rows[:, 4],
            reward=rows[:, 5],
            terminal=self.terminal or "completed",
            diverged_at=self.diverged_at,
        )


def run_episode(scenario_or_env, policy, rng=None):
    """Roll one full episode of ``policy`` and return its EpisodeTrace."""
    env = scenario_or_env if isinstance(scenario_or_env, Environment) else Environment(scenario_or_env, rng)
    policy.reset()
    obs = env.reset()
    done = False
    while not done:
        u = policy.act(obs)
        obs, _, done, _ = env.step(float(np.atleast_1d(u)[0]))
    return env.trace()
