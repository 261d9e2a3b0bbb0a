"""Uniform controller interface.

Every controller, classical or learned, maps the environment observation
[plant states..., int e, e, ref] to a scalar control in actuator units, so
the evaluation harness and the margin probes treat them interchangeably.
"""

import numpy as np


class Policy:
    """Base controller.  ``act`` must be a pure function of (params, obs)."""

    deterministic = True

    def reset(self):
        """Hook for wrappers with per-episode state; stateless by default."""

    def act(self, obs):
        raise NotImplementedError


class StaticGainPolicy(Policy):
    """u = gain * e.  Used for synthetic loop checks in the margin probes."""

    def __init__(self, gain=1.0):
        self.gain = gain

    def act(self, obs):
        return np.array([self.gain * obs[-2]])


class ScaledGainPolicy(Policy):
    """Pre-multiplies another policy's command (loop-gain insertion)."""

    def __init__(self, inner, scale):
        self.inner = inner
        self.scale = scale

    def reset(self):
        self.inner.reset()

    def act(self, obs):
        return self.scale * np.atleast_1d(self.inner.act(obs))


class DelayedPolicy(Policy):
    """Delays another policy's command by a possibly fractional interval.

    Sub-sample delays interpolate linearly between buffered commands; the
    pre-episode history is zero.  Used only by the delay-margin probe (the
    environment itself supports integer-sample delays).
    """

    def __init__(self, inner, delay, dt):
        self.inner = inner
        self.delay = float(delay)
        self.dt = float(dt)
        self._whole = int(np.floor(self.delay / self.dt + 1e-12))
        self._frac = self.delay / self.dt - self._whole
        self.reset()

    def reset(self):
        self.inner.reset()
        self._history = [0.0] * (self._whole + 2)

    def act(self, obs):
        u_now = float(np.atleast_1d(self.inner.act(obs))[0])
        self._history.append(u_now)
        newer = self._history[-1 - self._whole]
        older = self._history[-2 - self._whole]
        return np.array([(1.0 - self._frac) * newer + self._frac * older])
