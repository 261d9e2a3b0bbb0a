"""Standardised evaluation metrics over episode traces.

Three groups: step-response metrics (rise time, overshoot, settling time,
steady-state error), integral indices (ISE, ITAE, IACE, IACER, peak control),
and stability-margin estimates.  Margins come in two flavours: analytic
(classical module, exact for linear loops) and empirical probes that bisect
an inserted loop gain or input delay around a black-box policy, so learned
controllers get margin numbers too.

Conventions (documented, fixed):
  - metrics are computed on the true output; noise shapes them only through
    the closed loop's reaction to corrupted measurements
  - settling uses the *last* exit from the 2% band (robust to noise re-entry)
  - e_ss is the mean absolute error over the final 10% of a segment
  - on multi-step schedules: rise/settling from the first step segment,
    overshoot is the per-segment maximum, e_ss from the last segment
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ProbeInvalidError
from .plants import Environment, run_episode
from .plants.scenarios import reference_at
from .policy import DelayedPolicy

METRIC_HEADER = "controller,scenario,tr,mp,ts,ess,ise,itae,iace,iacer,umax,gm_db,dm_s,flags"

GAIN_PROBE_MAX = 64.0
DELAY_PROBE_MAX = 8.0
ENVELOPE_GROWTH = 1.2


@dataclass(frozen=True)
class MarginEstimate:
    """Gain/delay margins of one loop, analytic or probed."""

    gm_db: float = math.inf
    dm_s: float = math.nan
    omega_pc: float = math.nan
    omega_cg: float = math.nan
    pm_deg: float = math.nan
    method: str = "analytic"


@dataclass
class MetricReport:
    """All metrics for one (controller, scenario) evaluation."""

    controller: str
    scenario: str
    tr: float = math.nan
    mp: float = math.nan
    ts: float = math.nan
    ess: float = math.nan
    ise: float = math.nan
    itae: float = math.nan
    iace: float = math.nan
    iacer: float = math.nan
    umax: float = math.nan
    gm_db: float = math.nan
    dm_s: float = math.nan
    flags: tuple = ()

    def csv_row(self):
        nums = (self.tr, self.mp, self.ts, self.ess, self.ise, self.itae,
                self.iace, self.iacer, self.umax, self.gm_db, self.dm_s)
        cells = [self.controller, self.scenario]
        cells += [f"{v:.9g}" for v in nums]
        cells.append(";".join(self.flags))
        return ",".join(cells)

    @classmethod
    def from_csv_row(cls, row):
        parts = row.split(",")
        nums = [float(v) for v in parts[2:13]]
        flags = tuple(parts[13].split(";")) if len(parts) > 13 and parts[13] else ()
        return cls(parts[0], parts[1], *nums, flags=flags)


def _interp_crossing(t0, t1, v0, v1, level):
    if v1 == v0:
        return t0
    return t0 + (level - v0) * (t1 - t0) / (v1 - v0)


def step_segments(trace, schedule):
    """Step segments of a schedule: (i0, i1, r_final) with nonzero step size.

    Segment boundaries are the schedule switch times; i1 is inclusive and the
    step size is measured from the actual output at onset.
    """
    times = [t for t, _ in schedule if t < trace.t[-1] + 1e-12]
    bounds = sorted(set([0.0] + times + [float(trace.t[-1])]))
    segments = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        i0 = int(np.searchsorted(trace.t, a - 1e-12))
        i1 = int(np.searchsorted(trace.t, b - 1e-12))
        if i1 <= i0:
            continue
        r_final = reference_at(schedule, a)
        if abs(r_final - trace.y_true[i0]) > 1e-12:
            segments.append((i0, i1, r_final))
    return segments


def step_metrics(trace, segment):
    """(t_r, M_p %, t_s, e_ss, flags) for one reference-step segment."""
    i0, i1, r_final = segment
    t = trace.t[i0 : i1 + 1] - trace.t[i0]
    y = trace.y_true[i0 : i1 + 1]
    flags = []
    y0 = y[0]
    delta = r_final - y0
    sgn = 1.0 if delta >= 0 else -1.0

    def first_crossing(level):
        prog = sgn * (y - level)
        for k in range(1, len(y)):
            if prog[k] >= 0.0 > prog[k - 1]:
                return _interp_crossing(t[k - 1], t[k], y[k - 1], y[k], level)
        return math.nan

    t10 = first_crossing(y0 + 0.1 * delta)
    t90 = first_crossing(y0 + 0.9 * delta)
    if math.isnan(t90) or math.isnan(t10):
        tr = math.nan
        flags.append("tr_undefined")
    else:
        tr = t90 - t10

    mp = max(0.0, 100.0 * float(np.max(sgn * (y - r_final))) / abs(delta))

    band = 0.02 * abs(r_final) if r_final != 0 else 0.02 * abs(delta)
    dev = np.abs(y - r_final)
    outside = dev > band
    if not np.any(outside):
        ts = 0.0
    elif outside[-1]:
        ts = math.nan
        flags.append("ts_unsettled")
    else:
        k = int(np.max(np.nonzero(outside)))
        ts = _interp_crossing(t[k], t[k + 1], dev[k], dev[k + 1], band)

    n_tail = max(1, int(round(0.1 * len(y))))
    ess = float(np.mean(np.abs(r_final - y[-n_tail:])))
    return tr, mp, ts, ess, tuple(flags)


def integral_metrics(trace):
    """(ISE, ITAE, IACE, IACER, u_max) by trapezoidal quadrature.

    Diverged traces integrate up to the last finite sample (the caller is
    expected to carry the diverged flag).
    """
    finite = np.isfinite(trace.y_true) & np.isfinite(trace.u)
    t = trace.t[finite]
    e = (trace.ref - trace.y_true)[finite]
    u = trace.u[finite]
    ise = float(np.trapezoid(e**2, t))
    itae = float(np.trapezoid(t * np.abs(e), t))
    iace = float(np.trapezoid(np.abs(u), t))
    iacer = float(np.sum(np.abs(np.diff(u))))
    umax = float(np.max(np.abs(u))) if len(u) else math.nan
    return ise, itae, iace, iacer, umax


def _peak_to_peak(values):
    return float(np.max(values) - np.min(values)) if len(values) else 0.0


def envelope_unstable(trace, scale):
    """Growth test: error envelope of the last quarter exceeds the previous
    quarter by more than ENVELOPE_GROWTH (with a small absolute floor)."""
    if trace.terminal == "diverged":
        return True
    e = trace.error()
    t = trace.t
    horizon = t[-1]
    q3 = e[(t >= 0.50 * horizon) & (t < 0.75 * horizon)]
    q4 = e[t >= 0.75 * horizon]
    p3, p4 = _peak_to_peak(q3), _peak_to_peak(q4)
    floor = 1e-6 * (1.0 + abs(scale))
    return p4 > floor and p4 > ENVELOPE_GROWTH * p3


def is_oscillatory(trace, scale):
    """Sustained or growing tail oscillation (windup-style failure)."""
    if trace.terminal == "diverged":
        return True
    if envelope_unstable(trace, scale):
        return True
    e = trace.error()
    q4 = e[trace.t >= 0.75 * trace.t[-1]]
    return _peak_to_peak(q4) > 0.5 * abs(scale)


def trace_report(trace, scenario, controller="", margins=None):
    """Assemble the full MetricReport for one evaluated trace."""
    flags = []
    ise, itae, iace, iacer, umax = integral_metrics(trace)
    tr = mp = ts = ess = math.nan
    scale = max(abs(v) for _, v in scenario.schedule)
    if trace.terminal == "diverged":
        flags.append(f"diverged@{trace.diverged_at:.9g}")
    else:
        segments = step_segments(trace, scenario.schedule)
        if segments:
            tr, _, ts, _, seg_flags = step_metrics(trace, segments[0])
            flags.extend(seg_flags)
            mp = max(step_metrics(trace, seg)[1] for seg in segments)
            ess = step_metrics(trace, segments[-1])[3]
        if is_oscillatory(trace, scale):
            flags.append("oscillatory")
    gm_db = dm_s = math.nan
    if margins is not None:
        gm_db, dm_s = margins.gm_db, margins.dm_s
        if math.isinf(gm_db):
            flags.append("gm_infinite")
        if math.isnan(dm_s):
            flags.append("dm_undefined")
    return MetricReport(
        controller=controller,
        scenario=scenario.name,
        tr=tr,
        mp=mp,
        ts=ts,
        ess=ess,
        ise=ise,
        itae=itae,
        iace=iace,
        iacer=iacer,
        umax=umax,
        gm_db=gm_db,
        dm_s=dm_s,
        flags=tuple(flags),
    )


# -- empirical margin probes ---------------------------------------------


def _probe_scenario(scenario, horizon_factor=4.0):
    """Probe episodes run longer and without noise/disturbance so the
    envelope test sees only the loop's own stability."""
    pert = replace(scenario.perturbation, noise=None, dist_step=None)
    return replace(scenario, perturbation=pert, horizon=scenario.horizon * horizon_factor)


def _runs_stable(scenario, policy, plant, gain=1.0, delay=0.0):
    pert = replace(scenario.perturbation, gain_multiplier=scenario.perturbation.gain_multiplier * gain)
    spec = replace(scenario, perturbation=pert)
    probe_policy = DelayedPolicy(policy, delay, spec.dt) if delay > 0 else policy
    try:
        trace = run_episode(Environment(spec, plant=plant), probe_policy)
    except FloatingPointError:
        return False
    scale = max(abs(v) for _, v in spec.schedule)
    return not envelope_unstable(trace, scale)


def probe_gain_margin(scenario, policy, plant=None):
    """Bisect a multiplicative gain at the plant input until instability.

    Returns a MarginEstimate with method="probe"; GM is +inf when the loop
    stays stable up to GAIN_PROBE_MAX.  Raises ProbeInvalidError when the
    loop is already unstable at unit gain.
    """
    spec = _probe_scenario(scenario)
    if not _runs_stable(spec, policy, plant):
        raise ProbeInvalidError("loop unstable at unit gain; gain probe undefined")
    k_lo, k_hi = 1.0, None
    k = 2.0
    while k <= GAIN_PROBE_MAX:
        if _runs_stable(spec, policy, plant, gain=k):
            k_lo = k
            k *= 2.0
        else:
            k_hi = k
            break
    if k_hi is None:
        return MarginEstimate(gm_db=math.inf, method="probe")
    while k_hi / k_lo > 1.01:
        mid = math.sqrt(k_lo * k_hi)
        if _runs_stable(spec, policy, plant, gain=mid):
            k_lo = mid
        else:
            k_hi = mid
    k_star = math.sqrt(k_lo * k_hi)
    return MarginEstimate(gm_db=20.0 * math.log10(k_star), method="probe")


def probe_delay_margin(scenario, policy, plant=None):
    """Bisect an inserted input delay (sub-sample via interpolation).

    DM is the largest stable delay, bracketed to dt/10; +inf past
    DELAY_PROBE_MAX.  Raises ProbeInvalidError when unstable at zero delay.
    """
    spec = _probe_scenario(scenario)
    if not _runs_stable(spec, policy, plant):
        raise ProbeInvalidError("loop unstable at zero delay; delay probe undefined")
    d_lo, d_hi = 0.0, None
    d = spec.dt
    while d <= DELAY_PROBE_MAX:
        if _runs_stable(spec, policy, plant, delay=d):
            d_lo = d
            d *= 2.0
        else:
            d_hi = d
            break
    if d_hi is None:
        return MarginEstimate(dm_s=math.inf, method="probe")
    while d_hi - d_lo > spec.dt / 10.0:
        mid = 0.5 * (d_lo + d_hi)
        if _runs_stable(spec, policy, plant, delay=mid):
            d_lo = mid
        else:
            d_hi = mid
    return MarginEstimate(dm_s=0.5 * (d_lo + d_hi), method="probe")


def probe_margins(scenario, policy, plant=None):
    gm = probe_gain_margin(scenario, policy, plant)
    dm = probe_delay_margin(scenario, policy, plant)
    return MarginEstimate(gm_db=gm.gm_db, dm_s=dm.dm_s, method="probe")
