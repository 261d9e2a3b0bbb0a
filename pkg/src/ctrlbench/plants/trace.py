"""Episode traces: the sampled record every metric is computed from."""

from dataclasses import dataclass, field

import numpy as np

# Trace CSV schema, one row per sample, 9 significant digits.
TRACE_HEADER = "t,ref,y_meas,y_true,u,reward"


@dataclass
class EpisodeTrace:
    """Uniformly sampled time series of one episode.

    Row k holds the control applied over [t_k, t_k + dt) (the final row
    repeats the last applied control so quadrature over the full grid is
    well defined).  ``terminal`` is "completed" or "diverged"; diverged
    traces keep every sample up to the failure and record its time.
    """

    dt: float
    t: np.ndarray
    ref: np.ndarray
    y_meas: np.ndarray
    y_true: np.ndarray
    u: np.ndarray
    reward: np.ndarray
    terminal: str = "completed"
    diverged_at: float = None

    @property
    def completed(self):
        return self.terminal == "completed"

    @property
    def n_samples(self):
        return len(self.t)

    def return_sum(self):
        """Sum of per-step rewards (excludes the terminal sample's entry)."""
        return float(np.sum(self.reward[:-1]))

    def error(self):
        return self.ref - self.y_true

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(TRACE_HEADER + "\n")
            for k in range(self.n_samples):
                row = (self.t[k], self.ref[k], self.y_meas[k], self.y_true[k], self.u[k], self.reward[k])
                fh.write(",".join(f"{v:.9g}" for v in row) + "\n")
            if self.terminal != "completed":
                fh.write(f"# terminal=diverged,diverged_at={self.diverged_at:.9g}\n")

    @classmethod
    def from_csv(cls, path):
        rows = []
        terminal = "completed"
        diverged_at = None
        with open(path) as fh:
            header = fh.readline().strip()
            if header != TRACE_HEADER:
                raise ValueError(f"unexpected trace header: {header}")
            for line in fh:
                line = line.strip()
                if line.startswith("#"):
                    meta = dict(kv.split("=") for kv in line[1:].strip().split(","))
                    terminal = meta.get("terminal", "completed")
                    if "diverged_at" in meta:
                        diverged_at = float(meta["diverged_at"])
                    continue
                if line:
                    rows.append([float(v) for v in line.split(",")])
        arr = np.array(rows)
        dt = float(arr[1, 0] - arr[0, 0]) if len(arr) > 1 else 0.0
        return cls(
            dt=dt,
            t=arr[:, 0],
            ref=arr[:, 1],
            y_meas=arr[:, 2],
            y_true=arr[:, 3],
            u=arr[:, 4],
            reward=arr[:, 5],
            terminal=terminal,
            diverged_at=diverged_at,
        )
