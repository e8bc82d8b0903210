"""Log-spaced radial grids: the sampled-function container used everywhere."""

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

DEFAULT_R_MIN = 1e-4
DEFAULT_NODES = 2048


@dataclass(frozen=True)
class RadialGrid:
    """Values of a radial function at strictly increasing radii in (0, 1]."""

    radii: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape:
            raise ValueError("radii and values must be 1-D arrays of equal length")
        if r.size == 0 or r[0] <= 0 or r[-1] > 1 + 1e-12:
            raise ValueError("radii must lie in (0, 1]")
        if np.any(np.diff(r) <= 0):
            raise ValueError("radii must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.radii.size

    @property
    def r_min(self):
        return float(self.radii[0])

    @classmethod
    def sample(cls, f, r_min=DEFAULT_R_MIN, n=DEFAULT_NODES, r_max=1.0):
        r = log_radii(r_min, n, r_max)
        return cls(r, np.array([f(x) for x in r], dtype=float))

    def map(self, f):
        return RadialGrid(self.radii, f(self.values))

    def loglog_interpolator(self):
        """Linear interpolation of log|value| against log r.

        Below ``r_min`` the innermost log-log slope is continued, so power-law
        singular profiles extrapolate sensibly. Values must be positive.
        """
        if np.any(self.values <= 0):
            raise ValueError("log-log interpolation needs positive values")
        ls = np.log(self.radii)
        lv = np.log(self.values)
        slope0 = (lv[1] - lv[0]) / (ls[1] - ls[0]) if ls.size > 1 else 0.0

        def f(x):
            lx = np.log(np.asarray(x, dtype=float))
            out = np.interp(lx, ls, lv)
            below = lx < ls[0]
            out = np.where(below, lv[0] + slope0 * (lx - ls[0]), out)
            return np.exp(out)

        return f

    def to_csv(self, header=("r", "value"), extra=None):
        """CSV text with columns (r, value[, extra...])."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = [self.radii, self.values]
        if extra is not None:
            cols.extend(extra)
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.reader(io.StringIO(text)))
        data = np.array([[float(x) for x in row[:2]] for row in rows[1:]])
        return cls(data[:, 0], data[:, 1])

    def to_dict(self):
        return {"radii": self.radii.tolist(), "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["radii"]), np.array(d["values"]))

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def log_radii(r_min=DEFAULT_R_MIN, n=DEFAULT_NODES, r_max=1.0):
    if not 0 < r_min < r_max <= 1:
        raise ValueError("need 0 < r_min < r_max <= 1")
    if n < 2:
        raise ValueError("need at least two nodes")
    r = np.geomspace(r_min, r_max, n)
    r[-1] = r_max
    return r
