"""Grid estimation of f(mu) and assembly of separable volumes.

For fixed ``mu`` the separable volume density is

    f(mu) = w * vol{ z : rho(z) >= 0 and q_z(mu) >= 0 },

an integral over the cube ``[-1, 1]^m`` of Bloore variables (m = 6 real,
12 complex). It is estimated by counting low-discrepancy points, and the
volume follows as ``V = 2 * int_0^1 jac(mu) f(mu) dmu``.

The weight ``w`` is the Hilbert-Schmidt factor carried by the off-diagonal
coordinates. It is fixed by the exact total volumes: with the exact jacobian
integrals, ``w * vol(positive z) = V_total / (2 int jac)``, i.e.
``512 pi^2 / 27`` (real) and ``32 pi^6 / 27`` (complex).
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import geometry, qmc
from .config import RunConfig
from .jacobian import EXACT_INTEGRAL, JacobianEvaluator

WEIGHT = {"real": 16.0, "complex": 128.0}
CUBE_VOLUME = {"real": 2.0**6, "complex": 2.0**12}
V_TOTAL = {"real": math.pi**4 / 60480, "complex": math.pi**6 / 851350500}

# expected fraction of the cube occupied by positive states
DENSITY_FRACTION = {
    case: V_TOTAL[case] / (2 * EXACT_INTEGRAL[case] * WEIGHT[case] * CUBE_VOLUME[case])
    for case in WEIGHT
}

TABLE_VERSION = 1


class ConfigMismatchError(ValueError):
    """Accumulators or tables from incompatible runs were combined."""


class EmptyRunError(ValueError):
    """An estimate was requested from zero sampled points."""


def sample_to_z(points: np.ndarray, case: str) -> np.ndarray:
    """Map cube points in ``[0, 1]^m`` affinely onto Bloore vectors in ``[-1, 1]``.

    In the complex case coordinates are paired as (real, imaginary) parts;
    points whose complex entries leave the unit disk are rejected later by
    the positivity test.
    """
    points = np.asarray(points, dtype=float)
    m = 6 if case == "real" else 12
    if case not in WEIGHT:
        raise ValueError(f"unknown case {case!r}")
    if points.shape[-1] != m:
        raise ValueError(f"{case} case needs {m}-dimensional points, got {points.shape[-1]}")
    x = 2.0 * points - 1.0
    if case == "real":
        return x
    return x[..., 0::2] + 1j * x[..., 1::2]


@dataclass
class Accumulator:
    """Mergeable integer counts over a set of QMC index ranges."""

    case: str
    grid: np.ndarray
    digest: str
    separable_count: np.ndarray = None
    density_count: int = 0
    total_points: int = 0
    ranges: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        if self.separable_count is None:
            self.separable_count = np.zeros(len(self.grid), dtype=np.int64)
        self.separable_count = np.asarray(self.separable_count, dtype=np.int64)

    @classmethod
    def empty(cls, config: RunConfig) -> "Accumulator":
        return cls(config.case, config.grid(), config.digest())

    def merge(self, other: "Accumulator") -> "Accumulator":
        if other.digest != self.digest or other.case != self.case:
            raise ConfigMismatchError(f"cannot merge runs {self.digest} and {other.digest}")
        ranges = sorted(self.ranges + other.ranges)
        for (s0, n0), (s1, _) in zip(ranges, ranges[1:]):
            if s0 + n0 > s1:
                raise ConfigMismatchError("accumulators cover overlapping index ranges")
        return Accumulator(
            self.case,
            self.grid,
            self.digest,
            self.separable_count + other.separable_count,
            self.density_count + other.density_count,
            self.total_points + other.total_points,
            _coalesce(ranges),
        )

    __add__ = merge

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "digest": self.digest,
            "grid": self.grid.tolist(),
            "separable_count": self.separable_count.tolist(),
            "density_count": self.density_count,
            "total_points": self.total_points,
            "ranges": [list(r) for r in self.ranges],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Accumulator":
        return cls(
            d["case"],
            np.asarray(d["grid"]),
            d["digest"],
            np.asarray(d["separable_count"], dtype=np.int64),
            int(d["density_count"]),
            int(d["total_points"]),
            [tuple(r) for r in d["ranges"]],
        )


def _coalesce(ranges):
    out = []
    for s, n in ranges:
        if n == 0:
            continue
        if out and out[-1][0] + out[-1][1] == s:
            out[-1] = (out[-1][0], out[-1][1] + n)
        else:
            out.append((s, n))
    return out


def grid_hits_fast(coeffs: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Number of quartics nonnegative at each grid point, via root isolation."""
    g = len(grid)
    if len(coeffs) == 0:
        return np.zeros(g, dtype=np.int64)
    pts, keep = geometry.nonnegative_segments(coeffs)
    lo, hi = pts[:, :-1], pts[:, 1:]
    # a segment following a kept one must not count their shared endpoint twice
    prev = np.concatenate([np.zeros((len(keep), 1), bool), keep[:, :-1]], axis=1)
    start = np.where(prev, np.searchsorted(grid, lo, "right"), np.searchsorted(grid, lo, "left"))
    stop = np.searchsorted(grid, hi, "right")
    ok = keep & (stop > start)
    diff = np.bincount(start[ok], minlength=g + 1) - np.bincount(stop[ok], minlength=g + 1)
    return np.cumsum(diff)[:g].astype(np.int64)


def grid_hits_slow(z: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Same counts by testing the criterion at every grid point."""
    hits = np.zeros(len(grid), dtype=np.int64)
    if len(z) == 0:
        return hits
    for k, mu in enumerate(grid):
        hits[k] = np.count_nonzero(geometry.ptdet_q(z, mu) >= -geometry.BOUNDARY_TOL)
    return hits


def accumulate(start: int, count: int, config: RunConfig) -> Accumulator:
    """Counts for QMC indices ``start .. start + count - 1``."""
    acc = Accumulator.empty(config)
    grid = acc.grid
    if config.path == "fast" and (grid.min() < 0 or grid.max() > 1):
        raise ValueError("the fast path needs a grid inside [0, 1]")
    spec = config.sequence_spec()
    for _, pts in qmc.iter_chunks(spec, start, count):
        z = sample_to_z(pts, config.case)
        z = z[geometry.in_unit_box(z)]
        z = z[geometry.is_density(z)]
        acc.density_count += len(z)
        if config.path == "fast":
            acc.separable_count += grid_hits_fast(geometry.mu_quartic_coeffs(z), grid)
        else:
            acc.separable_count += grid_hits_slow(z, grid)
    acc.total_points = count
    acc.ranges = _coalesce([(start, count)])
    return acc


def _accumulate_args(args):
    return accumulate(*args)


def accumulate_parallel(start: int, count: int, config: RunConfig, workers: int | None = None) -> Accumulator:
    """Split the range over ``workers`` processes and merge in index order."""
    workers = workers or config.workers
    ranges = qmc.partition(qmc.PointStream(config.sequence_spec(), start), workers, count)
    jobs = [(s, n, config) for s, n in ranges]
    if workers == 1:
        parts = [accumulate(*j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_accumulate_args, jobs))
    out = Accumulator.empty(config)
    for p in parts:
        out = out.merge(p)
    return out


def calibrate_total(case: str, acc: Accumulator) -> float:
    """Total HS volume implied by the fraction of positive sample points."""
    if acc.total_points == 0:
        raise EmptyRunError("no points sampled; total volume is undefined")
    frac = acc.density_count / acc.total_points
    return 2.0 * EXACT_INTEGRAL[case] * WEIGHT[case] * CUBE_VOLUME[case] * frac


class LocalPolynomialInterpolant:
    """Piecewise interpolation through the ``degree + 1`` nodes nearest each cell."""

    def __init__(self, x: np.ndarray, y: np.ndarray, degree: int = 3):
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        if len(self.x) < degree + 1:
            raise ValueError(f"need at least {degree + 1} nodes for degree {degree}")
        if np.any(np.diff(self.x) <= 0):
            raise ValueError("interpolation nodes must be strictly increasing")
        self.degree = degree

    def stencil(self, cell: np.ndarray) -> np.ndarray:
        n = len(self.x)
        first = np.clip(cell - (self.degree - 1) // 2, 0, n - self.degree - 1)
        return first[:, None] + np.arange(self.degree + 1)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        flat = t.reshape(-1)
        cell = np.clip(np.searchsorted(self.x, flat, "right") - 1, 0, len(self.x) - 2)
        idx = self.stencil(cell)
        xs, ys = self.x[idx], self.y[idx]
        out = np.zeros(len(flat))
        for j in range(self.degree + 1):
            basis = np.ones(len(flat))
            for k in range(self.degree + 1):
                if k != j:
                    basis *= (flat - xs[:, k]) / (xs[:, j] - xs[:, k])
            out += basis * ys[:, j]
        return out.reshape(t.shape)


@dataclass
class FTable:
    case: str
    grid: np.ndarray
    separable_count: np.ndarray
    density_count: int
    total_points: int
    config: dict
    digest: str

    @classmethod
    def from_accumulator(cls, acc: Accumulator, config: RunConfig) -> "FTable":
        if acc.digest != config.digest():
            raise ConfigMismatchError("accumulator was produced under a different configuration")
        if acc.total_points == 0:
            raise EmptyRunError("no points sampled")
        return cls(acc.case, acc.grid.copy(), acc.separable_count.copy(), acc.density_count,
                   acc.total_points, config.to_dict(), acc.digest)

    @property
    def weight(self) -> float:
        return WEIGHT[self.case]

    @property
    def cube_volume(self) -> float:
        return CUBE_VOLUME[self.case]

    @property
    def f_estimate(self) -> np.ndarray:
        return self.weight * self.cube_volume * self.separable_count / self.total_points

    @property
    def f_total(self) -> float:
        """Estimate of ``w * vol(positive z)``, the mu-independent bound on f."""
        return self.weight * self.cube_volume * self.density_count / self.total_points

    def f_at(self, mu: float, tol: float = 1e-12) -> float:
        k = int(np.argmin(np.abs(self.grid - mu)))
        if abs(self.grid[k] - mu) > tol:
            raise KeyError(f"mu = {mu} is not a grid point")
        return float(self.f_estimate[k])

    def interpolant(self, degree: int = 3) -> LocalPolynomialInterpolant:
        return LocalPolynomialInterpolant(self.grid, self.f_estimate, degree)

    def write(self, csv_path: str | Path) -> tuple[Path, Path]:
        csv_path = Path(csv_path)
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["mu", "separable_count", "f_estimate"])
            for mu, c, f in zip(self.grid, self.separable_count, self.f_estimate):
                w.writerow([repr(float(mu)), int(c), repr(float(f))])
        meta = {
            "version": TABLE_VERSION,
            "case": self.case,
            "config": self.config,
            "digest": self.digest,
            "density_count": int(self.density_count),
            "total_points": int(self.total_points),
            "weight": self.weight,
            "cube_volume": self.cube_volume,
        }
        json_path = csv_path.with_suffix(".json")
        json_path.write_text(json.dumps(meta, indent=2))
        return csv_path, json_path

    @classmethod
    def read(cls, csv_path: str | Path) -> "FTable":
        csv_path = Path(csv_path)
        meta = json.loads(csv_path.with_suffix(".json").read_text())
        with open(csv_path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        if not rows:
            raise ValueError(f"{csv_path}: table has no rows")
        grid = np.array([float(r["mu"]) for r in rows])
        counts = np.array([int(r["separable_count"]) for r in rows], dtype=np.int64)
        table = cls(meta["case"], grid, counts, int(meta["density_count"]),
                    int(meta["total_points"]), meta["config"], meta["digest"])
        if RunConfig.from_dict(table.config).digest() != table.digest:
            raise ConfigMismatchError(f"{csv_path}: digest does not match embedded config")
        if table.total_points <= 0:
            raise EmptyRunError(f"{csv_path}: no points sampled")
        return table


@dataclass
class VolumeReport:
    case: str
    v_total_exact: float
    v_sep: float
    probability: float
    split_low: float
    split_high: float
    points: int
    grid: int
    interpolation_degree: int
    switch_point: float = 0.95

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


def _integrate_pieces(fn, breaks: np.ndarray) -> float:
    a, b = breaks[:-1], breaks[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    if len(a) == 0:
        return 0.0
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b))[:, None] + half[:, None] * _GL_NODES
    vals = fn(nodes)
    if not np.all(np.isfinite(vals)):
        raise ArithmeticError("non-finite integrand in volume quadrature")
    return float(np.sum(half * (vals @ _GL_WEIGHTS)))


def weighted_integral(fn, ev: JacobianEvaluator, grid: np.ndarray, lo: float, hi: float) -> float:
    """``int_lo^hi jac(mu) fn(mu) dmu`` by Gauss-Legendre on every grid cell."""
    if hi <= lo:
        return 0.0
    breaks = np.union1d(grid[(grid > lo) & (grid < hi)], [lo, hi])
    return _integrate_pieces(lambda m: ev(m) * fn(m), breaks)


def integrate_volume(table: FTable, ev: JacobianEvaluator | None = None, degree: int = 3) -> VolumeReport:
    """Separable volume ``2 int jac f`` split at the evaluator's switch point."""
    ev = ev or JacobianEvaluator(table.case)
    if ev.case != table.case:
        raise ValueError("jacobian case does not match table case")
    if table.grid.min() > 0 or table.grid.max() < 1:
        raise ValueError("table grid must span [0, 1]")
    f = table.interpolant(degree)
    sp = ev.switch_point
    low = 2.0 * weighted_integral(f, ev, table.grid, 0.0, sp)
    high = 2.0 * weighted_integral(f, ev, table.grid, sp, 1.0)
    v_sep = max(low + high, 0.0)
    return VolumeReport(
        case=table.case,
        v_total_exact=V_TOTAL[table.case],
        v_sep=v_sep,
        probability=v_sep / V_TOTAL[table.case],
        split_low=low,
        split_high=high,
        points=table.total_points,
        grid=len(table.grid),
        interpolation_degree=degree,
        switch_point=sp,
    )


def estimate(config: RunConfig) -> FTable:
    """Run the whole sweep in memory (no checkpointing)."""
    acc = accumulate_parallel(config.skip, config.points, config)
    return FTable.from_accumulator(acc, config)
