"""Bundled oracle checks behind ``sepvol validate``."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import geometry as g
from . import jacobian as jb
from .config import RunConfig
from .estimator import (
    CUBE_VOLUME,
    EXACT_INTEGRAL,
    V_TOTAL,
    WEIGHT,
    accumulate,
    grid_hits_fast,
    grid_hits_slow,
    sample_to_z,
)


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    expected: float
    tolerance: float
    detail: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = bool(d["passed"])
        return d


def _rel(name, measured, expected, tol, detail=""):
    ok = abs(measured / expected - 1.0) <= tol
    return Check(name, ok, float(measured), float(expected), tol, detail)


def check_jacobian_integrals() -> list[Check]:
    return [
        _rel(f"jacobian_integral_{case}", jb.integral_check(case), EXACT_INTEGRAL[case], 1e-10)
        for case in jb.CASES
    ]


def check_series_remainders() -> list[Check]:
    out = []
    for case in jb.CASES:
        rem = jb.series_remainder(case)
        bad = sum(1 for c in rem if c != 0)
        out.append(Check(f"series_remainder_{case}", bad == 0, bad, 0, 0, f"orders 0..{len(rem) - 1}"))
    return out


def check_calibration(config: RunConfig, tol: float, weight_scale: float = 1.0) -> Check:
    acc = accumulate(config.skip, config.points, config)
    frac = acc.density_count / max(acc.total_points, 1)
    v = 2 * EXACT_INTEGRAL[config.case] * WEIGHT[config.case] * weight_scale * CUBE_VOLUME[config.case] * frac
    return _rel(f"total_volume_{config.case}", v, V_TOTAL[config.case], tol, f"{config.points} points")


def _random_z(rng, case, n):
    x = rng.uniform(-1, 1, (n, 6 if case == "real" else 12))
    return sample_to_z((x + 1) / 2, case)


def check_eigen_agreement(case: str, n: int, seed: int = 0) -> Check:
    rng = np.random.default_rng(seed)
    z = _random_z(rng, case, n)
    z = z[g.in_unit_box(z)]
    lam = np.linalg.eigvalsh(g.reconstruct(z, [0.25] * 4))[:, 0]
    band = np.abs(lam) < 1e-10
    bad = int(np.sum((g.is_density(z) != (lam >= 0)) & ~band))
    return Check(f"density_vs_eigenvalues_{case}", bad == 0, bad, 0, 0, f"{len(z)} samples")


def check_separable_agreement(case: str, n: int, seed: int = 1) -> Check:
    rng = np.random.default_rng(seed)
    z = _random_z(rng, case, n * 40)
    z = z[g.is_density(z)][:n]
    mu = rng.uniform(0.01, 1.0, len(z))
    t = 1 / (2 * (1 + mu))
    d = np.stack([mu * t, t, t, mu * t], axis=1)
    lam = np.linalg.eigvalsh(g.partial_transpose(g.reconstruct(z, d)))[:, 0]
    band = np.abs(lam) < 1e-9
    bad = int(np.sum((g.is_separable(z, mu) != (lam >= -1e-10)) & ~band))
    return Check(f"separable_vs_pt_eigenvalues_{case}", bad == 0, bad, 0, 0, f"{len(z)} samples")


def check_cad_equivalence(n: int, seed: int = 2) -> Check:
    rng = np.random.default_rng(seed)
    z = rng.uniform(-1, 1, (n, 6))
    lam = np.linalg.eigvalsh(g.unit_matrix(z))[:, 0]
    band = np.abs(lam) < 1e-9
    bad = int(np.sum((g.in_cad_box(z) != g.is_density(z)) & ~band))
    return Check("cad_box_vs_density", bad == 0, bad, 0, 0, f"{n} samples")


def check_path_equivalence(config: RunConfig, n: int) -> Check:
    rng = np.random.default_rng(3)
    z = _random_z(rng, config.case, n * (1 if config.case == "real" else 100))
    z = z[g.is_density(z)]
    grid = np.linspace(0, 1, 201)
    fast = grid_hits_fast(g.mu_quartic_coeffs(z), grid)
    slow = grid_hits_slow(z, grid)
    diff = int(np.abs(fast - slow).sum())
    return Check(f"fast_vs_slow_path_{config.case}", diff == 0, diff, 0, 0, f"{len(z)} positive samples")


def run_checks(config: RunConfig, n_oracle: int = 10_000, weight_scale: float = 1.0) -> list[Check]:
    """All desk-scale checks for ``config.case``.

    The calibration tolerance is loose at small point counts: 1% for the real
    case and 5% for the complex case below a million points.
    """
    case = config.case
    if case == "real":
        tol = 0.005 if config.points >= 1_000_000 else 0.01
    else:
        tol = 0.02 if config.points >= 4_000_000 else 0.05
    checks = check_jacobian_integrals() + check_series_remainders()
    checks.append(check_calibration(config, tol, weight_scale))
    checks.append(check_eigen_agreement(case, n_oracle))
    checks.append(check_separable_agreement(case, n_oracle))
    if case == "real":
        checks.append(check_cad_equivalence(n_oracle))
    checks.append(check_path_equivalence(replace(config, path="fast"), n_oracle))
    return checks


def summary(checks: list[Check]) -> bool:
    return all(c.passed for c in checks) and not any(math.isnan(c.measured) for c in checks)
