"""Algebra on Bloore-parameterized two-qubit density matrices.

Off-diagonal entries are written as ``rho_ij = sqrt(rho_ii rho_jj) z_ij`` so
that positivity of ``rho`` depends only on the six ``z_ij`` while the
determinant of the partial transpose depends on the diagonal only through

    mu = sqrt(rho_11 rho_44 / (rho_22 rho_33)).

Most functions accept either a single vector of six values or a stacked
array of shape ``(n, 6)``; the entries are ordered
``(z12, z13, z14, z23, z24, z34)``. A complex dtype selects the complex
(15-dimensional) case.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

# index pairs (0-based) for z12, z13, z14, z23, z24, z34
PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
_PAIR_INDEX = {p: k for k, p in enumerate(PAIRS)}

# values within this band of zero count as nonnegative
BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class BlooreVector:
    z12: complex | float = 0.0
    z13: complex | float = 0.0
    z14: complex | float = 0.0
    z23: complex | float = 0.0
    z24: complex | float = 0.0
    z34: complex | float = 0.0

    def __array__(self, dtype=None, copy=None):
        vals = [self.z12, self.z13, self.z14, self.z23, self.z24, self.z34]
        kind = complex if any(isinstance(v, complex) for v in vals) else float
        return np.asarray(vals, dtype=dtype or kind)

    @classmethod
    def from_array(cls, z) -> "BlooreVector":
        z = np.asarray(z)
        if z.shape != (6,):
            raise ValueError(f"expected 6 entries, got shape {z.shape}")
        conv = complex if np.iscomplexobj(z) else float
        return cls(*(conv(v) for v in z))


@dataclass(frozen=True)
class DiagonalVector:
    rho11: float
    rho22: float
    rho33: float
    rho44: float

    def __post_init__(self):
        vals = np.array(self.astuple())
        if np.any(vals < 0) or abs(vals.sum() - 1.0) > 1e-12:
            raise ValueError(f"not a unit-trace nonnegative diagonal: {vals}")

    def astuple(self) -> tuple[float, float, float, float]:
        return (self.rho11, self.rho22, self.rho33, self.rho44)

    @property
    def mu(self) -> float:
        return float(np.sqrt(self.rho11 * self.rho44 / (self.rho22 * self.rho33)))


class Interval(NamedTuple):
    lo: float
    hi: float

    @property
    def empty(self) -> bool:
        return self.lo > self.hi


@dataclass(frozen=True)
class CadBox:
    """Nested feasibility intervals for ``z23``, ``z24`` and ``z34``.

    ``degenerate`` is set when ``|z12| = 1``: the ``z34`` bounds then have a
    vanishing denominator and the interval is reported as ``[-1, 1]``.
    """

    z23: Interval
    z24: Interval
    z34: Interval
    degenerate: bool = False

    def contains(self, z23: float, z24: float, z34: float, tol: float = 1e-10) -> bool:
        return all(
            iv.lo - tol <= v <= iv.hi + tol
            for iv, v in ((self.z23, z23), (self.z24, z24), (self.z34, z34))
        )


@dataclass(frozen=True)
class MuQuartic:
    """Coefficients of ``q(mu) = c0 + c1 mu + c2 mu^2 + c3 mu^3 + c4 mu^4``."""

    c0: float
    c1: float
    c2: float
    c3: float
    c4: float

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([self.c0, self.c1, self.c2, self.c3, self.c4])

    def __call__(self, mu):
        return np.polynomial.polynomial.polyval(mu, self.coeffs)

    @property
    def intervals(self) -> list[Interval]:
        return nonnegative_intervals(self.coeffs)


def _as_z(z) -> np.ndarray:
    if isinstance(z, BlooreVector):
        z = np.asarray(z)
    z = np.asarray(z)
    if z.shape[-1] != 6:
        raise ValueError(f"Bloore vectors have 6 entries, got shape {z.shape}")
    if not np.iscomplexobj(z):
        z = z.astype(float, copy=False)
    return z


def unit_matrix(z) -> np.ndarray:
    """Unit-diagonal Hermitian matrix ``Z`` with off-diagonal entries ``z``."""
    z = _as_z(z)
    m = np.zeros(z.shape[:-1] + (4, 4), dtype=z.dtype)
    idx = np.arange(4)
    m[..., idx, idx] = 1.0
    for k, (i, j) in enumerate(PAIRS):
        m[..., i, j] = z[..., k]
        m[..., j, i] = np.conj(z[..., k])
    return m


def factor_B(z):
    """Determinant of the unit-diagonal matrix, ``det(rho) / prod(rho_ii)``."""
    z = _as_z(z)
    if np.iscomplexobj(z):
        return np.linalg.det(unit_matrix(z)).real
    z12, z13, z14, z23, z24, z34 = np.moveaxis(z, -1, 0)
    return (
        (z34**2 - 1) * z12**2
        + 2 * (z14 * (z24 - z23 * z34) + z13 * (z23 - z24 * z34)) * z12
        - z23**2
        - z24**2
        - z34**2
        + z14**2 * (z23**2 - 1)
        + z13**2 * (z24**2 - 1)
        + 2 * z23 * z24 * z34
        + 2 * z13 * z14 * (z34 - z23 * z24)
        + 1
    )


def minor3(z, which: Sequence[int] = (1, 2, 3)):
    """Principal 3x3 minor of ``Z`` on the 1-based index triple ``which``."""
    which = tuple(sorted(which))
    if len(which) != 3 or len(set(which)) != 3 or not set(which) <= {1, 2, 3, 4}:
        raise ValueError(f"invalid index triple {which!r}")
    z = _as_z(z)
    i, j, k = (w - 1 for w in which)
    a = z[..., _PAIR_INDEX[(i, j)]]
    b = z[..., _PAIR_INDEX[(i, k)]]
    c = z[..., _PAIR_INDEX[(j, k)]]
    return (
        1.0
        - np.abs(a) ** 2
        - np.abs(b) ** 2
        - np.abs(c) ** 2
        + 2.0 * np.real(a * c * np.conj(b))
    )


def in_unit_box(z, tol: float = BOUNDARY_TOL):
    return np.all(np.abs(_as_z(z)) <= 1.0 + tol, axis=-1)


def is_density(z, tol: float = BOUNDARY_TOL):
    """Positivity of ``rho`` from ``B >= 0`` and the {1,2,3} minor.

    Vectors outside the ``|z_ij| <= 1`` box are reported as not positive.
    """
    z = _as_z(z)
    return in_unit_box(z, tol) & (factor_B(z) >= -tol) & (minor3(z) >= -tol)


def cad_box(z12: float, z13: float, z14: float, z23: float, z24: float) -> CadBox:
    """Nested intervals bounding ``z23``, ``z24`` and ``z34`` (real case).

    The ``z34`` interval uses the supplied ``z23`` and ``z24``; its half-width
    is ``sqrt(m123 * m124) / (1 - z12^2)`` where ``m1jk`` are the 3x3 minors
    of the leading submatrices, clamped at zero.
    """
    r12 = np.sqrt(max(1.0 - z12 * z12, 0.0))
    r13 = np.sqrt(max(1.0 - z13 * z13, 0.0))
    r14 = np.sqrt(max(1.0 - z14 * z14, 0.0))
    iv23 = Interval(z12 * z13 - r12 * r13, z12 * z13 + r12 * r13)
    iv24 = Interval(z12 * z14 - r12 * r14, z12 * z14 + r12 * r14)

    denom = 1.0 - z12 * z12
    if denom <= 0.0:
        return CadBox(iv23, iv24, Interval(-1.0, 1.0), degenerate=True)
    rad = (1 - z12**2 - z13**2 + 2 * z12 * z13 * z23 - z23**2) * (
        1 - z12**2 - z14**2 + 2 * z12 * z14 * z24 - z24**2
    )
    s = np.sqrt(max(rad, 0.0))
    centre = z13 * z14 - z12 * z14 * z23 - z12 * z13 * z24 + z23 * z24
    iv34 = Interval((centre - s) / denom, (centre + s) / denom)
    return CadBox(iv23, iv24, iv34)


def in_cad_box(z, tol: float = 1e-10):
    """Vectorized membership test for the nested box of a real ``z`` array."""
    z = np.asarray(z, dtype=float)
    z12, z13, z14, z23, z24, z34 = np.moveaxis(z, -1, 0)
    r12 = np.sqrt(np.clip(1 - z12**2, 0, None))
    r13 = np.sqrt(np.clip(1 - z13**2, 0, None))
    r14 = np.sqrt(np.clip(1 - z14**2, 0, None))
    ok = (np.abs(z12) <= 1 + tol) & (np.abs(z13) <= 1 + tol) & (np.abs(z14) <= 1 + tol)
    ok &= np.abs(z23 - z12 * z13) <= r12 * r13 + tol
    ok &= np.abs(z24 - z12 * z14) <= r12 * r14 + tol
    m123 = 1 - z12**2 - z13**2 + 2 * z12 * z13 * z23 - z23**2
    m124 = 1 - z12**2 - z14**2 + 2 * z12 * z14 * z24 - z24**2
    s = np.sqrt(np.clip(m123 * m124, 0, None))
    centre = z13 * z14 - z12 * z14 * z23 - z12 * z13 * z24 + z23 * z24
    denom = 1 - z12**2
    with np.errstate(divide="ignore", invalid="ignore"):
        ok &= np.abs(z34 * denom - centre) <= s + tol * np.maximum(denom, tol)
    return ok


def representative_diagonal(mu: float) -> DiagonalVector:
    """Canonical diagonal with ``rho11 = rho44`` and ``rho22 = rho33``."""
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu!r}")
    a = mu / (2.0 * (1.0 + mu))
    b = 1.0 / (2.0 * (1.0 + mu))
    return DiagonalVector(a, b, b, a)


def reconstruct(z, diag) -> np.ndarray:
    """Density matrix with entries ``sqrt(rho_ii rho_jj) z_ij``."""
    d = np.asarray(diag.astuple() if isinstance(diag, DiagonalVector) else diag, dtype=float)
    s = np.sqrt(d)
    return unit_matrix(z) * (s[..., :, None] * s[..., None, :])


def partial_transpose(m: np.ndarray) -> np.ndarray:
    """Partial transpose on the second qubit of a (stack of) 4x4 matrices."""
    m = np.asarray(m)
    t = m.reshape(m.shape[:-2] + (2, 2, 2, 2))
    return np.swapaxes(t, -3, -1).reshape(m.shape)


def _real_quartic(z: np.ndarray) -> np.ndarray:
    z12, z13, z14, z23, z24, z34 = np.moveaxis(z, -1, 0)
    c2 = (
        (z34**2 - 1) * z12**2
        - 2 * (z14 * z23 + z13 * z24) * z34 * z12
        - z13**2
        + z14**2 * z23**2
        + (z13**2 - 1) * z24**2
        - z34**2
        - 2 * z13 * z14 * z23 * z24
        + 1
    )
    return np.stack(
        [
            -(z23**2),
            2 * z23 * (z12 * z24 + z13 * z34),
            c2,
            2 * z14 * (z12 * z13 + z24 * z34),
            -(z14**2),
        ],
        axis=-1,
    )


def ptdet_ratio(z, diag):
    """``det(rho_PT) / (rho22 rho33)^2`` for an arbitrary diagonal."""
    d = np.asarray(diag.astuple() if isinstance(diag, DiagonalVector) else diag, dtype=float)
    det = np.linalg.det(partial_transpose(reconstruct(z, d)))
    return np.real(det) / (d[..., 1] * d[..., 2]) ** 2


def ptdet_q(z, mu):
    """Partial-transpose determinant as the quartic ``q(mu)``.

    ``q(mu) = det(rho_PT) / (rho22 rho33)^2 = mu^2 det(rho_PT) / prod(rho_ii)``,
    which depends on the diagonal only through ``mu``. The real case uses the
    explicit polynomial; the complex case takes the determinant of the
    reconstructed partial transpose at the representative diagonal.
    """
    z = _as_z(z)
    mu = np.asarray(mu, dtype=float)
    if not np.iscomplexobj(z) or np.any(mu <= 0):
        # the representative diagonal needs mu > 0; q itself is a polynomial
        c = mu_quartic_coeffs(z)
        return c[..., 0] + mu * (c[..., 1] + mu * (c[..., 2] + mu * (c[..., 3] + mu * c[..., 4])))
    a = mu / (2.0 * (1.0 + mu))
    b = 1.0 / (2.0 * (1.0 + mu))
    d = np.stack(np.broadcast_arrays(a, b, b, a), axis=-1)
    return ptdet_ratio(z, d)


# interpolation nodes for the complex-case coefficients, plus a check node
_MU_NODES = np.array([1 / 3, 1 / 2, 1.0, 3 / 2, 2.0])
_MU_CHECK = 0.77
_VANDER_INV = np.linalg.inv(np.vander(_MU_NODES, 5, increasing=True))


def mu_quartic_coeffs(z) -> np.ndarray:
    """Coefficient array ``(..., 5)`` ordered ``c0 .. c4``."""
    z = _as_z(z)
    if not np.iscomplexobj(z):
        return _real_quartic(z)
    vals = np.stack([ptdet_q(z, m) for m in _MU_NODES], axis=-1)
    coeffs = vals @ _VANDER_INV.T
    direct = ptdet_q(z, _MU_CHECK)
    fitted = np.polynomial.polynomial.polyval(_MU_CHECK, np.moveaxis(coeffs, -1, 0))
    scale = np.maximum(np.abs(coeffs).max(axis=-1), 1e-300)
    if np.any(np.abs(direct - fitted) > 1e-9 * scale):
        raise ArithmeticError("quartic interpolation residual too large")
    return coeffs


def mu_quartic(z) -> MuQuartic:
    return MuQuartic(*(float(c) for c in mu_quartic_coeffs(np.asarray(_as_z(z)))))


def _quartic_breakpoints(coeffs: np.ndarray) -> np.ndarray:
    """Sorted candidate sign-change points in [0, 1], shape ``(n, 6)``.

    Real roots in (0, 1) from companion-matrix eigenvalues, polished by one
    Newton step, padded with the endpoints. Near-real conjugate pairs are kept
    as (harmless) extra breakpoints.
    """
    n = coeffs.shape[0]
    roots = np.full((n, 4), np.nan, dtype=complex)
    lead = np.abs(coeffs[:, 4])
    scale = np.abs(coeffs).max(axis=1)
    generic = lead > 1e-13 * np.maximum(scale, 1e-300)
    if np.any(generic):
        c = coeffs[generic]
        comp = np.zeros((c.shape[0], 4, 4))
        comp[:, 1:, :-1] = np.eye(3)
        comp[:, :, -1] = -c[:, :4] / c[:, 4:5]
        roots[generic] = np.linalg.eigvals(comp)
    for row in np.flatnonzero(~generic):
        r = np.polynomial.polynomial.polyroots(np.trim_zeros(coeffs[row], "b") if np.any(coeffs[row]) else [1.0])
        roots[row, : len(r)] = r

    re = roots.real
    near_real = np.abs(roots.imag) <= 1e-6 * (1.0 + np.abs(re))
    re = np.where(near_real, re, np.nan)
    # one Newton step
    der = coeffs[:, 1:] * np.arange(1, 5)
    with np.errstate(invalid="ignore", divide="ignore"):
        f = _polyval_rows(coeffs, re)
        fp = _polyval_rows(der, re)
        step = np.where(np.abs(fp) > 0, f / fp, 0.0)
        polished = re - step
        # only accept steps that stay local
        re = np.where(np.abs(step) < 1e-6, polished, re)
    re = np.where((re > 0.0) & (re < 1.0), re, np.nan)
    pts = np.concatenate([np.zeros((n, 1)), re, np.ones((n, 1))], axis=1)
    pts = np.sort(pts, axis=1)  # nan sorts last
    # replace nan padding by 1 so those segments are empty
    return np.where(np.isnan(pts), 1.0, pts)


def _polyval_rows(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate row-wise polynomials (``coeffs`` shape (n, k)) at ``x`` (n, m)."""
    out = np.zeros_like(x, dtype=float)
    for k in range(coeffs.shape[1] - 1, -1, -1):
        out = out * x + coeffs[:, k : k + 1]
    return out


def nonnegative_segments(coeffs: np.ndarray, tol: float = BOUNDARY_TOL):
    """Breakpoints ``(n, 6)`` and a mask ``(n, 5)`` of segments where q >= 0."""
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
    pts = _quartic_breakpoints(coeffs)
    mids = 0.5 * (pts[:, :-1] + pts[:, 1:])
    keep = _polyval_rows(coeffs, mids) >= -tol
    keep &= pts[:, 1:] >= pts[:, :-1]
    return pts, keep


def nonnegative_intervals(coeffs, tol: float = BOUNDARY_TOL, merge_tol: float = 1e-12) -> list[Interval]:
    """Closed intervals of [0, 1] on which the quartic is nonnegative."""
    pts, keep = nonnegative_segments(np.asarray(coeffs, dtype=float)[None, :], tol)
    pts, keep = pts[0], keep[0]
    out: list[Interval] = []
    for k in np.flatnonzero(keep):
        lo, hi = float(pts[k]), float(pts[k + 1])
        if out and lo - out[-1].hi <= merge_tol:
            out[-1] = Interval(out[-1].lo, max(out[-1].hi, hi))
        else:
            out.append(Interval(lo, hi))
    # isolated tangency points carry no measure
    return [iv for iv in out if iv.hi - iv.lo > merge_tol or len(out) == 1]


def separable_mu_set(z) -> list[Interval]:
    """Values of ``mu`` in [0, 1] at which ``z`` gives a separable state."""
    z = _as_z(z)
    if not bool(is_density(z)):
        return []
    return nonnegative_intervals(mu_quartic_coeffs(z))


def is_separable(z, mu, tol: float = BOUNDARY_TOL):
    """Peres-Horodecki test: positive state with nonnegative ``q(mu)``."""
    z = _as_z(z)
    return is_density(z, tol) & (ptdet_q(z, mu) >= -tol)


def swap_parties(z) -> np.ndarray:
    """Relabel basis states by (1<->2, 3<->4); maps ratio ``mu`` to ``1/mu``."""
    z = _as_z(z)
    z12, z13, z14, z23, z24, z34 = np.moveaxis(z, -1, 0)
    # new z_ij = old z_{p(i) p(j)} with p = (2, 1, 4, 3)
    return np.stack(
        [np.conj(z12), z24, z23, z14, z13, np.conj(z34)], axis=-1
    )


def eigen_oracle(m, tol: float = 1e-12) -> np.ndarray:
    """Sorted eigenvalues of a Hermitian 4x4 matrix (or stack)."""
    m = np.asarray(m)
    asym = np.abs(m - np.conj(np.swapaxes(m, -1, -2))).max() if m.size else 0.0
    if asym > tol:
        raise ValueError(f"matrix is not Hermitian (asymmetry {asym:.3g})")
    return np.linalg.eigvalsh(m)
