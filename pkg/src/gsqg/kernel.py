"""Radial Biot-Savart kernels built from spectral multipliers.

The active scalar's velocity field is ``u = int (x-y)^perp / |x-y|^2 *
G(|x-y|) theta(y) dy``; this module constructs the radial profile ``G`` from
a :class:`~gsqg.multipliers.Multiplier` by oscillatory Bessel quadrature,

    G(rho) = m(0+)/(2*pi) + (1/2*pi) * int_0^inf J0(rho*r) m'(r) dr,

together with its derivative G' and the primitive R(rho) = int_rho^1 G(s)/s ds
(normalized so R(1) = 0; any other constant cancels in closed-contour sums).

The integral converges only conditionally for slowly decaying m', so [0, inf)
is partitioned at the zeros of J0(rho*.), each inter-zero piece is integrated
with 16-point Gauss-Legendre panels, and the alternating series of pieces is
summed by iterated averaging of its partial sums (Euler transformation).  The
interval up to the first Bessel zero is covered by geometrically shrinking
panels toward the m'-singularity at 0, closed by the analytic stub
``int_0^a J0(rho r) m'(r) dr ~ m(a) - m(0+)`` (J0 deviates from 1 by
O((rho*a)^2) there, far below every supported tolerance).
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
from scipy.interpolate import CubicSpline

from . import bessel
from .errors import (
    AccuracyError,
    QuadratureError,
    TableRangeError,
    ValidationError,
)
from .multipliers import Multiplier

__all__ = [
    "KernelTable",
    "AsymptoticsReport",
    "compute_G",
    "compute_G_prime",
    "compute_R",
    "build_table",
    "closed_form_G",
    "verify_asymptotics",
]

TWO_PI = 2.0 * math.pi

_GL16_X, _GL16_W = np.polynomial.legendre.leggauss(16)
_GL20_X, _GL20_W = np.polynomial.legendre.leggauss(20)

# Head covering [0, first zero]: panels shrink by 4x per step, so the floor
# sits at ~3e-18 of the first zero and the stub below it is exact to O(1e-35).
_HEAD_PANELS = 29
_HEAD_SHRINK = 4.0

_FIRST_BUDGET = 48
_DEFAULT_MAX_ZEROS = 480


def _validate_eval(rho: float, tol: float) -> None:
    if not rho > 0:
        raise ValidationError("rho must be positive")
    if not 1e-14 < tol < 1e-3:
        raise ValidationError("tol must lie in (1e-14, 1e-3)")


def _integrand(mult: Multiplier, r: np.ndarray, which: int) -> np.ndarray:
    """m'(r) for the kernel itself, (r m')'(r) = m' + r m'' for G'."""
    d = mult.derivatives(r, which)
    if which == 1:
        return d[1]
    return d[1] + r * d[2]


def _panel_integrals(mult, rho, lo, hi, which):
    """16-pt Gauss-Legendre of J0(rho r) * integrand over each [lo_i, hi_i]."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = mid[:, None] + half[:, None] * _GL16_X[None, :]
    flat = nodes.ravel()
    vals = _integrand(mult, flat, which) * bessel.j0(rho * flat)
    return (vals.reshape(nodes.shape) @ _GL16_W) * half


def _head_integral(mult, rho, r_first, which):
    """Integral over [0, r_first] (up to the first Bessel zero)."""
    edges = r_first * _HEAD_SHRINK ** (-np.arange(_HEAD_PANELS + 1.0))
    panels = _panel_integrals(mult, rho, edges[1:], edges[:-1], which)
    floor = np.array([edges[-1]])
    if which == 1:
        stub = float(mult(floor)[0]) - mult.m0_plus
    else:
        # the stub [r m']_0^floor absorbs the -lim r m'(r) boundary term of
        # the G' formula, so no separate limit probe is needed
        stub = float(floor[0] * mult.m_prime(floor)[0])
    return stub + float(np.sum(panels))


def _accelerate(partials: np.ndarray):
    """Iterated averaging of the tail of an (eventually) alternating series."""
    row = np.asarray(partials[-32:], dtype=float)
    prev_last = row[-1]
    while row.size > 1:
        prev_last = row[-1]
        row = 0.5 * (row[:-1] + row[1:])
    est = float(row[0])
    return est, abs(est - float(prev_last)) + 1e-16 * abs(est)


def _oscillatory_integral(mult, rho, which, tol, max_zeros):
    """Accelerated value of ``int_0^inf J0(rho r) f(r) dr``.

    Returns (value, error_estimate, zeros_used); raises QuadratureError with
    the partial sums if the zero budget is exhausted before reaching tol.
    """
    if max_zeros < 2:
        raise ValidationError("max_zeros must be at least 2")
    zeros = bessel.j0_zeros(max_zeros) / rho
    head = _head_integral(mult, rho, zeros[0], which)

    budgets = []
    b = min(_FIRST_BUDGET, max_zeros)
    while True:
        budgets.append(b)
        if b >= max_zeros:
            break
        b = min(2 * b, max_zeros)

    segments = np.zeros(0)
    have = 1
    est = err = None
    for budget in budgets:
        if budget > have:
            new = _panel_integrals(mult, rho, zeros[have - 1:budget - 1],
                                   zeros[have:budget], which)
            segments = np.concatenate([segments, new])
            have = budget
        partials = head + np.concatenate([[0.0], np.cumsum(segments)])
        est, err = _accelerate(partials)
        if err <= tol:
            return est, err, have
    raise QuadratureError(
        f"oscillatory quadrature stalled at error {err:.3e} > tol {tol:.3e} "
        f"after {have} Bessel zeros",
        partial_sums=partials, error_estimate=err)


# ---------------------------------------------------------------------------
# point evaluations
# ---------------------------------------------------------------------------


def compute_G(mult: Multiplier, rho: float, tol: float = 1e-9,
              max_zeros: int = _DEFAULT_MAX_ZEROS) -> float:
    """Radial kernel profile G(rho) with estimated absolute error <= tol."""
    _validate_eval(rho, tol)
    if mult.kind == "euler":
        return mult.m0_plus / TWO_PI
    val, _, _ = _oscillatory_integral(mult, float(rho), 1, TWO_PI * tol,
                                      max_zeros)
    return (mult.m0_plus + val) / TWO_PI


def compute_G_prime(mult: Multiplier, rho: float, tol: float = 1e-9,
                    max_zeros: int = _DEFAULT_MAX_ZEROS) -> float:
    """dG/drho by the same machinery with integrand (r m'(r))'."""
    _validate_eval(rho, tol)
    if mult.kind == "euler":
        return 0.0
    rho = float(rho)
    val, _, _ = _oscillatory_integral(mult, rho, 2, TWO_PI * rho * tol,
                                      max_zeros)
    return -val / (TWO_PI * rho)


def compute_R(table_or_mult, rho: float, tol: float = 1e-9) -> float:
    """Primitive R(rho) = int_rho^1 G(s)/s ds, so R(1) = 0 and R' = -G/rho.

    Accepts a KernelTable (interpolated, range-checked) or a Multiplier
    (direct quadrature through compute_G).
    """
    if not rho > 0:
        raise ValidationError("rho must be positive")
    if isinstance(table_or_mult, KernelTable):
        table = table_or_mult
        table._check_range(rho)
        t = math.log(rho)
        return float(table._r_spline(t) - table._r_spline(0.0))
    mult = table_or_mult
    if rho == 1.0:
        return 0.0
    from scipy import integrate
    inner = max(tol / 10.0, 2e-14)
    val, _ = integrate.quad(
        lambda t: compute_G(mult, math.exp(t), tol=inner),
        math.log(rho), 0.0, epsabs=tol, epsrel=tol, limit=200)
    return float(val)


def closed_form_G(kind: str, params: dict, rho: float) -> float:
    """Analytic kernels: the constant profile and the pure power law.

    For m = r^alpha the profile is ``alpha * c_alpha * rho^(-alpha)`` with
    ``c_alpha = Gamma(alpha/2) / (pi * 2^(2-alpha) * Gamma(1-alpha/2))``.
    """
    if kind == "euler":
        return 1.0 / TWO_PI
    if kind == "alpha_sqg":
        alpha = float(params["alpha"])
        c = math.gamma(0.5 * alpha) / (
            math.pi * 2.0 ** (2.0 - alpha) * math.gamma(1.0 - 0.5 * alpha))
        return alpha * c * float(rho) ** (-alpha)
    raise ValidationError(
        f"no closed form for kind {kind!r}; use compute_G")


# ---------------------------------------------------------------------------
# tabulation
# ---------------------------------------------------------------------------


class _ShapeSpline:
    """Cubic spline in log-abscissa that works in log-ordinate when the data
    has one sign (power-law tails interpolate exactly) and falls back to a
    plain spline otherwise (e.g. an identically-zero derivative column)."""

    def __init__(self, t, y):
        y = np.asarray(y, dtype=float)
        if np.all(y > 0):
            self._sign = 1.0
            self._spl = CubicSpline(t, np.log(y))
        elif np.all(y < 0):
            self._sign = -1.0
            self._spl = CubicSpline(t, np.log(-y))
        else:
            self._sign = 0.0
            self._spl = CubicSpline(t, y)

    def __call__(self, t):
        if self._sign == 0.0:
            return self._spl(t)
        return self._sign * np.exp(self._spl(t))


@dataclasses.dataclass(frozen=True)
class KernelTable:
    """Immutable cache of G, G', R on a log grid with cubic interpolants."""

    rho_grid: np.ndarray
    G_vals: np.ndarray
    Gp_vals: np.ndarray
    R_vals: np.ndarray
    m0_plus: float
    quad_meta: dict
    normalization: str
    _g_spline: _ShapeSpline = dataclasses.field(repr=False)
    _gp_spline: _ShapeSpline = dataclasses.field(repr=False)
    _r_spline: CubicSpline = dataclasses.field(repr=False)

    def _check_range(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        lo, hi = self.rho_grid[0], self.rho_grid[-1]
        if np.any(rho < lo * (1 - 1e-12)) or np.any(rho > hi * (1 + 1e-12)):
            raise TableRangeError(
                f"rho outside tabulated range [{lo:g}, {hi:g}]")
        return np.clip(rho, lo, hi)

    def g(self, rho):
        """Interpolated G(rho)."""
        r = self._check_range(rho)
        out = self._g_spline(np.log(r))
        return float(out) if np.isscalar(rho) else out

    def g_prime(self, rho):
        """Interpolated G'(rho)."""
        r = self._check_range(rho)
        out = self._gp_spline(np.log(r))
        return float(out) if np.isscalar(rho) else out

    def r(self, rho):
        """Interpolated primitive R(rho); exact zero at rho = 1."""
        r = self._check_range(rho)
        out = self._r_spline(np.log(r)) - self._r_spline(0.0)
        return float(out) if np.isscalar(rho) else out


def build_table(mult: Multiplier, rho_min: float, rho_max: float,
                n_points: int, tol: float = 1e-9,
                max_zeros: int = _DEFAULT_MAX_ZEROS,
                refine_lowest_decade: bool = True) -> KernelTable:
    """Tabulate G, G', R on a log grid and attach validated interpolants.

    R is accumulated by 20-point Gauss-Legendre of the G interpolant between
    grid knots (plus direct quadrature on any stretch between the grid and
    rho = 1); with ``refine_lowest_decade`` the knot intervals in the lowest
    decade are re-integrated against direct quadrature instead of the spline.
    Twenty random off-grid probes must reproduce direct quadrature to 1e-6
    relative or the build fails with the offending probes listed.
    """
    if not 0 < rho_min < rho_max:
        raise ValidationError("need 0 < rho_min < rho_max")
    if n_points < 64:
        raise ValidationError("n_points must be >= 64")
    _validate_eval(rho_min, tol)

    rho_grid = np.geomspace(rho_min, rho_max, n_points)
    t_grid = np.log(rho_grid)

    G_vals = np.empty(n_points)
    Gp_vals = np.empty(n_points)
    failures = []
    last_exc = None
    for i, rho in enumerate(rho_grid):
        try:
            G_vals[i] = compute_G(mult, rho, tol, max_zeros)
            Gp_vals[i] = compute_G_prime(mult, rho, tol, max_zeros)
        except QuadratureError as exc:
            failures.append(rho)
            last_exc = exc
    if failures:
        head = ", ".join(f"{r:.6g}" for r in failures[:8])
        more = "" if len(failures) <= 8 else f" (+{len(failures) - 8} more)"
        raise QuadratureError(
            f"kernel quadrature failed at {len(failures)} table nodes: "
            f"rho = [{head}]{more}",
            partial_sums=last_exc.partial_sums,
            error_estimate=last_exc.error_estimate)

    g_spline = _ShapeSpline(t_grid, G_vals)
    gp_spline = _ShapeSpline(t_grid, Gp_vals)

    # interval integrals of G(e^t) dt between consecutive knots
    def _interval_gl(t_lo, t_hi, fn):
        mid, half = 0.5 * (t_lo + t_hi), 0.5 * (t_hi - t_lo)
        nodes = mid + half * _GL20_X
        return half * float(np.dot(fn(nodes), _GL20_W))

    spline_fn = lambda t: np.asarray(g_spline(t), dtype=float)
    direct_fn = lambda t: np.array(
        [compute_G(mult, math.exp(x), tol, max_zeros) for x in np.atleast_1d(t)])

    intervals = np.array([
        _interval_gl(t_grid[i], t_grid[i + 1], spline_fn)
        for i in range(n_points - 1)])
    if refine_lowest_decade and rho_max / rho_min > 10.0:
        t_cut = t_grid[0] + math.log(10.0)
        for i in range(n_points - 1):
            if t_grid[i + 1] > t_cut:
                break
            intervals[i] = _interval_gl(t_grid[i], t_grid[i + 1], direct_fn)

    cumulative = np.concatenate([[0.0], np.cumsum(intervals)])  # from t_grid[0]
    if t_grid[0] <= 0.0 <= t_grid[-1]:
        j = int(np.searchsorted(t_grid, 0.0, side="right") - 1)
        cum_at_one = cumulative[j] + _interval_gl(t_grid[j], 0.0, spline_fn)
    elif t_grid[-1] < 0.0:
        cum_at_one = cumulative[-1] + _interval_gl(t_grid[-1], 0.0, direct_fn)
    else:
        cum_at_one = -_interval_gl(0.0, t_grid[0], direct_fn)
    R_vals = cum_at_one - cumulative

    # off-grid validation probes against direct quadrature
    rng = np.random.default_rng(314159)
    probes = np.exp(rng.uniform(t_grid[0], t_grid[-1], 20))
    bad = []
    for rho in probes:
        ref = compute_G(mult, rho, tol, max_zeros)
        got = float(g_spline(math.log(rho)))
        scale = max(abs(ref), 1e-300)
        if abs(got - ref) / scale > 1e-6:
            bad.append(float(rho))
    if bad:
        raise AccuracyError(
            f"table interpolation misses direct quadrature by > 1e-6 at "
            f"{len(bad)} probes", nodes=bad)

    zeros_used = max_zeros if mult.kind != "euler" else 0
    quad_meta = {
        "abs_tol": tol,
        "rel_tol": tol / float(np.min(np.abs(G_vals))),
        "truncation_r_max": float(bessel.j0_zero(max(zeros_used, 1)) / rho_min),
        "num_bessel_zeros_used": zeros_used,
    }
    return KernelTable(
        rho_grid=rho_grid, G_vals=G_vals, Gp_vals=Gp_vals, R_vals=R_vals,
        m0_plus=mult.m0_plus, quad_meta=quad_meta, normalization="R(1)=0",
        _g_spline=g_spline, _gp_spline=gp_spline,
        _r_spline=CubicSpline(t_grid, R_vals))


# ---------------------------------------------------------------------------
# asymptotics verification
# ---------------------------------------------------------------------------


@dataclasses.dataclass
class AsymptoticsReport:
    """Empirical check of the kernel's near-origin behaviour.

    ``c_bar_fit``/``C_fit`` sandwich G between multiples of m(1/rho) on the
    small-rho half of the grid; ``c_bar0_fit`` is the largest rho below which
    the regime's monotone quantity (G/rho for slowly growing m, G itself for
    power-like m) is non-increasing on the grid.
    """

    regime: str
    c_bar_fit: float
    C_fit: float
    ratio_min: float
    ratio_max: float
    sandwich_ok: bool
    monotone_flag: bool
    c_bar0_fit: float
    scaling_limit_errors: dict


def verify_asymptotics(table: KernelTable, mult: Multiplier,
                       sandwich_factor: float = 1e3) -> AsymptoticsReport:
    """Fit the sandwich constants and report scaling-limit errors.

    The scaling entries are reports, not assertions: slowly varying symbols
    approach their limits like 1/log rho, so finite-radius ratios can sit
    outside any fixed tolerance while still trending correctly (the squared
    double log is 8.2e-2 away at rho = 1e-8 for l = 10).
    """
    rho = table.rho_grid
    n = rho.size
    half = rho[: max(n // 2, 2)]
    ratio = table.G_vals[: half.size] / np.asarray(mult(1.0 / half))
    ratio_min = float(np.min(ratio))
    ratio_max = float(np.max(ratio))
    sandwich_ok = bool(ratio_min > 0
                       and ratio_max <= sandwich_factor * ratio_min)

    family = mult.regime.family
    seq = table.G_vals if family == "h2b" else table.G_vals / rho
    diffs = np.diff(seq)
    slack = 1e-10 * np.maximum(np.abs(seq[:-1]), np.abs(seq[1:]))
    bad = np.nonzero(diffs > slack)[0]
    cut = int(bad[0]) if bad.size else n - 1
    c_bar0_fit = float(rho[cut])
    monotone_flag = cut >= min(8, n - 1)

    errors = {}
    if family == "h2a":
        base = float(mult(np.array([1e8]))[0])
        for l in (2, 10):
            val = float(mult(np.array([l * 1e8]))[0])
            errors[f"h2a_scaling_l{l}"] = abs(val / base - 1.0)
    elif family == "h2b":
        alpha = mult.regime.constant
        cutoff = max(1e-4, rho[min(3, n - 1)])
        sel = rho <= cutoff
        g, gp = table.G_vals[sel], table.Gp_vals[sel]
        errors["h2b_derivative"] = float(
            np.max(np.abs(rho[sel] * gp + alpha * g) / g))
        worst = 0.0
        for l in (0.5, 2.0):
            pts = rho[sel][(rho[sel] * l >= rho[0]) & (rho[sel] * l <= rho[-1])]
            if pts.size:
                scaled = table.g(l * pts)
                worst = max(worst, float(np.max(np.abs(
                    l ** alpha * scaled / table.g(pts) - 1.0))))
        errors["h2b_scaling"] = worst

    return AsymptoticsReport(
        regime=family, c_bar_fit=ratio_min, C_fit=ratio_max,
        ratio_min=ratio_min, ratio_max=ratio_max, sandwich_ok=sandwich_ok,
        monotone_flag=monotone_flag, c_bar0_fit=c_bar0_fit,
        scaling_limit_errors=errors)
