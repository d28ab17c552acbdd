"""Twin-patch approach-to-collision scenario.

Two mirror-image patches of opposite sign sit in the upper half-plane on
either side of the vertical axis, each touching the impermeable wall.  The
odd symmetry makes the horizontal velocity on the axis vanish, while the
one-sided velocity bounds audited here push both fronts toward the corner
at the origin.  This module packages the full pipeline:

* :class:`ScenarioConfig` -- validated geometry and kernel-regime settings;
* :func:`build_initial_data` -- the nested-rectangle initial contour pair;
* :func:`driving_rate` -- the front-speed floor ``F`` used by every bound;
* :func:`collision_time` -- the clock ``T*`` and envelope ``X(t)`` obtained
  by integrating ``X' = -F(X)/2`` to zero separation;
* :func:`pi_indices` -- closed-form certification indices whose signs
  guarantee a positive steep-side/flat-side velocity margin for power-law
  kernels;
* :func:`containment_check` -- distance from the complement of the patch
  to the corner trapezoid that must stay covered while the front advances;
* :func:`verify_velocity_bounds` -- quadrature audit of the one-sided
  bounds ``u1 <= -F(x1)`` and ``u2 >= F(x2/k)`` on the certified wedges;
* :func:`run_scenario` -- the end-to-end contour evolution with collision,
  containment, and diagnostics monitoring.

The slowly-varying regime (``A2a``) covers kernels whose radial profile
``G`` keeps a logarithmic factor (Euler-like); the power-tail regime
(``A2b``) covers profiles comparable to ``rho**(-beta)`` near zero.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
from scipy.optimize import brentq

from .contour import (
    ContourSystem,
    PatchContour,
    diagnostics,
    init_shape,
    mirror_patch,
    point_inside,
    compute_rhs,
    step,
)
from .errors import (
    CflError,
    ContactImminentError,
    DomainError,
    NoCollisionError,
    QuadratureError,
    ValidationError,
)
from .velocity import (
    PolygonComponent,
    RegionSet,
    _g_extended,
    _g_ray_primitive,
    _point_in_poly,
    bad_part_majorant,
    split_velocities,
)

__all__ = [
    "ScenarioConfig",
    "CollisionTime",
    "ContainmentReport",
    "PiIndices",
    "ProbeAudit",
    "BoundsReport",
    "OutputRecord",
    "ScenarioResult",
    "build_initial_data",
    "driving_rate",
    "collision_time",
    "containment_check",
    "pi_indices",
    "verify_velocity_bounds",
    "run_scenario",
]

_GL16 = np.polynomial.legendre.leggauss(16)
_GL24 = np.polynomial.legendre.leggauss(24)
_GL32 = np.polynomial.legendre.leggauss(32)

#: clock integration runs in s = log(1/rho); stop here (rho ~ 1e-260)
_S_MAX = 600.0
#: widest Gauss panel in s that still resolves exponential tails
_S_PANEL_CAP = 24.0


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ScenarioConfig:
    """Validated settings for the twin-patch collision scenario.

    ``c_star`` (a quarter of the support scale ``c0``) fixes the nested
    rectangles of the initial data; ``slope_k`` the opening of the certified
    wedges and of the containment trapezoid; ``delta_G`` how far from the
    corner the one-sided velocity bounds are claimed; ``driving_c`` the
    constant in the front-speed floor.  ``N_k`` is the auxiliary ratio used
    by the flat-side margin bookkeeping and must exceed ``slope_k``.
    """

    epsilon: float
    c0: float
    slope_k: int
    delta_G: float
    driving_c: float
    N_k: float
    regime: str
    M: int = 256
    dt: float = 2e-3
    output_every: int = 10
    t_end: float | None = None
    cfl_factor: float = 0.5
    collision_factor: float = 2.0
    w_norm_cap: float = 1e6
    reparam_every: int = 0
    shape_params: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if not (np.isfinite(self.c0) and self.c0 > 0):
            raise ValidationError(f"c0 must be positive, got {self.c0}")
        if not isinstance(self.slope_k, (int, np.integer)) or self.slope_k < 1:
            raise ValidationError(
                f"slope_k must be a positive integer, got {self.slope_k!r}")
        if self.regime not in ("A2a", "A2b"):
            raise ValidationError(
                f"regime must be 'A2a' or 'A2b', got {self.regime!r}")
        if not (np.isfinite(self.driving_c) and self.driving_c > 0):
            raise ValidationError(
                f"driving_c must be positive, got {self.driving_c}")
        if not (np.isfinite(self.N_k) and self.N_k > self.slope_k):
            raise ValidationError(
                f"need N_k > slope_k, got N_k={self.N_k}, "
                f"slope_k={self.slope_k}")
        if not (0.0 < self.delta_G < self.c_star):
            raise ValidationError(
                f"need 0 < delta_G < c_star (= c0/4 = {self.c_star:g}), "
                f"got delta_G={self.delta_G}")
        bound = self.delta_G / (4.0 * self.slope_k)
        if not (0.0 < self.epsilon < bound):
            raise ValidationError(
                f"need epsilon < delta_G / (4 * slope_k) = {bound:g}, "
                f"got epsilon={self.epsilon}")
        if not isinstance(self.M, (int, np.integer)) or self.M < 32 \
                or self.M % 2:
            raise ValidationError(
                f"M must be an even integer >= 32, got {self.M!r}")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValidationError(f"dt must be positive, got {self.dt}")
        if not isinstance(self.output_every, (int, np.integer)) \
                or self.output_every < 1:
            raise ValidationError(
                f"output_every must be a positive integer, "
                f"got {self.output_every!r}")
        if self.t_end is not None and not (np.isfinite(self.t_end)
                                           and self.t_end > 0):
            raise ValidationError(
                f"t_end must be positive when set, got {self.t_end}")
        if not (0 < self.cfl_factor <= 1):
            raise ValidationError(
                f"cfl_factor must lie in (0, 1], got {self.cfl_factor}")
        if not (np.isfinite(self.collision_factor)
                and self.collision_factor > 0):
            raise ValidationError(
                f"collision_factor must be positive, "
                f"got {self.collision_factor}")
        if not (np.isfinite(self.w_norm_cap) and self.w_norm_cap > 0):
            raise ValidationError(
                f"w_norm_cap must be positive, got {self.w_norm_cap}")
        if not isinstance(self.reparam_every, (int, np.integer)) \
                or self.reparam_every < 0:
            raise ValidationError(
                f"reparam_every must be a nonnegative integer, "
                f"got {self.reparam_every!r}")

    @property
    def c_star(self) -> float:
        return 0.25 * self.c0


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------


def build_initial_data(cfg: ScenarioConfig, M: int | None = None
                       ) -> ContourSystem:
    """Mirror pair of nested-rectangle patches touching the wall.

    The right-hand patch is a rounded rectangle squeezed between the frames
    ``(2*eps, 3*c_star) x (0, 3*c_star)`` (inside) and
    ``(eps, 4*c_star) x (0, 4*c_star)`` (outside), with its flat bottom on
    the wall; the left-hand patch is its exact odd reflection.
    """
    m = cfg.M if M is None else M
    if not cfg.epsilon < cfg.c_star / 8.0:
        raise ValidationError(
            "epsilon too large for the nested-rectangle initial data: "
            f"need epsilon < c_star / 8 = {cfg.c_star / 8.0:g}, "
            f"got {cfg.epsilon}")
    params = {"epsilon": cfg.epsilon, "c_star": cfg.c_star}
    params.update(cfg.shape_params)
    primary = init_shape("scenario_omega0", params, m, strength=1.0)
    return ContourSystem(patches=(primary, mirror_patch(primary)),
                         domain="half_plane", mirror_symmetry=True)


# ---------------------------------------------------------------------------
# driving rate
# ---------------------------------------------------------------------------


def driving_rate(cfg: ScenarioConfig, table, rho):
    """Front-speed floor ``F`` at separation ``rho``.

    ``F(rho) = c * rho * log(1/rho) * G(rho)`` in the slowly-varying regime
    and ``F(rho) = c * rho * G(rho)`` in the power-tail regime, with ``G``
    read from the kernel table.  Scalar in, scalar out; arrays broadcast.
    """
    r = np.asarray(rho, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    if not np.all(np.isfinite(r)) or np.any(r <= 0.0) \
            or np.any(r >= cfg.c0):
        raise DomainError(
            f"driving rate needs separations 0 < rho < c0 (= {cfg.c0:g}), "
            f"got {rho!r}")
    if cfg.regime == "A2a":
        if np.any(r >= 1.0):
            raise DomainError(
                "slowly-varying driving rate needs rho < 1 so that "
                f"log(1/rho) stays positive, got {rho!r}")
        out = cfg.driving_c * r * np.log(1.0 / r) * _g_extended(table, r)
    else:
        out = cfg.driving_c * r * _g_extended(table, r)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# collision clock
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class CollisionTime:
    """Clock ``T*`` and separation envelope for ``X' = -F(X)/2``.

    ``X(t)`` starts from three times the initial-data margin and decreases
    to zero exactly at ``T_star``.  ``divergent`` marks kernels whose
    approach-rate integral has no finite value; the envelope then remains
    valid on the accumulated range and ``T_star`` is infinite.
    """

    T_star: float
    divergent: bool
    x_start: float
    _edges: np.ndarray = dataclasses.field(repr=False)
    _cum: np.ndarray = dataclasses.field(repr=False)
    _integrand: object = dataclasses.field(repr=False)

    def X(self, t: float) -> float:
        t = float(t)
        if math.isnan(t):
            raise ValidationError("time must not be NaN")
        if t <= 0.0:
            return self.x_start
        if not self.divergent and t >= self.T_star:
            return 0.0
        if t >= self._cum[-1]:
            return math.exp(-float(self._edges[-1]))
        j = int(np.searchsorted(self._cum, t, side="right")) - 1
        j = min(max(j, 0), len(self._edges) - 2)
        a, b = float(self._edges[j]), float(self._edges[j + 1])
        target = t - float(self._cum[j])

        def partial(s):
            return _gl_segment(self._integrand, a, s) - target

        if partial(b) <= 0.0:  # roundoff at a panel edge
            return math.exp(-b)
        s_hit = brentq(partial, a, b, xtol=1e-15, rtol=1e-15, maxiter=200)
        return math.exp(-float(s_hit))


def _gl_segment(f, a, b, rule=_GL16):
    if b <= a:
        return 0.0
    n, w = rule
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return half * float(np.dot(w, f(mid + half * n)))


def _clock_integrand(cfg: ScenarioConfig, table):
    slow = cfg.regime == "A2a"
    c = cfg.driving_c

    def f(s):
        s = np.asarray(s, dtype=float)
        g = _g_extended(table, np.exp(-s))
        val = 2.0 / (c * g)
        if slow:
            val = val / s
        return val

    return f


def collision_time(cfg: ScenarioConfig, table, *,
                   allow_divergent: bool = False) -> CollisionTime:
    """Integrate ``2/F`` from zero separation up to ``3*epsilon``.

    Uses the substitution ``rho = exp(-s)`` with Gauss panels whose widths
    grow geometrically, so power-law kernels converge to near machine
    precision and kernels without a finite clock are detected from the
    non-decaying panel contributions.  The latter raise
    :class:`NoCollisionError` carrying the accumulated partial value unless
    ``allow_divergent`` is set, in which case the envelope stays usable on
    the accumulated time range (for fixed-horizon control runs).
    """
    x0 = 3.0 * cfg.epsilon
    if cfg.regime == "A2a" and x0 >= 1.0:
        raise DomainError(
            "slowly-varying clock needs 3*epsilon < 1 so that the "
            f"logarithmic factor stays positive, got {x0:g}")
    s0 = math.log(1.0 / x0)
    edges = [s0]
    width = 0.5
    while edges[-1] < _S_MAX:
        edges.append(min(edges[-1] + width, _S_MAX))
        width = min(width * 1.3, _S_PANEL_CAP)
    edges = np.asarray(edges)
    f = _clock_integrand(cfg, table)
    n, w = _GL16
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = mid[:, None] + half[:, None] * n[None, :]
    vals = f(pts.reshape(-1)).reshape(pts.shape)
    if not np.all(np.isfinite(vals)) or np.any(vals < 0.0):
        raise QuadratureError(
            "approach-rate integrand is not finite and positive")
    contribs = half * (vals @ w)
    cum = np.concatenate([[0.0], np.cumsum(contribs)])
    total = float(cum[-1])

    last, prev = float(contribs[-1]), float(contribs[-2])
    ratio = last / prev if prev > 0.0 else 0.0
    tail = last * ratio / (1.0 - ratio) if ratio < 0.9 else math.inf
    converged = last <= 1e-9 * total and tail <= 1e-9 * total
    if converged:
        return CollisionTime(T_star=total + tail, divergent=False,
                             x_start=x0, _edges=edges, _cum=cum,
                             _integrand=f)
    if allow_divergent:
        return CollisionTime(T_star=math.inf, divergent=True, x_start=x0,
                             _edges=edges, _cum=cum, _integrand=f)
    raise NoCollisionError(
        "no finite collision time: the approach-rate integral keeps "
        f"growing down to separation {math.exp(-_S_MAX):.3g} "
        f"(accumulated {total:.6g})", partial_value=total)


# ---------------------------------------------------------------------------
# certification indices
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class PiIndices:
    """Steep-side (`pi1`) and flat-side (`pi2`) certification indices.

    For a kernel with power tail ``rho**(-beta)`` the wedge bounds close
    when ``pi1 < 0`` and ``pi2 > 0``; ``margin`` subtracts the auxiliary
    correction ``2 / (beta * N_k**beta)`` from ``pi2`` when ``N_k`` is
    given, and must stay positive for the flat-side claim to survive the
    bookkeeping at the chosen ``N_k``.
    """

    beta: float
    slope_k: int
    pi1: float
    pi2: float
    margin: float | None = None


def pi_indices(beta: float, slope_k: int,
               N_k: float | None = None) -> PiIndices:
    """Closed-form evaluation of both certification indices."""
    if not isinstance(slope_k, (int, np.integer)) or slope_k < 1:
        raise ValidationError(
            f"slope_k must be a positive integer, got {slope_k!r}")
    b = float(beta)
    if not (np.isfinite(b) and 0.0 < b < 1.0 / 3.0):
        raise DomainError(
            f"certification indices need 0 < beta < 1/3, got {beta!r}")
    k = float(slope_k)
    kk = k * k
    q1 = kk + 1.0
    two_b = 2.0 ** (-b)
    pi1 = (2.0 / b) * (
        1.0 / (1.0 - b)
        - q1 ** (-0.5 * b)
        - two_b * k ** (-b) * (4.0 / kk + 1.0) ** (-1.0 - 0.5 * b)
        - (two_b / (1.0 - b)) * (1.0 - q1 ** (-0.5 * b))
        + 0.5 * ((4.0 + 4.0 * kk) ** (-0.5 * b)
                 - (9.0 + kk) ** (-0.5 * b)))
    pi2 = (2.0 / b) * (
        -1.0 / (1.0 - b)
        + (1.0 + 1.0 / kk) ** (-0.5 * b)
        + ((1.0 - q1 ** (-1.0 - 0.5 * b)) / (2.0 * q1 ** (0.5 * b)))
        * (1.0 + (2.0 ** (1.0 - b) - 1.0) / (1.0 - b)))
    margin = None
    if N_k is not None:
        if not (np.isfinite(N_k) and N_k > slope_k):
            raise ValidationError(
                f"need N_k > slope_k, got N_k={N_k}, slope_k={slope_k}")
        margin = pi2 - 2.0 / (b * float(N_k) ** b)
    return PiIndices(beta=b, slope_k=int(slope_k), pi1=pi1, pi2=pi2,
                     margin=margin)


# ---------------------------------------------------------------------------
# containment trapezoid
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ContainmentReport:
    """Distance from the uncovered part of the quadrant to the trapezoid.

    ``margin`` is positive while the corner trapezoid
    ``{X_t < x1 < 2 c_star/k, 0 < x2 < k x1}`` stays strictly inside the
    right-hand patch, zero at grazing contact, and negative (with magnitude
    the worst probe's distance to the patch boundary) once the trapezoid
    pokes outside.  ``segment`` labels the feature realizing the margin:
    the left edge ("I1"), the near part of the sloped edge up to
    ``x1 = delta_G`` ("I2"), the far slope, the right edge, or the bottom.
    """

    margin: float
    inside: bool
    segment: str
    witness: tuple


def _points_to_segments_all(points, seg_a, seg_b):
    """Distance matrix from each point to each segment."""
    ab = seg_b - seg_a
    ap = points[:, None, :] - seg_a[None, :, :]
    denom = np.maximum(np.einsum("ij,ij->i", ab, ab), 1e-300)
    t = np.clip(np.einsum("pij,ij->pi", ap, ab) / denom[None, :], 0.0, 1.0)
    nearest = seg_a[None, :, :] + t[:, :, None] * ab[None, :, :]
    return np.linalg.norm(points[:, None, :] - nearest, axis=2)


def _edge_to_segments(a0, a1, seg_a, seg_b):
    """Exact min distance between one segment and a segment family."""
    a0 = np.asarray(a0, dtype=float)
    a1 = np.asarray(a1, dtype=float)
    d_end = _points_to_segments_all(np.stack([a0, a1]), seg_a, seg_b).min()
    d_rev = _points_to_segments_all(
        np.concatenate([seg_a, seg_b]), a0[None, :], a1[None, :]).min()
    dist = min(float(d_end), float(d_rev))
    if dist == 0.0:
        return 0.0
    # proper crossings mean contact
    da = a1 - a0
    o1 = da[0] * (seg_a[:, 1] - a0[1]) - da[1] * (seg_a[:, 0] - a0[0])
    o2 = da[0] * (seg_b[:, 1] - a0[1]) - da[1] * (seg_b[:, 0] - a0[0])
    db = seg_b - seg_a
    o3 = db[:, 0] * (a0[1] - seg_a[:, 1]) - db[:, 1] * (a0[0] - seg_a[:, 0])
    o4 = db[:, 0] * (a1[1] - seg_a[:, 1]) - db[:, 1] * (a1[0] - seg_a[:, 0])
    if np.any((o1 * o2 < 0.0) & (o3 * o4 < 0.0)):
        return 0.0
    return dist


def _trapezoid_edges(cfg: ScenarioConfig, x_t: float):
    """Edges of the corner trapezoid with labels and inward unit normals."""
    k = float(cfg.slope_k)
    right = 2.0 * cfg.c_star / k
    n_slope = np.array([k, -1.0]) / math.hypot(k, 1.0)
    a = np.array([x_t, 0.0])
    b = np.array([right, 0.0])
    c = np.array([right, 2.0 * cfg.c_star])
    d = np.array([x_t, k * x_t])
    edges = [(a, d, "I1", np.array([1.0, 0.0]))]
    if x_t < cfg.delta_G < right:
        p = np.array([cfg.delta_G, k * cfg.delta_G])
        edges.append((d, p, "I2", n_slope))
        edges.append((p, c, "slope_far", n_slope))
    elif cfg.delta_G >= right:
        edges.append((d, c, "I2", n_slope))
    else:
        edges.append((d, c, "slope_far", n_slope))
    edges.append((b, c, "right", np.array([-1.0, 0.0])))
    edges.append((a, b, "bottom", np.array([0.0, 1.0])))
    return edges


def containment_check(system: ContourSystem, cfg: ScenarioConfig,
                      X_t: float) -> ContainmentReport:
    """Margin between the corner trapezoid and the uncovered quadrant.

    The first patch of the system must be the right-hand (positive) one.
    The wall run of the patch covers part of the horizontal axis, so the
    uncovered axis only starts left of the wall run and right of its end;
    the vertical axis and every off-wall boundary segment count in full.
    """
    x_t = float(X_t)
    if not np.isfinite(x_t):
        raise ValidationError(f"X_t must be finite, got {X_t!r}")
    x_t = max(x_t, 0.0)
    k = float(cfg.slope_k)
    right = 2.0 * cfg.c_star / k
    if x_t >= right:
        raise ValidationError(
            f"trapezoid is empty: need X_t < 2*c_star/slope_k = {right:g}, "
            f"got {x_t:g}")
    patch = system.patches[0]
    nodes = patch.nodes
    nxt = np.roll(nodes, -1, axis=0)
    scale = max(1.0, float(np.max(np.abs(nodes))), right)
    eta = 1e-9 * scale

    edges = _trapezoid_edges(cfg, x_t)

    # probes strictly inside the trapezoid, near its edges and vertices
    probes = []
    for u, v, label, normal in edges:
        length = math.hypot(*(v - u))
        if length <= 4.0 * eta:
            continue
        towards = (v - u) / length
        mid = 0.5 * (u + v)
        probes.append((mid + eta * normal, label))
        probes.append((u + eta * (normal + towards), label))
        probes.append((v + eta * (normal - towards), label))
    verts = np.array([[x_t, 0.0], [right, 0.0],
                      [right, 2.0 * cfg.c_star], [x_t, k * x_t]])
    centroid = verts.mean(axis=0)
    near_slope = "I2" if cfg.delta_G > x_t else "slope_far"
    for vert, label in [(verts[0], "I1"), (verts[1], "bottom"),
                        (verts[2], "right"), (verts[3], near_slope)]:
        towards = centroid - vert
        probes.append((vert + (eta / math.hypot(*towards)) * towards, label))
    probes = [(p, label) for p, label in probes
              if _in_trapezoid(p, cfg, x_t)]

    failing = []
    for p, label in probes:
        if not point_inside(patch, p):
            failing.append((p, label))
    if failing:
        pts = np.array([p for p, _ in failing])
        depth = _points_to_segments_all(pts, nodes, nxt).min(axis=1)
        worst = int(np.argmax(depth))
        p, label = failing[worst]
        return ContainmentReport(margin=-float(depth[worst]), inside=False,
                                 segment=label,
                                 witness=(float(p[0]), float(p[1])))

    wall_tol = 1e-9 * scale
    wall_node = nodes[:, 1] <= wall_tol
    wall_seg = wall_node & np.roll(wall_node, -1)
    seg_a, seg_b = nodes[~wall_seg], nxt[~wall_seg]

    candidates = []
    for u, v, label, _normal in edges:
        if seg_a.size:
            candidates.append((_edge_to_segments(u, v, seg_a, seg_b), label,
                               tuple(0.5 * (u + v))))
    if np.any(wall_node):
        w_lo = float(nodes[wall_node, 0].min())
        w_hi = float(nodes[wall_node, 0].max())
        candidates.append((x_t - w_lo, "I1", (w_lo, 0.0)))
        candidates.append((w_hi - right, "right", (w_hi, 0.0)))
    else:
        candidates.append((0.0, "bottom", (x_t, 0.0)))

    margin, segment, witness = min(candidates, key=lambda c: c[0])
    return ContainmentReport(margin=float(margin), inside=margin > 0.0,
                             segment=segment, witness=witness)


def _in_trapezoid(p, cfg: ScenarioConfig, x_t: float) -> bool:
    k = float(cfg.slope_k)
    right = 2.0 * cfg.c_star / k
    return bool(x_t < p[0] < right and 0.0 < p[1] < k * p[0])


# ---------------------------------------------------------------------------
# one-sided velocity bound audit
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ProbeAudit:
    """Audit row for one probe point.

    ``wedge`` is "u1" on the steep side (x2 <= k x1 <= delta_G), "u2" on
    the flat side (k x1 <= x2 <= delta_G), and None when the probe sits in
    neither wedge (``skipped`` then carries the reason).  Slacks are signed
    so that nonnegative means the respective one-sided bound holds:
    quadrature values for the claim and the bad part, plus -- inside the
    validity window -- the analytic good-part bound with its term
    breakdown.  In the slowly-varying regime the collected bound controls
    the full component instead of the good part alone.
    """

    point: tuple
    wedge: str | None = None
    skipped: str | None = None
    hypothesis_ok: bool = False
    window_ok: bool = False
    u_claim: float | None = None
    rate_unit: float | None = None
    claim_slack: float | None = None
    max_driving_c: float | None = None
    bad_value: float | None = None
    bad_bound: float | None = None
    bad_slack: float | None = None
    good_value: float | None = None
    good_bound: float | None = None
    good_slack: float | None = None
    good_terms: dict | None = None
    error_estimate: float | None = None


@dataclasses.dataclass(frozen=True)
class BoundsReport:
    """Outcome of :func:`verify_velocity_bounds` over all probes."""

    rows: tuple
    fitted_driving_c: float
    n_audited: int
    n_skipped: int


def _gl_log_integral(f, a, b, per_panel=1.0, rule=_GL16):
    """Integral of ``f`` on ``[a, b]`` with log-spaced Gauss panels."""
    if b <= a or a <= 0.0:
        return 0.0
    n, w = rule
    m = max(1, int(math.ceil(math.log(b / a) / per_panel)))
    edges = a * (b / a) ** np.linspace(0.0, 1.0, m + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = mid[:, None] + half[:, None] * n[None, :]
    vals = np.asarray(f(pts.reshape(-1)), dtype=float).reshape(pts.shape)
    return float(np.einsum("p,pq,q->", half, vals, w))


def _u1_good_terms(cfg: ScenarioConfig, table, x1: float) -> dict:
    """Signed terms of the steep-side upper bound on the good part."""
    k = float(cfg.slope_k)
    cs = cfg.c_star
    far = 2.0 * k * float(_g_extended(table, np.asarray(cs / k))) * x1
    q = 4.0 / (k * k) + 1.0
    sq = math.sqrt(q)
    band = -(2.0 * x1 / q) * _gl_log_integral(
        lambda s: _g_extended(table, sq * s) / s, 2.0 * k * x1, cs)
    phi_k = math.atan(k)
    n, w = _GL32
    phi = 0.5 * phi_k * (n + 1.0)
    wphi = 0.5 * phi_k * w
    prim = _g_ray_primitive(table, 2.0 * x1 / np.cos(phi))
    fan = -float(np.dot(wphi, np.sin(phi) * prim))
    n2, w2 = _GL24
    s1 = 3.0 * x1 + x1 * n2
    ws1 = x1 * w2
    inner = np.empty_like(s1)
    for i, s in enumerate(s1):
        rho_lo = math.hypot(s, k * (s - 2.0 * x1))
        rho_hi = math.hypot(s, 2.0 * k * x1)
        inner[i] = _gl_log_integral(
            lambda r: _g_extended(table, r) / r, rho_lo, rho_hi,
            per_panel=0.8)
    strip = -float(np.dot(ws1, inner))
    return {"far_rect": far, "log_band": band, "near_fan": fan,
            "offset_strip": strip}


def _u2_good_bound(cfg: ScenarioConfig, table, x2: float) -> float:
    """Flat-side lower bound on the good part (wedge gain integral)."""
    k = float(cfg.slope_k)
    cs = cfg.c_star
    kk1 = k * k + 1.0
    skk1 = math.sqrt(kk1)
    n, w = _GL24

    def outer(s1_flat):
        out = np.empty_like(s1_flat)
        for i, s1 in enumerate(s1_flat):
            s2 = x2 * (n + 1.0)
            ws2 = x2 * w
            rho = np.hypot(s1, s2)
            f = s1 / (rho * rho) * (_g_extended(table, rho)
                                    - _g_extended(table, skk1 * rho) / kk1)
            out[i] = np.dot(ws2, f)
        return out

    return _gl_log_integral(outer, k * x2, cs / k, per_panel=0.7)


def _a2a_u1_terms(cfg: ScenarioConfig, table, x1: float) -> dict:
    """Collected slowly-varying upper bound on the full first component."""
    cs = cfg.c_star
    corner = bad_part_majorant(table, x1, x1)[0]
    far = 2.0 * float(_g_extended(table, np.asarray(cs))) * x1
    s5 = math.sqrt(5.0)
    band = -(2.0 * x1 / 5.0) * _gl_log_integral(
        lambda s: _g_extended(table, s5 * s) / s, 2.0 * x1, cs)
    return {"corner_square": corner, "far_rect": far, "log_band": band}


def _a2a_u2_terms(cfg: ScenarioConfig, table, x2: float) -> dict:
    """Collected slowly-varying lower bound on the full second component."""
    cs = cfg.c_star
    corner = -bad_part_majorant(table, x2, x2)[1]
    s5 = math.sqrt(5.0)
    gain = (2.0 * (1.0 - 1.0 / math.sqrt(2.0)) * x2 / 5.0) \
        * _gl_log_integral(lambda s: _g_extended(table, s5 * s) / s, x2, cs)
    return {"corner_square": corner, "wedge_gain": gain}


def _base_triangle_covered(theta: RegionSet, x1: float, x2: float,
                           c_star: float, k: float) -> bool:
    """True when the forward triangle at the probe carries full weight."""
    a = np.array([x1, x2])
    b = np.array([x1 + c_star / k, x2])
    c = np.array([x1 + c_star / k, x2 + c_star])
    samples = [a, b, c, 0.5 * (a + b), 0.5 * (b + c), 0.5 * (a + c),
               (a + b + c) / 3.0]
    polys = [(comp.verts(), comp.weight) for comp in theta.components
             if isinstance(comp, PolygonComponent)]
    for p in samples:
        covered = any(weight >= 1.0 - 1e-12 and _point_in_poly(verts, p)
                      for verts, weight in polys)
        if not covered:
            return False
    return True


def verify_velocity_bounds(cfg: ScenarioConfig, table, probes,
                           theta: RegionSet | None = None,
                           quad_tol: float = 1e-6) -> BoundsReport:
    """Audit the one-sided wedge bounds at the given probe points.

    For every probe inside a certified wedge the audit evaluates the
    velocity by split quadrature, checks the claim against the configured
    driving rate, checks the bad part against the corner majorant, and --
    inside the validity window -- checks the good part against the analytic
    bound with its term breakdown.  ``fitted_driving_c`` is the largest
    driving constant supported by all audited probes (the minimum of the
    per-probe ratios, floored at zero).
    """
    if cfg.regime == "A2a" and cfg.slope_k != 1:
        raise ValidationError(
            "slowly-varying audit requires slope_k = 1, "
            f"got {cfg.slope_k}")
    if theta is None:
        system = build_initial_data(cfg)
        comp = PolygonComponent(tuple(map(tuple, system.patches[0].nodes)),
                                1.0)
        theta = RegionSet(components=(comp,), mirror_odd=True)
    if not theta.mirror_odd:
        raise ValidationError(
            "the audit needs an odd-mirrored region scalar")
    k = float(cfg.slope_k)
    cs = cfg.c_star
    rows = []
    ratios = []
    for probe in probes:
        x1, x2 = float(probe[0]), float(probe[1])
        pt = (x1, x2)
        if not (np.isfinite(x1) and np.isfinite(x2) and x1 > 0.0
                and x2 > 0.0):
            raise ValidationError(
                f"probe points must lie in the open quadrant, got {probe!r}")
        if x2 <= k * x1 <= cfg.delta_G:
            wedge = "u1"
        elif k * x1 <= x2 <= cfg.delta_G:
            wedge = "u2"
        else:
            rows.append(ProbeAudit(
                point=pt, wedge=None,
                skipped=f"outside both certified wedges (k*x1={k * x1:g}, "
                        f"x2={x2:g}, delta_G={cfg.delta_G:g})"))
            continue

        sp = split_velocities(np.array(pt), theta, table, tol=quad_tol)
        hypothesis_ok = _base_triangle_covered(theta, x1, x2, cs, k)
        b1, b2 = bad_part_majorant(table, x1, x2)

        if wedge == "u1":
            u = sp.u1_bad + sp.u1_good
            rate_unit = driving_rate(cfg, table, x1) / cfg.driving_c
            claim_slack = (-u) - cfg.driving_c * rate_unit
            ratio = (-u) / rate_unit
            bad_value, bad_bound = sp.u1_bad, b1
            bad_slack = b1 - sp.u1_bad
            window_ok = x1 <= cs / (4.0 * k) and x2 <= cs
            good_terms = good_bound = good_value = good_slack = None
            if window_ok:
                if cfg.regime == "A2b":
                    good_terms = _u1_good_terms(cfg, table, x1)
                    good_value = sp.u1_good
                else:
                    good_terms = _a2a_u1_terms(cfg, table, x1)
                    good_value = u
                good_bound = float(sum(good_terms.values()))
                good_slack = good_bound - good_value
        else:
            u = sp.u2_bad + sp.u2_good
            rate_unit = driving_rate(cfg, table, x2 / k) / cfg.driving_c
            claim_slack = u - cfg.driving_c * rate_unit
            ratio = u / rate_unit
            bad_value, bad_bound = sp.u2_bad, -b2
            bad_slack = sp.u2_bad + b2
            window_ok = x2 <= cs / (4.0 * k * k) and x1 <= cs
            good_terms = good_bound = good_value = good_slack = None
            if window_ok:
                if cfg.regime == "A2b":
                    good_bound = _u2_good_bound(cfg, table, x2)
                    good_terms = {"wedge_gain": good_bound}
                    good_value = sp.u2_good
                else:
                    good_terms = _a2a_u2_terms(cfg, table, x2)
                    good_bound = float(sum(good_terms.values()))
                    good_value = u
                good_slack = good_value - good_bound

        rows.append(ProbeAudit(
            point=pt, wedge=wedge, skipped=None,
            hypothesis_ok=hypothesis_ok, window_ok=window_ok,
            u_claim=u, rate_unit=rate_unit, claim_slack=claim_slack,
            max_driving_c=ratio, bad_value=bad_value, bad_bound=bad_bound,
            bad_slack=bad_slack, good_value=good_value,
            good_bound=good_bound, good_slack=good_slack,
            good_terms=good_terms, error_estimate=sp.error_estimate))
        ratios.append(ratio)

    fitted = max(0.0, min(ratios)) if ratios else 0.0
    n_aud = sum(1 for r in rows if r.skipped is None)
    return BoundsReport(rows=tuple(rows), fitted_driving_c=fitted,
                        n_audited=n_aud, n_skipped=len(rows) - n_aud)


# ---------------------------------------------------------------------------
# scenario evolution
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class OutputRecord:
    """One sampled state of a scenario run."""

    time: float
    envelope_x: float
    gap: float
    margin: float
    segment: str
    front_min_x1: float
    w_norm: float
    h2_norm: float
    param_residual: float
    areas: tuple


@dataclasses.dataclass(frozen=True)
class ScenarioResult:
    """Outcome of :func:`run_scenario`.

    ``outcome`` is "collision" when the curves came within the contact
    threshold, "reached_Tstar" when the run covered its whole time horizon
    (the collision clock by default, ``t_end`` when set), or
    "containment_exit"/"diagnostics_blowup" when monitoring tripped first.
    """

    outcome: str
    series: tuple
    T_star: float
    t_final: float
    gap_initial: float
    gap_final: float
    exit_segment: str | None
    c_bar_emp: float
    envelope_ok: bool | None
    collision_info: dict | None
    systems: tuple | None = None


def _resample_polyline(nodes: np.ndarray, wall_tol: float) -> np.ndarray:
    """Redistribute nodes equispaced in arclength along the closed polygon.

    New nodes lie exactly on the old polyline, so the shape (and hence every
    segment-based distance) is preserved up to corner sagitta.  The sampling
    is anchored at the vertex with the smallest first coordinate, keeping the
    advancing front monotone across maintenance steps.  Points landing within
    ``wall_tol`` of the wall are pinned onto it: the flat bottom is invariant
    under the dynamics, and a node at a quadratically small height would sit
    below what the wall-image quadrature can resolve.
    """
    m = nodes.shape[0]
    anchor = int(np.argmin(nodes[:, 0]))
    loop = np.roll(nodes, -anchor, axis=0)
    closed = np.vstack([loop, loop[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    if not total > 0.0:
        raise ValidationError("cannot resample a degenerate polygon")
    targets = np.arange(m) * (total / m)
    xs = np.interp(targets, s, closed[:, 0])
    ys = np.interp(targets, s, closed[:, 1])
    ys[np.abs(ys) < wall_tol] = 0.0
    return np.stack([xs, ys], axis=1)


def _maintain_parametrization(system: ContourSystem) -> ContourSystem:
    """Polygon-arclength node redistribution with exact mirror rebuild.

    The spectral reparametrizer assumes a smooth curve; the scenario shapes
    keep genuine corners (wall tangencies), so maintenance works directly on
    the polygon instead.
    """
    def refresh(p):
        spacing = float(np.mean(np.linalg.norm(
            np.roll(p.nodes, -1, axis=0) - p.nodes, axis=1)))
        return PatchContour(nodes=_resample_polyline(p.nodes, 0.1 * spacing),
                            strength=p.strength)

    plist = [None] * len(system.patches)
    mirrored = {j: i for i, j in getattr(system, "_mirror_pairs", ())}
    for idx, p in enumerate(system.patches):
        if idx in mirrored:
            continue
        plist[idx] = refresh(p)
    for j, i in mirrored.items():
        plist[j] = mirror_patch(plist[i])
    return dataclasses.replace(system, patches=tuple(plist))


def run_scenario(cfg: ScenarioConfig, table, *,
                 keep_systems: bool = False) -> ScenarioResult:
    """Evolve the twin patches and monitor the collision scenario.

    Integrates the contour dynamics with adaptive step-size fallback on
    CFL rejections, records the separation gap, the envelope ``X(t)``, the
    containment margin, the advancing front, and the stability functional
    at the configured output cadence, and stops at the first of: contact
    threshold, containment violation, stability blowup, or the time
    horizon.  Kernels without a finite collision clock require ``t_end``.
    """
    sol = collision_time(cfg, table, allow_divergent=True)
    horizon = sol.T_star if cfg.t_end is None else min(sol.T_star, cfg.t_end)
    if not np.isfinite(horizon):
        raise NoCollisionError(
            "no finite collision time for this kernel; set t_end to run a "
            "fixed-horizon control", partial_value=float(sol._cum[-1]))
    system = build_initial_data(cfg)

    series = []
    systems = []
    c_bar = 0.0
    outcome = None
    exit_segment = None
    collision_info = None

    def record(diag, margin_rep):
        t = system.time
        gap = math.inf if diag.gap_inv == 0.0 else 1.0 / diag.gap_inv
        front = float(np.min(system.patches[0].nodes[:, 0]))
        rec = OutputRecord(
            time=t, envelope_x=sol.X(t), gap=gap,
            margin=margin_rep.margin, segment=margin_rep.segment,
            front_min_x1=front, w_norm=diag.w_norm, h2_norm=diag.h2_norm,
            param_residual=diag.param_residual, areas=diag.area)
        series.append(rec)
        if keep_systems:
            systems.append(system)

    steps = 0
    dt_eff = cfg.dt
    retries = 0
    due = True
    while True:
        margin_rep = containment_check(system, cfg, sol.X(system.time))
        diag = diagnostics(system)
        # The moving-trapezoid certificate is tied to a finite collision
        # clock; control kernels with a divergent clock keep the margin as a
        # recorded diagnostic without it being an exit condition.
        if margin_rep.margin < 0.0 and np.isfinite(sol.T_star):
            outcome = "containment_exit"
            exit_segment = margin_rep.segment
            record(diag, margin_rep)
            break
        if diag.w_norm > cfg.w_norm_cap:
            outcome = "diagnostics_blowup"
            record(diag, margin_rep)
            break
        if due:
            try:
                rhs = compute_rhs(system, table, use_tangential=False,
                                  collision_factor=cfg.collision_factor)
                c_bar = max(c_bar, max(
                    float(np.max(np.linalg.norm(r, axis=1))) for r in rhs))
            except ContactImminentError as err:
                outcome = "collision"
                collision_info = dict(err.diagnostics or {})
                record(diag, margin_rep)
                break
            record(diag, margin_rep)
            due = False
        if system.time >= horizon * (1.0 - 1e-12):
            outcome = "reached_Tstar"
            if not series or series[-1].time != system.time:
                record(diag, margin_rep)
            break
        dt_step = min(dt_eff, horizon - system.time)
        try:
            system = step(system, table, dt_step,
                          cfl_factor=cfg.cfl_factor,
                          collision_factor=cfg.collision_factor)
        except ContactImminentError as err:
            outcome = "collision"
            collision_info = dict(err.diagnostics or {})
            if not series or series[-1].time != system.time:
                record(diag, margin_rep)
            break
        except CflError as err:
            retries += 1
            if retries > 60:
                raise
            dt_eff = 0.8 * err.dt_max
            continue
        retries = 0
        dt_eff = min(cfg.dt, 1.25 * dt_eff)
        steps += 1
        due = steps % cfg.output_every == 0
        if cfg.reparam_every and steps % cfg.reparam_every == 0:
            system = _maintain_parametrization(system)

    gap0 = series[0].gap if series else math.inf
    gap1 = series[-1].gap if series else math.inf
    envelope_ok = None
    if np.isfinite(sol.T_star) and c_bar > 0.0:
        envelope_ok = sol.T_star <= cfg.delta_G / (2.0 * c_bar)
    return ScenarioResult(
        outcome=outcome, series=tuple(series), T_star=sol.T_star,
        t_final=float(system.time), gap_initial=gap0, gap_final=gap1,
        exit_segment=exit_segment, c_bar_emp=c_bar,
        envelope_ok=envelope_ok, collision_info=collision_info,
        systems=tuple(systems) if keep_systems else None)
