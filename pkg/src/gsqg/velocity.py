"""Pointwise velocity evaluation for piecewise-constant scalars.

The active scalar is a signed union of simple regions (axis-aligned
rectangles, triangles, disks).  The induced velocity at a point is the
convolution with the rotational kernel ``K(v) = (v2, -v1) g(|v|) / |v|^2``
read from a radial kernel table; positive scalar rotates clockwise.  A
half-plane domain subtracts the wall image (reflection across the x-axis),
and a region set may be tagged as the positive-x1 half of a scalar that is
odd in x1, in which case the mirror contribution is folded into the
integrand so mirrored quadrature nodes pair up exactly.

Quadrature: each polygonal component is triangulated and integrated with a
degree-5 triangle rule, with adaptive 4-way subdivision driven by a
degree-2/degree-5 comparison.  Cells containing the evaluation point are
integrated in polar coordinates about it, where the radial factor tames the
kernel singularity; disks are integrated in polar coordinates about the
evaluation point directly, with eccentric ray limits.  Kernel values below
the table range are extended by the local power law fitted at the lowest
table node; the affected radii carry negligible mass and the extension is
folded into the error estimate.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .contour import ContourSystem, _spectral_diff
from .errors import (
    DomainError,
    ProximityError,
    SingularEvaluationError,
    ToleranceUnattainableError,
    ValidationError,
)

__all__ = [
    "DiskComponent",
    "KernelSplit",
    "PolygonComponent",
    "RegionSet",
    "SplitVelocities",
    "VelocityEstimate",
    "bad_part_majorant",
    "disk_region",
    "kernel_split",
    "rect_region",
    "split_velocities",
    "triangle_region",
    "velocity_area",
    "velocity_contour",
]

_DOMAINS = ("whole_plane", "half_plane")


# ---------------------------------------------------------------------------
# quadrature rules
# ---------------------------------------------------------------------------

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


# degree-5 (7-point) and degree-6 (12-point) rules on the reference
# triangle, in barycentric coordinates with unit total weight; their
# difference estimates the degree-5 error sharply while the degree-6 value
# is the one accumulated
_A1, _B1 = 0.059715871789770, 0.470142064105115
_A2, _B2 = 0.797426985353087, 0.101286507323456
_TRI_LO_BARY = np.array([
    (1 / 3, 1 / 3, 1 / 3),
    (_A1, _B1, _B1), (_B1, _A1, _B1), (_B1, _B1, _A1),
    (_A2, _B2, _B2), (_B2, _A2, _B2), (_B2, _B2, _A2),
])
_TRI_LO_W = np.array([0.225,
                      0.132394152788506, 0.132394152788506,
                      0.132394152788506,
                      0.125939180544827, 0.125939180544827,
                      0.125939180544827])


def _orbit3(a):
    b = 1.0 - 2.0 * a
    return [(b, a, a), (a, b, a), (a, a, b)]


def _orbit6(a, b):
    c = 1.0 - a - b
    return [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b),
            (c, b, a)]


_TRI_HI_BARY = np.array(_orbit3(0.063089014491502)
                        + _orbit3(0.249286745170910)
                        + _orbit6(0.310352451033785, 0.053145049844816))
_TRI_HI_W = np.array([0.050844906370207] * 3 + [0.116786275726379] * 3
                     + [0.082851075618374] * 6)

# graded radial panels for integrands that behave like rho^(-a), a < 1,
# after the polar Jacobian
_RADIAL_RATIO = 0.25
_RADIAL_PANELS = 20
_RADIAL_GL = 6


# ---------------------------------------------------------------------------
# region components
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class PolygonComponent:
    """Convex polygon with a signed weight; vertices stored CCW."""

    vertices: tuple
    weight: float = 1.0

    def verts(self):
        return np.array(self.vertices, dtype=float)

    def area(self):
        v = self.verts()
        x, y = v[:, 0], v[:, 1]
        return 0.5 * abs(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def bbox(self):
        v = self.verts()
        return (v[:, 0].min(), v[:, 0].max(), v[:, 1].min(), v[:, 1].max())

    def triangles(self):
        v = self.verts()
        return np.array([(v[0], v[i], v[i + 1])
                         for i in range(1, len(v) - 1)])


@dataclasses.dataclass(frozen=True)
class DiskComponent:
    center: tuple
    radius: float
    weight: float = 1.0

    def area(self):
        return math.pi * self.radius ** 2

    def bbox(self):
        (cx, cy), r = self.center, self.radius
        return (cx - r, cx + r, cy - r, cy + r)


def rect_region(x0, x1, y0, y1, weight=1.0):
    """Axis-aligned rectangle component."""
    if not (np.isfinite([x0, x1, y0, y1]).all() and x1 > x0 and y1 > y0):
        raise ValidationError(
            f"degenerate rectangle [{x0}, {x1}] x [{y0}, {y1}]")
    _check_weight(weight)
    return PolygonComponent(((x0, y0), (x1, y0), (x1, y1), (x0, y1)),
                            float(weight))


def triangle_region(vertices, weight=1.0):
    """Triangle component; orientation is normalized to CCW."""
    v = np.asarray(vertices, dtype=float)
    if v.shape != (3, 2) or not np.isfinite(v).all():
        raise ValidationError("triangle needs three finite vertices")
    cross = ((v[1, 0] - v[0, 0]) * (v[2, 1] - v[0, 1])
             - (v[1, 1] - v[0, 1]) * (v[2, 0] - v[0, 0]))
    scale = float(np.max(np.abs(v))) + 1.0
    if abs(cross) <= 1e-14 * scale ** 2:
        raise ValidationError("triangle vertices are collinear")
    if cross < 0:
        v = v[::-1]
    _check_weight(weight)
    return PolygonComponent(tuple(map(tuple, v)), float(weight))


def disk_region(center, radius, weight=1.0):
    """Disk component."""
    c = np.asarray(center, dtype=float)
    if c.shape != (2,) or not np.isfinite(c).all():
        raise ValidationError("disk center must be a finite point")
    if not (np.isfinite(radius) and radius > 0):
        raise ValidationError(f"disk radius must be positive, got {radius}")
    _check_weight(weight)
    return DiskComponent((float(c[0]), float(c[1])), float(radius),
                         float(weight))


def _check_weight(weight):
    if not (np.isfinite(weight) and weight != 0):
        raise ValidationError(f"weight must be finite nonzero, got {weight}")


def _poly_project(verts, axis):
    dots = verts @ axis
    return dots.min(), dots.max()


def _convex_overlap(va, vb):
    """Strict interior overlap test for two convex polygons (SAT)."""
    scale = max(np.max(np.abs(va)), np.max(np.abs(vb)), 1.0)
    for verts in (va, vb):
        edges = np.roll(verts, -1, axis=0) - verts
        for ex, ey in edges:
            axis = np.array([-ey, ex])
            norm = math.hypot(*axis)
            if norm < 1e-300:
                continue
            axis /= norm
            a0, a1 = _poly_project(va, axis)
            b0, b1 = _poly_project(vb, axis)
            if min(a1, b1) - max(a0, b0) <= 1e-12 * scale:
                return False
    return True


def _poly_point_distance(verts, p):
    a = verts
    b = np.roll(verts, -1, axis=0)
    d = b - a
    t = np.clip(np.einsum("ij,ij->i", p - a, d)
                / np.maximum(np.einsum("ij,ij->i", d, d), 1e-300), 0.0, 1.0)
    proj = a + t[:, None] * d
    edge_dist = np.min(np.hypot(*(p - proj).T))
    if _point_in_poly(verts, p):
        return -edge_dist
    return edge_dist


def _point_in_poly(verts, p):
    a = verts
    b = np.roll(verts, -1, axis=0)
    cross = (b[:, 0] - a[:, 0]) * (p[1] - a[:, 1]) \
        - (b[:, 1] - a[:, 1]) * (p[0] - a[:, 0])
    return bool(np.all(cross >= 0) or np.all(cross <= 0))


def _components_overlap(ca, cb):
    disk_a = isinstance(ca, DiskComponent)
    disk_b = isinstance(cb, DiskComponent)
    if disk_a and disk_b:
        gap = math.hypot(ca.center[0] - cb.center[0],
                         ca.center[1] - cb.center[1])
        return gap < ca.radius + cb.radius - 1e-12 * (ca.radius + cb.radius)
    if disk_a or disk_b:
        disk, poly = (ca, cb) if disk_a else (cb, ca)
        dist = _poly_point_distance(poly.verts(), np.asarray(disk.center))
        return dist < disk.radius - 1e-12 * disk.radius
    return _convex_overlap(ca.verts(), cb.verts())


@dataclasses.dataclass(frozen=True)
class RegionSet:
    """Signed union of pairwise-disjoint simple regions.

    With ``mirror_odd`` the components describe the x1 > 0 half of a scalar
    extended oddly across the x2-axis; they must then lie in the closed
    right half-plane and may not be disks.
    """

    components: tuple
    mirror_odd: bool = False

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValidationError("region set needs at least one component")
        for c in comps:
            if not isinstance(c, (PolygonComponent, DiskComponent)):
                raise ValidationError(f"unsupported component {type(c)}")
        for i in range(len(comps)):
            for j in range(i + 1, len(comps)):
                if _components_overlap(comps[i], comps[j]):
                    raise ValidationError(
                        f"components {i} and {j} overlap; regions must be "
                        "pairwise disjoint")
        if self.mirror_odd:
            for i, c in enumerate(comps):
                if isinstance(c, DiskComponent):
                    raise ValidationError(
                        "odd-mirrored sets support polygonal components "
                        "only")
                if c.bbox()[0] < 0:
                    raise ValidationError(
                        f"component {i} crosses the x2-axis; odd-mirrored "
                        "components must lie in x1 >= 0")

    def sup_norm(self):
        return max(abs(c.weight) for c in self.components)

    def total_mass(self):
        mass = sum(abs(c.weight) * c.area() for c in self.components)
        return (2.0 if self.mirror_odd else 1.0) * mass


# ---------------------------------------------------------------------------
# kernel evaluation
# ---------------------------------------------------------------------------


def _g_extended(table, rho):
    """Table lookup with power-law continuation below the lowest node."""
    lo = float(table.rho_grid[0])
    rho = np.asarray(rho, dtype=float)
    clipped = np.maximum(rho, lo)
    vals = np.asarray(table.g(clipped), dtype=float)
    mask = rho < lo
    if np.any(mask):
        g0 = float(table.g(lo))
        p = lo * float(table.g_prime(lo)) / g0
        vals = np.where(mask, g0 * (rho / np.where(mask, lo, 1.0)) ** p,
                        vals)
    return vals


def _kernel_field(table, v):
    """K(v) = (v2, -v1) g(|v|)/|v|^2 for rows of v."""
    d = np.hypot(v[:, 0], v[:, 1])
    d = np.maximum(d, 1e-300)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        coef = _g_extended(table, d) / (d * d)
    return np.stack([v[:, 1] * coef, -v[:, 0] * coef], axis=1)


def _make_area_integrand(x, table, half_plane, mirror_odd):
    flip_wall = np.array([1.0, -1.0])
    flip_axis = np.array([-1.0, 1.0])

    def f(ys):
        out = _kernel_field(table, x[None, :] - ys)
        if half_plane:
            out -= _kernel_field(table, x[None, :] - ys * flip_wall)
        if mirror_odd:
            ym = ys * flip_axis
            out -= _kernel_field(table, x[None, :] - ym)
            if half_plane:
                out += _kernel_field(table, x[None, :] - ym * flip_wall)
        return out

    return f


# ---------------------------------------------------------------------------
# adaptive triangle quadrature
# ---------------------------------------------------------------------------


def _tri_rule(f, verts, bary, w, kdim):
    pts = np.einsum("qj,mjd->mqd", bary, verts)
    vals = f(pts.reshape(-1, 2)).reshape(len(verts), len(w), kdim)
    e1 = verts[:, 1] - verts[:, 0]
    e2 = verts[:, 2] - verts[:, 0]
    area = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    return area[:, None] * np.einsum("q,mqk->mk", w, vals)


def _split4(verts):
    a, b, c = verts[:, 0], verts[:, 1], verts[:, 2]
    ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
    return np.concatenate([
        np.stack([a, ab, ca], axis=1),
        np.stack([ab, b, bc], axis=1),
        np.stack([ca, bc, c], axis=1),
        np.stack([ab, bc, ca], axis=1),
    ])


def _tri_contains(verts, p, tol=1e-12):
    a, b, c = verts
    area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    if abs(area2) < 1e-300:
        return False
    l1 = ((b[0] - p[0]) * (c[1] - p[1])
          - (b[1] - p[1]) * (c[0] - p[0])) / area2
    l2 = ((c[0] - p[0]) * (a[1] - p[1])
          - (c[1] - p[1]) * (a[0] - p[0])) / area2
    l3 = 1.0 - l1 - l2
    return min(l1, l2, l3) >= -tol


def _adaptive_triangles(f, tris, sing_pts, tol, max_cells, kdim):
    """Integrate f over a list of triangles; returns (value, err, ok)."""
    value = np.zeros(kdim)
    err = 0.0
    regular = []
    for verts in tris:
        target = None
        for p in sing_pts:
            if _tri_contains(verts, p):
                target = p
                break
        if target is None:
            regular.append(verts)
        else:
            v, e = _polar_polygon(f, verts, target, 0.25 * tol, kdim)
            value += v
            err += e
    if not regular:
        return value, err, True

    def evaluate(cells):
        i_hi = _tri_rule(f, cells, _TRI_HI_BARY, _TRI_HI_W, kdim)
        i_lo = _tri_rule(f, cells, _TRI_LO_BARY, _TRI_LO_W, kdim)
        with np.errstate(invalid="ignore"):
            e = np.max(np.abs(i_hi - i_lo), axis=1)
        return i_hi, np.where(np.isfinite(e) & np.isfinite(i_hi).all(1),
                              e, np.inf)

    verts = np.asarray(regular, dtype=float)
    vals, errs = evaluate(verts)
    budget = max_cells - len(verts)
    while True:
        total = float(errs.sum())
        if err + total <= tol:
            ok = True
            break
        if budget <= 0:
            ok = False
            break
        # split the cells carrying the top half of the pending error
        order = np.argsort(errs)[::-1]
        cum = np.cumsum(errs[order])
        n_split = min(int(np.searchsorted(cum, 0.5 * total)) + 1, len(order))
        children = _split4(verts[order[:n_split]])
        child_vals, child_errs = evaluate(children)
        budget -= len(children)
        keep = order[n_split:]
        verts = np.concatenate([verts[keep], children])
        vals = np.concatenate([vals[keep], child_vals])
        errs = np.concatenate([errs[keep], child_errs])
    finite = np.isfinite(errs)
    value += vals[finite].sum(axis=0)
    err += float(errs[finite].sum()) + (0.0 if finite.all() else np.inf)
    return value, err, ok


# ---------------------------------------------------------------------------
# polar integration about a singular point
# ---------------------------------------------------------------------------


def _ray_exits(verts, p, dirs):
    """Distance along each ray from p to the convex polygon boundary."""
    a = verts
    d = np.roll(verts, -1, axis=0) - verts
    scale = float(np.max(np.abs(verts - p))) + 1e-300
    ax = a[None, :, 0] - p[0]
    ay = a[None, :, 1] - p[1]
    ex = dirs[:, 0][:, None]
    ey = dirs[:, 1][:, None]
    den = ex * d[None, :, 1] - ey * d[None, :, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = (ax * d[None, :, 1] - ay * d[None, :, 0]) / den
        s = (ax * ey - ay * ex) / den
    valid = (np.abs(den) > 1e-300) & (s >= -1e-10) & (s <= 1 + 1e-10) \
        & (rho > 1e-13 * scale)
    rho = np.where(valid, rho, np.inf)
    out = rho.min(axis=1)
    return np.where(np.isfinite(out), out, 0.0)


def _graded_radial(f, p, dirs, rho_hi, kdim):
    """Per-ray integral of f(p + rho e) rho drho on (0, rho_hi]."""
    n = len(dirs)
    ratios = _RADIAL_RATIO ** np.arange(_RADIAL_PANELS + 1)
    edges = rho_hi[:, None] * ratios[None, :]
    gn, gw = _gl(_RADIAL_GL)
    mid = 0.5 * (edges[:, 1:] + edges[:, :-1])
    half = 0.5 * (edges[:, :-1] - edges[:, 1:])
    rho = mid[:, :, None] + half[:, :, None] * gn[None, None, :]
    wts = half[:, :, None] * gw[None, None, :] * rho
    pts = p[None, None, None, :] + rho[..., None] * dirs[:, None, None, :]
    vals = f(pts.reshape(-1, 2)).reshape(n, _RADIAL_PANELS, _RADIAL_GL, kdim)
    per_panel = np.einsum("npqk,npq->npk", vals, wts)
    total = per_panel.sum(axis=1)
    # geometric tail below the innermost panel, with the decay ratio
    # measured from the last two panels
    mags = np.abs(per_panel).max(axis=2)
    last, prev = mags[:, -1], mags[:, -2]
    ratio = np.clip(last / np.maximum(prev, 1e-300), 0.0, 0.9)
    tail = last * ratio / (1.0 - ratio)
    return total, tail


def _smooth_radial(f, p, dirs, rho_lo, rho_hi, kdim):
    """Per-ray integral of f(p + rho e) rho drho on [rho_lo, rho_hi]."""
    n = len(dirs)
    frac = np.array([0.0, 0.05, 0.2, 0.5, 1.0])
    width = (rho_hi - rho_lo)[:, None]
    edges = rho_lo[:, None] + width * frac[None, :]
    gn, gw = _gl(8)
    mid = 0.5 * (edges[:, 1:] + edges[:, :-1])
    half = 0.5 * (edges[:, 1:] - edges[:, :-1])
    rho = mid[:, :, None] + half[:, :, None] * gn[None, None, :]
    wts = half[:, :, None] * gw[None, None, :] * rho
    pts = p[None, None, None, :] + rho[..., None] * dirs[:, None, None, :]
    vals = f(pts.reshape(-1, 2)).reshape(n, len(frac) - 1, 8, kdim)
    return np.einsum("npqk,npq->npk", vals, wts).sum(axis=1)


def _polar_sector(f, verts, p, phi_a, phi_b, nphi, kdim):
    gn, gw = _gl(nphi)
    phi = 0.5 * (phi_a + phi_b) + 0.5 * (phi_b - phi_a) * gn
    wphi = 0.5 * (phi_b - phi_a) * gw
    dirs = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    rho_hi = _ray_exits(verts, p, dirs)
    live = rho_hi > 0
    if not live.any():
        return np.zeros(kdim), 0.0
    ray_vals = np.zeros((len(dirs), kdim))
    totals, tails = _graded_radial(f, p, dirs[live], rho_hi[live], kdim)
    ray_vals[live] = totals
    tail_err = float(np.abs(wphi[live]) @ tails)
    return wphi @ ray_vals, tail_err


def _polar_polygon(f, verts, p, tol, kdim):
    """Integrate f over a convex polygon containing p, polar about p."""
    verts = np.asarray(verts, dtype=float)
    p = np.asarray(p, dtype=float)
    scale = float(np.max(np.abs(verts - p[None, :])))
    rel = verts - p[None, :]
    keep = np.hypot(rel[:, 0], rel[:, 1]) > 1e-14 * scale
    angles = np.sort(np.arctan2(rel[keep, 1], rel[keep, 0]))
    sectors = [(angles[i], angles[i + 1]) for i in range(len(angles) - 1)]
    sectors.append((angles[-1], angles[0] + 2 * math.pi))
    value = np.zeros(kdim)
    err = 0.0
    stack = [(a, b, 0) for a, b in sectors if b - a > 1e-14]
    while stack:
        a, b, depth = stack.pop()
        i_coarse, _ = _polar_sector(f, verts, p, a, b, 8, kdim)
        i_fine, tail2 = _polar_sector(f, verts, p, a, b, 16, kdim)
        sector_err = float(np.max(np.abs(i_fine - i_coarse))) + tail2
        share = tol * (b - a) / (2 * math.pi)
        if sector_err <= share or depth >= 10 or (b - a) < 1e-8:
            value += i_fine
            err += sector_err
        else:
            midpoint = 0.5 * (a + b)
            stack.append((a, midpoint, depth + 1))
            stack.append((midpoint, b, depth + 1))
    return value, err


# ---------------------------------------------------------------------------
# disk integration (polar about the evaluation point)
# ---------------------------------------------------------------------------


def _disk_ray_limits(rel, dist, radius, dirs):
    b = dirs @ rel
    disc = b * b + radius * radius - dist * dist
    s = np.sqrt(np.maximum(disc, 0.0))
    rho_in = np.maximum(-b - s, 0.0)
    rho_out = np.maximum(-b + s, 0.0)
    rho_out = np.where(disc > 0, rho_out, 0.0)
    return rho_in, rho_out


def _disk_panel_edges(x, disk):
    rel = x - np.asarray(disk.center)
    dist = math.hypot(*rel)
    if dist < disk.radius * (1.0 - 1e-9):
        return rel, dist, np.linspace(0.0, 2 * math.pi, 17)
    beta = math.asin(min(1.0, disk.radius / max(dist, 1e-300)))
    phi_c = math.atan2(-rel[1], -rel[0])
    # cluster panel edges toward the tangency angles +-beta where the chord
    # length vanishes like a square root
    inner = beta * (1.0 - 0.5 ** np.arange(11))
    ts = np.unique(np.concatenate([inner, -inner, [beta, -beta]]))
    return rel, dist, phi_c + ts


def _disk_eval(f, x, disk, edges, rel, dist, kdim):
    value = np.zeros(kdim)
    tail_err = 0.0
    gn, gw = _gl(8)
    for a, b in zip(edges[:-1], edges[1:]):
        phi = 0.5 * (a + b) + 0.5 * (b - a) * gn
        wphi = 0.5 * (b - a) * gw
        dirs = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        rho_in, rho_out = _disk_ray_limits(rel, dist, disk.radius, dirs)
        live = rho_out > rho_in + 1e-15 * disk.radius
        if not live.any():
            continue
        ray_vals = np.zeros((len(dirs), kdim))
        graded = live & (rho_in <= 1e-12 * disk.radius)
        smooth = live & ~graded
        if graded.any():
            totals, tails = _graded_radial(f, x, dirs[graded],
                                           rho_out[graded], kdim)
            ray_vals[graded] = totals
            tail_err += float(np.abs(wphi[graded]) @ tails)
        if smooth.any():
            ray_vals[smooth] = _smooth_radial(f, x, dirs[smooth],
                                              rho_in[smooth],
                                              rho_out[smooth], kdim)
        value += wphi @ ray_vals
    return value, tail_err


def _disk_integral(f, x, disk, tol, kdim):
    rel, dist, edges = _disk_panel_edges(x, disk)
    prev, tail = _disk_eval(f, x, disk, edges, rel, dist, kdim)
    for _ in range(5):
        fine_edges = np.sort(np.concatenate(
            [edges, 0.5 * (edges[:-1] + edges[1:])]))
        cur, tail = _disk_eval(f, x, disk, fine_edges, rel, dist, kdim)
        err = float(np.max(np.abs(cur - prev))) + tail
        prev, edges = cur, fine_edges
        if err <= tol:
            return cur, err, True
    return prev, err, err <= tol


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class VelocityEstimate:
    """Velocity vector with an absolute quadrature error estimate."""

    u: np.ndarray
    error_estimate: float


def velocity_area(x, theta, table, domain="whole_plane", tol=1e-6,
                  max_cells=20000):
    """Velocity at ``x`` induced by the region scalar, by area quadrature."""
    if domain not in _DOMAINS:
        raise DomainError(f"domain must be one of {_DOMAINS}, got {domain}")
    x = np.asarray(x, dtype=float)
    if x.shape != (2,) or not np.isfinite(x).all():
        raise ValidationError(f"evaluation point must be finite, got {x}")
    half = domain == "half_plane"
    if half and x[1] < 0:
        raise DomainError(f"half-plane evaluation needs x2 >= 0, got {x}")
    if half:
        for i, comp in enumerate(theta.components):
            if comp.bbox()[2] < -1e-12:
                raise DomainError(
                    f"component {i} dips below the wall in half-plane mode")
    f = _make_area_integrand(x, table, half, theta.mirror_odd)
    sing_pts = [x]
    if theta.mirror_odd and abs(x[0]) > 0:
        sing_pts.append(np.array([-x[0], x[1]]))
    n = len(theta.components)
    tol_comp = tol / n
    cells_comp = max(64, max_cells // n)
    value = np.zeros(2)
    err = 0.0
    ok = True
    for comp in theta.components:
        if isinstance(comp, DiskComponent):
            v, e, good = _disk_integral(f, x, comp, tol_comp, 2)
        else:
            v, e, good = _adaptive_triangles(f, comp.triangles(), sing_pts,
                                             tol_comp, cells_comp, 2)
        value = value + comp.weight * v
        err += abs(comp.weight) * e
        ok = ok and good
    if not ok and err > tol:
        raise ToleranceUnattainableError(
            f"area quadrature reached its cell budget at error {err:.3e} "
            f"(requested {tol:.3e})", best_estimate=value,
            error_estimate=err)
    return VelocityEstimate(u=value, error_estimate=err)


def velocity_contour(x, system, table):
    """Velocity at ``x`` from the boundary integral of a contour system."""
    x = np.asarray(x, dtype=float)
    if x.shape != (2,) or not np.isfinite(x).all():
        raise ValidationError(f"evaluation point must be finite, got {x}")
    if not isinstance(system, ContourSystem):
        raise ValidationError("velocity_contour needs a ContourSystem")
    half = system.domain == "half_plane"
    u = np.zeros(2)
    flip = np.array([1.0, -1.0])
    for idx, patch in enumerate(system.patches):
        z = patch.nodes
        m = len(z)
        spacing = float(np.max(np.hypot(*(np.roll(z, -1, axis=0) - z).T)))
        dist = np.hypot(x[0] - z[:, 0], x[1] - z[:, 1])
        if float(dist.min()) <= 2.0 * spacing:
            raise ProximityError(
                f"evaluation point {x.tolist()} is {dist.min():.3e} from "
                f"patch {idx}; need more than twice the node spacing "
                f"{spacing:.3e}")
        tang = np.stack([_spectral_diff(z[:, 0]), _spectral_diff(z[:, 1])],
                        axis=1)
        w = patch.strength * (2 * math.pi / m)
        u -= w * (tang * table.r(dist)[:, None]).sum(axis=0)
        if half:
            zc = z * flip
            dc = np.hypot(x[0] - zc[:, 0], x[1] - zc[:, 1])
            if float(dc.min()) <= 2.0 * spacing:
                raise ProximityError(
                    f"evaluation point {x.tolist()} is too close to the "
                    f"wall image of patch {idx}")
            u -= w * ((tang * flip) * table.r(dc)[:, None]).sum(axis=0)
    return u


@dataclasses.dataclass(frozen=True)
class KernelSplit:
    """Image-kernel decomposition at a pair of points in the quarter plane.

    ``k1``/``k2`` multiply the scalar in the first/second velocity
    component; each combines a direct term with three reflected images
    (across the x2-axis, the origin, and the x1-axis).
    """

    x: tuple
    y: tuple
    k11: float
    k12: float
    k13: float
    k14: float
    k21: float
    k22: float
    k23: float
    k24: float

    @property
    def k1(self):
        return self.k11 - self.k12 - self.k13 + self.k14

    @property
    def k2(self):
        return self.k21 + self.k22 - self.k23 - self.k24

    def direct_pair_dominates_k1(self, slack=0.0):
        return self.k1 >= self.k11 - self.k12 - slack

    def k1_pair_sign_ok(self, slack=0.0):
        sign = math.copysign(1.0, self.y[1] - self.x[1])
        return sign * (self.k11 - self.k12) >= -slack

    def direct_pair_dominates_k2(self, slack=0.0):
        return self.k2 >= self.k21 - self.k24 - slack

    def k2_pair_sign_ok(self, slack=0.0):
        sign = math.copysign(1.0, self.y[0] - self.x[0])
        return sign * (self.k21 - self.k24) >= -slack


def kernel_split(x, y, table):
    """Evaluate the eight image-kernel terms at points ``x``, ``y``."""
    x1, x2 = float(x[0]), float(x[1])
    y1, y2 = float(y[0]), float(y[1])
    d1 = math.hypot(x1 - y1, x2 - y2)
    d2 = math.hypot(x1 + y1, x2 - y2)
    d3 = math.hypot(x1 + y1, x2 + y2)
    d4 = math.hypot(x1 - y1, x2 + y2)
    scale = max(d1, d2, d3, d4)
    if min(d1, d2, d3, d4) <= 1e-14 * scale or scale == 0.0:
        raise SingularEvaluationError(
            f"kernel split is singular at x={x}, y={y} (coincident point "
            "or reflected image)")
    g1, g2, g3, g4 = (float(v) for v in
                      table.g(np.array([d1, d2, d3, d4])))
    return KernelSplit(
        x=(x1, x2),
        y=(y1, y2),
        k11=(y2 - x2) / d1 ** 2 * g1,
        k12=(y2 - x2) / d2 ** 2 * g2,
        k13=(y2 + x2) / d3 ** 2 * g3,
        k14=(y2 + x2) / d4 ** 2 * g4,
        k21=(y1 - x1) / d1 ** 2 * g1,
        k22=(y1 + x1) / d2 ** 2 * g2,
        k23=(y1 + x1) / d3 ** 2 * g3,
        k24=(y1 - x1) / d4 ** 2 * g4,
    )


def _k_split_fields(x, table):
    """Vectorized combined kernels for the quarter-plane representation."""

    x1, x2 = x

    def distances(ys):
        y1, y2 = ys[:, 0], ys[:, 1]
        d1 = np.hypot(x1 - y1, x2 - y2)
        d2 = np.hypot(x1 + y1, x2 - y2)
        d3 = np.hypot(x1 + y1, x2 + y2)
        d4 = np.hypot(x1 - y1, x2 + y2)
        return y1, y2, d1, d2, d3, d4

    def k1(ys):
        y1, y2, d1, d2, d3, d4 = distances(ys)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            val = ((y2 - x2) / np.maximum(d1, 1e-300) ** 2
                   * _g_extended(table, d1)
                   - (y2 - x2) / d2 ** 2 * _g_extended(table, d2)
                   - (y2 + x2) / d3 ** 2 * _g_extended(table, d3)
                   + (y2 + x2) / d4 ** 2 * _g_extended(table, d4))
        return val[:, None]

    def k2(ys):
        y1, y2, d1, d2, d3, d4 = distances(ys)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            val = ((y1 - x1) / np.maximum(d1, 1e-300) ** 2
                   * _g_extended(table, d1)
                   + (y1 + x1) / d2 ** 2 * _g_extended(table, d2)
                   - (y1 + x1) / d3 ** 2 * _g_extended(table, d3)
                   - (y1 - x1) / d4 ** 2 * _g_extended(table, d4))
        return val[:, None]

    return k1, k2


def _clip_halfplane(verts, axis, value, keep_low):
    """Sutherland-Hodgman clip of a convex polygon by an axis line."""
    out = []
    n = len(verts)
    for i in range(n):
        a = verts[i]
        b = verts[(i + 1) % n]
        fa = (a[axis] - value) * (-1.0 if keep_low else 1.0)
        fb = (b[axis] - value) * (-1.0 if keep_low else 1.0)
        if fa >= 0:
            out.append(a)
        if (fa < 0) != (fb < 0):
            t = fa / (fa - fb)
            out.append(a + t * (b - a))
    if len(out) < 3:
        return None
    out = np.array(out)
    x, y = out[:, 0], out[:, 1]
    area = 0.5 * abs(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    span = float(np.max(np.abs(out))) + 1.0
    if area <= 1e-14 * span ** 2:
        return None
    return out


def _fan_triangles(verts):
    return np.array([(verts[0], verts[i], verts[i + 1])
                     for i in range(1, len(verts) - 1)])


@dataclasses.dataclass(frozen=True)
class SplitVelocities:
    """Velocity components split at the evaluation point's coordinates.

    ``u1_bad`` integrates over source heights below x2 (``u1_good`` above);
    ``u2_bad`` over source abscissas left of x1 (``u2_good`` right).
    """

    u1_bad: float
    u1_good: float
    u2_bad: float
    u2_good: float
    error_estimate: float


def split_velocities(x, theta, table, tol=1e-6, max_cells=40000):
    """Good/bad decomposition of the velocity for odd quarter-plane data."""
    if not theta.mirror_odd:
        raise ValidationError(
            "split velocities are defined for odd-mirrored region sets")
    x = np.asarray(x, dtype=float)
    if x.shape != (2,) or not np.isfinite(x).all() or min(x) < 0:
        raise ValidationError(
            f"evaluation point must lie in the closed quarter plane: {x}")
    k1f, k2f = _k_split_fields((x[0], x[1]), table)
    jobs = {
        "u1_bad": (k1f, 1, x[1], True, -1.0),
        "u1_good": (k1f, 1, x[1], False, -1.0),
        "u2_bad": (k2f, 0, x[0], True, 1.0),
        "u2_good": (k2f, 0, x[0], False, 1.0),
    }
    out = {}
    err = 0.0
    ok = True
    for name, (field, axis, value, keep_low, sign) in jobs.items():
        total = 0.0
        for comp in theta.components:
            clipped = _clip_halfplane(comp.verts(), axis, value, keep_low)
            if clipped is None:
                continue
            v, e, good = _adaptive_triangles(
                field, _fan_triangles(clipped), [x], tol / 4.0,
                max_cells // 4, 1)
            total += comp.weight * float(v[0])
            err += abs(comp.weight) * e
            ok = ok and good
        out[name] = sign * total
    if not ok and err > tol:
        raise ToleranceUnattainableError(
            f"split quadrature reached its cell budget at error {err:.3e}",
            best_estimate=out, error_estimate=err)
    return SplitVelocities(error_estimate=err, **out)


def _g_ray_primitive(table, radii):
    """Vectorized primitive int_0^r g(rho) drho via graded panels."""
    radii = np.asarray(radii, dtype=float)
    ratios = _RADIAL_RATIO ** np.arange(_RADIAL_PANELS + 7)
    edges = radii[:, None] * ratios[None, :]
    gn, gw = _gl(8)
    mid = 0.5 * (edges[:, 1:] + edges[:, :-1])
    half = 0.5 * (edges[:, :-1] - edges[:, 1:])
    rho = mid[:, :, None] + half[:, :, None] * gn[None, None, :]
    wts = half[:, :, None] * gw[None, None, :]
    vals = _g_extended(table, rho.reshape(-1)).reshape(rho.shape)
    return np.einsum("npq,npq->n", vals, wts)


def bad_part_majorant(table, x1, x2):
    """Corner bounds for the bad velocity parts of unit quarter-plane data.

    Returns ``(b1, b2)``: the first bounds ``u1_bad`` from above, the
    second bounds ``u2_bad`` from below by ``-b2``.  Both are integrals of
    the radial kernel over the corner rectangle ``(0,x1) x (0,x2)``,
    weighted by the angular factor of the respective kernel component.
    """
    x1 = float(x1)
    x2 = float(x2)
    if x1 <= 0 or x2 <= 0:
        return 0.0, 0.0
    phi_star = math.atan2(x2, x1)
    gn, gw = _gl(24)

    def segment(a, b, rho_of_phi):
        phi = 0.5 * (a + b) + 0.5 * (b - a) * gn
        wphi = 0.5 * (b - a) * gw
        prim = _g_ray_primitive(table, rho_of_phi(phi))
        return (wphi @ (np.sin(phi) * prim), wphi @ (np.cos(phi) * prim))

    s1a, s2a = segment(0.0, phi_star, lambda phi: x1 / np.cos(phi))
    s1b, s2b = segment(phi_star, 0.5 * math.pi, lambda phi: x2 / np.sin(phi))
    return 2.0 * (s1a + s1b), 2.0 * (s2a + s2b)
