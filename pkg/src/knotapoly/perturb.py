"""Shear functions on the angle torus and planners that use them to separate sets.

A shear function g is odd and 2pi-periodic, stored by its piecewise-linear
values on [0, pi]. Shifting a point set by (g, *) moves (theta, eta) to
(theta + g(eta), eta); (*, g) moves it to (theta, eta + g(theta)). The
derivative of the underlying perturbation is f' = -g throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .pillowcase import TWO_PI, PillowSet, wrap_angle

__all__ = [
    "ShearFn", "shear_eval", "Certificate", "CriticalMatch", "PlanResult",
    "Infeasible", "SliceBlocked", "CorridorTooNarrow",
    "check_certificate", "plan_finite_avoidance", "plan_slice_path", "slice_path_vertices",
    "polyline_distance", "graph_polyline", "enumerate_critical_points", "transformed_pair",
    "G2_BOUND",
]

# |g2| must stay below pi/2; the planner keeps a safety factor
G2_BOUND = 0.9 * math.pi / 2


class Infeasible(Exception):
    def __init__(self, message, blocking=()):
        super().__init__(message)
        self.blocking = list(blocking)


class SliceBlocked(Exception):
    def __init__(self, message, blocking=()):
        super().__init__(message)
        self.blocking = list(blocking)


class CorridorTooNarrow(Exception):
    pass


def _circ(x):
    """Distance to 0 on R / 2piZ."""
    r = np.mod(np.abs(x), TWO_PI)
    return np.minimum(r, TWO_PI - r)


# ---------------------------------------------------------------------------
# shear functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShearFn:
    knots: tuple = ((0.0, 0.0), (math.pi, 0.0))
    bound: float | None = None
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = sorted((float(x), float(v)) for x, v in self.knots)
        if any(x < -1e-12 or x > math.pi + 1e-12 for x, _ in pts):
            raise ValueError("shear knots must lie in [0, pi]")
        pts = [(min(max(x, 0.0), math.pi), v) for x, v in pts]
        if pts and pts[0][0] == 0.0 and abs(pts[0][1]) > 1e-12:
            raise ValueError("an odd function vanishes at 0")
        if pts and pts[-1][0] == math.pi and abs(pts[-1][1]) > 1e-12:
            raise ValueError("an odd 2pi-periodic function vanishes at pi")
        if not pts or pts[0][0] > 0.0:
            pts.insert(0, (0.0, 0.0))
        if pts[-1][0] < math.pi:
            pts.append((math.pi, 0.0))
        pts[0] = (0.0, 0.0)
        pts[-1] = (math.pi, 0.0)
        merged = []
        for x, v in pts:
            if merged and x - merged[-1][0] < 1e-15:
                continue
            merged.append((x, v))
        if self.bound is not None and any(abs(v) >= self.bound for _, v in merged):
            raise ValueError(f"shear value exceeds bound {self.bound}")
        object.__setattr__(self, "knots", tuple(merged))

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def sampled(cls, fn, n_knots=64, bound=None):
        """Piecewise-linear interpolant of ``fn`` on a uniform grid of [0, pi]."""
        xs = np.linspace(0.0, math.pi, n_knots + 1)
        vals = [0.0] + [float(fn(x)) for x in xs[1:-1]] + [0.0]
        return cls(tuple(zip(xs.tolist(), vals)), bound)

    @property
    def xs(self):
        return np.array([k[0] for k in self.knots])

    @property
    def values(self):
        return np.array([k[1] for k in self.knots])

    @property
    def lipschitz(self):
        xs, vs = self.xs, self.values
        if len(xs) < 2:
            return 0.0
        return float(np.max(np.abs(np.diff(vs)) / np.diff(xs)))

    @property
    def sup(self):
        return float(np.max(np.abs(self.values)))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        r = np.mod(x + math.pi, TWO_PI) - math.pi  # (-pi, pi]
        out = np.sign(r) * np.interp(np.abs(r), self.xs, self.values)
        return float(out) if out.ndim == 0 else out

    def __neg__(self):
        return ShearFn(tuple((x, -v) for x, v in self.knots), self.bound)

    def to_json_obj(self):
        return {"knots": [[x, v] for x, v in self.knots], "lipschitz": self.lipschitz}

    @classmethod
    def from_json_obj(cls, obj):
        fn = cls(tuple((float(x), float(v)) for x, v in obj["knots"]))
        declared = obj.get("lipschitz")
        if declared is not None and fn.lipschitz > float(declared) * (1 + 1e-9) + 1e-12:
            raise ValueError("declared Lipschitz bound is smaller than the knot slopes")
        return fn


def shear_eval(g, x):
    return g(x)


# ---------------------------------------------------------------------------
# certificate
# ---------------------------------------------------------------------------

@dataclass
class Certificate:
    margin: float
    delta: float
    lipschitz: float
    passed: bool
    context: str = ""
    closest_pair: tuple = ()

    @property
    def threshold(self):
        return 2.0 * self.delta * (1.0 + self.lipschitz)

    @property
    def verdict(self):
        return "pass" if self.passed else "fail"

    def to_json_obj(self):
        return {
            "verdict": self.verdict,
            "margin": self.margin,
            "threshold": self.threshold,
            "delta": self.delta,
            "lipschitz": self.lipschitz,
            "context": self.context,
            "closest_pair": [list(p) for p in self.closest_pair],
        }


def _coords(s):
    if isinstance(s, PillowSet):
        return s.coords()
    return np.asarray(s, dtype=float).reshape(-1, 2)


def transformed_pair(s, g1, g2):
    """T = +-(S + (g1, *)) + (*, g2) and U = S + (0, pi), as coordinate arrays."""
    xy = _coords(s)
    if not len(xy):
        return np.zeros((0, 2)), np.zeros((0, 2))
    th = xy[:, 0] + g1(xy[:, 1])
    et = xy[:, 1]
    branches = []
    for sign in (1.0, -1.0):
        bt, be = sign * th, sign * et
        branches.append(np.column_stack([bt, be + g2(bt)]))
    t_set = wrap_angle(np.vstack(branches))
    u_set = wrap_angle(xy + np.array([0.0, math.pi]))
    return t_set, u_set


def _min_pair(a, b):
    if not len(a) or not len(b):
        return math.pi, ()
    tree = cKDTree(b, boxsize=TWO_PI)
    d, idx = tree.query(a, p=np.inf)
    i = int(np.argmin(d))
    return float(d[i]), (tuple(a[i].tolist()), tuple(b[idx[i]].tolist()))


def check_certificate(s, g1, g2, delta=None):
    """Margin between the sheared set T and S + (0, pi); pass iff margin > 2 delta (1 + L)."""
    if delta is None:
        delta = s.delta if isinstance(s, PillowSet) else TWO_PI / 360
    t_set, u_set = transformed_pair(s, g1, g2)
    margin, pair = _min_pair(t_set, u_set)
    lip = max(g1.lipschitz, g2.lipschitz)
    passed = margin > 2.0 * delta * (1.0 + lip)
    ctx = f"T=+-(S+(g1,*))+(*,g2) [{len(t_set)} pts] vs U=S+(0,pi) [{len(u_set)} pts]"
    return Certificate(margin, delta, lip, passed, ctx, pair)


# ---------------------------------------------------------------------------
# finite avoidance planner
# ---------------------------------------------------------------------------

@dataclass
class PlanResult:
    g1: ShearFn
    g2: ShearFn
    certificate: Certificate

    def __iter__(self):
        return iter((self.g1, self.g2, self.certificate))


def _fold(pos, forbid):
    """Fold positions in [0, 2pi) onto [0, pi] using oddness; forbidden values flip sign."""
    pos = wrap_angle(np.asarray(pos, dtype=float))
    upper = pos > math.pi
    x = np.where(upper, TWO_PI - pos, pos)
    f = np.where(upper, -forbid, forbid)
    return x, f


def _group_obstacles(x, f, d0, merge_tol=1e-12):
    order = np.lexsort((f, x))
    x, f, d0 = x[order], f[order], d0[order]
    groups = []
    start = 0
    for i in range(1, len(x) + 1):
        if i == len(x) or x[i] - x[start] > merge_tol:
            groups.append((float(x[start]), f[start:i], d0[start:i]))
            start = i
    return groups


def _maximin_values(groups, grid, lmax, cap):
    """Choose a value per position maximizing the worst clearance, slope <= lmax.

    Endpoints 0 and pi are pinned to zero. Among bottleneck-optimal choices the
    sum of clipped clearances is maximized. ``grid`` must contain 0.
    """
    positions = [0.0]
    rows = [[]]
    for x, f, d0 in groups:
        if x <= 1e-12:
            rows[0].append((f, d0))
        elif x >= math.pi - 1e-12:
            continue
        else:
            positions.append(x)
            rows.append([(f, d0)])
    positions.append(math.pi)
    rows.append([g[1:] for g in groups if g[0] >= math.pi - 1e-12])
    zero = int(np.argmin(np.abs(grid)))
    n, V = len(positions), len(grid)
    C = np.full((n, V), cap)
    for i, row in enumerate(rows):
        for f, d0 in row:
            clr = np.maximum(d0[None, :], _circ(grid[:, None] - f[None, :]))
            C[i] = np.minimum(C[i], np.min(clr, axis=1))
    C = np.minimum(C, cap)
    for i in (0, n - 1):
        pinned = np.full(V, -np.inf)
        pinned[zero] = C[i, zero]
        C[i] = pinned
    steps = np.abs(grid[:, None] - grid[None, :])

    def allowed(i):
        return steps <= lmax * (positions[i] - positions[i - 1]) + 1e-12

    best = C[0].copy()
    for i in range(1, n):
        trans = np.where(allowed(i), best[:, None], -np.inf)
        best = np.minimum(trans.max(axis=0), C[i])
    bottleneck = best[zero]
    if not np.isfinite(bottleneck):
        return positions, np.zeros(n), -math.inf
    ok = C >= bottleneck - 1e-15
    score = np.where(ok[0], C[0], -np.inf)
    back = np.zeros((n, V), dtype=int)
    for i in range(1, n):
        trans = np.where(allowed(i) & ok[i - 1][:, None], score[:, None], -np.inf)
        back[i] = np.argmax(trans, axis=0)
        score = np.where(ok[i], trans.max(axis=0) + C[i], -np.inf)
    vals = np.zeros(n)
    k = zero
    for i in range(n - 1, -1, -1):
        vals[i] = grid[k]
        k = back[i, k]
    return positions, vals, float(bottleneck)


def _irreducible(xy, tol=1e-9):
    return xy[_circ(xy[:, 1]) > tol] if len(xy) else xy


def _plan_g1(xy, lmax, grid):
    irr = _irreducible(xy)
    if not len(irr):
        return ShearFn.zero()
    pos, forbid, d0 = [], [], []
    u_irr = irr + np.array([0.0, math.pi])
    for s in irr:
        for sign in (1.0, -1.0):
            # T point sign*(theta_s + g1(eta_s), eta_s) against U point u
            eta_t = sign * s[1]
            gap = np.maximum(0.0, _circ(eta_t - u_irr[:, 1]) - math.pi / 2)
            f = u_irr[:, 0] - s[0] if sign > 0 else -u_irr[:, 0] - s[0]
            pos.append(np.full(len(u_irr), s[1]))
            forbid.append(f)
            d0.append(gap)
    x, f = _fold(np.concatenate(pos), np.concatenate(forbid))
    groups = _group_obstacles(x, f, np.concatenate(d0))
    positions, vals, _ = _maximin_values(groups, grid, lmax, cap=0.5)
    return ShearFn(tuple(zip(positions, vals.tolist())))


def _plan_g2(xy, g1, lmax, grid, window=0.5):
    th = xy[:, 0] + g1(xy[:, 1])
    t_pts = np.vstack([np.column_stack([th, xy[:, 1]]), np.column_stack([-th, -xy[:, 1]])])
    t_pts = wrap_angle(t_pts)
    u_pts = wrap_angle(xy + np.array([0.0, math.pi]))
    order = np.argsort(u_pts[:, 0])
    u_sorted = u_pts[order]
    ext = np.vstack([u_sorted - [TWO_PI, 0], u_sorted, u_sorted + [TWO_PI, 0]])
    pos, forbid, d0 = [], [], []
    for q in t_pts:
        lo = np.searchsorted(ext[:, 0], q[0] - window)
        hi = np.searchsorted(ext[:, 0], q[0] + window, side="right")
        near = ext[lo:hi]
        if not len(near):
            continue
        pos.append(np.full(len(near), q[0]))
        forbid.append(near[:, 1] - q[1])
        d0.append(np.abs(near[:, 0] - q[0]))
    if not pos:
        return ShearFn.zero()
    x, f = _fold(np.concatenate(pos), np.concatenate(forbid))
    groups = _group_obstacles(x, f, np.concatenate(d0))
    positions, vals, _ = _maximin_values(groups, grid, lmax, cap=window)
    return ShearFn(tuple(zip(positions, vals.tolist())), bound=math.pi / 2)


def _near_forbidden_corners(xy, radius):
    corners = np.array([[a, b] for a in (0.0, math.pi) for b in (math.pi,)])
    out = []
    for p in xy:
        d = np.max(_circ(p[None, :] - corners), axis=1)
        if np.min(d) < radius:
            out.append(tuple(p.tolist()))
    return out


def plan_finite_avoidance(points, delta=None, lipschitz_caps=(0.5, 1.0, 2.0, 4.0, 8.0, 16.0), grid_size=91):
    """Shears g1, g2 (|g2| < pi/2) such that +-(S + (g1,*)) + (*,g2) misses S + (0, pi).

    ``points`` is a PillowSet or an array of (theta, eta). Raises Infeasible when a
    point lies within delta of (k pi, +-pi) or when no tried slope cap yields a
    passing certificate.
    """
    if delta is None:
        delta = points.delta if isinstance(points, PillowSet) else TWO_PI / 360
    xy = wrap_angle(_coords(points))
    if not len(xy):
        g0 = ShearFn.zero()
        return PlanResult(g0, g0, check_certificate(xy, g0, g0, delta))
    blocking = _near_forbidden_corners(xy, delta)
    if blocking:
        raise Infeasible("set contains points at (k pi, +-pi)", blocking)
    g1_grid = np.linspace(-math.pi / 2, math.pi / 2, grid_size)
    g2_grid = np.linspace(-G2_BOUND, G2_BOUND, grid_size)
    best = None
    for lmax in lipschitz_caps:
        g1 = _plan_g1(xy, lmax, g1_grid)
        g2 = _plan_g2(xy, g1, lmax, g2_grid)
        cert = check_certificate(xy, g1, g2, delta)
        slack = cert.margin - cert.threshold
        if best is None or slack > best[0]:
            best = (slack, PlanResult(g1, g2, cert))
    slack, plan = best
    if not plan.certificate.passed:
        raise Infeasible(
            f"no separating shears found (best margin {plan.certificate.margin:.3g} "
            f"<= threshold {plan.certificate.threshold:.3g})", plan.certificate.closest_pair)
    return plan


# ---------------------------------------------------------------------------
# slice path planner
# ---------------------------------------------------------------------------

def slice_path_vertices(h):
    """Vertices of the five-segment slice path: (-pi,0) -> (-pi,-h) -> (0,-h) -> (0,h) -> (pi,h) -> (pi,0)."""
    return np.array([[-math.pi, 0.0], [-math.pi, -h], [0.0, -h], [0.0, h], [math.pi, h], [math.pi, 0.0]])


def _seg_maxdist(p, a, b):
    """Max-metric distance from points p (n,2) to segment ab in the plane."""
    d = b - a
    rel = p - a  # want min_s max(|rel_x - s d_x|, |rel_y - s d_y|)
    cands = [np.zeros(len(p)), np.ones(len(p))]
    with np.errstate(divide="ignore", invalid="ignore"):
        for k in (0, 1):
            if d[k] != 0:
                cands.append(rel[:, k] / d[k])
        if d[0] != d[1]:
            cands.append((rel[:, 0] - rel[:, 1]) / (d[0] - d[1]))
        if d[0] != -d[1]:
            cands.append((rel[:, 0] + rel[:, 1]) / (d[0] + d[1]))
    best = np.full(len(p), np.inf)
    for s in cands:
        s = np.clip(np.nan_to_num(s, nan=0.0), 0.0, 1.0)
        val = np.maximum(np.abs(rel[:, 0] - s * d[0]), np.abs(rel[:, 1] - s * d[1]))
        best = np.minimum(best, val)
    return best


def polyline_distance(points, vertices):
    """Torus max-metric distance from each point to a polyline given in the plane."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if not len(pts):
        return np.zeros(0)
    out = np.full(len(pts), np.inf)
    shifts = [(i * TWO_PI, j * TWO_PI) for i in (-1, 0, 1) for j in (-1, 0, 1)]
    for sx, sy in shifts:
        q = pts + np.array([sx, sy])
        for a, b in zip(vertices[:-1], vertices[1:]):
            out = np.minimum(out, _seg_maxdist(q, a, b))
    return out


def graph_polyline(g):
    """Graph of g over [-pi, pi] as plane vertices."""
    xs, vs = g.xs, g.values
    left = np.column_stack([-xs[::-1], -vs[::-1]])
    right = np.column_stack([xs, vs])
    return np.vstack([left[:-1], right])


def plan_slice_path(shifted, eta0, delta=None):
    """Odd 2pi-periodic g whose graph stays in a corridor around the slice path.

    ``shifted`` is the representation set translated by (0, -pi). The path levels are +-h with
    h = |eta0 - pi|; eta0 in (0, pi) is handled by the (theta, eta) -> -(theta, eta)
    symmetry, which leaves the construction unchanged.
    """
    if delta is None:
        delta = shifted.delta if isinstance(shifted, PillowSet) else TWO_PI / 360
    xy = wrap_angle(_coords(shifted))
    reps = wrap_angle(xy + np.array([0.0, math.pi]))
    if len(reps):
        hit = _circ(reps[:, 1] - eta0) < delta
        if np.any(hit):
            raise SliceBlocked(f"circle eta={eta0:.6g} meets the representation set",
                               [tuple(p) for p in reps[hit].tolist()])
    e0 = float(wrap_angle(eta0))
    h = abs(e0 - math.pi)
    verts = slice_path_vertices(h)
    sym = np.vstack([xy, wrap_angle(-xy)]) if len(xy) else xy
    width = float(np.min(polyline_distance(sym, verts))) if len(sym) else math.inf
    if width < 2 * delta:
        raise CorridorTooNarrow(f"corridor half-width {width:.3g} < 2 delta = {2 * delta:.3g}")
    ramp = min(width / 2, math.pi / 4)
    knots = ((0.0, 0.0), (ramp, h), (math.pi - ramp, h), (math.pi, 0.0)) if h > 0 else ((0.0, 0.0), (math.pi, 0.0))
    g = ShearFn(knots, info={"eta0": e0, "level": h, "corridor_half_width": width, "ramp": ramp})
    clearance = float(np.min(polyline_distance(sym, graph_polyline(g)))) if len(sym) else math.inf
    g.info["graph_clearance"] = clearance
    return g


# ---------------------------------------------------------------------------
# critical points of the glued perturbation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CriticalMatch:
    point_minus1: tuple
    point_0: tuple
    point_hat0: tuple
    point_1: tuple
    residual: float
    branch: int = 1

    def to_json_obj(self):
        return {"point_minus1": list(self.point_minus1), "point_0": list(self.point_0),
                "point_hat0": list(self.point_hat0), "point_1": list(self.point_1),
                "residual": self.residual, "branch": self.branch}


def enumerate_critical_points(p1, p2, g1, g2, tol):
    """Chains (theta_-1, eta_-1) in P1 -> (theta_1, eta_1) in P2 + (0, pi) within ``tol``.

    theta_0 = theta_-1 + g1(eta_-1), eta_0 = eta_-1; (theta^_0, eta^_0) = +-(theta_0, eta_0);
    the chain closes when (theta^_0, eta^_0 + g2(theta^_0)) is within tol of a point of P2 + (0, pi).
    """
    a = wrap_angle(_coords(p1))
    b = wrap_angle(_coords(p2) + np.array([0.0, math.pi]))
    if not len(a) or not len(b) or tol <= 0:
        return []
    tree = cKDTree(b, boxsize=TWO_PI)
    out = []
    for x in a:
        th0 = float(wrap_angle(x[0] + g1(x[1])))
        et0 = float(x[1])
        for sign in (1, -1):
            hat = (float(wrap_angle(sign * th0)), float(wrap_angle(sign * et0)))
            target = np.array([hat[0], float(wrap_angle(hat[1] + g2(hat[0])))])
            for j in sorted(tree.query_ball_point(target, tol, p=np.inf)):
                y = b[j]
                res = float(max(_circ(target - y)))
                if res < tol:
                    out.append(CriticalMatch((float(x[0]), et0), (th0, et0), hat,
                                             (float(y[0]), float(y[1])), res, sign))
    out.sort(key=lambda m: (m.point_minus1, m.branch, m.point_1))
    return out
