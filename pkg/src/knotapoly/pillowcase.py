"""Boundary holonomy angles of SU(2) representations of knot groups.

SU(2) elements are unit quaternions stored as length-4 arrays (w, x, y, z);
``i`` corresponds to diag(i, -i), so a quaternion cos(a) + i sin(a) is the
diagonal matrix diag(e^{ia}, e^{-ia}). Angles live on the torus
(R / 2piZ)^2 with the max-metric.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import least_squares, minimize_scalar
from scipy.spatial import cKDTree

from .apoly import UnsupportedPresentation, prepare_two_meridian, rep_system_riley
from .knot_input import riley_word, tietze_reduce, torus_params, torus_to_two_bridge
from .polyalg import NonConvergence, roots_univar

__all__ = [
    "TWO_PI", "ToleranceNotMet", "PillowPoint", "PillowSet",
    "su2_solve_slice", "compute_pillowcase", "riley_pillowcase",
    "pillow_translate", "pillow_shear", "pillow_negate", "check_symmetries",
    "torus_hausdorff", "torus_distance", "wrap_angle", "qmul", "eval_word",
    "irreducible_points", "sampling_gap", "UnsupportedPresentation",
]

TWO_PI = 2.0 * math.pi


class ToleranceNotMet(Exception):
    pass


def wrap_angle(x):
    """Map angles into [0, 2pi)."""
    r = np.mod(x, TWO_PI)
    return np.where(r >= TWO_PI, 0.0, r) if isinstance(r, np.ndarray) else (0.0 if r >= TWO_PI else float(r))


def torus_distance(p, q):
    d = np.abs(np.asarray(p, dtype=float) - np.asarray(q, dtype=float)) % TWO_PI
    d = np.minimum(d, TWO_PI - d)
    return float(np.max(d))


# ---------------------------------------------------------------------------
# quaternions
# ---------------------------------------------------------------------------

def qmul(p, q):
    p = np.asarray(p)
    q = np.asarray(q)
    a1, b1, c1, d1 = np.moveaxis(p, -1, 0)
    a2, b2, c2, d2 = np.moveaxis(q, -1, 0)
    return np.stack([
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ], axis=-1)


def qconj(q):
    return np.asarray(q) * np.array([1.0, -1.0, -1.0, -1.0])


def eval_word(word, gens):
    """Evaluate a word on (batched) unit quaternions ``gens[k]`` for generator k+1."""
    shape = np.broadcast_shapes(*(np.shape(g) for g in gens))
    out = np.zeros(shape)
    out[..., 0] = 1.0
    inverses = [qconj(g) for g in gens]
    for g in word:
        out = qmul(out, gens[g - 1] if g > 0 else inverses[-g - 1])
    return out


def _mirror_witness(witness):
    """Conjugation by j: sends (theta, eta) to (-theta, -eta)."""
    return tuple(tuple(float(v) for v in (q[0], -q[1], q[2], -q[3])) for q in witness)


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PillowPoint:
    theta: float
    eta: float
    witness: tuple = ()
    residual: float = 0.0

    @property
    def coords(self):
        return (self.theta, self.eta)


@dataclass(frozen=True)
class PillowSet:
    points: tuple
    theta_grid: int
    delta: float
    label: str = ""
    metadata: dict = field(default_factory=dict, compare=False)

    def coords(self):
        if not self.points:
            return np.zeros((0, 2))
        return np.array([[p.theta, p.eta] for p in self.points], dtype=float)

    def __len__(self):
        return len(self.points)

    def to_csv(self):
        buf = io.StringIO()
        buf.write(f"# label={self.label} theta_grid={self.theta_grid} delta={self.delta!r}\n")
        buf.write("theta,eta,residual\n")
        for p in self.points:
            buf.write(f"{p.theta:.17g},{p.eta:.17g},{p.residual:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, delta=None, theta_grid=None, label=""):
        meta = {}
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for item in line[1:].split():
                    if "=" in item:
                        k, v = item.split("=", 1)
                        meta[k] = v
                continue
            if line.startswith("theta"):
                continue
            rows.append(next(csv.reader([line])))
        pts = [PillowPoint(wrap_angle(float(r[0])), wrap_angle(float(r[1])), (),
                           float(r[2]) if len(r) > 2 else 0.0) for r in rows]
        grid = theta_grid or int(meta.get("theta_grid", 360))
        d = delta if delta is not None else float(meta.get("delta", TWO_PI / grid))
        return cls(tuple(sorted(pts, key=lambda p: (p.theta, p.eta))), grid, d,
                   label or meta.get("label", ""))

    def to_json_obj(self, witnesses=False):
        pts = []
        for p in self.points:
            item = {"theta": p.theta, "eta": p.eta, "residual": p.residual}
            if witnesses:
                item["witness"] = [list(q) for q in p.witness]
            pts.append(item)
        return {"label": self.label, "theta_grid": self.theta_grid, "delta": self.delta, "points": pts}

    @classmethod
    def from_json_obj(cls, obj):
        pts = [PillowPoint(wrap_angle(float(p["theta"])), wrap_angle(float(p["eta"])),
                           tuple(tuple(q) for q in p.get("witness", ())), float(p.get("residual", 0.0)))
               for p in obj["points"]]
        return cls(tuple(sorted(pts, key=lambda p: (p.theta, p.eta))), int(obj["theta_grid"]),
                   float(obj["delta"]), obj.get("label", ""))

    @classmethod
    def from_points(cls, coords, delta, theta_grid=360, label=""):
        pts = [PillowPoint(wrap_angle(float(t)), wrap_angle(float(e))) for t, e in coords]
        return cls(tuple(sorted(pts, key=lambda p: (p.theta, p.eta))), theta_grid, delta, label)


# ---------------------------------------------------------------------------
# slice solver
# ---------------------------------------------------------------------------

def _prepare(pres):
    if pres.generator_count == 1:
        return pres
    if not pres.generators_are_meridians:
        tk = torus_params(pres)
        rewritten = torus_to_two_bridge(tk) if tk is not None else None
        if rewritten is None:
            raise UnsupportedPresentation("generators are not meridians")
        return rewritten
    if pres.generator_count > 2:
        pres = tietze_reduce(pres, target=2)
    if len(pres.meridian) != 1 or pres.meridian[0] != 1:
        raise UnsupportedPresentation("meridian must be the first generator")
    return pres


def _abelian_point(pres, theta):
    witness = tuple((math.cos(theta * w), math.sin(theta * w), 0.0, 0.0) for w in pres.h1_weights)
    return PillowPoint(wrap_angle(theta), 0.0, witness, 0.0)


def _slice_gens(theta, psi):
    psi = np.asarray(psi, dtype=float)
    c, s = math.cos(theta), math.sin(theta)
    a = np.broadcast_to(np.array([c, s, 0.0, 0.0]), psi.shape + (4,))
    b = np.stack([np.full_like(psi, c), s * np.cos(psi), s * np.sin(psi), np.zeros_like(psi)], axis=-1)
    return a, b


def _riley_defect(w, theta, psi):
    """Signed angle between the axes of W a W^-1 and b, plus |D| = relator defect."""
    a, b = _slice_gens(theta, psi)
    W = eval_word(w, [a, b])
    D = qmul(W, a) - qmul(b, W)
    psi = np.asarray(psi, dtype=float)
    normal = np.stack([np.zeros_like(psi), -np.sin(psi / 2), np.cos(psi / 2), np.zeros_like(psi)], axis=-1)
    d = np.sum(D * normal, axis=-1)
    denom = 2.0 * abs(math.sin(theta))
    return 2.0 * np.arcsin(np.clip(d / denom, -1.0, 1.0))


def _bisect(f, lo, hi, flo, tol, max_iter=200):
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or abs(fm) < 1e-3 * tol or hi - lo < 1e-15:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _point_from_witness(pres, theta, gens, residual_floor=0.0):
    gens = [np.asarray(g, dtype=float) for g in gens]
    gens = [g / np.linalg.norm(g) for g in gens]
    defect = 0.0
    for rel in pres.relators:
        r = eval_word(rel, gens)
        defect = max(defect, float(np.linalg.norm(r - np.array([1.0, 0, 0, 0]))))
    lam = eval_word(pres.longitude, gens)
    off_axis = float(math.hypot(lam[2], lam[3]))
    eta = math.atan2(lam[1], lam[0])
    residual = max(defect, off_axis, residual_floor)
    witness = tuple(tuple(float(v) for v in g) for g in gens)
    return PillowPoint(wrap_angle(theta), wrap_angle(eta), witness, residual)


def _solve_riley_slice(pres, w, theta, n_seeds, tol):
    psi = np.pi * np.arange(1, n_seeds + 1) / n_seeds
    vals = _riley_defect(w, theta, psi)

    def f(x):
        return float(_riley_defect(w, theta, np.array([x]))[0])

    roots = []
    for j in range(len(psi) - 1):
        f0, f1 = vals[j], vals[j + 1]
        if f0 == 0.0:
            roots.append(psi[j])
        elif (f0 < 0) != (f1 < 0) and f1 != 0.0:
            roots.append(_bisect(f, psi[j], psi[j + 1], f0, tol))
    if vals[-1] == 0.0:
        roots.append(psi[-1])
    # near-tangential zeros: a local minimum of |defect| between grid points
    # may hide a touching root or a pair of close crossings
    absv = np.abs(vals)
    for j in range(1, len(psi) - 1):
        if not (absv[j] <= absv[j - 1] and absv[j] <= absv[j + 1] and absv[j] < 0.1):
            continue
        sgn = 1.0 if vals[j] > 0 else -1.0
        if not (sgn * vals[j - 1] > 0 and sgn * vals[j + 1] > 0):
            continue
        res = minimize_scalar(lambda x: sgn * f(x), bounds=(psi[j - 1], psi[j + 1]),
                              method="bounded", options={"xatol": 1e-14})
        x, v = float(res.x), sgn * float(res.fun)
        if sgn * v < 0:
            roots.append(_bisect(f, psi[j - 1], x, vals[j - 1], tol))
            roots.append(_bisect(f, x, psi[j + 1], v, tol))
        elif abs(v) < tol:
            roots.append(x)
    points = []
    for r in roots:
        a, b = _slice_gens(theta, np.array([r]))
        pt = _point_from_witness(pres, theta, [a[0], b[0]])
        if pt.residual > tol:
            raise ToleranceNotMet(f"theta={theta:.6g}: residual {pt.residual:.2e} > {tol:.1e}")
        points.append(pt)
    return points


def _axis(alpha, beta):
    return np.array([math.cos(alpha), math.sin(alpha) * math.cos(beta), math.sin(alpha) * math.sin(beta)])


def _generic_gens(theta, params, n):
    c, s = math.cos(theta), math.sin(theta)
    gens = [np.array([c, s, 0.0, 0.0])]
    psi = params[0]
    gens.append(np.array([c, s * math.cos(psi), s * math.sin(psi), 0.0]))
    for k in range(n - 2):
        ax = _axis(params[1 + 2 * k], params[2 + 2 * k])
        gens.append(np.concatenate([[c], s * ax]))
    return gens


def _solve_generic_slice(pres, theta, n_seeds, tol, seed=0):
    """Best-effort least-squares search over the conjugation slice."""
    n = pres.generator_count
    rng = np.random.default_rng(seed + int(round(theta * 1e6)) % 100000)

    def residuals(params):
        gens = _generic_gens(theta, params, n)
        out = [eval_word(rel, gens) - np.array([1.0, 0, 0, 0]) for rel in pres.relators]
        return np.concatenate(out) if out else np.zeros(1)

    found = []
    seeds = min(n_seeds, 64)
    for k in range(seeds):
        x0 = np.concatenate([[np.pi * (k + 0.5) / seeds], rng.uniform(0, np.pi, 2 * (n - 2))])
        sol = least_squares(residuals, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400)
        if np.linalg.norm(sol.fun) >= tol:
            continue
        gens = _generic_gens(theta, sol.x, n)
        comm = np.linalg.norm(qmul(gens[0], gens[1]) - qmul(gens[1], gens[0]))
        if comm < 1e-6 and all(np.linalg.norm(qmul(gens[0], g) - qmul(g, gens[0])) < 1e-6 for g in gens[2:]):
            continue
        pt = _point_from_witness(pres, theta, gens)
        if pt.residual < tol and all(abs(pt.eta - q.eta) > 1e-7 for q in found):
            found.append(pt)
    return found


def su2_solve_slice(pres, theta, n_seeds=512, tol=1e-10):
    """All detected SU(2) representations with meridian holonomy angle ``theta``.

    Always includes the abelian point (theta, 0). For two-bridge presentations
    the slice is searched for sign changes of a scalar angle defect and refined
    by bisection; other presentations fall back to a least-squares search.
    """
    pres = _prepare(pres)
    theta = float(theta)
    points = [_abelian_point(pres, theta)]
    if pres.generator_count == 1 or abs(math.sin(theta)) < 1e-12:
        return points
    w = riley_word(pres)
    if w is not None:
        points.extend(_solve_riley_slice(pres, w, theta, n_seeds, tol))
    else:
        points.extend(_solve_generic_slice(pres, theta, n_seeds, tol))
    return points


def _slice_job(args):
    pres, theta, n_seeds, tol = args
    return su2_solve_slice(pres, theta, n_seeds, tol)


def _worker_count(workers):
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("PILLOWCASE_THREADS")
    return max(1, int(env)) if env else 1


def _dedup(points, radius):
    points = sorted(points, key=lambda p: (p.theta, p.eta))
    if not points:
        return ()
    xy = np.array([[p.theta, p.eta] for p in points])
    tree = cKDTree(xy, boxsize=TWO_PI)
    removed = np.zeros(len(points), dtype=bool)
    keep = []
    for i in range(len(points)):
        if removed[i]:
            continue
        keep.append(points[i])
        for j in tree.query_ball_point(xy[i], radius * (1 - 1e-12), p=np.inf):
            if j != i:
                removed[j] = True
    return tuple(keep)


def _symmetrize(points):
    out = list(points)
    for p in points:
        out.append(PillowPoint(wrap_angle(-p.theta), wrap_angle(-p.eta),
                               _mirror_witness(p.witness) if p.witness else (), p.residual))
    return out


def compute_pillowcase(pres, n_theta=360, tol=1e-10, n_seeds=512, workers=None):
    """Boundary angles of SU(2) representations on the grid theta_k = 2 pi k / n_theta.

    The result is symmetrized under (theta, eta) -> -(theta, eta).
    """
    if n_theta < 8:
        raise ValueError("n_theta must be >= 8")
    thetas = [TWO_PI * k / n_theta for k in range(n_theta)]
    jobs = [(pres, th, n_seeds, tol) for th in thetas]
    nw = _worker_count(workers)
    if nw > 1:
        with ProcessPoolExecutor(max_workers=nw) as ex:
            results = list(ex.map(_slice_job, jobs))
    else:
        results = [_slice_job(j) for j in jobs]
    points = [p for chunk in results for p in chunk]
    delta = TWO_PI / n_theta
    pts = _dedup(_symmetrize(points), delta / 2)
    return PillowSet(pts, n_theta, delta, pres.label, {"method": "quaternion-slice", "tol": tol})


def riley_pillowcase(pres, n_theta=360, tol=1e-10, imag_tol=1e-7):
    """Independent sampler: real roots t of the Riley equation at m = e^{i theta}.

    SU(2) representations in the slice correspond to real t in (0, 4 sin^2 theta)
    (t = 2 sin^2(theta) (1 - cos psi)); the longitude eigenvalue l then has
    modulus one and eta = arg(l).
    """
    reduced = prepare_two_meridian(pres)
    system = rep_system_riley(reduced)
    delta = TWO_PI / n_theta
    points = []
    coeff_polys = system.equations[0].coeff_list("t") if system.equations else []
    for k in range(n_theta):
        theta = TWO_PI * k / n_theta
        points.append(PillowPoint(wrap_angle(theta), 0.0))
        if not coeff_polys or abs(math.sin(theta)) < 1e-12:
            continue
        m0 = complex(math.cos(theta), math.sin(theta))
        coeffs = [complex(c.eval({"m": m0, "t": 0})) for c in coeff_polys]
        try:
            roots = roots_univar(coeffs, tol=1e-8)
        except NonConvergence as exc:
            roots = exc.best
        upper = 4 * math.sin(theta) ** 2
        for r in roots:
            t0 = r.value
            # t = upper means tr(ab) = 2: a parabolic, non-unitary representation
            if abs(t0.imag) > imag_tol * max(1.0, abs(t0)) or not (1e-12 < t0.real < upper - 1e-9):
                continue
            l0 = system.longitude_value(m0, t0.real)
            if abs(abs(l0) - 1) > 1e-6:
                continue
            points.append(PillowPoint(wrap_angle(theta), wrap_angle(math.atan2(l0.imag, l0.real))))
    pts = _dedup(_symmetrize(points), delta / 2)
    return PillowSet(pts, n_theta, delta, pres.label, {"method": "riley-parameter", "tol": tol})


# ---------------------------------------------------------------------------
# torus transformations and comparisons
# ---------------------------------------------------------------------------

def _rebuild(s, coords, keep_witness=False):
    pts = []
    for p, (th, et) in zip(s.points, coords):
        pts.append(PillowPoint(wrap_angle(th), wrap_angle(et), p.witness if keep_witness else (), p.residual))
    pts.sort(key=lambda p: (p.theta, p.eta))
    return replace(s, points=tuple(pts))


def pillow_translate(s, a, b):
    """S + (a, b) (mod 2pi); witnesses are dropped."""
    xy = s.coords()
    return _rebuild(s, xy + np.array([a, b]) if len(xy) else xy)


def pillow_negate(s):
    xy = s.coords()
    return _rebuild(s, -xy)


def pillow_shear(s, h, axis):
    """S + (h, *) for axis 'theta-by-eta', S + (*, h) for axis 'eta-by-theta'."""
    xy = s.coords().copy()
    if not len(xy):
        return replace(s, points=())
    if axis == "theta-by-eta":
        xy[:, 0] = xy[:, 0] + np.array([h(e) for e in xy[:, 1]])
    elif axis == "eta-by-theta":
        xy[:, 1] = xy[:, 1] + np.array([h(t) for t in xy[:, 0]])
    else:
        raise ValueError(f"unknown shear axis {axis!r}")
    return _rebuild(s, xy)


def _as_coords(x):
    if isinstance(x, PillowSet):
        return x.coords()
    arr = np.asarray(x, dtype=float).reshape(-1, 2)
    return arr


def torus_hausdorff(a, b):
    """Hausdorff distance between finite subsets of the torus under the max-metric."""
    xa = wrap_angle(_as_coords(a))
    xb = wrap_angle(_as_coords(b))
    if len(xa) == 0 and len(xb) == 0:
        return 0.0
    if len(xa) == 0 or len(xb) == 0:
        return math.inf
    ta = cKDTree(xa, boxsize=TWO_PI)
    tb = cKDTree(xb, boxsize=TWO_PI)
    d1, _ = tb.query(xa, p=np.inf)
    d2, _ = ta.query(xb, p=np.inf)
    return float(max(np.max(d1), np.max(d2)))


def check_symmetries(s, delta):
    """Distances from S to S + (pi, 0) and to -S; pass iff both are below delta."""
    d_translate = torus_hausdorff(s, pillow_translate(s, math.pi, 0.0))
    d_reflect = torus_hausdorff(s, pillow_negate(s))
    return {
        "translation_distance": d_translate,
        "reflection_distance": d_reflect,
        "delta": delta,
        "translation_pass": d_translate < delta,
        "reflection_pass": d_reflect < delta,
        "passed": d_translate < delta and d_reflect < delta,
    }


def irreducible_points(s, delta=None):
    """Points off the abelian line eta = 0 (mod 2pi, beyond delta)."""
    delta = s.delta if delta is None else delta
    out = []
    for p in s.points:
        e = min(p.eta, TWO_PI - p.eta)
        if e > delta:
            out.append(p)
    return out


def sampling_gap(s, delta=None):
    """Largest max-metric distance from an irreducible point to its nearest other point.

    For a sample of curves on the grid theta_k = 2 pi k / N this is delta where
    the arcs are shallow and grows with their slope; thresholds that assume every
    point of the sampled set lies within delta of a sample are only justified when it is
    about delta. Returns 0.0 when there are no irreducible points.
    """
    delta = s.delta if delta is None else delta
    irr = np.array([[p.theta, p.eta] for p in irreducible_points(s, delta)])
    if not len(irr):
        return 0.0
    xy = wrap_angle(s.coords())
    if len(xy) < 2:
        return math.inf
    d, _ = cKDTree(xy, boxsize=TWO_PI).query(wrap_angle(irr), k=2, p=np.inf)
    return float(np.max(d[:, 1]))
