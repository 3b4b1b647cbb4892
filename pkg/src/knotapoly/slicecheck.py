"""Checks of A-polynomials against the unit torus |m| = |l| = 1."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .apoly import APolyResult
from .pillowcase import TWO_PI, irreducible_points
from .polyalg import L_MINUS_1, DegreeZero, NonConvergence, roots_univar

__all__ = [
    "DegenerateSlice", "SliceEntry", "SliceReport", "ValidationReport",
    "slice_roots", "check_all_slices", "deg_m_nonzero", "cross_validate",
]


class DegenerateSlice(Exception):
    """The slice polynomial in m is identically zero or a constant."""

    def __init__(self, message, identically_zero):
        super().__init__(message)
        self.identically_zero = identically_zero


def slice_roots(a, eta0, root_tol=1e-10):
    """Roots in m of A(m, e^{i eta0}) and the least distance of a root from |m| = 1.

    A nonzero constant slice raises DegenerateSlice(identically_zero=False), which
    callers read as distance +inf; an identically zero slice raises it with True.
    """
    l0 = complex(math.cos(eta0), math.sin(eta0))
    coeffs = np.array(a.coeffs_in_m(l0), dtype=complex)
    scale = max((abs(c) for c in a.terms.values()), default=0)
    if scale == 0 or np.max(np.abs(coeffs), initial=0.0) <= 1e-13 * scale:
        raise DegenerateSlice(f"slice at eta0={eta0:.6g} vanishes identically", True)
    try:
        roots = roots_univar(coeffs, tol=root_tol)
    except DegreeZero:
        raise DegenerateSlice(f"slice at eta0={eta0:.6g} is a nonzero constant", False)
    except NonConvergence as exc:
        roots = exc.best
    dist = min(abs(abs(r.value) - 1.0) for r in roots)
    return roots, float(dist)


@dataclass(frozen=True)
class SliceEntry:
    eta0: float
    min_unit_distance: float
    root: complex | None
    residual: float
    note: str = ""


@dataclass
class SliceReport:
    entries: list
    tol: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(self.entries) and all(e.min_unit_distance < self.tol for e in self.entries)

    @property
    def eta0_grid(self):
        return [e.eta0 for e in self.entries]

    @property
    def verdict(self):
        return "pass" if self.passed else "fail"

    @property
    def failures(self):
        return [e for e in self.entries if not e.min_unit_distance < self.tol]

    def to_csv(self):
        buf = io.StringIO()
        buf.write("eta0,min_unit_distance,root_re,root_im\n")
        for e in self.entries:
            re, im = (e.root.real, e.root.imag) if e.root is not None else (math.nan, math.nan)
            buf.write(f"{e.eta0:.17g},{e.min_unit_distance:.17g},{re:.17g},{im:.17g}\n")
        return buf.getvalue()

    def adjacent_variation(self):
        """Largest change of the slice distance between neighbouring finite slices, per radian."""
        d = np.array([e.min_unit_distance for e in self.entries])
        if len(d) < 2:
            return 0.0
        step = TWO_PI / len(d)
        with np.errstate(invalid="ignore"):
            diffs = np.abs(np.diff(np.append(d, d[0])))
        finite = diffs[np.isfinite(diffs)]
        return float(finite.max() / step) if finite.size else math.inf


def check_all_slices(a, n=360, tol=1e-8):
    """Slice distances at eta0 = 2 pi k / n; pass iff every slice has a root within tol of |m| = 1."""
    if n < 4:
        raise ValueError("need at least 4 slices")
    if isinstance(a, APolyResult):
        a = a.a_poly
    entries = []
    for k in range(n):
        eta0 = TWO_PI * k / n
        try:
            roots, dist = slice_roots(a, eta0)
        except DegenerateSlice as exc:
            if exc.identically_zero:
                # every m is a root, including unit ones
                entries.append(SliceEntry(eta0, 0.0, complex(1.0, 0.0), 0.0, "identically zero"))
            else:
                entries.append(SliceEntry(eta0, math.inf, None, math.nan, "no roots"))
            continue
        best = min(roots, key=lambda r: abs(abs(r.value) - 1.0))
        entries.append(SliceEntry(eta0, dist, best.value, best.residual))
    return SliceReport(entries, tol)


def deg_m_nonzero(a):
    if isinstance(a, APolyResult):
        return (a.nontrivial_factor * L_MINUS_1).deg_m() >= 1
    return a.deg_m() >= 1


@dataclass
class ValidationReport:
    checked: int
    flagged: list
    max_residual: float
    tol: float

    @property
    def flagged_fraction(self):
        return len(self.flagged) / self.checked if self.checked else 0.0

    @property
    def passed(self):
        return self.flagged_fraction < 0.01

    @property
    def verdict(self):
        return "pass" if self.passed else "fail"

    def to_json_obj(self):
        return {
            "verdict": self.verdict,
            "checked": self.checked,
            "flagged_fraction": self.flagged_fraction,
            "max_residual": self.max_residual,
            "tol": self.tol,
            "zero_dimensional_candidates": [[t, e, r] for t, e, r in self.flagged],
        }


def cross_validate(a, s, tol=1e-6):
    """Evaluate A at the irreducible points of a pillowcase sample.

    Points with |A|/scale above tol are reported as candidates for isolated
    (0-dimensional) representation components; they are never discarded.
    """
    if isinstance(a, APolyResult):
        a = a.a_poly
    pts = irreducible_points(s)
    flagged = []
    worst = 0.0
    for p in pts:
        m0 = complex(math.cos(p.theta), math.sin(p.theta))
        l0 = complex(math.cos(p.eta), math.sin(p.eta))
        r = a.relative_residual(m0, l0)
        worst = max(worst, r)
        if not r < tol:
            flagged.append((p.theta, p.eta, r))
    return ValidationReport(len(pts), flagged, worst, tol)
