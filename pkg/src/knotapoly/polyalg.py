"""Exact polynomial algebra over the integers and rationals.

Sparse multivariate polynomials (:class:`MPoly`), the normalized bivariate
integer polynomials used for A-polynomials (:class:`IntPoly2`), Sylvester
resultants by fraction-free (Bareiss) elimination, gcd/squarefree machinery,
and an Aberth-Ehrlich simultaneous root finder for univariate polynomials.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from numbers import Number

import numpy as np

__all__ = [
    "PolyError", "UnknownVariable", "ZeroInput", "DegreeZero", "NonConvergence",
    "NotDivisible", "MPoly", "IntPoly2", "RootInfo", "ComplexRootSet",
    "poly_add", "poly_mul", "poly_eval", "resultant", "prem", "mpoly_gcd",
    "exact_div", "squarefree", "divide_out", "roots_univar", "root_residual",
]


class PolyError(Exception):
    pass


class UnknownVariable(PolyError):
    pass


class ZeroInput(PolyError):
    pass


class DegreeZero(PolyError):
    pass


class NotDivisible(PolyError):
    pass


class NonConvergence(PolyError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


def _norm_coeff(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


# ---------------------------------------------------------------------------
# Sparse multivariate polynomials
# ---------------------------------------------------------------------------

class MPoly:
    """Sparse polynomial over Q in named variables.

    ``terms`` maps exponent tuples (aligned with ``variables``) to nonzero
    int/Fraction coefficients. Binary operations align operands onto the
    union of their variables, so ``m + t`` just works.
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables, terms=None):
        self.variables = tuple(variables)
        clean = {}
        n = len(self.variables)
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != n:
                raise ValueError(f"exponent {exps} does not match {self.variables}")
            if c != 0:
                clean[exps] = _norm_coeff(c)
        self.terms = clean

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, c, variables=()):
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, name, variables=None):
        variables = tuple(variables) if variables is not None else (name,)
        if name not in variables:
            raise UnknownVariable(name)
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {exps: 1})

    @classmethod
    def from_coeff_list(cls, coeffs, var):
        """Rebuild sum(coeffs[i] * var**i); coefficients must not contain var."""
        out = MPoly((var,))
        x = MPoly.var(var)
        power = MPoly.const(1, (var,))
        for c in coeffs:
            out = out + c * power
            power = power * x
        return out

    # -- structure ----------------------------------------------------------
    def with_variables(self, variables):
        variables = tuple(variables)
        missing = [v for i, v in enumerate(self.variables)
                   if v not in variables and any(e[i] for e in self.terms)]
        if missing:
            raise UnknownVariable(", ".join(missing))
        index = [self.variables.index(v) if v in self.variables else None for v in variables]
        terms = {}
        for exps, c in self.terms.items():
            key = tuple(exps[i] if i is not None else 0 for i in index)
            terms[key] = terms.get(key, 0) + c
        return MPoly(variables, terms)

    def _aligned(self, other):
        if not isinstance(other, MPoly):
            other = MPoly.const(other, self.variables)
        if other.variables == self.variables:
            return self, other
        union = self.variables + tuple(v for v in other.variables if v not in self.variables)
        return self.with_variables(union), other.with_variables(union)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()), 0)

    def used_variables(self):
        return tuple(v for i, v in enumerate(self.variables)
                     if any(e[i] for e in self.terms))

    def degree(self, var):
        if var not in self.variables:
            return 0 if self.terms else -1
        if not self.terms:
            return -1
        i = self.variables.index(var)
        return max(e[i] for e in self.terms)

    def min_degree(self, var):
        i = self.variables.index(var)
        return min(e[i] for e in self.terms)

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def coeff_list(self, var):
        """Coefficients in ``var`` (index = power) as MPolys in the same variables."""
        if var not in self.variables:
            return [self]
        i = self.variables.index(var)
        d = self.degree(var)
        buckets = [dict() for _ in range(max(d, 0) + 1)]
        for exps, c in self.terms.items():
            key = exps[:i] + (0,) + exps[i + 1:]
            buckets[exps[i]][key] = c
        return [MPoly(self.variables, b) for b in buckets]

    def leading_coeff(self, var):
        return self.coeff_list(var)[-1]

    def leading_term(self):
        exps = max(self.terms)
        return exps, self.terms[exps]

    def derivative(self, var):
        if var not in self.variables:
            return MPoly(self.variables)
        i = self.variables.index(var)
        terms = {}
        for exps, c in self.terms.items():
            if exps[i]:
                key = exps[:i] + (exps[i] - 1,) + exps[i + 1:]
                terms[key] = c * exps[i]
        return MPoly(self.variables, terms)

    def is_integral(self):
        return all(isinstance(c, int) for c in self.terms.values())

    def integer_content(self):
        return reduce(math.gcd, (abs(int(c)) for c in self.terms.values()), 0)

    def clear_denominators(self):
        den = reduce(lambda a, b: a * b // math.gcd(a, b),
                     (Fraction(c).denominator for c in self.terms.values()), 1)
        return self * den

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        a, b = self._aligned(other)
        terms = dict(a.terms)
        for k, c in b.terms.items():
            terms[k] = terms.get(k, 0) + c
        return MPoly(a.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.variables, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, MPoly) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            if other == 0:
                return MPoly(self.variables)
            return MPoly(self.variables, {k: c * other for k, c in self.terms.items()})
        a, b = self._aligned(other)
        terms = {}
        for ka, ca in a.terms.items():
            for kb, cb in b.terms.items():
                key = tuple(x + y for x, y in zip(ka, kb))
                terms[key] = terms.get(key, 0) + ca * cb
        return MPoly(a.variables, terms)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        result = MPoly.const(1, self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Number):
            other = MPoly.const(other, self.variables)
        if not isinstance(other, MPoly):
            return NotImplemented
        try:
            a, b = self._aligned(other)
        except UnknownVariable:
            return False
        return a.terms == b.terms

    def __hash__(self):
        used = self.used_variables()
        p = self.with_variables(tuple(sorted(used)))
        return hash(tuple(sorted(p.terms.items())))

    def eval(self, assignment):
        """Substitute values. Full assignment -> scalar, partial -> MPoly."""
        for v in assignment:
            if v not in self.variables:
                raise UnknownVariable(v)
        idx = [(i, assignment[v]) for i, v in enumerate(self.variables) if v in assignment]
        rest = tuple(v for v in self.variables if v not in assignment)
        keep = [i for i, v in enumerate(self.variables) if v not in assignment]
        if not rest:
            total = 0
            for exps, c in self.terms.items():
                term = c
                for i, val in idx:
                    if exps[i]:
                        term = term * val ** exps[i]
                total = total + term
            return total
        terms = {}
        for exps, c in self.terms.items():
            term = c
            for i, val in idx:
                if exps[i]:
                    term = term * val ** exps[i]
            key = tuple(exps[i] for i in keep)
            terms[key] = terms.get(key, 0) + term
        return MPoly(rest, terms)

    def __call__(self, **assignment):
        return self.eval(assignment)

    def __repr__(self):
        return f"MPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps in sorted(self.terms, reverse=True):
            c = self.terms[exps]
            mono = "*".join(v if e == 1 else f"{v}^{e}"
                            for v, e in zip(self.variables, exps) if e)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def poly_add(p, q):
    return p + q


def poly_mul(p, q):
    return p * q


def poly_eval(p, assignment):
    return p.eval(assignment)


# ---------------------------------------------------------------------------
# Division, gcd, resultants
# ---------------------------------------------------------------------------

def exact_div(p, d):
    """Quotient ``p / d``; raises NotDivisible when the division is not exact."""
    if d.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    p, d = p._aligned(d)
    if p.is_zero():
        return MPoly(p.variables)
    if d.is_constant():
        c = d.constant_value()
        return MPoly(p.variables, {k: Fraction(v) / c for k, v in p.terms.items()})
    d_lead, d_lc = d.leading_term()
    d_items = list(d.terms.items())
    rem = dict(p.terms)
    quot = {}
    while rem:
        r_lead = max(rem)
        r_lc = rem[r_lead]
        shift = tuple(a - b for a, b in zip(r_lead, d_lead))
        if min(shift) < 0:
            raise NotDivisible("inexact polynomial division")
        if isinstance(r_lc, int) and isinstance(d_lc, int) and r_lc % d_lc == 0:
            q = r_lc // d_lc
        else:
            q = _norm_coeff(Fraction(r_lc) / d_lc)
        quot[shift] = q
        for k, c in d_items:
            key = tuple(a + b for a, b in zip(k, shift))
            v = rem.get(key, 0) - q * c
            if v:
                rem[key] = v
            else:
                rem.pop(key, None)
    return MPoly(p.variables, quot)


def prem(a, b, var):
    """Pseudo-remainder of ``a`` by ``b`` in ``var``: lc(b)^(da-db+1)*a mod b."""
    if b.is_zero():
        raise ZeroInput("pseudo-division by zero")
    a, b = a._aligned(b)
    ca = a.coeff_list(var)
    cb = b.coeff_list(var)
    da, db = len(ca) - 1, len(cb) - 1
    if a.is_zero() or da < db:
        return a
    lcb = cb[-1]
    x = MPoly.var(var, a.variables)
    r = list(ca)
    steps = 0
    while len(r) - 1 >= db and r:
        dr = len(r) - 1
        lcr = r[-1]
        r = [lcb * c for c in r]
        for i in range(db + 1):
            r[i + dr - db] = r[i + dr - db] - lcr * cb[i]
        steps += 1
        while r and r[-1].is_zero():
            r.pop()
    out = MPoly(a.variables)
    power = MPoly.const(1, a.variables)
    for c in r:
        out = out + c * power
        power = power * x
    missing = da - db + 1 - steps
    if missing:
        out = out * lcb ** missing
    return out


def _sign_normalize(p):
    if p.is_zero():
        return p
    _, lc = p.leading_term()
    return -p if lc < 0 else p


def content_and_primitive(p, var):
    """Split p (integer coefficients) into content in the other variables and primitive part."""
    coeffs = [c for c in p.coeff_list(var) if not c.is_zero()]
    cont = reduce(mpoly_gcd, coeffs)
    return cont, exact_div(p, cont)


def mpoly_gcd(p, q):
    """gcd over Z[vars] by recursive primitive PRS; result has positive leading coefficient."""
    p, q = p._aligned(q)
    if p.is_zero():
        return _sign_normalize(q)
    if q.is_zero():
        return _sign_normalize(p)
    used = [v for v in p.variables if p.degree(v) > 0 or q.degree(v) > 0]
    if not used:
        g = math.gcd(int(p.constant_value()), int(q.constant_value()))
        return MPoly.const(g, p.variables)
    x = used[0]
    cp, pp = content_and_primitive(p, x)
    cq, pq = content_and_primitive(q, x)
    c = mpoly_gcd(cp, cq)
    a, b = (pp, pq) if pp.degree(x) >= pq.degree(x) else (pq, pp)
    while not b.is_zero() and b.degree(x) > 0:
        r = prem(a, b, x)
        a = b
        b = content_and_primitive(r, x)[1] if not r.is_zero() else r
    if b.is_zero():
        g = content_and_primitive(a, x)[1]
    else:
        g = MPoly.const(1, p.variables)
    return _sign_normalize(c * g)


def _bareiss_det(matrix):
    n = len(matrix)
    if n == 0:
        return 1
    m = [row[:] for row in matrix]
    sign = 1
    prev = None
    for k in range(n - 1):
        if m[k][k].is_zero():
            for i in range(k + 1, n):
                if not m[i][k].is_zero():
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return m[0][0] * 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = pivot * m[i][j] - m[i][k] * m[k][j]
                m[i][j] = num if prev is None else exact_div(num, prev)
        prev = pivot
    return m[n - 1][n - 1] * sign


def sylvester_matrix(p, q, var):
    p, q = p._aligned(q)
    cp = p.coeff_list(var)[::-1]
    cq = q.coeff_list(var)[::-1]
    dp, dq = len(cp) - 1, len(cq) - 1
    n = dp + dq
    zero = MPoly(p.variables)
    rows = []
    for i in range(dq):
        rows.append([zero] * i + cp + [zero] * (n - dp - 1 - i))
    for i in range(dp):
        rows.append([zero] * i + cq + [zero] * (n - dq - 1 - i))
    return rows


def resultant(p, q, var):
    """Sylvester resultant eliminating ``var``, via Bareiss fraction-free elimination."""
    if p.is_zero() or q.is_zero():
        raise ZeroInput("resultant of a zero polynomial")
    p, q = p._aligned(q)
    dp, dq = p.degree(var), q.degree(var)
    if dp == 0 and dq == 0:
        return MPoly.const(1, p.variables)
    if dp == 0:
        return p ** dq
    if dq == 0:
        return q ** dp
    det = _bareiss_det(sylvester_matrix(p, q, var))
    return det if isinstance(det, MPoly) else MPoly.const(det, p.variables)


# ---------------------------------------------------------------------------
# Bivariate integer polynomials in (m, l)
# ---------------------------------------------------------------------------

class IntPoly2:
    """Integer polynomial in (m, l); ``terms`` maps (deg_m, deg_l) -> int."""

    __slots__ = ("terms",)
    VARS = ("m", "l")

    def __init__(self, terms=None):
        clean = {}
        for (dm, dl), c in (terms or {}).items():
            if dm < 0 or dl < 0:
                raise ValueError("negative exponent")
            if isinstance(c, Fraction):
                if c.denominator != 1:
                    raise ValueError("IntPoly2 needs integer coefficients")
                c = c.numerator
            c = int(c)
            if c:
                clean[(int(dm), int(dl))] = c
        self.terms = clean

    @classmethod
    def from_mpoly(cls, p):
        p = p.with_variables(cls.VARS)
        return cls(p.terms)

    @classmethod
    def parse(cls, text):
        """Parse an expression in m and l such as ``"(l-1)*(l*m^6+1)"``."""
        m, l = MPoly.var("m", cls.VARS), MPoly.var("l", cls.VARS)
        expr = text.replace("^", "**")
        value = eval(compile(expr, "<poly>", "eval"), {"__builtins__": {}}, {"m": m, "l": l})
        if not isinstance(value, MPoly):
            value = MPoly.const(value, cls.VARS)
        return cls.from_mpoly(value)

    def to_mpoly(self):
        return MPoly(self.VARS, self.terms)

    def is_zero(self):
        return not self.terms

    def deg_m(self):
        return max((dm for dm, _ in self.terms), default=-1)

    def deg_l(self):
        return max((dl for _, dl in self.terms), default=-1)

    def content(self):
        return reduce(math.gcd, (abs(c) for c in self.terms.values()), 0)

    def leading_coeff(self):
        """Leading coefficient in lex order with l > m."""
        key = max(self.terms, key=lambda k: (k[1], k[0]))
        return self.terms[key]

    def normalized(self):
        if not self.terms:
            return self
        g = self.content()
        sign = -1 if self.leading_coeff() < 0 else 1
        return IntPoly2({k: sign * c // g for k, c in self.terms.items()})

    def strip_m_power(self):
        k = min(dm for dm, _ in self.terms)
        return IntPoly2({(dm - k, dl): c for (dm, dl), c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPoly2({k: c * other for k, c in self.terms.items()})
        return IntPoly2.from_mpoly(self.to_mpoly() * other.to_mpoly())

    __rmul__ = __mul__

    def __add__(self, other):
        return IntPoly2.from_mpoly(self.to_mpoly() + other.to_mpoly())

    def __sub__(self, other):
        return IntPoly2.from_mpoly(self.to_mpoly() - other.to_mpoly())

    def __eq__(self, other):
        return isinstance(other, IntPoly2) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __call__(self, m, l):
        return self.evaluate(m, l)

    def evaluate(self, m, l):
        total = 0
        for (dm, dl), c in self.terms.items():
            total += c * m ** dm * l ** dl
        return total

    def scale(self, m, l):
        """Magnitude scale for residuals: max|c| * max(1,|m|)^deg_m * max(1,|l|)^deg_l."""
        cmax = max((abs(c) for c in self.terms.values()), default=0)
        return float(cmax) * max(1.0, abs(m)) ** max(self.deg_m(), 0) * max(1.0, abs(l)) ** max(self.deg_l(), 0)

    def relative_residual(self, m, l):
        s = self.scale(m, l)
        return abs(complex(self.evaluate(m, l))) / s if s else 0.0

    def coeffs_in_m(self, l):
        """Dense coefficients (ascending powers of m) after substituting l."""
        out = [0j] * (self.deg_m() + 1)
        for (dm, dl), c in self.terms.items():
            out[dm] += c * l ** dl
        return out

    def terms_sorted(self):
        return sorted(self.terms.items())

    def to_json_obj(self):
        return {"var_order": ["m", "l"],
                "terms": [[dm, dl, str(c)] for (dm, dl), c in self.terms_sorted()]}

    def to_json(self):
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj):
        order = obj.get("var_order", ["m", "l"])
        if sorted(order) != ["l", "m"]:
            raise ValueError(f"unsupported var_order {order}")
        terms = {}
        for a, b, c in obj["terms"]:
            key = (a, b) if order == ["m", "l"] else (b, a)
            terms[key] = int(c)
        return cls(terms)

    @classmethod
    def from_json(cls, text):
        return cls.from_json_obj(json.loads(text))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (dm, dl) in sorted(self.terms, key=lambda k: (k[1], k[0]), reverse=True):
            c = self.terms[(dm, dl)]
            mono = "*".join(s for s in (
                ("l" if dl == 1 else f"l^{dl}") if dl else "",
                ("m" if dm == 1 else f"m^{dm}") if dm else "") if s)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"IntPoly2({self})"


L_MINUS_1 = IntPoly2({(0, 1): 1, (0, 0): -1})


def squarefree(p):
    """Product of the distinct irreducible factors of p, content-normalized."""
    if p.is_zero():
        raise ZeroInput("squarefree of zero")
    mp = p.to_mpoly()
    g = mpoly_gcd(mpoly_gcd(mp, mp.derivative("m")), mp.derivative("l"))
    return IntPoly2.from_mpoly(exact_div(mp, g)).normalized()


def divide_out(p, d):
    """Return (p/d, True) when d divides p exactly over Z, else (p, False)."""
    if d.is_zero():
        raise ZeroInput("division by zero polynomial")
    try:
        q = exact_div(p.to_mpoly(), d.to_mpoly())
    except NotDivisible:
        return p, False
    if not q.is_integral():
        return p, False
    return IntPoly2.from_mpoly(q), True


# ---------------------------------------------------------------------------
# Univariate complex roots
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootInfo:
    value: complex
    residual: float
    multiplicity_hint: int = 1


@dataclass(frozen=True)
class ComplexRootSet:
    roots: tuple
    tol: float

    def values(self):
        return np.array([r.value for r in self.roots], dtype=complex)

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def root_residual(coeffs_desc, z):
    """|P(z)| / (max|c| * max(1,|z|)^deg) for descending coefficients."""
    c = np.asarray(coeffs_desc, dtype=complex)
    deg = len(c) - 1
    scale = np.max(np.abs(c)) * max(1.0, abs(z)) ** deg
    return float(abs(np.polyval(c, z)) / scale)


def _aberth(c, max_sweeps):
    """Aberth-Ehrlich iteration on descending coefficients with c[0] != 0."""
    n = len(c) - 1
    dc = np.polyder(c)
    radius = 1.0 + np.max(np.abs(c[1:] / c[0]))
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    for sweep in range(max_sweeps):
        p = np.polyval(c, z)
        dp = np.polyval(dc, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dp != 0, p / dp, 0)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            s = np.sum(1.0 / diff, axis=1) - 1.0
            w = ratio / (1.0 - ratio * s)
        w = np.where(np.isfinite(w), w, 0)
        z = z - w
        if np.all(np.abs(w) <= 4e-16 * np.maximum(1.0, np.abs(z))):
            return z, sweep + 1
    return z, max_sweeps


def roots_univar(coeffs, tol=1e-10, max_sweeps=200, cluster_tol=1e-6):
    """All complex roots of sum(coeffs[i] * x**i) (coefficients in ascending order).

    Leading and trailing zeros are stripped (the latter become exact zero roots).
    Raises DegreeZero for constants and NonConvergence if some residual stays
    above ``tol`` after ``max_sweeps`` Aberth sweeps.
    """
    c = np.asarray(coeffs, dtype=complex)
    if c.size == 0 or not np.any(c):
        raise DegreeZero("zero polynomial")
    cmax = np.max(np.abs(c))
    nz = np.nonzero(np.abs(c) > 1e-14 * cmax)[0]
    lo, hi = nz[0], nz[-1]
    if hi == 0:
        raise DegreeZero("polynomial is constant")
    desc = c[lo:hi + 1][::-1]
    n_zero = int(lo)
    values = []
    if len(desc) > 1:
        z, _ = _aberth(desc, max_sweeps)
        # two Newton polishing steps
        d1 = np.polyder(desc)
        for _ in range(2):
            dp = np.polyval(d1, z)
            step = np.where(dp != 0, np.polyval(desc, z) / np.where(dp != 0, dp, 1), 0)
            better = np.abs(np.polyval(desc, z - step)) <= np.abs(np.polyval(desc, z))
            z = np.where(better, z - step, z)
        values.extend(z.tolist())
    values.extend([0j] * n_zero)
    full_desc = c[:hi + 1][::-1]
    infos = []
    for v in values:
        res = root_residual(full_desc, v)
        mult = sum(1 for u in values if abs(u - v) <= cluster_tol * max(1.0, abs(v)))
        infos.append(RootInfo(complex(v), res, mult))
    infos.sort(key=lambda r: (round(r.value.real, 12), round(r.value.imag, 12)))
    worst = max(r.residual for r in infos)
    if worst > tol:
        raise NonConvergence(f"root residual {worst:.3e} exceeds {tol:.1e}",
                             best=ComplexRootSet(tuple(infos), tol))
    return ComplexRootSet(tuple(infos), tol)
