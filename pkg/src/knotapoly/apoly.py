"""SL(2,C) representation systems and A-polynomial elimination.

For a presentation on two meridian generators a, b the non-abelian
representations are put in the normal form

    rho(a) = [[m, 1], [0, 1/m]],   rho(b) = [[m, 0], [t, 1/m]],

so the relators cut out a curve in (m, t). The longitude commutes with a, so
on that curve rho(longitude) is upper triangular and its (1,1) entry is the
longitude eigenvalue l. Eliminating t between the curve and l - rho(L)_11
gives the A-polynomial up to extraneous factors, which are pruned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import sympy

from .knot_input import (
    tietze_reduce, torus_params, torus_to_two_bridge,
)
from .polyalg import (
    IntPoly2, L_MINUS_1, MPoly, NonConvergence, content_and_primitive, divide_out,
    exact_div, mpoly_gcd, prem, resultant, roots_univar, squarefree,
)

__all__ = [
    "APolyError", "WrongGeneratorCount", "DenominatorIdenticallyZero", "EliminationOverflow",
    "EmptySystem", "UnsupportedPresentation", "RepSystem", "APolyResult", "Witness",
    "rep_system_riley", "eliminate_to_apoly", "apoly", "sample_witnesses",
    "riley_matrix_word", "prepare_two_meridian", "MAX_T_DEGREE",
]

MAX_T_DEGREE = 64
VARS = ("m", "t")


class APolyError(Exception):
    pass


class WrongGeneratorCount(APolyError):
    pass


class DenominatorIdenticallyZero(APolyError):
    pass


class EliminationOverflow(APolyError):
    pass


class EmptySystem(APolyError):
    pass


class UnsupportedPresentation(APolyError):
    pass


# ---------------------------------------------------------------------------
# symbolic 2x2 matrices, scaled by m to stay polynomial
# ---------------------------------------------------------------------------

def _scaled_generator_matrices():
    m = MPoly.var("m", VARS)
    t = MPoly.var("t", VARS)
    one = MPoly.const(1, VARS)
    zero = MPoly(VARS)
    # m * rho(g) and m * rho(g)^-1
    return {
        1: [[m * m, m], [zero, one]],
        -1: [[one, -m], [zero, m * m]],
        2: [[m * m, zero], [m * t, one]],
        -2: [[one, zero], [-(m * t), m * m]],
    }


def _matmul(x, y):
    return [[x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
            [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]]]


def scaled_word_matrix(word):
    """m^len(word) * rho(word) with polynomial entries in (m, t)."""
    gens = _scaled_generator_matrices()
    one = MPoly.const(1, VARS)
    zero = MPoly(VARS)
    out = [[one, zero], [zero, one]]
    for g in word:
        out = _matmul(out, gens[g])
    return out


def riley_matrix_word(word, m, t):
    """Numerical rho(word) for the normal form at complex (m, t)."""
    mats = {
        1: np.array([[m, 1], [0, 1 / m]], dtype=complex),
        2: np.array([[m, 0], [t, 1 / m]], dtype=complex),
    }
    out = np.eye(2, dtype=complex)
    for g in word:
        x = mats[abs(g)]
        out = out @ (x if g > 0 else np.linalg.inv(x))
    return out


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------

@dataclass
class RepSystem:
    variables: tuple
    equations: list
    longitude_numerator: MPoly
    longitude_denominator: MPoly
    presentation_label: str = ""
    relators: tuple = ()
    longitude_word: tuple = ()

    def longitude_value(self, m, t):
        num = complex(self.longitude_numerator.eval({"m": m, "t": t}))
        den = complex(self.longitude_denominator.eval({"m": m, "t": t}))
        return num / den


@dataclass(frozen=True)
class Witness:
    m: complex
    t: complex
    l: complex


@dataclass
class APolyResult:
    a_poly: IntPoly2
    nontrivial_factor: IntPoly2
    diagnostics: list = field(default_factory=list)

    def factored_string(self):
        if self.nontrivial_factor == IntPoly2({(0, 0): 1}):
            return f"({L_MINUS_1})"
        if divide_out(self.a_poly, L_MINUS_1)[1]:
            return f"({L_MINUS_1})*({self.nontrivial_factor})"
        return str(self.a_poly)

    def to_json_obj(self):
        obj = self.a_poly.to_json_obj()
        obj["factored"] = self.factored_string()
        return obj


# ---------------------------------------------------------------------------
# representation system
# ---------------------------------------------------------------------------

def _strip_t_power(p):
    t = MPoly.var("t", VARS)
    while not p.is_zero() and p.degree("t") > 0:
        try:
            p = exact_div(p, t)
        except Exception:
            break
    return p


def rep_system_riley(pres):
    """Build the (m, t) equations and the longitude eigenvalue numerator/denominator."""
    one = MPoly.const(1, VARS)
    if pres.generator_count == 1:
        return RepSystem(VARS, [], one, one, pres.label, pres.relators, pres.longitude)
    if pres.generator_count != 2:
        raise WrongGeneratorCount(f"need 2 generators, got {pres.generator_count}")
    if not pres.generators_are_meridians or list(pres.meridian) != [1]:
        raise WrongGeneratorCount("both generators must be meridians with the meridian first")
    m = MPoly.var("m", VARS)
    entries = []
    for rel in pres.relators:
        mat = scaled_word_matrix(rel)
        scale = m ** len(rel)
        diffs = [mat[0][0] - scale, mat[0][1], mat[1][0], mat[1][1] - scale]
        entries.extend(d for d in diffs if not d.is_zero())
    equations = []
    if entries:
        g = reduce(mpoly_gcd, entries)
        g = _strip_t_power(g)
        if g.degree("t") > 0:
            _, g = content_and_primitive(g, "t")
            equations = [g]
    lmat = scaled_word_matrix(pres.longitude)
    num = lmat[0][0]
    den = m ** len(pres.longitude)
    if num.is_zero():
        raise DenominatorIdenticallyZero("longitude entry vanishes identically")
    k = min(num.min_degree("m"), len(pres.longitude))
    if k:
        num = exact_div(num, m ** k)
        den = exact_div(den, m ** k)
    if den.is_zero():
        raise DenominatorIdenticallyZero("longitude denominator vanishes")
    return RepSystem(VARS, equations, num, den, pres.label, pres.relators, pres.longitude)


def _unit_m_samples(count, seed):
    rng = np.random.default_rng(seed)
    radii = rng.uniform(0.8, 1.25, count)
    angles = rng.uniform(0.1, 2 * np.pi - 0.1, count)
    return radii * np.exp(1j * angles)


def sample_witnesses(system, count=6, seed=0):
    """Numerical points (m, t, l) on the representation curve at pseudo-random m."""
    if not system.equations:
        return []
    phi = system.equations[0]
    coeff_polys = phi.coeff_list("t")
    out = []
    for m0 in _unit_m_samples(count, seed):
        coeffs = [complex(c.eval({"m": m0, "t": 0})) for c in coeff_polys]
        try:
            roots = roots_univar(coeffs, tol=1e-8)
        except NonConvergence as exc:
            roots = exc.best
        for r in roots:
            out.append(Witness(complex(m0), r.value, system.longitude_value(m0, r.value)))
    return out


def _sympy_factors(p):
    m, l = sympy.symbols("m l")
    expr = sympy.Poly.from_dict({k: v for k, v in p.terms.items()}, m, l)
    _, factors = sympy.factor_list(expr)
    out = []
    for f, _e in factors:
        terms = {tuple(int(e) for e in mon): int(c) for mon, c in f.as_dict().items()}
        out.append(IntPoly2(terms))
    return out


def eliminate_to_apoly(system, witness_count=6, seed=0, witness_tol=1e-6):
    """Eliminate t and prune extraneous factors to get the A-polynomial."""
    diagnostics = []
    if not system.variables:
        raise EmptySystem("representation system has no variables")
    if not system.equations:
        diagnostics.append("no non-abelian component: only reducible representations")
        return APolyResult(L_MINUS_1, IntPoly2({(0, 0): 1}), diagnostics)
    if len(system.equations) != 1:
        raise APolyError("expected a single auxiliary equation")
    phi = system.equations[0]
    l = MPoly.var("l", ("m", "t", "l"))
    e = l * system.longitude_denominator - system.longitude_numerator
    dphi, de = phi.degree("t"), e.degree("t")
    if dphi > MAX_T_DEGREE or de > MAX_T_DEGREE:
        raise EliminationOverflow(f"t-degree {max(dphi, de)} exceeds {MAX_T_DEGREE}")
    diagnostics.append(f"relator equation t-degree {dphi}; longitude equation t-degree {de}")
    e_red = prem(e, phi, "t")
    diagnostics.append(f"longitude equation reduced modulo relator equation to t-degree {e_red.degree('t')}")
    res = resultant(phi, e_red, "t")
    raw = IntPoly2.from_mpoly(res.with_variables(("m", "l")) if "t" not in res.used_variables() else res)
    if raw.is_zero():
        raise APolyError("resultant vanished identically")
    stripped = raw.strip_m_power()
    if stripped != raw:
        diagnostics.append("removed monomial factor in m")
    _, prim = content_and_primitive(stripped.to_mpoly(), "l")
    prim = IntPoly2.from_mpoly(prim)
    if prim.deg_l() < raw.deg_l() or prim != stripped:
        diagnostics.append("removed content in m (factors without l)")
    witnesses = sample_witnesses(system, witness_count, seed)
    kept = []
    for f in _sympy_factors(prim):
        if f.deg_l() <= 0:
            diagnostics.append(f"pruned factor without l: {f}")
            continue
        best = min((f.relative_residual(w.m, w.l) for w in witnesses), default=np.inf)
        if best < witness_tol:
            kept.append(f)
        else:
            diagnostics.append(f"pruned factor not vanishing on witnesses ({best:.2e}): {f}")
    curve = reduce(lambda a, b: a * b, kept, IntPoly2({(0, 0): 1}))
    a_poly = squarefree(curve) if curve.deg_l() > 0 or curve.deg_m() > 0 else curve
    if not divide_out(a_poly, L_MINUS_1)[1]:
        a_poly = a_poly * L_MINUS_1
    a_poly = a_poly.normalized()
    nontrivial, exact = divide_out(a_poly, L_MINUS_1)
    nontrivial = nontrivial.normalized() if exact else nontrivial
    diagnostics.append("isolated (0-dimensional) representation components are not recorded")
    return APolyResult(a_poly, nontrivial, diagnostics)


def prepare_two_meridian(pres):
    """Route a presentation to one on at most two meridian generators (meridian first)."""
    if pres.generator_count == 1:
        return pres
    if not pres.generators_are_meridians:
        tk = torus_params(pres)
        rewritten = torus_to_two_bridge(tk) if tk is not None else None
        if rewritten is None:
            raise UnsupportedPresentation(
                f"{pres.label or 'presentation'}: generators are not meridians and no rewrite is known")
        return rewritten
    if pres.generator_count > 2 or list(pres.meridian) != [1]:
        pres = tietze_reduce(pres, target=2)
    if pres.generator_count > 2:
        raise UnsupportedPresentation(
            f"{pres.label or 'presentation'}: {pres.generator_count} generators after Tietze reduction")
    if list(pres.meridian) != [1]:
        raise UnsupportedPresentation("meridian is not a single generator")
    return pres


def apoly(pres, **kwargs):
    """A-polynomial of the knot presented by ``pres``."""
    reduced = prepare_two_meridian(pres)
    system = rep_system_riley(reduced)
    result = eliminate_to_apoly(system, **kwargs)
    if reduced is not pres:
        result.diagnostics.insert(0, f"presentation rewritten to {reduced.generator_count} meridian generators")
    return result
