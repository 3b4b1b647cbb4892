"""A-polynomial by numerical evaluation and interpolation.

This path shares no symbolic code with the resultant elimination: for each
sample value of m the non-abelian representations are found numerically, the
longitude eigenvalues l_i are collected, and the integer polynomial whose
l-slices are prod(l - l_i) is recovered from a nullspace computation.
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction

import numpy as np

from .apoly import prepare_two_meridian, riley_matrix_word
from .polyalg import L_MINUS_1, IntPoly2, squarefree

__all__ = ["OracleError", "longitude_eigenvalues", "interpolate_apoly"]


class OracleError(Exception):
    pass


def _entry_coeffs(word, m0, degree, radius=1.5):
    """Coefficients in t of the four entries of rho(word) - I at fixed m, via FFT."""
    k = degree + 1
    ts = radius * np.exp(2j * np.pi * np.arange(k) / k)
    vals = np.array([(riley_matrix_word(word, m0, t) - np.eye(2)).ravel() for t in ts])
    coeffs = np.fft.fft(vals, axis=0) / k
    return coeffs / (radius ** np.arange(k))[:, None]


def _relative_defect(rel, m0, t):
    """|rho(U) - rho(V)| / |rho(U)| for the split rel = U V^-1."""
    half = len(rel) // 2
    u = riley_matrix_word(rel[:half], m0, t)
    v = riley_matrix_word([-g for g in reversed(rel[half:])], m0, t)
    return float(np.linalg.norm(u - v) / max(np.linalg.norm(u), np.linalg.norm(v)))


def longitude_eigenvalues(pres, m0, defect_tol=1e-7):
    """l at every non-abelian representation in normal form with meridian eigenvalue m0."""
    rel = pres.relators[0]
    coeffs = _entry_coeffs(rel, m0, len(rel))
    norms = np.linalg.norm(coeffs, axis=0)
    col = coeffs[:, int(np.argmax(norms))]
    col = np.where(np.abs(col) < 1e-12 * np.max(np.abs(col)), 0, col)
    nz = np.nonzero(col)[0]
    roots = np.roots(col[: nz[-1] + 1][::-1])
    out = []
    for t in roots:
        if abs(t) < 1e-8:
            continue
        if _relative_defect(rel, m0, t) > defect_tol:
            continue
        l0 = complex(riley_matrix_word(pres.longitude, m0, t)[0, 0])
        # distinct representations can share l; keep each value once
        if all(abs(l0 - x) > 1e-7 * max(1.0, abs(x)) for x in out):
            out.append(l0)
    return out


def _integerize(vec, max_denominator=1000):
    vec = vec / vec[np.argmax(np.abs(vec))]
    if np.max(np.abs(vec.imag)) > 1e-6:
        raise OracleError("nullspace vector is not real")
    fr = [Fraction(float(x)).limit_denominator(max_denominator) for x in vec.real]
    if max(abs(float(f) - x) for f, x in zip(fr, vec.real)) > 1e-6:
        raise OracleError("nullspace vector is not rational with small denominators")
    lcm = 1
    for f in fr:
        lcm = lcm * f.denominator // math.gcd(lcm, f.denominator)
    return [int(f * lcm) for f in fr]


def interpolate_apoly(pres, max_m_degree=40, seed=7):
    """(l - 1) times the squarefree curve through all sampled (m, l) pairs."""
    reduced = prepare_two_meridian(pres)
    if reduced.generator_count == 1:
        return L_MINUS_1
    rng = np.random.default_rng(seed)
    cache = {}

    def sample(count):
        while len(cache) < count:
            m0 = complex(np.exp(1j * rng.uniform(0.05, 2 * np.pi - 0.05)))
            cache[m0] = longitude_eigenvalues(reduced, m0)
        return list(cache.items())

    counts = Counter(len(ls) for _, ls in sample(8))
    n, hits = counts.most_common(1)[0]
    if n == 0:
        return L_MINUS_1
    if hits < 6:
        raise OracleError("number of representations varies between samples")
    for deg in range(1, max_m_degree + 1):
        unknowns = (n + 1) * (deg + 1)
        samples = sample(2 * unknowns)
        rows = []
        for m0, ls in samples:
            if len(ls) != n:
                continue
            # monic polynomial in l with roots l_i: sum_j c_j l^j
            c = np.poly(ls)[::-1]
            mp = m0 ** np.arange(deg + 1)
            for j in range(n):
                row = np.zeros(unknowns, dtype=complex)
                row[j * (deg + 1):(j + 1) * (deg + 1)] = mp
                row[n * (deg + 1):] = -c[j] * mp
                rows.append(row)
        mat = np.array(rows)
        _, sv, vh = np.linalg.svd(mat)
        if sv[-1] > 1e-9 * sv[0]:
            continue
        if len(sv) > 1 and sv[-2] < 1e-7 * sv[0]:
            raise OracleError(f"nullspace is not one-dimensional at m-degree {deg}")
        ints = _integerize(vh[-1].conj())
        terms = {}
        for j in range(n + 1):
            for d in range(deg + 1):
                c = ints[j * (deg + 1) + d]
                if c:
                    terms[(d, j)] = c
        curve = squarefree(IntPoly2(terms).strip_m_power())
        return (curve * L_MINUS_1).normalized()
    raise OracleError(f"no interpolant up to m-degree {max_m_degree}")
