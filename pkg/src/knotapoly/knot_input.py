"""Knot descriptions and their group presentations.

Words are lists of nonzero ints: ``+i`` is generator i (1-based), ``-i`` its
inverse. Every presentation carries a meridian word and the longitude word
that is null-homologous in the knot complement, so the peripheral pair can be
evaluated under any representation.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

__all__ = [
    "KnotInputError", "MalformedFraction", "EvenP", "NotCoprime", "MultiComponentLink",
    "EmptyWord", "InvalidTorus", "InvalidPresentation",
    "TwoBridgeKnot", "TorusKnotParams", "KnotPresentation",
    "parse_two_bridge", "parse_torus", "parse_braid", "parse_knot_spec",
    "presentation_two_bridge", "presentation_torus", "tietze_reduce",
    "free_reduce", "invert", "riley_word", "torus_to_two_bridge", "torus_params",
]


class KnotInputError(ValueError):
    pass


class MalformedFraction(KnotInputError):
    pass


class EvenP(KnotInputError):
    pass


class NotCoprime(KnotInputError):
    pass


class MultiComponentLink(KnotInputError):
    pass


class EmptyWord(KnotInputError):
    pass


class InvalidTorus(KnotInputError):
    pass


class InvalidPresentation(KnotInputError):
    pass


# ---------------------------------------------------------------------------
# word helpers
# ---------------------------------------------------------------------------

def invert(word):
    return [-g for g in reversed(word)]


def free_reduce(word):
    out = []
    for g in word:
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(g)
    return out


def cyclic_reduce(word):
    w = free_reduce(word)
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return w


def power(word, k):
    return word * k if k >= 0 else invert(word) * (-k)


def exponent_sums(word, n):
    sums = [0] * n
    for g in word:
        sums[abs(g) - 1] += 1 if g > 0 else -1
    return sums


def substitute(word, gen, replacement):
    """Replace generator ``gen`` (and its inverse) by ``replacement``."""
    out = []
    inv = invert(replacement)
    for g in word:
        if g == gen:
            out.extend(replacement)
        elif g == -gen:
            out.extend(inv)
        else:
            out.append(g)
    return free_reduce(out)


def _kernel_vector(rows, n):
    """Rational vector spanning the kernel of the integer matrix ``rows`` (n columns)."""
    mat = [[Fraction(x) for x in r] for r in rows if any(r)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    if len(free) != 1:
        return None
    f = free[0]
    vec = [Fraction(0)] * n
    vec[f] = Fraction(1)
    for i, c in enumerate(pivots):
        vec[c] = -mat[i][f]
    return vec


# ---------------------------------------------------------------------------
# Knot parameter types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwoBridgeKnot:
    """Schubert two-bridge knot p/q (p odd). ``1/1`` is the unknot."""

    p: int
    q: int

    def __post_init__(self):
        if self.p <= 0 or self.p % 2 == 0:
            raise EvenP(f"p must be odd and positive, got {self.p}")
        if math.gcd(self.p, self.q) != 1:
            raise NotCoprime(f"gcd({self.p}, {self.q}) != 1")
        # q mod 1 would be 0; keep the unknot as 1/1
        q = self.q % self.p if self.p > 1 else 1
        object.__setattr__(self, "q", q)

    @property
    def label(self):
        return f"{self.p}/{self.q}"


@dataclass(frozen=True)
class TorusKnotParams:
    p: int
    q: int

    def __post_init__(self):
        if self.p < 2 or self.q < 2:
            raise InvalidTorus("torus knot parameters must be >= 2 (p or q = 1 is the unknot)")
        if math.gcd(self.p, self.q) != 1:
            raise NotCoprime(f"gcd({self.p}, {self.q}) != 1")

    @property
    def label(self):
        return f"torus:{self.p},{self.q}"


@dataclass(frozen=True)
class KnotPresentation:
    """Finite presentation with distinguished meridian and longitude words."""

    generator_count: int
    relators: tuple
    meridian: tuple
    longitude: tuple
    label: str = ""
    h1_weights: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "relators", tuple(tuple(r) for r in self.relators))
        object.__setattr__(self, "meridian", tuple(self.meridian))
        object.__setattr__(self, "longitude", tuple(self.longitude))
        n = self.generator_count
        if n < 1:
            raise InvalidPresentation("need at least one generator")
        for w in (*self.relators, self.meridian, self.longitude):
            if any(g == 0 or abs(g) > n for g in w):
                raise InvalidPresentation(f"word {list(w)} uses unknown generators")
        weights = self._compute_h1_weights()
        object.__setattr__(self, "h1_weights", weights)

    def _compute_h1_weights(self):
        n = self.generator_count
        rows = [exponent_sums(r, n) for r in self.relators]
        vec = _kernel_vector(rows, n)
        if vec is None:
            raise InvalidPresentation("abelianization is not infinite cyclic")
        mer = sum(v * s for v, s in zip(vec, exponent_sums(self.meridian, n)))
        if mer == 0:
            raise InvalidPresentation("meridian is trivial in H1")
        vec = [v / mer for v in vec]
        if any(v.denominator != 1 for v in vec):
            raise InvalidPresentation("meridian does not generate H1")
        weights = tuple(int(v) for v in vec)
        if self.h1_image(self.longitude, weights) != 0:
            raise InvalidPresentation("longitude is not null-homologous")
        return weights

    def h1_image(self, word, weights=None):
        weights = weights or self.h1_weights
        return sum(weights[abs(g) - 1] * (1 if g > 0 else -1) for g in word)

    @property
    def generators_are_meridians(self):
        return all(w == 1 for w in self.h1_weights)

    def to_json_obj(self):
        return {"generators": self.generator_count,
                "relators": [list(r) for r in self.relators],
                "meridian": list(self.meridian),
                "longitude": list(self.longitude),
                "label": self.label}

    def to_json(self):
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj):
        return cls(obj["generators"], obj["relators"], obj["meridian"],
                   obj["longitude"], obj.get("label", ""))

    @classmethod
    def from_json(cls, text):
        return cls.from_json_obj(json.loads(text))


# ---------------------------------------------------------------------------
# Parsers and constructions
# ---------------------------------------------------------------------------

_FRACTION = re.compile(r"^\s*(-?\d+)\s*/\s*(-?\d+)\s*$")


def parse_two_bridge(text):
    m = _FRACTION.match(text)
    if not m:
        raise MalformedFraction(f"expected 'p/q', got {text!r}")
    return TwoBridgeKnot(int(m.group(1)), int(m.group(2)))


def parse_torus(text):
    m = re.match(r"^\s*(?:torus:)?\s*(\d+)\s*,\s*(\d+)\s*$", text)
    if not m:
        raise KnotInputError(f"expected 'torus:p,q', got {text!r}")
    return TorusKnotParams(int(m.group(1)), int(m.group(2)))


def schubert_signs(p, q):
    return [-1 if (i * q) // p % 2 else 1 for i in range(1, p)]


def presentation_two_bridge(k):
    """Two-generator presentation <a, b | w a w^-1 b^-1> of the two-bridge knot p/q."""
    if k.p == 1:
        return KnotPresentation(1, [], [1], [], label=k.label)
    # an odd representative of q mod p keeps the sign sequence palindromic
    eps = schubert_signs(k.p, k.q if k.q % 2 else k.q - k.p)
    w = [(1 if i % 2 == 0 else 2) * e for i, e in enumerate(eps)]
    relator = w + [1] + invert(w) + [-2]
    e = sum(eps)
    longitude = free_reduce(list(reversed(w)) + w + power([1], -2 * e))
    return KnotPresentation(2, [relator], [1], longitude, label=k.label)


def _torus_meridian_exponents(p, q):
    """Least nonnegative (r, s) with p*s - q*r = 1."""
    s = pow(p, -1, q)
    r = (p * s - 1) // q
    return r, s


def presentation_torus(k):
    """<x, y | x^p y^-q> with meridian x^-r y^s and longitude x^p * meridian^(-pq)."""
    p, q = k.p, k.q
    r, s = _torus_meridian_exponents(p, q)
    meridian = free_reduce(power([1], -r) + power([2], s))
    relator = power([1], p) + power([2], -q)
    longitude = free_reduce(power([1], p) + power(meridian, -p * q))
    return KnotPresentation(2, [relator], meridian, longitude, label=k.label)


def torus_to_two_bridge(k):
    """Rewrite the T(2, n) presentation over two meridian generators a, b.

    With n = 2j + 1 the substitution x = (ab)^j a, y = ab identifies the torus
    group with the two-bridge group n/1; the torus meridian becomes b. The
    generators are then relabelled so that the meridian is generator 1.
    Returns None unless min(p, q) == 2.
    """
    p, q = k.p, k.q
    if min(p, q) != 2:
        return None
    n = max(p, q)
    j = (n - 1) // 2
    tb = presentation_two_bridge(TwoBridgeKnot(n, 1))
    x = power([1, 2], j) + [1]
    y = [1, 2]
    images = {1: x, 2: y} if p == 2 else {1: y, 2: x}
    torus = presentation_torus(k)

    def image(word):
        out = []
        for g in word:
            out.extend(images[abs(g)] if g > 0 else invert(images[abs(g)]))
        return free_reduce(out)

    meridian = image(torus.meridian)
    longitude = image(torus.longitude)
    if meridian != [2]:
        return None
    swap = {1: 2, 2: 1}

    def relabel(word):
        return [swap[abs(g)] * (1 if g > 0 else -1) for g in word]

    return KnotPresentation(2, [relabel(r) for r in tb.relators], relabel(meridian),
                            relabel(longitude), label=k.label)


def riley_word(pres):
    """Return w when the presentation is <a, b | w a w^-1 b^-1> with w reversed = w with a, b swapped."""
    if pres.generator_count != 2 or len(pres.relators) != 1 or list(pres.meridian) != [1]:
        return None
    rel = list(pres.relators[0])
    for cand in (rel, invert(rel)):
        for shift in range(len(cand)):
            r = cand[shift:] + cand[:shift]
            if len(r) % 2 or len(r) < 2:
                continue
            h = (len(r) - 2) // 2
            w = r[:h]
            if r == w + [1] + invert(w) + [-2]:
                swapped = [(3 - abs(g)) * (1 if g > 0 else -1) for g in w]
                if list(reversed(w)) == swapped:
                    return w
    return None


# ---------------------------------------------------------------------------
# Tietze reduction
# ---------------------------------------------------------------------------

def tietze_reduce(pres, target=2):
    """Eliminate generators that occur exactly once in some relator.

    The meridian generator is never eliminated. Surviving generators are
    renumbered with the meridian generator first. Stops once ``target``
    generators remain or nothing more can be eliminated.
    """
    if len(pres.meridian) != 1:
        return pres
    keep = abs(pres.meridian[0])
    meridian = list(pres.meridian)
    longitude = list(pres.longitude)
    relators = [cyclic_reduce(list(r)) for r in pres.relators]
    relators = [r for r in relators if r]
    alive = set(range(1, pres.generator_count + 1))
    while len(alive) > target:
        best = None
        for ri, r in enumerate(relators):
            for g in set(abs(x) for x in r):
                if g == keep or sum(1 for x in r if abs(x) == g) != 1:
                    continue
                if best is None or len(r) < best[0]:
                    best = (len(r), ri, g)
        if best is None:
            break
        _, ri, g = best
        r = relators.pop(ri)
        i = next(k for k, x in enumerate(r) if abs(x) == g)
        rest = r[i + 1:] + r[:i]
        # r cyclically equals g^e * rest = 1  =>  g = rest^-e
        replacement = invert(rest) if r[i] > 0 else rest
        relators = [cyclic_reduce(substitute(x, g, replacement)) for x in relators]
        seen, uniq = set(), []
        for x in relators:
            key = _cyclic_key(x)
            if x and key not in seen:
                seen.add(key)
                uniq.append(x)
        relators = uniq
        meridian = substitute(meridian, g, replacement)
        longitude = substitute(longitude, g, replacement)
        alive.discard(g)
    order = [keep] + sorted(alive - {keep})
    new_index = {g: i + 1 for i, g in enumerate(order)}

    def renumber(word):
        return [new_index[abs(x)] * (1 if x > 0 else -1) for x in word]

    return KnotPresentation(len(order), [renumber(r) for r in relators], renumber(meridian),
                            renumber(longitude), label=pres.label)


def _cyclic_key(word):
    if not word:
        return ()
    variants = []
    for w in (word, invert(word)):
        for s in range(len(w)):
            variants.append(tuple(w[s:] + w[:s]))
    return min(variants)


# ---------------------------------------------------------------------------
# Braid closures
# ---------------------------------------------------------------------------

def parse_braid(text):
    """Wirtinger presentation of a braid closure, Tietze-reduced.

    Lowercase letter k (a=1) is sigma_k, uppercase its inverse; sigma_k lets
    the strand at position k cross over the strand at position k+1. The
    closure must be a knot.
    """
    letters = text.strip()
    if letters.startswith("braid:"):
        letters = letters[len("braid:"):]
    if not letters:
        raise EmptyWord("empty braid word")
    if not letters.isalpha():
        raise KnotInputError(f"braid words use letters only, got {text!r}")
    word = [(ord(c.lower()) - 96) * (1 if c.islower() else -1) for c in letters]
    n = max(abs(s) for s in word) + 1

    # permutation: where the strand starting at each top position ends
    pos_of = list(range(n))
    for s in word:
        i = abs(s) - 1
        for k in range(n):
            if pos_of[k] == i:
                pos_of[k] = i + 1
            elif pos_of[k] == i + 1:
                pos_of[k] = i
    seen, cur = set(), 0
    while cur not in seen:
        seen.add(cur)
        cur = pos_of[cur]
    if len(seen) != n:
        raise MultiComponentLink(f"closure of {letters!r} has more than one component")

    arc_at = list(range(1, n + 1))   # current arc label per position
    next_label = n + 1
    relators = []
    # per crossing: (position of under strand before, over arc, sign)
    crossing_log = []
    for s in word:
        i = abs(s) - 1
        sign = 1 if s > 0 else -1
        left, right = arc_at[i], arc_at[i + 1]
        if sign > 0:
            over, under = left, right
            under_from = i + 1
        else:
            over, under = right, left
            under_from = i
        new = next_label
        next_label += 1
        # x_new = x_over^s x_under x_over^-s
        relators.append([-new] + power([over], sign) + [under] + power([over], -sign))
        crossing_log.append((under_from, over, sign))
        if sign > 0:
            arc_at[i], arc_at[i + 1] = new, left
        else:
            arc_at[i], arc_at[i + 1] = right, new
    for pos in range(n):
        relators.append([arc_at[pos], -(pos + 1)])

    # longitude: follow the strand from the top of position 0
    conjugators = []
    pos = 0
    for _ in range(n):
        for (under_from, over, sign), s in zip(crossing_log, word):
            i = abs(s) - 1
            if pos == under_from:
                conjugators.append(power([over], sign))
            if pos == i:
                pos = i + 1
            elif pos == i + 1:
                pos = i
        if pos == 0:
            break
    lw = []
    for c in reversed(conjugators):
        lw.extend(c)
    total = sum(sum(1 if g > 0 else -1 for g in c) for c in conjugators)
    lw = free_reduce(lw + power([1], -total))

    gens = next_label - 1
    raw = KnotPresentation(gens, relators, [1], lw, label=f"braid:{letters}")
    return tietze_reduce(raw, target=1)


def parse_knot_spec(text):
    """Dispatch 'p/q', 'torus:p,q' or 'braid:<letters>' to a presentation."""
    text = text.strip()
    if text.startswith("torus:"):
        k = parse_torus(text)
        return presentation_torus(k)
    if text.startswith("braid:"):
        return parse_braid(text)
    return presentation_two_bridge(parse_two_bridge(text))


def torus_params(pres):
    """Recognize <x, y | x^p y^-q> as produced by presentation_torus; else None."""
    if pres.generator_count != 2 or len(pres.relators) != 1:
        return None
    rel = list(pres.relators[0])
    p = sum(1 for g in rel if g == 1)
    q = sum(1 for g in rel if g == -2)
    if p + q != len(rel) or rel != power([1], p) + power([2], -q):
        return None
    try:
        return TorusKnotParams(p, q)
    except KnotInputError:
        return None
