"""Exact PL curve calculus on the square torus.

Loops on punctured tori are represented by their lifts: lists of rational
points in R^2 (a loop based at v lifts to a path from v to v + (m, n)).
Words in pi_1 are read off as crossing sequences against a wall system
whose complement is a disk:

  * the vertical circles  {x in Z}           -> letter 1 ("a")
  * the horizontal circles {y in Z}          -> letter 2 ("b")
  * one straight slit from 0 to each tracked
    puncture (and all its Z^2 translates)    -> letters 3, 4, ... (puncture loops)

Every wall endpoint is a puncture, so the crossing word of a based loop
is exactly its class in the free group on the dual generators, with
concatenation in time order.

Dehn twists along straight lines are performed by exact surgery: each
transverse crossing of the twisting line inserts one straight period of
the line, with the rest of the lift translated accordingly.  Point pushes
are differences of twists along the two parallels of the pushed line.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, floor, gcd
from typing import Iterable, Sequence

from .errors import InternalInvariantError
from .words import FreeWord

Point = tuple[Fraction, Fraction]


def P(x, y) -> Point:
    return (Fraction(x), Fraction(y))


# punctures and basepoint (the basepoint is the second period-two point of
# the squared monodromy, which the linear dynamics fix)
ZERO: Point = P(0, 0)
Z_PUNCT: Point = P("1/5", "2/5")
W_PUNCT: Point = P("4/5", "3/5")
STAR: Point = P("2/5", "4/5")

SQUARE_RADIUS = Fraction(1, 100)
# offset of the push parallels, chosen off the 1/10 grid of the punctures
# so that twist-line crossings never land on walls
PUSH_OFFSET = Fraction(3, 32)


def cross(u: Point, v: Point) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def sub(u: Point, v: Point) -> Point:
    return (u[0] - v[0], u[1] - v[1])


def add(u: Point, v: Point) -> Point:
    return (u[0] + v[0], u[1] + v[1])


def scale(u: Point, t) -> Point:
    return (u[0] * t, u[1] * t)


class Wall:
    """One periodic wall family; produces (t, letter) crossings per segment."""

    def crossings(self, p0: Point, p1: Point):
        raise NotImplementedError

    def contains(self, pt: Point) -> bool:
        raise NotImplementedError


class GridWall(Wall):
    """The family {x in Z} (axis=0) or {y in Z} (axis=1)."""

    def __init__(self, axis: int, letter: int):
        self.axis = axis
        self.letter = letter

    def crossings(self, p0, p1):
        a0, a1 = p0[self.axis], p1[self.axis]
        if a0 == a1:
            return
        lo, hi = (a0, a1) if a0 < a1 else (a1, a0)
        sign = 1 if a1 > a0 else -1
        k = floor(lo) + 1
        while k <= ceil(hi) - 1:
            if Fraction(k) == lo or Fraction(k) == hi:
                raise InternalInvariantError("segment endpoint on a grid wall")
            t = (Fraction(k) - a0) / (a1 - a0)
            yield (t, sign * self.letter)
            k += 1

    def contains(self, pt):
        return pt[self.axis].denominator == 1


class SlitWall(Wall):
    """Translates of the open segment from (0,0) to `tip` (a puncture).

    The crossing sign is sign(cross(segment direction, slit direction)),
    which makes the counterclockwise loop around the puncture positive.
    """

    def __init__(self, tip: Point, letter: int):
        self.tip = tip
        self.letter = letter

    def crossings(self, p0, p1):
        d = sub(p1, p0)
        v = self.tip
        det = -cross(d, v)
        if det == 0:
            # parallel; a collinear overlap would be a degenerate curve
            if cross(sub(p0, ZERO), v) != 0:
                return
            raise InternalInvariantError("segment collinear with a slit")
        xs = [p0[0], p1[0]]
        ys = [p0[1], p1[1]]
        m_lo = floor(min(xs) - v[0]) - 1
        m_hi = ceil(max(xs)) + 1
        n_lo = floor(min(ys) - v[1]) - 1
        n_hi = ceil(max(ys)) + 1
        sign = 1 if cross(d, v) > 0 else -1
        for m in range(m_lo, m_hi + 1):
            for n in range(n_lo, n_hi + 1):
                # p0 + t d = (m, n) + s v
                rx = Fraction(m) - p0[0]
                ry = Fraction(n) - p0[1]
                t = (rx * (-v[1]) - ry * (-v[0])) / det
                s = (d[0] * ry - d[1] * rx) / det
                if 0 < s < 1:
                    if t == 0 or t == 1:
                        raise InternalInvariantError("segment endpoint on a slit")
                    if 0 < t < 1:
                        yield (t, sign * self.letter)
                elif (s == 0 or s == 1) and 0 < t < 1:
                    raise InternalInvariantError("segment crosses a slit endpoint")

    def contains(self, pt):
        # on some translate of the open slit segment
        v = self.tip
        for m in (floor(pt[0] - v[0]), ceil(pt[0])):
            for n in (floor(pt[1] - v[1]), ceil(pt[1])):
                r = sub(pt, (Fraction(m), Fraction(n)))
                if cross(r, v) == 0:
                    s = r[0] / v[0] if v[0] else r[1] / v[1]
                    if 0 <= s <= 1:
                        return True
        return False


class Development:
    """A wall system turning crossing sequences into free-group words."""

    def __init__(self, slits: Sequence[Point]):
        self.walls: list[Wall] = [GridWall(0, 1), GridWall(1, 2)]
        for i, tip in enumerate(slits):
            self.walls.append(SlitWall(tip, 3 + i))
        self.rank = 2 + len(slits)

    def on_wall(self, pt: Point) -> bool:
        return any(w.contains(pt) for w in self.walls)

    def word(self, path: Sequence[Point]) -> FreeWord:
        letters: list[int] = []
        for p0, p1 in zip(path, path[1:]):
            if p0 == p1:
                continue
            if self.on_wall(p0) or self.on_wall(p1):
                raise InternalInvariantError("path vertex lies on a wall")
            hits = []
            for w in self.walls:
                hits.extend(w.crossings(p0, p1))
            hits.sort(key=lambda h: h[0])
            for (t0, _), (t1, _) in zip(hits, hits[1:]):
                if t0 == t1:
                    raise InternalInvariantError("simultaneous wall crossings")
            letters.extend(s for _, s in hits)
        return FreeWord(self.rank, letters)


# wall systems used by the toolkit: the thrice-punctured torus, the two
# twice-punctured quotients, and the once-punctured torus (the fiber)
DEV4 = Development([Z_PUNCT, W_PUNCT])  # letters a b zc wc
DEV3Z = Development([Z_PUNCT])  # letters a b zc
DEV3W = Development([W_PUNCT])  # letters a b wc
DEV2 = Development([])  # letters a b


# ---------------------------------------------------------------------------
# loop builders
# ---------------------------------------------------------------------------


def straight_loop(base: Point, direction: tuple[int, int]) -> list[Point]:
    return [base, add(base, (Fraction(direction[0]), Fraction(direction[1])))]


def _square_ccw(center: Point, radius: Fraction) -> list[Point]:
    tr = add(center, (radius, radius))
    tl = add(center, (-radius, radius))
    bl = add(center, (-radius, -radius))
    br = add(center, (radius, -radius))
    return [tr, tl, bl, br, tr]


def puncture_loop(approach: Sequence[Point], center: Point,
                  radius: Fraction = SQUARE_RADIUS) -> list[Point]:
    """approach ends at the square's start corner; returns the based loop."""
    square = _square_ccw(center, radius)
    start = square.index(approach[-1])
    ring = square[start:-1] + square[:start] + [approach[-1]]
    back = list(reversed(approach))
    return list(approach) + ring[1:] + back[1:]


def z_loop(dev_base: Point = STAR, radius: Fraction = SQUARE_RADIUS) -> list[Point]:
    corner = add(Z_PUNCT, (radius, radius))
    return puncture_loop([dev_base, corner], Z_PUNCT, radius)


def w_loop(dev_base: Point = STAR, radius: Fraction = SQUARE_RADIUS) -> list[Point]:
    corner = add(W_PUNCT, (radius, radius))
    return puncture_loop([dev_base, corner], W_PUNCT, radius)


def zero_loop(dev_base: Point = STAR, radius: Fraction = SQUARE_RADIUS) -> list[Point]:
    """Based loop around the 0 puncture, approached from the slit-free side.

    Both slits leave 0 into the first quadrant, so the loop travels to the
    x ~ 1 column and circles the translate of 0 at (1, 0).
    """
    col = Fraction(19, 20)
    corner = add(P(1, 0), (-radius, radius))
    approach = [dev_base, (col, dev_base[1]), (col, radius), corner]
    return puncture_loop(approach, P(1, 0), radius)


def apply_linear(matrix, path: Sequence[Point]) -> list[Point]:
    ((a, b), (c, d)) = matrix
    return [(a * x + b * y, c * x + d * y) for (x, y) in path]


# ---------------------------------------------------------------------------
# twists along straight lines and point pushes
# ---------------------------------------------------------------------------


class TwistLine:
    """The line family {q x - p y in c0 + Z} with primitive direction (p, q)."""

    def __init__(self, p: int, q: int, c0: Fraction):
        g = gcd(abs(p), abs(q))
        assert g == 1
        self.p = p
        self.q = q
        self.c0 = Fraction(c0)

    @classmethod
    def through(cls, point: Point, direction: tuple[int, int], shift=0) -> "TwistLine":
        p, q = direction
        c0 = Fraction(q) * point[0] - Fraction(p) * point[1] + Fraction(shift)
        return cls(p, q, c0)

    def h(self, pt: Point) -> Fraction:
        return Fraction(self.q) * pt[0] - Fraction(self.p) * pt[1]

    def distance_mod1(self, pt: Point) -> Fraction:
        d = (self.h(pt) - self.c0) % 1
        return min(d, 1 - d)


def twist(path: Sequence[Point], line: TwistLine, sign: int) -> list[Point]:
    """Image of the lifted path under the twist about `line`.

    Each transverse crossing inserts one straight period of the line,
    oriented by the crossing sign times `sign`, and translates the rest of
    the lift by the same period.
    """
    assert sign in (1, -1)
    shift = (Fraction(0), Fraction(0))
    out: list[Point] = [add(path[0], shift)]
    period = (Fraction(line.p), Fraction(line.q))
    for p0, p1 in zip(path, path[1:]):
        h0, h1 = line.h(p0) - line.c0, line.h(p1) - line.c0
        if h0 == h1:
            out.append(add(p1, shift))
            continue
        if h0.denominator == 1 or h1.denominator == 1:
            raise InternalInvariantError("path vertex on a twisting line")
        lo, hi = (h0, h1) if h0 < h1 else (h1, h0)
        eps = 1 if h1 > h0 else -1
        ks = range(floor(lo) + 1, ceil(hi))
        ts = sorted((Fraction(k) - h0) / (h1 - h0) for k in ks)
        d = sub(p1, p0)
        for t in ts:
            x = add(p0, scale(d, t))
            step = scale(period, sign * eps)
            out.append(add(x, shift))
            shift = add(shift, step)
            out.append(add(x, shift))
        out.append(add(p1, shift))
    return out


def push_images(
    dev: Development,
    loops: Sequence[Sequence[Point]],
    point: Point,
    direction: tuple[int, int],
    sign: int,
    offset: Fraction = PUSH_OFFSET,
) -> list[FreeWord]:
    """Images of the given based loops under the push of `point` along the
    straight (p, q) loop through it, computed as a twist difference along
    the two parallels of the line."""
    left = TwistLine.through(point, direction, -offset)
    right = TwistLine.through(point, direction, offset)
    for special in (ZERO, Z_PUNCT, W_PUNCT, STAR):
        if special == point:
            continue
        for line in (left, right):
            if line.distance_mod1(special) == 0:
                raise InternalInvariantError("push parallel hits a special point")
        centre = TwistLine.through(point, direction)
        d = centre.distance_mod1(special)
        if d <= offset:
            raise InternalInvariantError("special point inside the push annulus")
    out = []
    for loop in loops:
        pushed = twist(twist(loop, left, sign), right, -sign)
        out.append(dev.word(pushed))
    return out
