"""Integer-matrix dynamics on the square torus R^2 / Z^2.

Fixed points of M^k are found exactly: M^k x = x + (m, n) is solved over
the rationals for every integer vector (m, n) that lands in the unit
square, which is the complete list because M^k - I is invertible.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable

from .errors import DegenerateFixedSet, NotUnimodular

Matrix2 = tuple[tuple[int, int], tuple[int, int]]

IDENTITY2: Matrix2 = ((1, 0), (0, 1))
# the linear map whose punctured-torus restriction is the figure-eight fiber
# monodromy
L_MATRIX: Matrix2 = ((2, 1), (1, 1))


class TorusMatrix:
    """A 2x2 integer matrix of determinant +-1."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        e = tuple(tuple(int(x) for x in row) for row in entries)
        if len(e) != 2 or any(len(r) != 2 for r in e):
            raise NotUnimodular("need a 2x2 matrix")
        if abs(e[0][0] * e[1][1] - e[0][1] * e[1][0]) != 1:
            raise NotUnimodular(f"determinant of {e} is not +-1")
        self.entries = e

    @classmethod
    def from_flat(cls, flat: Iterable[int]) -> "TorusMatrix":
        a, b, c, d = [int(x) for x in flat]
        return cls(((a, b), (c, d)))

    def det(self) -> int:
        e = self.entries
        return e[0][0] * e[1][1] - e[0][1] * e[1][0]

    def trace(self) -> int:
        return self.entries[0][0] + self.entries[1][1]

    def __mul__(self, other: "TorusMatrix") -> "TorusMatrix":
        a, b = self.entries, other.entries
        return TorusMatrix(
            (
                (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
                (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
            )
        )

    def inverse(self) -> "TorusMatrix":
        ((a, b), (c, d)) = self.entries
        det = self.det()
        return TorusMatrix(((d * det, -b * det), (-c * det, a * det)))

    def power(self, k: int) -> "TorusMatrix":
        out = TorusMatrix(IDENTITY2)
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            out = out * base
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, TorusMatrix) and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        return f"TorusMatrix({self.entries})"

    def apply(self, v):
        ((a, b), (c, d)) = self.entries
        x, y = v
        return (a * x + b * y, c * x + d * y)


L = TorusMatrix(L_MATRIX)


class TorusPoint:
    """A point of R^2 / Z^2 with exact rational coordinates in [0, 1)."""

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        self.x = Fraction(x) % 1
        self.y = Fraction(y) % 1

    def __eq__(self, other) -> bool:
        return isinstance(other, TorusPoint) and self.x == other.x and self.y == other.y

    def __hash__(self) -> int:
        return hash((self.x, self.y))

    def __repr__(self) -> str:
        return f"TorusPoint({self.x}, {self.y})"

    def text(self) -> str:
        return f"({self.x}, {self.y})"

    def sort_key(self):
        return (self.x, self.y)


def is_anosov(M: TorusMatrix) -> bool:
    """True iff M has no eigenvalue on the unit circle."""
    t, d = M.trace(), M.det()
    if d == 1:
        return abs(t) > 2
    # det -1: real eigenvalues of product -1; off the circle iff trace != 0
    return t != 0


def fixed_points(M: TorusMatrix, k: int) -> list[TorusPoint]:
    """All x with M^k x = x on the torus, exactly.

    Solving (M^k - I) x = (m, n) over Q and ranging (m, n) over the integer
    vectors whose solution lies in [0,1)^2 enumerates every fixed point;
    their number is |det(M^k - I)|.
    """
    if k < 1:
        raise ValueError("power must be positive")
    P = M.power(k).entries
    a, b = P[0][0] - 1, P[0][1]
    c, d = P[1][0], P[1][1] - 1
    det = a * d - b * c
    if det == 0:
        raise DegenerateFixedSet(f"det(M^{k} - I) = 0; fixed set is not finite")
    # x = N^-1 (m, n); (m, n) ranges over N([0,1)^2) cap Z^2
    bound_m = abs(a) + abs(b)
    bound_n = abs(c) + abs(d)
    seen = set()
    out = []
    for m in range(-bound_m, bound_m + 1):
        for n in range(-bound_n, bound_n + 1):
            x = Fraction(d * m - b * n, det)
            y = Fraction(-c * m + a * n, det)
            if 0 <= x < 1 and 0 <= y < 1:
                p = TorusPoint(x, y)
                if p not in seen:
                    seen.add(p)
                    out.append(p)
    if len(out) != abs(det):
        raise DegenerateFixedSet(
            f"enumeration found {len(out)} points, expected |det| = {abs(det)}"
        )
    return sorted(out, key=TorusPoint.sort_key)


class Slope:
    """An isotopy class of essential simple closed curve: coprime (p, q).

    Normalised so q > 0, with the horizontal class stored as (1, 0).
    """

    __slots__ = ("p", "q")

    def __init__(self, p: int, q: int):
        p, q = int(p), int(q)
        if p == 0 and q == 0:
            raise ValueError("slope (0,0) is not a curve")
        g = gcd(abs(p), abs(q))
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        self.p = p
        self.q = q

    @classmethod
    def from_text(cls, text: str) -> "Slope":
        num, _, den = text.partition("/")
        return cls(int(num), int(den) if den else 1)

    def __eq__(self, other) -> bool:
        return isinstance(other, Slope) and self.p == other.p and self.q == other.q

    def __hash__(self) -> int:
        return hash((self.p, self.q))

    def __repr__(self) -> str:
        return f"Slope({self.p}/{self.q})"

    def text(self) -> str:
        return f"{self.p}/{self.q}"


def act_on_slope(M: TorusMatrix, s: Slope) -> Slope:
    p, q = M.apply((s.p, s.q))
    return Slope(p, q)


def intersection_number(s1: Slope, s2: Slope) -> int:
    return abs(s1.p * s2.q - s1.q * s2.p)


def fills(s1: Slope, s2: Slope) -> bool:
    """On the once-punctured torus two simple closed curves fill iff distinct.

    Minimal-position representatives of distinct slopes cut the torus into
    disks, and the puncture turns exactly one of them into a once-punctured
    disk; equal slopes have an essential annulus in the complement.
    """
    return s1 != s2


def all_slopes(bound: int) -> list[Slope]:
    """Every slope with |p|, |q| <= bound, each class once."""
    out = set()
    for p in range(-bound, bound + 1):
        for q in range(-bound, bound + 1):
            if p == 0 and q == 0:
                continue
            out.add(Slope(p, q))
    return sorted(out, key=lambda s: (s.q, s.p))
