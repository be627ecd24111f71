"""Exact word and automorphism calculus for finite-rank free groups.

Words are stored as tuples of nonzero signed generator indices: +i is the
i-th generator, -i its inverse (1-based, i <= rank).  Multiplication is
concatenation-in-time-order, so the word ``a then b`` is (1, 2) and prints
as "ab".  The text encoding uses lower case for generators and upper case
for inverses ("abAB" = a b a^-1 b^-1).

Automorphisms always carry their inverses: the public constructors either
receive the inverse explicitly, verify it, or build the automorphism as a
product of elementary Nielsen moves whose inverses are closed form.
"""

from __future__ import annotations

import os
from itertools import count
from typing import Iterable, Optional, Sequence

from .errors import (
    IndexOutOfRange,
    NotUnimodular,
    RankMismatch,
    WordLengthExceeded,
)

_ALPHABET = "abcdefghijklmnopqrstuvwxyz"

DEFAULT_LENGTH_CAP = int(os.environ.get("TORUSMCG_WORD_CAP", 10**6))


def _check_letters(letters: Iterable[int], rank: int) -> None:
    for x in letters:
        if x == 0 or abs(x) > rank:
            raise IndexOutOfRange(f"letter {x} outside rank {rank}")


def free_reduce(letters: Sequence[int], cap: int = DEFAULT_LENGTH_CAP):
    """Freely reduce a letter sequence with a single stack pass."""
    if len(letters) > cap:
        raise WordLengthExceeded(f"{len(letters)} letters exceeds cap {cap}")
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


class FreeWord:
    """A freely reduced word in a free group of the given rank."""

    __slots__ = ("rank", "letters")

    def __init__(self, rank: int, letters: Iterable[int] = (), *, _reduced: bool = False):
        if rank < 1:
            raise IndexOutOfRange("rank must be positive")
        letters = tuple(letters)
        _check_letters(letters, rank)
        if not _reduced:
            letters = free_reduce(letters)
        self.rank = rank
        self.letters = letters

    # -- constructors -------------------------------------------------

    @classmethod
    def from_text(cls, rank: int, text: str) -> "FreeWord":
        letters = []
        for ch in text:
            if ch in " \t*.":
                continue
            low = ch.lower()
            if low not in _ALPHABET or _ALPHABET.index(low) >= rank:
                raise IndexOutOfRange(f"letter {ch!r} outside rank {rank}")
            idx = _ALPHABET.index(low) + 1
            letters.append(idx if ch.islower() else -idx)
        return cls(rank, letters)

    @classmethod
    def generator(cls, rank: int, i: int) -> "FreeWord":
        return cls(rank, (i,), _reduced=True)

    @classmethod
    def identity(cls, rank: int) -> "FreeWord":
        return cls(rank, (), _reduced=True)

    # -- basic structure ----------------------------------------------

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FreeWord)
            and self.rank == other.rank
            and self.letters == other.letters
        )

    def __hash__(self) -> int:
        return hash((self.rank, self.letters))

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __repr__(self) -> str:
        return f"FreeWord({self.rank}, {self.text()!r})"

    def text(self) -> str:
        if not self.letters:
            return "1"
        return "".join(
            _ALPHABET[abs(x) - 1] if x > 0 else _ALPHABET[abs(x) - 1].upper()
            for x in self.letters
        )

    # -- group operations ----------------------------------------------

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        if self.rank != other.rank:
            raise RankMismatch(f"rank {self.rank} vs {other.rank}")
        return FreeWord(self.rank, free_reduce(self.letters + other.letters), _reduced=True)

    def inverse(self) -> "FreeWord":
        return FreeWord(self.rank, tuple(-x for x in reversed(self.letters)), _reduced=True)

    def conjugate_by(self, x: "FreeWord") -> "FreeWord":
        """x * self * x^-1."""
        return x * self * x.inverse()

    def power(self, n: int) -> "FreeWord":
        base = self if n >= 0 else self.inverse()
        out = FreeWord.identity(self.rank)
        for _ in range(abs(n)):
            out = out * base
        return out

    # -- cyclic structure ----------------------------------------------

    def cyclic_reduce(self) -> tuple["FreeWord", "FreeWord"]:
        """Return (core, x) with self = x * core * x^-1 and core cyclically reduced."""
        letters = list(self.letters)
        pre: list[int] = []
        while len(letters) >= 2 and letters[0] == -letters[-1]:
            pre.append(letters[0])
            letters = letters[1:-1]
        return (
            FreeWord(self.rank, tuple(letters), _reduced=True),
            FreeWord(self.rank, tuple(pre), _reduced=True),
        )

    def cyclic_word(self) -> tuple[int, ...]:
        """Canonical representative of the oriented conjugacy class.

        Lexicographically least rotation of the cyclically reduced core,
        ordering letters by their integer value.
        """
        core = self.cyclic_reduce()[0].letters
        if not core:
            return ()
        return min(core[i:] + core[:i] for i in range(len(core)))

    def cyclic_word_unoriented(self) -> tuple[int, ...]:
        """Canonical form of the conjugacy class of {self, self^-1}."""
        fwd = self.cyclic_word()
        bwd = self.inverse().cyclic_word()
        return min(fwd, bwd)

    def exponent_sums(self) -> tuple[int, ...]:
        sums = [0] * self.rank
        for x in self.letters:
            sums[abs(x) - 1] += 1 if x > 0 else -1
        return tuple(sums)


def reduce_word(rank: int, letters: Iterable[int]) -> FreeWord:
    """Freely reduce a raw letter sequence into a FreeWord."""
    return FreeWord(rank, letters)


def conjugate_in_free(u: FreeWord, v: FreeWord) -> Optional[FreeWord]:
    """If u and v are conjugate, return x with x*u*x^-1 == v, else None."""
    if u.rank != v.rank:
        raise RankMismatch(f"rank {u.rank} vs {v.rank}")
    cu, pu = u.cyclic_reduce()
    cv, pv = v.cyclic_reduce()
    if len(cu) != len(cv):
        return None
    if not cu.letters:
        return FreeWord.identity(u.rank)
    n = len(cu)
    doubled = cu.letters + cu.letters
    for i in range(n):
        if doubled[i : i + n] == cv.letters:
            # cv = r * cu * r^-1 with r = (first i letters of cu)^-1
            rot = FreeWord(u.rank, cu.letters[:i], _reduced=True).inverse()
            x = pv * rot * pu.inverse()
            assert x * u * x.inverse() == v
            return x
    return None


# ---------------------------------------------------------------------------
# integer matrices (abelianizations)
# ---------------------------------------------------------------------------


def mat_mul(A, B):
    n = len(A)
    return tuple(
        tuple(sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def mat_det(A) -> int:
    """Determinant of a small integer matrix by cofactor expansion."""
    n = len(A)
    if n == 1:
        return A[0][0]
    if n == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    det = 0
    for j in range(n):
        if A[0][j] == 0:
            continue
        minor = tuple(
            tuple(A[i][k] for k in range(n) if k != j) for i in range(1, n)
        )
        det += (-1) ** j * A[0][j] * mat_det(minor)
    return det


def identity_matrix(n: int):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


class FreeAutomorphism:
    """An automorphism of a free group, stored together with its inverse.

    ``images[i]`` is the image of generator i+1.  Application substitutes
    images letterwise with streaming free reduction; composition composes
    the stored inverses in the opposite order, so every automorphism built
    from verified pieces keeps a correct inverse without re-solving.
    """

    __slots__ = ("rank", "images", "inverse_images")

    def __init__(
        self,
        rank: int,
        images: Sequence[FreeWord],
        inverse_images: Sequence[FreeWord],
        *,
        verify: bool = True,
    ):
        if len(images) != rank or len(inverse_images) != rank:
            raise RankMismatch("need exactly rank images and inverse images")
        for w in tuple(images) + tuple(inverse_images):
            if w.rank != rank:
                raise RankMismatch("image rank mismatch")
        self.rank = rank
        self.images = tuple(images)
        self.inverse_images = tuple(inverse_images)
        if verify:
            self._verify()

    def _verify(self) -> None:
        for i in range(1, self.rank + 1):
            g = FreeWord.generator(self.rank, i)
            if self.apply(self.apply_inverse(g)) != g or self.apply_inverse(self.apply(g)) != g:
                raise NotUnimodular(
                    f"images and inverse_images are not two-sided inverses at generator {i}"
                )
        if abs(mat_det(self.abelianization())) != 1:
            raise NotUnimodular("abelianization determinant is not +-1")

    # -- constructors ---------------------------------------------------

    @classmethod
    def identity(cls, rank: int) -> "FreeAutomorphism":
        gens = [FreeWord.generator(rank, i) for i in range(1, rank + 1)]
        return cls(rank, gens, gens, verify=False)

    @classmethod
    def from_images(
        cls, rank: int, images: Sequence[FreeWord], inverse_images: Sequence[FreeWord]
    ) -> "FreeAutomorphism":
        return cls(rank, images, inverse_images, verify=True)

    @classmethod
    def from_text(cls, rank: int, images: Sequence[str], inverse_images: Sequence[str]):
        return cls.from_images(
            rank,
            [FreeWord.from_text(rank, t) for t in images],
            [FreeWord.from_text(rank, t) for t in inverse_images],
        )

    # -- application ----------------------------------------------------

    def _apply_table(self, word: FreeWord, table: Sequence[FreeWord]) -> FreeWord:
        out: list[int] = []
        for x in word.letters:
            img = table[abs(x) - 1].letters
            if x < 0:
                img = tuple(-y for y in reversed(img))
            for y in img:
                if out and out[-1] == -y:
                    out.pop()
                else:
                    out.append(y)
            if len(out) > DEFAULT_LENGTH_CAP:
                raise WordLengthExceeded(f"image exceeded cap {DEFAULT_LENGTH_CAP}")
        return FreeWord(self.rank, tuple(out), _reduced=True)

    def apply(self, word: FreeWord) -> FreeWord:
        if word.rank != self.rank:
            raise RankMismatch(f"rank {word.rank} vs {self.rank}")
        return self._apply_table(word, self.images)

    def apply_inverse(self, word: FreeWord) -> FreeWord:
        if word.rank != self.rank:
            raise RankMismatch(f"rank {word.rank} vs {self.rank}")
        return self._apply_table(word, self.inverse_images)

    def __call__(self, word: FreeWord) -> FreeWord:
        return self.apply(word)

    # -- algebra ----------------------------------------------------------

    def compose(self, other: "FreeAutomorphism") -> "FreeAutomorphism":
        """self after other: (self.compose(other))(w) == self(other(w))."""
        if self.rank != other.rank:
            raise RankMismatch(f"rank {self.rank} vs {other.rank}")
        images = [self.apply(w) for w in other.images]
        inv = [other.apply_inverse(w) for w in self.inverse_images]
        return FreeAutomorphism(self.rank, images, inv, verify=False)

    def inverse(self) -> "FreeAutomorphism":
        return FreeAutomorphism(self.rank, self.inverse_images, self.images, verify=False)

    def power(self, n: int) -> "FreeAutomorphism":
        base = self if n >= 0 else self.inverse()
        out = FreeAutomorphism.identity(self.rank)
        for _ in range(abs(n)):
            out = base.compose(out)
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FreeAutomorphism)
            and self.rank == other.rank
            and self.images == other.images
        )

    def __hash__(self) -> int:
        return hash((self.rank, self.images))

    def __repr__(self) -> str:
        imgs = ", ".join(w.text() for w in self.images)
        return f"FreeAutomorphism({self.rank}; {imgs})"

    def abelianization(self):
        """Integer matrix whose column i is the exponent vector of images[i]."""
        cols = [w.exponent_sums() for w in self.images]
        return tuple(
            tuple(cols[j][i] for j in range(self.rank)) for i in range(self.rank)
        )

    def is_inner(self, max_conj_len: Optional[int] = None) -> Optional[FreeWord]:
        """Return c with self == conjugation-by-c, or None.

        If self = i_c then self(g) = c g c^-1 for every generator, so the
        cyclic reduction of self(g) must be g itself and all the stripped
        conjugators must agree up to the centralizer <g>.
        """
        candidates: Optional[set[FreeWord]] = None
        for i in range(1, self.rank + 1):
            g = FreeWord.generator(self.rank, i)
            img = self.apply(g)
            core, pre = img.cyclic_reduce()
            if core.letters != (i,):
                return None
            # img = pre * g * pre^-1; any valid c is pre * g^k
            local = set()
            for k in range(-len(img) - 2, len(img) + 3):
                local.add(pre * g.power(k))
            candidates = local if candidates is None else candidates & local
            if not candidates:
                return None
        assert candidates
        c = min(candidates, key=lambda w: (len(w), w.letters))
        for i in range(1, self.rank + 1):
            g = FreeWord.generator(self.rank, i)
            if self.apply(g) != g.conjugate_by(c):
                return None
        return c


# ---------------------------------------------------------------------------
# Peripheral structure
# ---------------------------------------------------------------------------


class PeripheralStructure:
    """Labelled peripheral conjugacy classes of a punctured-surface group."""

    __slots__ = ("rank", "classes")

    def __init__(self, rank: int, classes: dict[str, FreeWord]):
        from .errors import NotALoop

        self.rank = rank
        for label, w in classes.items():
            if w.rank != rank:
                raise RankMismatch(f"peripheral class {label} has wrong rank")
            if not w.cyclic_reduce()[0].letters:
                raise NotALoop(f"peripheral class {label} must be nontrivial")
        self.classes = dict(classes)

    def labels(self) -> tuple[str, ...]:
        return tuple(self.classes)

    def word(self, label: str) -> FreeWord:
        return self.classes[label]

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}: {w.text()}" for k, w in self.classes.items())
        return f"PeripheralStructure({inner})"


# ---------------------------------------------------------------------------
# Elementary Nielsen automorphisms (used for construction and random tests)
# ---------------------------------------------------------------------------


def nielsen_right_multiply(rank: int, i: int, j: int, sign: int = 1) -> FreeAutomorphism:
    """g_i -> g_i * g_j^sign, other generators fixed (i != j)."""
    assert i != j and sign in (1, -1)
    images = [FreeWord.generator(rank, k) for k in range(1, rank + 1)]
    invs = list(images)
    gi, gj = images[i - 1], images[j - 1]
    images[i - 1] = gi * gj.power(sign)
    invs[i - 1] = gi * gj.power(-sign)
    return FreeAutomorphism(rank, images, invs, verify=False)


def nielsen_invert(rank: int, i: int) -> FreeAutomorphism:
    images = [FreeWord.generator(rank, k) for k in range(1, rank + 1)]
    images[i - 1] = images[i - 1].inverse()
    return FreeAutomorphism(rank, images, images, verify=False)


def nielsen_swap(rank: int, i: int, j: int) -> FreeAutomorphism:
    images = [FreeWord.generator(rank, k) for k in range(1, rank + 1)]
    images[i - 1], images[j - 1] = images[j - 1], images[i - 1]
    return FreeAutomorphism(rank, images, images, verify=False)


def random_nielsen_automorphism(rank: int, length: int, rng) -> FreeAutomorphism:
    """Random product of elementary Nielsen moves (for property tests)."""
    out = FreeAutomorphism.identity(rank)
    for _ in range(length):
        kind = rng.randrange(3)
        i = rng.randrange(1, rank + 1)
        j = rng.randrange(1, rank + 1)
        if kind == 0 and i != j:
            move = nielsen_right_multiply(rank, i, j, rng.choice((1, -1)))
        elif kind == 1:
            move = nielsen_invert(rank, i)
        elif kind == 2 and i != j:
            move = nielsen_swap(rank, i, j)
        else:
            continue
        out = move.compose(out)
    return out
