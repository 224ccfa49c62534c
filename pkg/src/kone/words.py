"""Canonical enumeration of matrix products and their eigenvector cycles.

Index sequences are enumerated by ascending length and, within a length, by
lexicographic order of the canonical (lexicographically smallest) rotation.
Powers of shorter sequences are skipped, and exactly one representative per
cyclic-rotation class is emitted: the eigenvector cycles of all rotations of
a product coincide as ray sets, so one representative carries the whole class.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as _cartesian

import numpy as np

from .linalg import DEFAULT_TOL, Tolerances, leading_eigenpair

__all__ = [
    "Word",
    "CyclicRoot",
    "NoPerronInProduct",
    "NonSimpleRoot",
    "ZeroCycle",
    "enumerate_words",
    "canonical_rotation",
    "is_primitive",
    "product_of_word",
    "cyclic_root",
]


class NoPerronInProduct(ValueError):
    """The product has no real nonnegative eigenvalue at its spectral radius."""

    def __init__(self, letters):
        super().__init__(f"product {letters} has no leading nonnegative eigenvalue")
        self.letters = tuple(letters)


class NonSimpleRoot(ValueError):
    """The product's leading eigenvector is not unique up to scaling."""

    def __init__(self, letters):
        super().__init__(f"product {letters} has a non-simple leading eigenvector")
        self.letters = tuple(letters)


class ZeroCycle(ValueError):
    """A singular factor annihilated the eigenvector chain."""

    def __init__(self, letters, position):
        super().__init__(f"cycle of {letters} vanishes at position {position}")
        self.letters = tuple(letters)
        self.position = position


@dataclass(frozen=True)
class Word:
    """Primitive index sequence, stored as the canonical rotation.

    ``letters`` are 1-based matrix indices in application order: the product
    applies letters[0] first, so the printed factor string reads right to left.
    """

    letters: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.letters:
            raise ValueError("a word needs at least one letter")

    def __len__(self) -> int:
        return len(self.letters)

    def factor_string(self) -> str:
        """Product notation with the last-applied factor on the left, e.g. "A2^2 A1"."""
        parts = []
        for letter in reversed(self.letters):
            if parts and parts[-1][0] == letter:
                parts[-1][1] += 1
            else:
                parts.append([letter, 1])
        return " ".join(
            f"A{l}^{k}" if k > 1 else f"A{l}" for l, k in parts
        )

    def __str__(self) -> str:
        return self.factor_string()


@dataclass(frozen=True)
class CyclicRoot:
    """Eigenvector cycle of a product: v_1 leads the product, and each letter
    maps one cycle element to the next (as rays)."""

    word: Word
    vectors: np.ndarray  # (len(word), dim) unit rows
    eigenvalue: float

    def __post_init__(self) -> None:
        v = np.ascontiguousarray(self.vectors, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)


def is_primitive(letters: tuple[int, ...]) -> bool:
    """True when the sequence is not a repetition of a shorter one."""
    n = len(letters)
    for p in range(1, n):
        if n % p == 0 and letters == letters[p:] + letters[:p]:
            return False
    return True


def canonical_rotation(letters: tuple[int, ...]) -> tuple[int, ...]:
    n = len(letters)
    return min(letters[i:] + letters[:i] for i in range(n))


def _is_canonical(letters: tuple[int, ...]) -> bool:
    return letters == canonical_rotation(letters) and is_primitive(letters)


_WORDS: dict[int, list[tuple[int, ...]]] = {}
_NEXT_LENGTH: dict[int, int] = {}


def enumerate_words(m: int, index: int) -> Word | None:
    """The index-th canonical word over an m-letter alphabet (1-based index).

    Returns None once the supply is exhausted, which only happens for m = 1
    (every longer sequence is a power of the single letter).
    """
    if m < 1 or index < 1:
        raise ValueError("need m >= 1 and index >= 1")
    if m == 1:
        return Word((1,)) if index == 1 else None
    cache = _WORDS.setdefault(m, [])
    length = _NEXT_LENGTH.get(m, 1)
    while len(cache) < index:
        for letters in _cartesian(range(1, m + 1), repeat=length):
            if _is_canonical(letters):
                cache.append(letters)
        length += 1
    _NEXT_LENGTH[m] = length
    return Word(cache[index - 1])


def product_of_word(letters, matrices) -> np.ndarray:
    """Product of the family matrices along the word, first letter applied first."""
    d = matrices[0].shape[0]
    M = np.eye(d)
    for letter in letters:
        M = matrices[letter - 1] @ M
    return M


def cyclic_root(word: Word, matrices, tol: Tolerances = DEFAULT_TOL) -> CyclicRoot:
    """Eigenvector cycle of the word's product.

    The first vector is the unit leading eigenvector of the product (sign
    provisional); the rest are its successive images under the word letters,
    renormalized.  Raises NoPerronInProduct / NonSimpleRoot / ZeroCycle when
    the cycle cannot be formed.
    """
    letters = word.letters
    Pi = product_of_word(letters, matrices)
    pd = leading_eigenpair(Pi, tol)
    if pd is None:
        raise NoPerronInProduct(letters)
    if not pd.geometric_simple:
        raise NonSimpleRoot(letters)
    d = Pi.shape[0]
    chain = np.empty((len(letters), d))
    chain[0] = pd.right_vector
    for j in range(len(letters) - 1):
        w = matrices[letters[j] - 1] @ chain[j]
        nw = float(np.linalg.norm(w))
        if nw < 1e-300:
            raise ZeroCycle(letters, j + 1)
        chain[j + 1] = w / nw
    return CyclicRoot(word=word, vectors=chain, eigenvalue=pd.eigenvalue)
