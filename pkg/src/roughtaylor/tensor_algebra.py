"""Truncated tensor algebra over R^d.

Elements live in R + R^d + (R^d)^x2 + ... + (R^d)^xN.  Each level is stored
as a dense, row-major coefficient block; the coefficient of the word
(i_1, ..., i_k) sits at the mixed-radix offset with i_1 as the most
significant base-d digit.  Norms are per-level l1 sums, which are
submultiplicative under the graded product.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

__all__ = [
    "Word",
    "TruncatedTensor",
    "TensorNorm",
    "tensor_mul",
    "tensor_add",
    "tensor_scale",
    "tensor_norm",
    "group_inverse",
    "word_index",
    "words_of_length",
]


def word_index(letters: Sequence[int], dim: int) -> int:
    """Offset of a word inside its dense level block (letters are 1-based)."""
    idx = 0
    for letter in letters:
        if not 1 <= letter <= dim:
            raise ValueError(f"letter {letter} outside alphabet 1..{dim}")
        idx = idx * dim + (letter - 1)
    return idx


def words_of_length(dim: int, length: int) -> Iterator[tuple[int, ...]]:
    """All words of a given length over {1..dim}, in block-offset order."""
    return itertools.product(range(1, dim + 1), repeat=length)


@dataclass(frozen=True)
class Word:
    """A multi-index (i_1, ..., i_k) of letters in {1..d}.

    Indexes one iterated integral and one composition of first-order
    differential operators.  Letter i_1 corresponds to the earliest
    integration time.
    """

    letters: tuple[int, ...]

    def __post_init__(self) -> None:
        letters = tuple(int(i) for i in self.letters)
        if len(letters) == 0:
            raise ValueError("word must be non-empty for coefficient indexing")
        if any(i < 1 for i in letters):
            raise ValueError("letters must be positive integers")
        object.__setattr__(self, "letters", letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def index(self, dim: int) -> int:
        return word_index(self.letters, dim)


class TensorNorm(NamedTuple):
    per_level: np.ndarray  # shape (N+1,), l1 norm of each level block
    total: float


@dataclass(frozen=True)
class TruncatedTensor:
    """Element of the degree-N truncated tensor algebra over R^d.

    ``levels[k]`` is a flat float64 array of d**k coefficients; level 0 is a
    length-1 array.  Instances are immutable and safe to share across
    threads.
    """

    dim: int
    degree: int
    levels: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        if self.degree < 0:
            raise ValueError("degree must be non-negative")
        if len(self.levels) != self.degree + 1:
            raise ValueError(
                f"expected {self.degree + 1} levels, got {len(self.levels)}"
            )
        frozen = []
        for k, block in enumerate(self.levels):
            arr = np.ascontiguousarray(block, dtype=float).reshape(-1)
            if arr.size != self.dim**k:
                raise ValueError(
                    f"level {k} has {arr.size} coefficients, expected {self.dim ** k}"
                )
            arr.flags.writeable = False
            frozen.append(arr)
        object.__setattr__(self, "levels", tuple(frozen))

    @classmethod
    def identity(cls, dim: int, degree: int) -> "TruncatedTensor":
        levels = [np.zeros(dim**k) for k in range(degree + 1)]
        levels[0][0] = 1.0
        return cls(dim, degree, tuple(levels))

    @classmethod
    def zero(cls, dim: int, degree: int) -> "TruncatedTensor":
        return cls(dim, degree, tuple(np.zeros(dim**k) for k in range(degree + 1)))

    @property
    def scalar(self) -> float:
        return float(self.levels[0][0])

    def level(self, k: int) -> np.ndarray:
        return self.levels[k]

    def coeff(self, word: Word | Sequence[int]) -> float:
        letters = word.letters if isinstance(word, Word) else tuple(word)
        k = len(letters)
        if k > self.degree:
            raise ValueError(f"word length {k} exceeds degree {self.degree}")
        return float(self.levels[k][word_index(letters, self.dim)])

    def is_close(self, other: "TruncatedTensor", tol: float = 1e-12) -> bool:
        _check_compatible(self, other)
        return all(
            np.allclose(a, b, rtol=0.0, atol=tol)
            for a, b in zip(self.levels, other.levels)
        )


def _check_compatible(a: TruncatedTensor, b: TruncatedTensor) -> None:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.degree != b.degree:
        raise ValueError(f"degree mismatch: {a.degree} vs {b.degree}")


def tensor_mul(a: TruncatedTensor, b: TruncatedTensor) -> TruncatedTensor:
    """Graded product: level k of a*b is sum_j a^j (x) b^(k-j), truncated."""
    _check_compatible(a, b)
    levels = []
    for k in range(a.degree + 1):
        block = np.zeros(a.dim**k)
        for j in range(k + 1):
            block += np.kron(a.levels[j], b.levels[k - j])
        levels.append(block)
    return TruncatedTensor(a.dim, a.degree, tuple(levels))


def tensor_add(a: TruncatedTensor, b: TruncatedTensor) -> TruncatedTensor:
    _check_compatible(a, b)
    return TruncatedTensor(
        a.dim, a.degree, tuple(x + y for x, y in zip(a.levels, b.levels))
    )


def tensor_scale(a: TruncatedTensor, c: float) -> TruncatedTensor:
    return TruncatedTensor(a.dim, a.degree, tuple(c * x for x in a.levels))


def tensor_norm(a: TruncatedTensor) -> TensorNorm:
    """Per-level l1 norms and their sum (submultiplicative under tensor_mul)."""
    per_level = np.array([float(np.abs(block).sum()) for block in a.levels])
    return TensorNorm(per_level, float(per_level.sum()))


def group_inverse(a: TruncatedTensor) -> TruncatedTensor:
    """Inverse of a tensor with unit scalar part.

    Writing a = 1 + x with x strictly graded, the inverse is the Neumann sum
    sum_i (-x)^i, which terminates at the truncation degree.
    """
    if abs(a.scalar - 1.0) > 1e-12:
        raise ValueError(
            f"level-0 coefficient is {a.scalar!r}; only tensors normalized to 1 invert"
        )
    neg_x_levels = [-block for block in a.levels]
    neg_x_levels[0] = np.zeros(1)
    neg_x = TruncatedTensor(a.dim, a.degree, tuple(neg_x_levels))
    result = TruncatedTensor.identity(a.dim, a.degree)
    power = TruncatedTensor.identity(a.dim, a.degree)
    for _ in range(a.degree):
        power = tensor_mul(power, neg_x)
        result = tensor_add(result, power)
    return result
