"""Polynomial vector fields and Taylor coefficient tables.

Each driving direction i carries a vector field V_i on R^n whose components
are multivariate polynomials, so the first-order operators
V_i f = sum_l V_i^l d f / d x_l compose exactly.  The coefficient attached
to the word (i_1, ..., i_k) is the evaluation at the base point of
V_{i_1}(V_{i_2}(... (V_{i_k} pi^j) ...)): the innermost operator is the
last letter (the latest integration time).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "MultiPoly",
    "PolyVectorField",
    "TaylorTable",
    "apply_field",
    "taylor_coefficients",
    "fit_growth",
]

WORD_COUNT_GUARD = 10**6


class MultiPoly:
    """Sparse multivariate polynomial: exponent tuple -> coefficient."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], float] | None = None):
        if nvars < 1:
            raise ValueError("nvars must be positive")
        self.nvars = nvars
        clean: dict[tuple[int, ...], float] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent tuple {exps} for nvars={nvars}")
            if coeff != 0.0:
                clean[exps] = clean.get(exps, 0.0) + float(coeff)
                if clean[exps] == 0.0:
                    del clean[exps]
        self.terms = clean

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c: float) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "MultiPoly":
        """The coordinate projection x_index (0-based)."""
        exps = [0] * nvars
        exps[index] = 1
        return cls(nvars, {tuple(exps): 1.0})

    def is_zero(self) -> bool:
        return not self.terms

    def diff(self, var: int) -> "MultiPoly":
        out: dict[tuple[int, ...], float] = {}
        for exps, coeff in self.terms.items():
            e = exps[var]
            if e == 0:
                continue
            new = list(exps)
            new[var] = e - 1
            key = tuple(new)
            out[key] = out.get(key, 0.0) + coeff * e
        return MultiPoly(self.nvars, out)

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        if self.nvars != other.nvars:
            raise ValueError("nvars mismatch")
        out = dict(self.terms)
        for exps, coeff in other.terms.items():
            out[exps] = out.get(exps, 0.0) + coeff
        return MultiPoly(self.nvars, out)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return MultiPoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        if self.nvars != other.nvars:
            raise ValueError("nvars mismatch")
        out: dict[tuple[int, ...], float] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                out[key] = out.get(key, 0.0) + c1 * c2
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    def __call__(self, x: Sequence[float]) -> float:
        x = np.asarray(x, dtype=float)
        total = 0.0
        for exps, coeff in self.terms.items():
            term = coeff
            for xi, e in zip(x, exps):
                if e:
                    term *= xi**e
            total += term
        return total

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultiPoly)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        return f"MultiPoly(nvars={self.nvars}, terms={self.terms!r})"

    def to_json_terms(self) -> list[dict]:
        return [
            {"coeff": c, "exponents": list(e)}
            for e, c in sorted(self.terms.items())
        ]

    @classmethod
    def from_json_terms(cls, nvars: int, terms: list[dict]) -> "MultiPoly":
        return cls(nvars, {tuple(t["exponents"]): t["coeff"] for t in terms})


@dataclass
class PolyVectorField:
    """d polynomial vector fields on R^n: components[i][l] is V_{i+1}^{l+1}."""

    d: int
    n: int
    components: list[list[MultiPoly]]
    analyticity_radius: float | None = None

    def __post_init__(self) -> None:
        if len(self.components) != self.d:
            raise ValueError(f"expected {self.d} fields, got {len(self.components)}")
        for row in self.components:
            if len(row) != self.n:
                raise ValueError("each field needs exactly n components")
            for poly in row:
                if poly.nvars != self.n:
                    raise ValueError("component nvars must equal state dimension")
        if self.analyticity_radius is not None and self.analyticity_radius <= 0:
            raise ValueError("analyticity_radius must be positive")

    @classmethod
    def from_linear(cls, matrices: Sequence[np.ndarray], **kwargs) -> "PolyVectorField":
        """Fields x -> A_i x, one matrix per driving direction."""
        matrices = [np.atleast_2d(np.asarray(a, dtype=float)) for a in matrices]
        n = matrices[0].shape[0]
        components = []
        for a in matrices:
            row = []
            for l in range(n):
                terms = {}
                for j in range(n):
                    if a[l, j] != 0.0:
                        exps = [0] * n
                        exps[j] = 1
                        terms[tuple(exps)] = a[l, j]
                row.append(MultiPoly(n, terms))
            components.append(row)
        return cls(d=len(matrices), n=n, components=components, **kwargs)

    def eval_fields(self, x: Sequence[float]) -> np.ndarray:
        """Matrix of field values at x, shape (d, n)."""
        return np.array([[poly(x) for poly in row] for row in self.components])

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "fields": [
                [poly.to_json_terms() for poly in row] for row in self.components
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PolyVectorField":
        n, d = int(doc["n"]), int(doc["d"])
        components = [
            [MultiPoly.from_json_terms(n, comp) for comp in row]
            for row in doc["fields"]
        ]
        return cls(d=d, n=n, components=components)

    @classmethod
    def from_json_file(cls, path: str) -> "PolyVectorField":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def apply_field(components: Sequence[MultiPoly], f: MultiPoly) -> MultiPoly:
    """First-order operator: (V f) = sum_l V^l df/dx_l."""
    if any(poly.nvars != f.nvars for poly in components):
        raise ValueError("nvars mismatch between field and function")
    out = MultiPoly.zero(f.nvars)
    for l, poly in enumerate(components):
        if poly.is_zero():
            continue
        df = f.diff(l)
        if not df.is_zero():
            out = out + poly * df
    return out


@dataclass
class TaylorTable:
    """Taylor coefficients P_I = (V_{i_1} ... V_{i_k} pi)(x0) per word I."""

    x0: np.ndarray
    dim: int  # number of driving directions d
    max_len: int
    coeffs: dict[tuple[int, ...], np.ndarray] = field(default_factory=dict)
    growth_m: float | None = None
    growth_gamma: float | None = None

    @property
    def n(self) -> int:
        return len(self.x0)

    def norm(self, word: tuple[int, ...]) -> float:
        return float(np.linalg.norm(self.coeffs[word]))

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["word", "j", "value"])
            for word in sorted(self.coeffs, key=lambda w: (len(w), w)):
                for j, value in enumerate(self.coeffs[word], start=1):
                    writer.writerow([".".join(map(str, word)), j, f"{value:.17g}"])


def taylor_coefficients(
    fields: PolyVectorField, x0: Sequence[float], max_len: int
) -> TaylorTable:
    """All coefficients P_I for words of length 1..max_len.

    Words extend on the left: the polynomial for I = (i, w) is V_i applied
    to the cached polynomial of the suffix w, so interior work is shared
    across the d^k leaves.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    if fields.d**max_len > WORD_COUNT_GUARD:
        raise ValueError(
            f"d^N = {fields.d ** max_len} exceeds guard {WORD_COUNT_GUARD}"
        )
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if len(x0) != fields.n:
        raise ValueError("x0 dimension must match state dimension")
    table = TaylorTable(x0=x0, dim=fields.d, max_len=max_len)
    # polys[w] = list over coordinates j of the polynomial for word w
    polys: dict[tuple[int, ...], list[MultiPoly]] = {
        (): [MultiPoly.variable(fields.n, j) for j in range(fields.n)]
    }
    for _ in range(max_len):
        nxt: dict[tuple[int, ...], list[MultiPoly]] = {}
        for suffix, plist in polys.items():
            for i in range(1, fields.d + 1):
                word = (i,) + suffix
                row = [apply_field(fields.components[i - 1], p) for p in plist]
                nxt[word] = row
                table.coeffs[word] = np.array([p(x0) for p in row])
        polys = nxt
    return table


def fit_growth(
    table: TaylorTable, gamma_grid: Sequence[float]
) -> tuple[float, float]:
    """Fit the factorial-growth criterion ||P_I|| <= Gamma(gamma |I|) M^|I|.

    For each candidate gamma, M(gamma) is the smallest scale making the
    criterion an equality somewhere on the stored words; the candidate with
    minimal M is returned (and recorded on the table).  The guarantee covers
    stored words only; extrapolation beyond max_len is not certified.
    """
    gamma_grid = list(gamma_grid)
    if not gamma_grid:
        raise ValueError("gamma grid must be non-empty")
    if any(g <= 0 for g in gamma_grid):
        raise ValueError("gamma candidates must be positive")
    best: tuple[float, float] | None = None
    for gamma in gamma_grid:
        m_val = 0.0
        for word, vec in table.coeffs.items():
            norm = float(np.linalg.norm(vec))
            if norm == 0.0:
                continue
            k = len(word)
            m_val = max(m_val, (norm / math.gamma(gamma * k)) ** (1.0 / k))
        if best is None or m_val < best[0]:
            best = (m_val, gamma)
    table.growth_m, table.growth_gamma = best
    return best
