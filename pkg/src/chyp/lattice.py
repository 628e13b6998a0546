"""Box truncations of the integral group and deterministic lattice sums."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import PreconditionError
from .geometry import GroupElement
from .quadrature import DEFAULT_QUAD, DEFAULT_SERIES, QuadratureSpec, SeriesSpec, csum

__all__ = ["Truncation", "coprime_pairs", "sl2_box", "thread_count", "ordered_sum"]

_CHUNK = 8192


@dataclass(frozen=True)
class Truncation:
    """Everything that pins down a partial sum.

    ``N`` bounds the box: coprime pairs with max(|c|, |d|) <= N for coset
    sums, matrices with all entries in [-N, N] for full-group sums.  When
    ``elements`` is given, full-group sums run over exactly those elements
    instead of the box (coset sums use their bottom rows), which is how
    reindexing identities are tested.  ``include_permutations`` multiplies
    full-group sums by the n! permutations sigma.
    """

    N: int = 50
    include_permutations: bool = False
    elements: tuple = field(default=None)
    quad: QuadratureSpec = DEFAULT_QUAD
    series: SeriesSpec = DEFAULT_SERIES
    phi_cutoff: int = 2000

    def __post_init__(self):
        if self.N < 1:
            raise PreconditionError("truncation box N must be >= 1")
        if self.elements is not None:
            object.__setattr__(self, "elements", tuple(self.elements))
            if not all(isinstance(g, GroupElement) for g in self.elements):
                raise PreconditionError("explicit truncation elements must be GroupElements")

    def matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        if self.elements is not None:
            arr = np.array([g.abcd for g in self.elements], dtype=np.int64).reshape(-1, 4)
            return arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3]
        return sl2_box(self.N)

    def bottom_rows(self) -> tuple[np.ndarray, np.ndarray]:
        if self.elements is not None:
            _, _, c, d = self.matrices()
            return c, d
        return coprime_pairs(self.N)

    def as_dict(self) -> dict:
        out = {
            "N": self.N,
            "include_permutations": self.include_permutations,
            "quad": self.quad.as_dict(),
            "series": self.series.as_dict(),
            "phi_cutoff": self.phi_cutoff,
        }
        if self.elements is not None:
            out["elements"] = [g.to_json() for g in self.elements]
        return out


def _readonly(*arrays):
    for a in arrays:
        a.setflags(write=False)
    return arrays


@lru_cache(maxsize=32)
def coprime_pairs(N: int) -> tuple[np.ndarray, np.ndarray]:
    """All coprime (c, d) with max(|c|, |d|) <= N, ordered by c then d."""
    r = np.arange(-N, N + 1, dtype=np.int64)
    C, D = np.meshgrid(r, r, indexing="ij")
    keep = np.gcd(C, D) == 1
    return _readonly(C[keep].copy(), D[keep].copy())


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _k_range(base: int, step: int, N: int) -> tuple[float, float]:
    """Integers k with |base + k*step| <= N, as a closed real interval."""
    if step == 0:
        return (-math.inf, math.inf) if abs(base) <= N else (1.0, 0.0)
    lo, hi = (-N - base) / step, (N - base) / step
    return (min(lo, hi), max(lo, hi))


@lru_cache(maxsize=16)
def sl2_box(N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """All integer matrices (a, b; c, d) with ad - bc = 1 and every entry in [-N, N].

    Ordered by (c, d, a).  Each coprime bottom row (c, d) extends to the
    family (a0 + k c, b0 + k d) of top rows; k runs over the range that
    keeps both entries in the box.
    """
    cs, ds = coprime_pairs(N)
    out = []
    for c, d in zip(cs.tolist(), ds.tolist()):
        g, x, y = _egcd(c, d)
        # c*x + d*y = g = +-1, so a0 = g*y, b0 = -g*x gives a0 d - b0 c = 1
        a0, b0 = g * y, -g * x
        lo1, hi1 = _k_range(a0, c, N)
        lo2, hi2 = _k_range(b0, d, N)
        lo, hi = math.ceil(max(lo1, lo2)), math.floor(min(hi1, hi2))
        for k in range(lo, hi + 1):
            out.append((a0 + k * c, b0 + k * d, c, d))
    out.sort(key=lambda r: (r[2], r[3], r[0]))
    arr = np.array(out, dtype=np.int64)
    return _readonly(arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy(), arr[:, 3].copy())


def thread_count() -> int:
    """Worker threads for lattice sums, from CHYP_THREADS (default 1)."""
    raw = os.environ.get("CHYP_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise PreconditionError(f"CHYP_THREADS must be an integer, got {raw!r}") from None


def ordered_sum(terms: Callable[[slice], np.ndarray], count: int, threads: int | None = None):
    """Sum ``terms(chunk)`` over fixed index chunks covering range(count).

    Chunks are fixed in size and every chunk's terms enter one exactly
    rounded sum, so the result does not depend on the thread count or on
    completion order.
    """
    threads = thread_count() if threads is None else threads
    chunks = [slice(i, min(i + _CHUNK, count)) for i in range(0, count, _CHUNK)]
    if not chunks:
        return 0.0
    if threads == 1 or len(chunks) == 1:
        parts = [np.asarray(terms(ch)) for ch in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = [np.asarray(p) for p in pool.map(terms, chunks)]
    return csum(np.concatenate([p.ravel() for p in parts]))


def permutation_factor(n: int, include: bool) -> int:
    return math.factorial(n) if include else 1


def elements_from_matrices(n: int, rows: Sequence[tuple[int, int, int, int]]) -> tuple:
    ident = tuple(range(n))
    return tuple(GroupElement(ident, *r) for r in rows)
