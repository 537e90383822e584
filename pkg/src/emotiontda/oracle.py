"""Persistence from ranks of boundary submatrices, for cross-checking.

For prefixes K_i (first i cells of the filtration) the persistent Betti
number is

    beta_d(i, j) = dim Z_d(K_i) - dim(Z_d(K_i) ∩ B_d(K_j)),

where the second term equals rank ∂_{d+1}|K_j minus the rank of the same
matrix restricted to the rows of d-cells not in K_i.  Every rank comes
from Gaussian elimination mod 2.  Point multiplicities follow by
inclusion-exclusion over neighbouring prefixes.  Quadratic in the number
of cells, so meant for small complexes.
"""

from __future__ import annotations

import math

import numpy as np

from .filtration import Filtration
from .persistence import PersistenceDiagram


def _rank_table(cols: list[tuple[int, int]], m: int) -> np.ndarray:
    """R[i, j] = rank of the columns at positions < j, keeping rows >= i."""
    R = np.zeros((m + 1, m + 1), dtype=np.int64)
    for i in range(m + 1):
        basis: dict[int, int] = {}
        rank = 0
        inc = np.zeros(m + 1, dtype=np.int64)
        for pos, bits in cols:
            if pos < i:
                continue  # its faces all sit above row i
            v = bits >> i
            while v:
                top = v.bit_length() - 1
                if top in basis:
                    v ^= basis[top]
                else:
                    basis[top] = v
                    rank += 1
                    inc[pos + 1] += 1
                    break
        R[i] = np.cumsum(inc)
    return R


def rank_tables(f: Filtration) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Per-dimension rank tables and prefix cell counts.

    Returns ``(R, N)`` where ``R[d]`` is the rank table of the d-th boundary
    operator and ``N[d][i]`` the number of d-cells among the first i cells.
    """
    cells = f.complex.cells
    m = len(f.order)
    top = max((cells[c].dim for c in f.order), default=0)
    by_dim: list[list[tuple[int, int]]] = [[] for _ in range(top + 2)]
    counts = [np.zeros(m + 1, dtype=np.int64) for _ in range(top + 2)]
    for pos, c in enumerate(f.order):
        d = cells[c].dim
        counts[d][pos + 1] = 1
        bits = 0
        for b in cells[c].boundary:
            bits |= 1 << f.cell_index[b]
        by_dim[d].append((pos, bits))
    R = [np.zeros((m + 1, m + 1), dtype=np.int64)]
    R += [_rank_table(by_dim[d], m) for d in range(1, top + 2)]
    N = [np.cumsum(c) for c in counts]
    return R, N


def persistent_betti(f: Filtration) -> list[np.ndarray]:
    """``B[d][i, j]`` = rank of H_d(K_i) -> H_d(K_j) for i <= j (prefix sizes)."""
    R, N = rank_tables(f)
    out = []
    for d in range(len(R) - 1):
        cycles = N[d] - R[d][0]  # dim Z_d(K_i)
        bound_up = R[d + 1]
        # dim(B_d(K_j) ∩ C_d(K_i)) = R[0, j] - R[i, j]
        inter = bound_up[0][None, :] - bound_up
        out.append(cycles[:, None] - inter)
    return out


def betti_numbers(f: Filtration) -> list[int]:
    m = len(f.order)
    return [int(B[m, m]) for B in persistent_betti(f)]


def persistence_by_ranks(f: Filtration, coords: str = "value") -> PersistenceDiagram:
    m = len(f.order)
    rows = []

    def coord(pos: int) -> float:
        c = f.order[pos]
        return float(f.cell_value[c]) if coords == "value" else float(f.step_of(c))

    for d, B in enumerate(persistent_betti(f)):
        # mu[i, j]: classes born entering prefix i and dying entering prefix j
        mu = np.triu(B[1:, :-1] - B[:-1, :-1] - B[1:, 1:] + B[:-1, 1:], k=1)
        if (mu < 0).any():
            raise AssertionError("negative multiplicity")
        for a, b in zip(*np.nonzero(mu)):
            rows += [(d, coord(a), coord(b), f.order[a], f.order[b])] * int(mu[a, b])
        essential = B[1:, m] - B[:-1, m]
        for a in np.nonzero(essential > 0)[0]:
            rows += [(d, coord(a), math.inf, f.order[a], -1)] * int(essential[a])
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    return PersistenceDiagram(
        np.array([r[0] for r in rows], dtype=np.int64),
        np.array([r[1] for r in rows], dtype=float),
        np.array([r[2] for r in rows], dtype=float),
        np.array([r[3] for r in rows], dtype=np.int64),
        np.array([r[4] for r in rows], dtype=np.int64),
        f.label,
    )
