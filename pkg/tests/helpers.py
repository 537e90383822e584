"""Random inputs shared by the unit and acceptance tests."""

from __future__ import annotations

import numpy as np

from emotiontda.cellcomplex import simplicial_closure
from emotiontda.complexbuild import build_stacked_complex
from emotiontda.mlp import MLPParams, init_params


def random_complex(rng: np.random.Generator, max_cells: int = 200):
    """A random valid complex of at most ``max_cells`` cells and dimension <= 3.

    Half are closures of random simplices, half small stacked landmark
    complexes (which carry quads and prisms).  Returns ``(complex, h)`` with
    random vertex values, sometimes tied.
    """
    while True:
        if rng.random() < 0.5:
            n_vert = int(rng.integers(1, 12))
            simps = [
                rng.choice(n_vert, size=min(n_vert, int(rng.integers(1, 5))), replace=False).tolist()
                for _ in range(int(rng.integers(1, 9)))
            ]
            cx, _ = simplicial_closure(simps)
        else:
            n_frames, n_pts = int(rng.integers(1, 4)), int(rng.integers(3, 8))
            base = rng.uniform(0, 10, (n_pts, 2))
            frames = base + rng.normal(0, float(rng.choice([0.0, 0.5, 2.0])), (n_frames, n_pts, 2))
            cx = build_stacked_complex(frames).complex
        if len(cx) <= max_cells:
            break
    verts = cx.vertices()
    if rng.random() < 0.3:
        vals = rng.integers(0, 4, len(verts)).astype(float)
    else:
        vals = rng.uniform(0, 10, len(verts))
    return cx, dict(zip(verts, vals.tolist()))


def gradcheck_case(i: int) -> tuple[MLPParams, np.ndarray, int]:
    """The i-th random gradient-check configuration: small weights, random
    biases, a random input (all zeros for odd i) and a random label."""
    rng = np.random.default_rng([i, 99])
    p = init_params(seed=i).scaled(0.1)
    p = MLPParams(p.weights, [rng.normal(0, 0.1, b.shape) for b in p.biases])
    x = np.zeros(9) if i % 2 else rng.normal(0, 2.0, 9)
    return p, x, int(rng.integers(7))
