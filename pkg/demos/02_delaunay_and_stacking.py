"""Per-frame Delaunay triangulations glued into one 3-D complex."""

import numpy as np

from emotiontda import build_stacked_complex, delaunay2d
from emotiontda.synth import animate

# cocircular square: ties break towards the lexicographically smallest diagonal
print(delaunay2d([(0, 0), (1, 0), (1, 1), (0, 1)]).triangles)

frames = animate(label=3, rng=np.random.default_rng(0))[:3]
tri = delaunay2d(frames[0])
print(f"frame 0: {tri.n_points} points, {len(tri.edges)} edges, {len(tri.triangles)} triangles")

stacked = build_stacked_complex(frames)
cx = stacked.complex
print("stacked cells per dimension:", cx.counts())  # vertices, edges, triangles+quads, prisms
print("chi:", cx.euler_characteristic(), " valid:", cx.is_valid())
