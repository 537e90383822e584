"""Lower-star persistence of a short signal, capping and entropy."""

import numpy as np

from emotiontda import (
    betti_oracle,
    build_path_complex,
    cap_infinite,
    compute_persistence,
    lower_star_filtration,
    persistent_entropy,
)
from emotiontda.persistence import default_cap

samples = [1.0, 3.0, 2.0]
cx, values = build_path_complex(samples)
f = lower_star_filtration(cx, values)
dgm = compute_persistence(f)
print("diagram:", dgm.points())
print("same as the rank-table oracle:", dgm.points() == betti_oracle(f).points())

capped = cap_infinite(dgm, default_cap(f))
print("capped at", default_cap(f), "->", capped.points())
print("entropy:", persistent_entropy(capped))

# entropy only sees interval lengths: shifting the signal changes nothing
cx2, values2 = build_path_complex(np.array(samples) + 10)
f2 = lower_star_filtration(cx2, values2)
print("shifted:", persistent_entropy(cap_infinite(compute_persistence(f2), default_cap(f2))))
