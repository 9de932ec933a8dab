from __future__ import annotations

import numpy as np

from tpqrkit.lattice import IntersectionLattice


def random_lattice(rng: np.random.Generator, n: int) -> IntersectionLattice:
    g = rng.integers(-2, 3, size=(n, n))
    g = np.triu(g, 1)
    g = g + g.T - 2 * np.eye(n, dtype=np.int64)
    return IntersectionLattice([f"e{i}" for i in range(n)], g)
