import hashlib
from typing import Any, Sequence

import numpy as np


class OrbitRng:
    """Counter-based, splittable generator used by the backward-orbit sampler.

    Wraps numpy's Philox bit generator. Every call to :meth:`draw` or
    :meth:`choose` consumes exactly one draw.
    """

    def __init__(self, seed: int | np.random.SeedSequence):
        if isinstance(seed, np.random.SeedSequence):
            self.seed_seq = seed
        else:
            if int(seed) < 0:
                raise ValueError(f"seed must be non-negative, got {seed}")
            self.seed_seq = np.random.SeedSequence(int(seed))
        self.generator = np.random.Generator(np.random.Philox(self.seed_seq))
        self.draws = 0

    def draw(self, total: int) -> int:
        """Uniform integer in [0, total)."""
        if total < 1:
            raise ValueError(f"cannot draw from an empty range ({total})")
        self.draws += 1
        return int(self.generator.integers(0, total))

    def choose(self, weights: Sequence[int]) -> int:
        """Index drawn with probability weights[i] / sum(weights), exact integer weights."""
        cumulative = np.cumsum(np.asarray(weights, dtype=np.int64))
        u = self.draw(int(cumulative[-1]))
        return int(np.searchsorted(cumulative, u, side="right"))

    @classmethod
    def for_path(cls, seed: int, *path_components: Any) -> "OrbitRng":
        """Child generator whose seed is derived from ``seed`` and a path."""
        path_str = "/".join(str(c) for c in path_components)
        combined = f"{seed}/{path_str}"
        child_seed = int(hashlib.sha256(combined.encode()).hexdigest()[:16], 16)
        return cls(child_seed)
