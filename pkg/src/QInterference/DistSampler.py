import itertools
import numpy as np


class DistSampler:
    def __init__(self):
        pass

    def samples(self, alphabets):
        """Returns the list of product input distributions (p1, p2, ...) to visit, one vector per sender."""
        raise NotImplementedError("Not implemented!")

    def describe(self):
        raise NotImplementedError("Not implemented!")


class GridSampler(DistSampler):
    """Implementation of DistSampler which visits every product of simplex grid points with the given step."""

    def __init__(self, step=0.05):
        DistSampler.__init__(self)
        if not 0 < step <= 1:
            raise ValueError("Grid step must lie in (0, 1], got " + str(step))
        self.step = step

    def samples(self, alphabets):
        grids = [simplex_grid(a, self.step) for a in alphabets]
        return [tuple(p) for p in itertools.product(*grids)]

    def describe(self):
        return {"mode": "grid", "step": self.step}


class RandomSampler(DistSampler):
    """Implementation of DistSampler which draws count flat-Dirichlet product distributions. Deterministic given
    seed."""

    def __init__(self, count=200, seed=0):
        DistSampler.__init__(self)
        if count < 1:
            raise ValueError("Sample count must be at least 1, got " + str(count))
        self.count = count
        self.seed = seed

    def samples(self, alphabets):
        rng = np.random.default_rng(self.seed)
        return [tuple(rng.dirichlet(np.ones(a)) for a in alphabets) for _ in range(self.count)]

    def describe(self):
        return {"mode": "random", "count": self.count, "seed": self.seed}


class ExplicitSampler(DistSampler):
    """Implementation of DistSampler which visits a fixed list of product distributions"""

    def __init__(self, dists):
        DistSampler.__init__(self)
        self.dists = [tuple(np.asarray(p, dtype=float) for p in d) for d in dists]

    def samples(self, alphabets):
        for d in self.dists:
            if len(d) != len(alphabets) or any(p.size != a for p, a in zip(d, alphabets)):
                raise ValueError("Explicit distribution does not fit alphabets " + str(tuple(alphabets)))
        return list(self.dists)

    def describe(self):
        return {"mode": "explicit", "count": len(self.dists)}


def simplex_grid(size, step):
    """All probability vectors of length size with entries on multiples of step (step must divide 1)."""
    k = int(round(1 / step))
    if abs(k * step - 1) > 1e-9:
        raise ValueError("Grid step must divide 1, got " + str(step))
    out = []
    for parts in itertools.product(range(k + 1), repeat=size - 1):
        if sum(parts) <= k:
            out.append(np.array(list(parts) + [k - sum(parts)], dtype=float) / k)
    return out


def uniform(size):
    return np.full(size, 1.0 / size)
