"""Open-boundary chains and square lattices.

Sites are numbered row-major with the first axis slowest, so the first half
of the site indices of an ``L x L`` lattice is the half-plane ``x < L/2``.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import GeometryError, PartitionError
from . import kernels

METRICS = ("manhattan", "euclidean")
_KEY_OFFSET = 1 << 20
_KEY_SPAN = 1 << 21


@dataclass(frozen=True)
class Lattice:
    dimension: int
    extent: int
    metric: str = "manhattan"

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise GeometryError(f"dimension must be 1 or 2, got {self.dimension}")
        if int(self.extent) != self.extent or self.extent < 2:
            raise GeometryError(f"extent must be an integer >= 2, got {self.extent}")
        if self.metric not in METRICS:
            raise GeometryError(f"metric must be one of {METRICS}, got {self.metric!r}")

    @property
    def n_sites(self):
        return self.extent ** self.dimension

    @cached_property
    def coords(self):
        """``(n_sites, dimension)`` integer coordinates, read-only."""
        if self.dimension == 1:
            c = np.arange(self.extent)[:, None]
        else:
            x, y = np.divmod(np.arange(self.n_sites), self.extent)
            c = np.stack([x, y], axis=1)
        c.setflags(write=False)
        return c

    def coord(self, i):
        return tuple(int(v) for v in self.coords[self._check(i)])

    def index(self, coord):
        coord = tuple(int(v) for v in np.atleast_1d(coord))
        if len(coord) != self.dimension or not all(0 <= v < self.extent for v in coord):
            raise IndexError(f"coordinate {coord} outside the lattice")
        if self.dimension == 1:
            return coord[0]
        return coord[0] * self.extent + coord[1]

    def _check(self, i):
        if not 0 <= int(i) < self.n_sites:
            raise IndexError(f"site {i} outside [0, {self.n_sites})")
        return int(i)

    @cached_property
    def site_keys(self):
        """Integer labels of the sites measured from the lattice centre.

        Random couplings are keyed by these labels, so a lattice of side
        ``L`` sees exactly the couplings of the central ``L``-window of any
        larger lattice, with the half cut in the same place.
        """
        shifted = self.coords - self.extent // 2 + _KEY_OFFSET
        if self.dimension == 1:
            keys = shifted[:, 0]
        else:
            keys = shifted[:, 0] * _KEY_SPAN + shifted[:, 1]
        keys = keys.astype(np.uint64)
        keys.setflags(write=False)
        return keys

    @cached_property
    def distances(self):
        """Dense ``n_sites x n_sites`` distance matrix in the lattice metric."""
        return pairwise_distances(self.coords, self.coords, self.metric)

    @cached_property
    def graph_distances(self):
        """Manhattan (graph) distances, used for boundaries whatever the metric."""
        return pairwise_distances(self.coords, self.coords, "manhattan")


def pairwise_distances(xa, xb, metric="manhattan"):
    diff = np.asarray(xa, dtype=float)[:, None, :] - np.asarray(xb, dtype=float)[None, :, :]
    if metric == "manhattan":
        return np.abs(diff).sum(axis=-1)
    return np.sqrt((diff * diff).sum(axis=-1))


def build_lattice(dimension, extent, metric="manhattan"):
    return Lattice(dimension, extent, metric)


def manhattan_distance(lattice, i, j):
    a = np.asarray(lattice.coords[lattice._check(i)])
    b = np.asarray(lattice.coords[lattice._check(j)])
    return int(np.abs(a - b).sum())


def distance(lattice, i, j):
    """Distance in the lattice's configured metric."""
    a = np.asarray(lattice.coords[lattice._check(i)], dtype=float)
    b = np.asarray(lattice.coords[lattice._check(j)], dtype=float)
    if lattice.metric == "manhattan":
        return float(np.abs(a - b).sum())
    return float(np.sqrt(((a - b) ** 2).sum()))


@dataclass(frozen=True)
class Bipartition:
    subset_a: tuple
    subset_b: tuple
    n_sites: int = field(default=0)

    def __post_init__(self):
        a, b = set(self.subset_a), set(self.subset_b)
        if a & b:
            raise PartitionError("subsets overlap")
        n = self.n_sites or len(a | b)
        if a | b != set(range(n)):
            raise PartitionError("subsets do not cover the lattice")
        object.__setattr__(self, "subset_a", tuple(sorted(a)))
        object.__setattr__(self, "subset_b", tuple(sorted(b)))
        object.__setattr__(self, "n_sites", n)

    @property
    def a(self):
        return np.array(self.subset_a, dtype=int)

    @property
    def b(self):
        return np.array(self.subset_b, dtype=int)

    @property
    def order(self):
        """Site permutation placing A before B."""
        return np.concatenate([self.a, self.b])


def bipartition(lattice, subset_a):
    a = sorted({lattice._check(i) for i in subset_a})
    b = [i for i in range(lattice.n_sites) if i not in set(a)]
    return Bipartition(tuple(a), tuple(b), lattice.n_sites)


def half_bipartition(lattice):
    if lattice.extent % 2:
        raise PartitionError(f"half split needs an even extent, got {lattice.extent}")
    n = lattice.n_sites
    return Bipartition(tuple(range(n // 2)), tuple(range(n // 2, n)), n)


def boundary_set(lattice, part):
    """Sites of A at graph distance 1 from B."""
    if not part.subset_a or not part.subset_b:
        return ()
    d = lattice.graph_distances[np.ix_(part.a, part.b)]
    return tuple(int(i) for i in part.a[d.min(axis=1) == 1])


def boundary_size(lattice, part):
    return len(boundary_set(lattice, part))


def boundary_double_sum(lattice, part, exponent, backend=None):
    """Sum of ``d(i, j) ** -exponent`` over ``i`` in A and ``j`` in B."""
    if exponent <= 0:
        raise ValueError("exponent must be positive")
    if not part.subset_a or not part.subset_b:
        raise PartitionError("both subsets must be nonempty")
    metric = 0 if lattice.metric == "manhattan" else 1
    total, dmin = kernels.pair_power_sum(
        lattice.coords[part.a], lattice.coords[part.b], exponent, metric, backend=backend
    )
    if dmin == 0:
        raise PartitionError("A and B share a site")
    return total
