"""Long-range hopping fermions and long-range Heisenberg chains.

Random amplitudes come from a counter-based generator: every unordered pair
of sites of every ensemble sample gets its own splitmix64 hash, so an
ensemble is the same no matter how samples are split across workers or in
what order they are built. Sites are labelled relative to the lattice
centre (:attr:`Lattice.site_keys`), which makes sample ``k`` of a small
system the central window of sample ``k`` of a larger one; size sweeps then
compare systems that share their couplings near the cut.
"""
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, ValidationError

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def splitmix64(x):
    """Vectorized splitmix64 finalizer on ``uint64`` arrays (wrapping arithmetic)."""
    with np.errstate(over="ignore"):
        z = np.asarray(x, dtype=np.uint64) + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def sample_seed(seed, sample):
    """Seed of ensemble member ``sample``: ``seed XOR splitmix64(sample)``."""
    mixed = splitmix64(np.array([sample & _MASK64], dtype=np.uint64))[0]
    return int(np.uint64(seed & _MASK64) ^ mixed)


def pair_uniforms(seed, sample, i, j):
    """Uniform [0, 1) variates keyed by ``(seed, sample, min(i,j), max(i,j))``."""
    i = np.asarray(i, dtype=np.uint64)
    j = np.asarray(j, dtype=np.uint64)
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    base = np.uint64(sample_seed(seed, sample))
    x = splitmix64(base ^ splitmix64(lo))
    x = splitmix64(x ^ hi)
    return (x >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


@dataclass(frozen=True)
class CouplingSpec:
    """Power-law exponent plus the law of the O(1) amplitudes.

    ``amplitude`` is either a number (fixed amplitude) or a ``(low, high)``
    interval sampled uniformly per pair.
    """
    alpha: float
    amplitude: object = 1.0
    seed: int = 0
    sample: int = 0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValidationError(f"alpha must be positive, got {self.alpha}")
        if isinstance(self.amplitude, (tuple, list)):
            lo, hi = self.amplitude
            if lo > hi:
                raise ValidationError(f"empty amplitude interval {self.amplitude}")
            object.__setattr__(self, "amplitude", (float(lo), float(hi)))
        else:
            object.__setattr__(self, "amplitude", float(self.amplitude))

    @property
    def is_random(self):
        return isinstance(self.amplitude, tuple)

    def with_sample(self, sample):
        return CouplingSpec(self.alpha, self.amplitude, self.seed, sample)

    def amplitudes(self, i, j):
        if not self.is_random:
            return np.full(np.shape(i), self.amplitude)
        lo, hi = self.amplitude
        return lo + (hi - lo) * pair_uniforms(self.seed, self.sample, i, j)


@dataclass(frozen=True, eq=False)
class SingleParticleHamiltonian:
    """``H = sum_ij matrix[i, j] c_i^dag c_j`` on ``lattice``."""
    matrix: np.ndarray
    lattice: object = None
    alpha: float = None

    @property
    def n_modes(self):
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class CouplingTable:
    """Symmetric pair couplings ``J[i, j]`` (zero diagonal) of a spin model."""
    matrix: np.ndarray
    lattice: object = None
    alpha: float = None

    @property
    def n_sites(self):
        return self.matrix.shape[0]

    def items(self):
        iu, ju = np.triu_indices(self.n_sites, 1)
        for i, j in zip(iu, ju):
            yield (int(i), int(j)), float(self.matrix[i, j])


def _upper_pairs(n):
    return np.triu_indices(n, 1)


def hopping_matrix(lattice, spec):
    """Single-particle matrix with entries ``-t_ij / d_ij**alpha`` off the diagonal."""
    n = lattice.n_sites
    iu, ju = _upper_pairs(n)
    d = lattice.distances[iu, ju]
    keys = lattice.site_keys
    vals = -spec.amplitudes(keys[iu], keys[ju]) / d ** spec.alpha
    h = np.zeros((n, n))
    h[iu, ju] = vals
    h[ju, iu] = vals
    return SingleParticleHamiltonian(h, lattice, spec.alpha)


def heisenberg_couplings(lattice, spec):
    """``J_ij = a_ij / |i - j|**alpha`` on a chain."""
    if lattice.dimension != 1:
        raise GeometryError("the Heisenberg model is implemented for chains only")
    n = lattice.n_sites
    iu, ju = _upper_pairs(n)
    keys = lattice.site_keys
    vals = spec.amplitudes(keys[iu], keys[ju]) / (ju - iu).astype(float) ** spec.alpha
    j = np.zeros((n, n))
    j[iu, ju] = vals
    j[ju, iu] = vals
    return CouplingTable(j, lattice, spec.alpha)


@dataclass
class EnvelopeReport:
    holds: bool
    worst_pair: tuple
    worst_ratio: float


def coupling_envelope_check(model, g, alpha, term_norm=1.0):
    """Check ``J_ij <= g / (1 + d_ij)**alpha`` for every pair.

    ``model`` is a :class:`CouplingTable` or a :class:`SingleParticleHamiltonian`;
    pair norms are ``term_norm * |J_ij|``. For Heisenberg terms the operator
    norm of ``S_i . S_j`` is 3/4, pass ``term_norm=0.75`` to use true norms.
    Distances are graph (Manhattan) distances.
    """
    mat = np.abs(np.asarray(model.matrix, dtype=float)) * term_norm
    n = mat.shape[0]
    if n < 2:
        return EnvelopeReport(True, None, 0.0)
    iu, ju = _upper_pairs(n)
    if model.lattice is not None:
        d = model.lattice.graph_distances[iu, ju]
    else:
        d = (ju - iu).astype(float)
    ratio = mat[iu, ju] * (1.0 + d) ** alpha / g
    k = int(np.argmax(ratio))
    worst = float(ratio[k])
    return EnvelopeReport(bool(worst <= 1.0 + 1e-12), (int(iu[k]), int(ju[k])), worst)
