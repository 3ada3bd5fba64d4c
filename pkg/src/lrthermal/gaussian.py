"""Thermal states of number-conserving quadratic fermion Hamiltonians.

Everything is derived from the correlation matrix ``C[i, j] = <c_i^dag c_j>``;
entropies are in nats.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, xlogy

from .errors import NumericalError, ValidationError

ENTROPY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Correlation matrix of a Gaussian state.

    ``energies``/``modes`` hold the single-particle spectrum when the state was
    built from a Hamiltonian; the negativity code uses them to form inverse
    covariances without inverting ``matrix``.
    """
    matrix: np.ndarray
    beta: float = None
    energies: np.ndarray = None
    modes: np.ndarray = None

    @property
    def n_modes(self):
        return self.matrix.shape[0]

    @property
    def occupations(self):
        if self.energies is None:
            return None
        return expit(-self.beta * self.energies)


def thermal_correlation_matrix(h, beta):
    """Correlation matrix of ``exp(-beta H) / Z`` for ``H = sum h_ij c_i^dag c_j``."""
    mat = np.asarray(getattr(h, "matrix", h))
    if not np.isfinite(beta) or beta <= 0:
        raise ValidationError(f"beta must be positive and finite, got {beta}")
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValidationError("hopping matrix must be square")
    if not np.allclose(mat, mat.conj().T, atol=1e-12, rtol=0):
        raise ValidationError("hopping matrix is not Hermitian")
    try:
        eps, u = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    resid = np.linalg.norm(mat @ u - u * eps) / max(1.0, np.linalg.norm(mat))
    if resid > 1e-8:
        raise NumericalError(f"eigendecomposition residual {resid:.3e}")
    f = expit(-beta * eps)
    # <c_i^dag c_j> = f(h)_{ji}
    c = ((u * f) @ u.conj().T).T
    if np.isrealobj(mat):
        c = c.real
    c = 0.5 * (c + c.conj().T)
    return CorrelationMatrix(c, float(beta), eps, u)


@dataclass
class SweepPoint:
    displacement: object
    site: int
    distance: float
    magnitude: float
    scaled: float


def two_point_sweep(corr, lattice, origin, displacements, alpha):
    """``|C[origin, origin + r]|`` and ``|C| * dist**alpha`` for each displacement.

    ``origin`` is a site index or coordinate; 2D displacements are ``(dx, dy)``.
    Distances use the lattice metric.
    """
    mat = corr.matrix if isinstance(corr, CorrelationMatrix) else np.asarray(corr)
    o = lattice.index(origin) if np.ndim(origin) else lattice._check(origin)
    o_coord = np.asarray(lattice.coords[o])
    out = []
    for r in displacements:
        target = o_coord + np.atleast_1d(r)
        j = lattice.index(target)
        diff = target - o_coord
        if lattice.metric == "manhattan":
            dist = float(np.abs(diff).sum())
        else:
            dist = float(np.sqrt((diff ** 2).sum()))
        mag = float(abs(mat[o, j]))
        out.append(SweepPoint(r, j, dist, mag, mag * dist ** alpha))
    return out


def binary_entropy(nu, tol=ENTROPY_TOL):
    nu = np.asarray(nu, dtype=float)
    if nu.size and (nu.min() < -tol or nu.max() > 1 + tol):
        raise NumericalError(
            f"occupation outside [0, 1]: min {nu.min():.3e}, max {nu.max():.3e}"
        )
    nu = np.clip(nu, 0.0, 1.0)
    return float(-(xlogy(nu, nu) + xlogy(1 - nu, 1 - nu)).sum())


def subsystem_entropy(corr, subset):
    """Von Neumann entropy of the reduced state on ``subset``."""
    idx = np.asarray(sorted(subset), dtype=int)
    if idx.size == 0:
        raise ValidationError("subset must be nonempty")
    mat = corr.matrix if isinstance(corr, CorrelationMatrix) else np.asarray(corr)
    nu = np.linalg.eigvalsh(mat[np.ix_(idx, idx)])
    return binary_entropy(nu)


def thermal_entropy(corr):
    """Total entropy from the occupations of the single-particle spectrum."""
    return binary_entropy(corr.occupations)


@dataclass
class MutualInformation:
    value: float
    raw: float
    s_a: float
    s_b: float
    s_ab: float


def mutual_information_terms(corr, part):
    s_a = subsystem_entropy(corr, part.subset_a)
    s_b = subsystem_entropy(corr, part.subset_b)
    s_ab = subsystem_entropy(corr, part.subset_a + part.subset_b)
    raw = s_a + s_b - s_ab
    return MutualInformation(max(raw, 0.0), raw, s_a, s_b, s_ab)


def gaussian_mutual_information(corr, part):
    """``S_A + S_B - S_AB``, clamped at zero."""
    if part.n_sites != (corr.n_modes if isinstance(corr, CorrelationMatrix) else len(corr)):
        raise ValidationError("bipartition must cover every mode")
    return mutual_information_terms(corr, part).value
