"""Rigorous bounds for long-range thermal states, evaluated numerically.

All distances here are graph (Manhattan) distances ``d_ij`` unless a lattice
with the Euclidean metric is passed to :func:`theorem1_rhs`, which sums in the
lattice metric. The O(1) constant ``C`` of the clustering bounds is never
assumed; it is an explicit field of :class:`BoundParams`.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import ed
from .errors import ValidationError
from .lattice import boundary_double_sum
from .models import CouplingTable, SingleParticleHamiltonian

U_VARIANTS = ("lemma", "plain")
HEISENBERG_TERM_NORM = 0.75


@dataclass(frozen=True)
class BoundParams:
    """Constants entering the bounds.

    Parameters
    ----------
    g : float
        Coupling scale of the envelope ``J_ij <= g / (1 + d_ij)**alpha``.
    k : int
        Locality (maximum support size of a Hamiltonian term), at least 2.
    d0 : int
        Local Hilbert-space dimension.
    C : float
        Clustering constant. Zero is allowed and gives vanishing bounds.
    alpha : float
        Power-law exponent.
    beta : float
        Inverse temperature. Zero is allowed.
    """
    g: float = 1.0
    k: int = 2
    d0: int = 2
    C: float = 1.0
    alpha: float = 2.0
    beta: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.g) and self.g > 0):
            raise ValidationError(f"g must be positive, got {self.g}")
        if int(self.k) != self.k or self.k < 2:
            raise ValidationError(f"k must be an integer >= 2, got {self.k}")
        if int(self.d0) != self.d0 or self.d0 < 2:
            raise ValidationError(f"d0 must be an integer >= 2, got {self.d0}")
        if not (np.isfinite(self.C) and self.C >= 0):
            raise ValidationError(f"C must be non-negative, got {self.C}")
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise ValidationError(f"alpha must be positive, got {self.alpha}")
        if not (np.isfinite(self.beta) and self.beta >= 0):
            raise ValidationError(f"beta must be non-negative, got {self.beta}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "d0", int(self.d0))


@dataclass(frozen=True)
class UFactor:
    """Value of ``u`` with a flag for divergence of the same sum on the infinite lattice."""
    value: float
    variant: str
    divergent_infinite: bool

    def __float__(self):
        return self.value


def _u_sums(lattice, alpha):
    return ((1.0 + lattice.graph_distances) ** -alpha).sum(axis=1)


def u_factor(lattice, alpha, site=None, variant="lemma"):
    """``u = sum_j (1 + d_ij)**-alpha``, times ``2**alpha`` for the ``lemma`` variant.

    ``site`` defaults to the site with the largest sum (the centre on open
    lattices), which is the conservative choice.
    """
    if variant not in U_VARIANTS:
        raise ValidationError(f"variant must be one of {U_VARIANTS}, got {variant!r}")
    if not alpha > 0:
        raise ValidationError(f"alpha must be positive, got {alpha}")
    sums = _u_sums(lattice, alpha)
    value = float(sums.max() if site is None else sums[lattice._check(site)])
    if variant == "lemma":
        value *= 2.0 ** alpha
    return UFactor(value, variant, bool(alpha <= lattice.dimension))


def lambert_w(x, tol=1e-14, max_iter=100):
    """Principal branch ``W(x)`` for ``x >= 0`` by Newton iteration.

    >>> round(lambert_w(math.e), 12)
    1.0
    """
    x = float(x)
    if not x >= 0 or not math.isfinite(x):
        raise ValidationError(f"lambert_w needs a finite x >= 0, got {x}")
    if x == 0:
        return 0.0
    w = math.log1p(x)
    for _ in range(max_iter):
        ew = math.exp(w)
        resid = w * ew - x
        if abs(resid) <= tol * max(1.0, x):
            return w
        w -= resid / (ew * (w + 1.0))
    raise ArithmeticError(f"lambert_w did not converge for x={x}")


@dataclass(frozen=True)
class BetaC:
    simple: float
    lambert: float


def beta_c(params, u):
    """Threshold inverse temperatures: ``1/(8ugk)`` and ``W(1/(u e)) / (2gk)``."""
    u = float(u)
    if not u >= 1:
        raise ValidationError(f"u must be at least 1, got {u}")
    gk = params.g * params.k
    simple = 1.0 / (8.0 * u * gk)
    lam = lambert_w(1.0 / (u * math.e)) / (2.0 * gk)
    # W(x) >= x / (1 + x) and 1 / (1 + u e) >= 1 / (4u) for u >= 1
    assert lam >= simple * (1 - 1e-12), (lam, simple)
    return BetaC(simple, lam)


def theorem2_rhs(params, size_x, size_y, distance):
    """Clustering bound ``C |X| |Y| exp((|X| + |Y|) / k) / d**alpha``."""
    if not distance >= 1:
        raise ValidationError(f"distance must be at least 1, got {distance}")
    if size_x < 1 or size_y < 1:
        raise ValidationError("supports must be nonempty")
    return (params.C * size_x * size_y * math.exp((size_x + size_y) / params.k)
            / distance ** params.alpha)


@dataclass(frozen=True)
class Theorem1Bound:
    value: float
    double_sum: float
    area_law_regime: bool


def theorem1_rhs(lattice, part, params):
    """``beta d0**(2k) g C sum_{i in A, j in B} d_ij**(-2 alpha)``.

    ``area_law_regime`` is true when ``2 alpha > D + 1``, where the double sum
    stays bounded by a multiple of the boundary size.
    """
    s = boundary_double_sum(lattice, part, 2.0 * params.alpha)
    pref = params.beta * float(params.d0) ** (2 * params.k) * params.g * params.C
    return Theorem1Bound(pref * s, s, bool(2 * params.alpha > lattice.dimension + 1))


@dataclass(frozen=True)
class WolfBound:
    """``2 beta ||H_dA||`` from the exact norm and from the triangle inequality."""
    exact: float
    triangle: float
    norm_exact: float
    norm_triangle: float


def _fermion_boundary_norms(h, part):
    # H_dA = sum_{A,B} h_ij c_i^dag c_j + h.c. is quadratic; its single-particle
    # matrix [[0, h_AB], [h_BA, 0]] has eigenvalues +-s_k, so filling the
    # positive modes gives ||H_dA|| = sum_k s_k.
    block = np.asarray(h)[np.ix_(part.a, part.b)]
    if block.size == 0:
        return 0.0, 0.0
    exact = float(np.linalg.svd(block, compute_uv=False).sum())
    return exact, float(np.abs(block).sum())


def _heisenberg_boundary_norms(couplings, part, exact=True):
    jmat = np.asarray(couplings.matrix, dtype=float)
    block = jmat[np.ix_(part.a, part.b)]
    tri = HEISENBERG_TERM_NORM * float(np.abs(block).sum())
    if not np.any(block):
        return 0.0, 0.0
    if not exact:
        return float("nan"), tri
    op = ed.boundary_operator(couplings, part)
    norm = 0.0
    for s in op.sectors:
        w = np.linalg.eigvalsh(op.matrix[np.ix_(s, s)])
        norm = max(norm, float(np.abs(w).max()))
    return norm, tri


def wolf_rhs(model, part, beta, exact=True):
    """``2 beta ||H_dA||`` for a hopping model or a Heisenberg coupling table.

    For Heisenberg chains the exact norm needs a dense diagonalization of the
    cross operator; pass ``exact=False`` beyond ED sizes to get only the
    triangle estimate (``exact`` is then NaN).
    """
    if beta < 0:
        raise ValidationError(f"beta must be non-negative, got {beta}")
    if isinstance(model, SingleParticleHamiltonian):
        norm, tri = _fermion_boundary_norms(model.matrix, part)
    elif isinstance(model, CouplingTable):
        norm, tri = _heisenberg_boundary_norms(model, part, exact)
    else:
        raise ValidationError(f"unsupported model type {type(model).__name__}")
    if model.matrix.shape[0] != part.n_sites:
        raise ValidationError("bipartition must cover every site")
    return WolfBound(2 * beta * norm, 2 * beta * tri, norm, tri)


@dataclass(frozen=True)
class ProductLemmaReport:
    max_ratio: float
    holds: bool
    worst_pair: tuple
    u: float


def product_lemma_check(lattice, alpha, g=1.0):
    """Check ``sum_j J_ij J_jk <= g**2 u / (1 + d_ik)**alpha`` for the envelope couplings.

    ``J_ij = g / (1 + d_ij)**alpha`` for every pair including ``j = i`` (the
    worst case allowed by the envelope), and ``u`` is the ``lemma`` variant
    maximized over sites so that one constant serves every pair.
    """
    if not g > 0:
        raise ValidationError(f"g must be positive, got {g}")
    d = lattice.graph_distances
    jm = g * (1.0 + d) ** -alpha
    lhs = jm @ jm
    u = float(u_factor(lattice, alpha, variant="lemma"))
    ratio = lhs * (1.0 + d) ** alpha / (g * g * u)
    idx = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    worst = float(ratio[idx])
    return ProductLemmaReport(worst, bool(worst <= 1 + 1e-12),
                              (int(idx[0]), int(idx[1])), u)
