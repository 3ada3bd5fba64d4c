"""Exact diagonalization in the full ``2**N`` product / occupation basis.

Conventions: site 0 is the most significant bit of a basis index (first
tensor factor). Fermion states are ``(c_0^dag)^{n_0} ... (c_{N-1}^dag)^{n_{N-1}} |0>``,
i.e. Jordan-Wigner strings run over lower-indexed modes.

Besides the spin-chain physics this module carries the dense oracles that
certify the Gaussian code paths: a Fock-space thermal state for quadratic
Hamiltonians and a partial time reversal obtained by expanding the coherent
state kernel monomial by monomial.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import xlogy

from .errors import CapacityError, NumericalError, ValidationError

MAX_SPINS = 14
MAX_DENSE_STATE = 12
MAX_TFD = 10
MAX_FOCK = 8
MAX_PTR = 6

SX = np.array([[0, 0.5], [0.5, 0]])
SY = np.array([[0, -0.5j], [0.5j, 0]])
SZ = np.array([[0.5, 0], [0, -0.5]])


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """Operator on ``n_sites`` two-level sites.

    ``sectors`` optionally lists basis-index arrays of invariant blocks
    (magnetization sectors for the Heisenberg chain).
    """
    matrix: np.ndarray
    n_sites: int
    kind: str = "spin"
    sectors: tuple = None

    @property
    def dim(self):
        return 2 ** self.n_sites


def _check_size(n, cap, what):
    if n > cap:
        raise CapacityError(
            f"{what} limited to {cap} sites, got {n} "
            f"(would need a {2 ** n} x {2 ** n} matrix, {(4 ** n) * 16 / 2 ** 30:.1f} GiB complex)"
        )


def _bits(n):
    idx = np.arange(2 ** n)
    return (idx[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1


def magnetization_sectors(n):
    up = _bits(n).sum(axis=1)
    return tuple(np.flatnonzero(up == k) for k in range(n + 1))


def heisenberg_dense(couplings, n_max=MAX_SPINS):
    """``H = sum_{i<j} J_ij S_i . S_j`` as a real matrix in the S^z basis."""
    jmat = np.asarray(getattr(couplings, "matrix", couplings), dtype=float)
    n = jmat.shape[0]
    _check_size(n, n_max, "Heisenberg ED")
    dim = 2 ** n
    bits = _bits(n)
    spin = 0.5 - bits  # +1/2 for bit 0 (up), -1/2 for bit 1 (down)
    h = np.zeros((dim, dim))
    idx = np.arange(dim)
    for i in range(n):
        for j in range(i + 1, n):
            jij = jmat[i, j]
            if jij == 0:
                continue
            h[idx, idx] += jij * spin[:, i] * spin[:, j]
            flip = bits[:, i] != bits[:, j]
            src = idx[flip]
            dst = src ^ ((1 << (n - 1 - i)) | (1 << (n - 1 - j)))
            h[dst, src] += 0.5 * jij
    sectors = magnetization_sectors(n)
    for s in sectors:
        mask = np.ones(dim, bool)
        mask[s] = False
        if np.abs(h[np.ix_(s, np.flatnonzero(mask))]).max(initial=0.0) > 1e-12:
            raise NumericalError("Hamiltonian does not conserve total S^z")
    return DenseOperator(h, n, "spin", sectors)


def _eigh(op):
    """Eigen-decomposition, blockwise when sectors are known."""
    h = op.matrix
    if op.sectors is None:
        try:
            return np.linalg.eigh(h)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"eigensolve failed: {exc}") from exc
    vals = np.empty(op.dim)
    vecs = np.zeros((op.dim, op.dim), dtype=h.dtype)
    pos = 0
    for s in op.sectors:
        w, v = np.linalg.eigh(h[np.ix_(s, s)])
        vals[pos:pos + len(s)] = w
        vecs[s, pos:pos + len(s)] = v
        pos += len(s)
    return vals, vecs


def gibbs_weights(energies, beta):
    w = np.exp(-beta * (energies - energies.min()))
    return w / w.sum()


def gibbs_state(h, beta):
    """``exp(-beta H) / tr exp(-beta H)`` via the eigenbasis."""
    _check_size(h.n_sites, MAX_DENSE_STATE, "dense Gibbs state")
    if beta < 0 or not np.isfinite(beta):
        raise ValidationError(f"beta must be finite and non-negative, got {beta}")
    e, v = _eigh(h)
    p = gibbs_weights(e, beta)
    rho = (v * p) @ v.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DenseOperator(rho, h.n_sites, h.kind, h.sectors)


def partial_trace(rho, keep):
    """Reduced density matrix on ``keep`` (sites in increasing order).

    For fermionic operators this is the physical reduced state only when
    ``keep`` is a leading block of modes.
    """
    mat = np.asarray(getattr(rho, "matrix", rho))
    n = rho.n_sites if isinstance(rho, DenseOperator) else int(np.log2(mat.shape[0]))
    keep = sorted(set(int(k) for k in keep))
    if any(not 0 <= k < n for k in keep):
        raise ValidationError("keep contains sites outside the system")
    rest = [k for k in range(n) if k not in keep]
    t = mat.reshape([2] * (2 * n))
    t = t.transpose(keep + rest + [n + k for k in keep] + [n + r for r in rest])
    dk, dr = 2 ** len(keep), 2 ** len(rest)
    red = np.einsum("ajbj->ab", t.reshape(dk, dr, dk, dr))
    kind = rho.kind if isinstance(rho, DenseOperator) else "spin"
    return DenseOperator(red, len(keep), kind)


def von_neumann_entropy(rho, tol=1e-10):
    mat = np.asarray(getattr(rho, "matrix", rho))
    p = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))
    if p.min() < -tol:
        raise NumericalError(f"density matrix has eigenvalue {p.min():.3e}")
    p = np.clip(p, 0.0, None)
    return float(-xlogy(p, p).sum())


@dataclass
class EdMutualInformation:
    value: float
    raw: float
    s_a: float
    s_b: float
    s_ab: float


def mutual_information_terms_ed(rho, part):
    s_a = von_neumann_entropy(partial_trace(rho, part.subset_a))
    s_b = von_neumann_entropy(partial_trace(rho, part.subset_b))
    s_ab = von_neumann_entropy(rho)
    raw = s_a + s_b - s_ab
    return EdMutualInformation(max(raw, 0.0), raw, s_a, s_b, s_ab)


def mutual_information_ed(rho, part):
    if part.n_sites != rho.n_sites:
        raise ValidationError("bipartition must cover every site")
    return mutual_information_terms_ed(rho, part).value


def tfd_entanglement_entropy(h, beta, part):
    """Entropy of ``A_L A_R`` in the thermofield double of ``exp(-beta H)``."""
    n = h.n_sites
    _check_size(n, MAX_TFD, "TFD state")
    e, v = _eigh(h)
    p = gibbs_weights(e, beta)
    # |TFD> = sum_ab M_ab |a>_L |b>_R
    m = (v * np.sqrt(p)) @ v.T
    a = list(part.subset_a)
    b = list(part.subset_b)
    t = m.reshape([2] * (2 * n))
    t = t.transpose(a + [n + k for k in a] + b + [n + k for k in b])
    s = np.linalg.svd(t.reshape(4 ** len(a), 4 ** len(b)), compute_uv=False)
    lam = s ** 2
    lam = lam / lam.sum()
    return float(-xlogy(lam, lam).sum())


def tfd_state(h, beta):
    """Amplitude vector over ``|a>_L |b>_R`` (L index slowest)."""
    _check_size(h.n_sites, MAX_TFD, "TFD state")
    e, v = _eigh(h)
    p = gibbs_weights(e, beta)
    return ((v * np.sqrt(p)) @ v.T).reshape(-1)


# ---------------------------------------------------------------- operators

@dataclass(frozen=True)
class LocalOperator:
    sites: tuple
    matrix: np.ndarray


def embed(op, n):
    """Full ``2**n`` matrix of a :class:`LocalOperator`."""
    sites = list(op.sites)
    k = len(sites)
    if len(set(sites)) != k or any(not 0 <= s < n for s in sites):
        raise ValidationError(f"invalid support {op.sites}")
    mat = np.asarray(op.matrix)
    if mat.shape != (2 ** k, 2 ** k):
        raise ValidationError("operator shape does not match its support")
    rest = [s for s in range(n) if s not in sites]
    full = np.kron(mat, np.eye(2 ** (n - k))).reshape([2] * (2 * n))
    order = sites + rest
    inv = np.argsort(order)
    full = full.transpose(list(inv) + [n + x for x in inv])
    return full.reshape(2 ** n, 2 ** n)


def correlation_function_ed(rho, o_x, o_y):
    """Connected correlator ``tr(rho X Y) - tr(rho X) tr(rho Y)`` for disjoint supports."""
    if set(o_x.sites) & set(o_y.sites):
        raise ValidationError("operator supports overlap")
    n = rho.n_sites
    x = embed(o_x, n)
    y = embed(o_y, n)
    r = rho.matrix
    val = np.trace(r @ x @ y) - np.trace(r @ x) * np.trace(r @ y)
    return float(val.real)


def spin_correlation_ed(rho, i, j):
    """Connected ``<S_i . S_j>`` as the sum of its three Cartesian terms."""
    return sum(
        correlation_function_ed(rho, LocalOperator((i,), s), LocalOperator((j,), s))
        for s in (SX, SY, SZ)
    )


def boundary_operator(couplings, part):
    """Dense ``H_dA = sum_{i in A, j in B} J_ij S_i . S_j``."""
    jmat = np.asarray(getattr(couplings, "matrix", couplings), dtype=float)
    cross = np.zeros_like(jmat)
    a, b = part.a, part.b
    cross[np.ix_(a, b)] = jmat[np.ix_(a, b)]
    cross[np.ix_(b, a)] = jmat[np.ix_(b, a)]
    return heisenberg_dense(cross)


# ---------------------------------------------------------------- fermions

@lru_cache(maxsize=16)
def annihilators(n):
    """Jordan-Wigner ``c_j`` as dense real matrices."""
    _check_size(n, MAX_FOCK, "Fock-space oracle")
    bits = _bits(n)
    idx = np.arange(2 ** n)
    ops = []
    for j in range(n):
        c = np.zeros((2 ** n, 2 ** n))
        occ = bits[:, j] == 1
        src = idx[occ]
        dst = src ^ (1 << (n - 1 - j))
        sign = (-1.0) ** bits[occ, :j].sum(axis=1)
        c[dst, src] = sign
        ops.append(c)
    return tuple(ops)


def fock_hamiltonian(h):
    """Many-body matrix of ``sum_ij h_ij c_i^dag c_j``."""
    mat = np.asarray(getattr(h, "matrix", h))
    n = mat.shape[0]
    cs = annihilators(n)
    out = np.zeros((2 ** n, 2 ** n), dtype=mat.dtype)
    for i in range(n):
        for j in range(n):
            if mat[i, j] != 0:
                out += mat[i, j] * (cs[i].T @ cs[j])
    return DenseOperator(out, n, "fermion")


def fock_gibbs_state(h, beta):
    return gibbs_state(fock_hamiltonian(h), beta)


def fock_correlations(rho):
    cs = annihilators(rho.n_sites)
    n = rho.n_sites
    c = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            c[i, j] = np.trace(rho.matrix @ cs[i].T @ cs[j])
    return c.real if np.allclose(c.imag, 0) else c


def _leading_block_entropy(h, beta, subset):
    """Entropy of the modes in ``subset`` after moving them to the front."""
    mat = np.asarray(getattr(h, "matrix", h))
    n = mat.shape[0]
    sub = sorted(subset)
    order = sub + [k for k in range(n) if k not in set(sub)]
    hp = mat[np.ix_(order, order)]
    rho = fock_gibbs_state(hp, beta)
    return von_neumann_entropy(partial_trace(rho, range(len(sub))))


@dataclass
class FockOracleResult:
    correlations: np.ndarray
    entropies: dict
    mutual_information: float = None
    rho: DenseOperator = None


def fermion_fock_oracle(h, beta, subsets=(), part=None):
    """Brute-force Fock-space answers for the Gaussian code paths.

    ``subsets`` are site sets whose entropies are wanted; ``part`` adds the
    mutual information of that bipartition.
    """
    mat = np.asarray(getattr(h, "matrix", h))
    n = mat.shape[0]
    _check_size(n, MAX_FOCK, "Fock-space oracle")
    rho = fock_gibbs_state(mat, beta)
    ent = {}
    wanted = [tuple(sorted(s)) for s in subsets]
    if part is not None:
        wanted += [part.subset_a, part.subset_b, tuple(range(n))]
    for s in wanted:
        if s not in ent:
            ent[s] = von_neumann_entropy(rho) if len(s) == n else _leading_block_entropy(mat, beta, s)
    mi = None
    if part is not None:
        mi = ent[part.subset_a] + ent[part.subset_b] - ent[tuple(range(n))]
    return FockOracleResult(fock_correlations(rho), ent, mi, rho)


# ------------------------------------------------- partial time reversal

def _canonical(word):
    """Sort a Grassmann monomial; returns ``(sign, key)`` or ``(0, None)`` if it vanishes."""
    w = list(word)
    if len(set(w)) != len(w):
        return 0, None
    sign = 1
    # bubble sort keeps track of transpositions; words are short
    for i in range(len(w)):
        for j in range(len(w) - 1 - i):
            if w[j] > w[j + 1]:
                w[j], w[j + 1] = w[j + 1], w[j]
                sign = -sign
    return sign, tuple(w)


def _unit_monomial(n_bits, m_bits):
    """Grassmann coefficient of ``|n><m|`` in ``|xi><chibar|``.

    ``|xi> = prod_j (1 - xi_j c_j^dag)|0>`` and ``<chibar| = <0| prod_j (1 + c_j chibar_j)``,
    so each mode reads ``|0> - xi_j|1>`` and ``<0| - chibar_j<1|``. Grassmann
    generators (``xi_j = j``, ``chibar_j = N + j``) anticommute with ``c``,
    ``c^dag``; the sign of moving them all to the left is included.
    """
    n = len(n_bits)
    coeff = 1
    items = []
    for j in range(n):
        if n_bits[j]:
            coeff = -coeff
            items += [j, None]
    for j in reversed(range(n)):
        if m_bits[j]:
            items += [None, n + j]
    passed = 0
    swaps = 0
    word = []
    for it in items:
        if it is None:
            passed += 1
        else:
            swaps += passed
            word.append(it)
    return coeff * (-1) ** swaps, word


@lru_cache(maxsize=32)
def partial_time_reversal_map(n, a_modes):
    """Action of ``R_A`` on occupation-basis matrix units.

    Returns ``(src, dst, phase)`` arrays such that
    ``R_A(|n><m|) = phase * |n'><m'|`` with ``src = (n, m)`` flattened and
    ``dst = (n', m')`` flattened, obtained by substituting
    ``xi_j -> i chibar_j`` and ``chibar_j -> i xi_j`` for ``j`` in A in the
    expansion of the coherent-state kernel and matching monomials.
    """
    _check_size(n, MAX_PTR, "partial time reversal oracle")
    a_set = set(a_modes)
    bits = [tuple(int(b) for b in row) for row in _bits(n)]
    dim = 2 ** n
    key_to_unit = {}
    units = {}
    for ni, nb in enumerate(bits):
        for mi, mb in enumerate(bits):
            coeff, word = _unit_monomial(nb, mb)
            s, key = _canonical(word)
            units[(ni, mi)] = (coeff, word)
            key_to_unit[key] = (ni, mi, coeff * s)

    def substitute(g):
        j = g % n
        if j in a_set:
            return 1j, (g + n) % (2 * n)
        return 1, g

    src = np.empty(dim * dim, dtype=np.int64)
    dst = np.empty(dim * dim, dtype=np.int64)
    phase = np.empty(dim * dim, dtype=complex)
    for k, ((ni, mi), (coeff, word)) in enumerate(units.items()):
        factor = 1 + 0j
        new_word = []
        for g in word:
            f, g2 = substitute(g)
            factor *= f
            new_word.append(g2)
        s, key = _canonical(new_word)
        pn, pm, pcoeff = key_to_unit[key]
        # sum_{nm} coeff_nm * factor * s * M_key' |n><m| == sum coeff' M_key' R(|n'><m'|)
        src[k] = pn * dim + pm
        dst[k] = ni * dim + mi
        phase[k] = coeff * factor * s / pcoeff
    return src, dst, phase


def dense_partial_time_reversal(rho, a_modes):
    """``rho^{R_A}`` in the occupation basis for a fermionic density matrix."""
    if isinstance(rho, DenseOperator) and rho.kind != "fermion":
        raise ValidationError("partial time reversal needs a fermionic operator")
    mat = np.asarray(getattr(rho, "matrix", rho))
    n = int(round(np.log2(mat.shape[0])))
    a = tuple(sorted(int(x) for x in a_modes))
    if not a:
        return mat.astype(complex)
    src, dst, phase = partial_time_reversal_map(n, a)
    out = np.zeros(mat.size, dtype=complex)
    out[dst] = phase * mat.reshape(-1)[src]
    return out.reshape(mat.shape)


def trace_norm(mat):
    return float(np.linalg.svd(np.asarray(mat), compute_uv=False).sum())


def dense_ssr_negativity(h, beta, a_modes):
    """``log ||rho^{R_A}||_1`` of the Fock-space Gibbs state of ``h``."""
    rho = fock_gibbs_state(h, beta)
    return float(np.log(trace_norm(dense_partial_time_reversal(rho, a_modes))))
