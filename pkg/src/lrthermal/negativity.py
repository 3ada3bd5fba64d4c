"""SSR (partial time-reversal) logarithmic negativity of fermionic Gaussian states.

The state is encoded by the skew matrix ``Gamma`` of its Grassmann kernel,
whose inverse collects the two-point functions::

    inv(Gamma) = [[ <c_j c_i>,      -<c_j^dag c_i>     ],
                  [ <c_i^dag c_j>,   <c_j^dag c_i^dag> ]]

The partial time reversal on A is a linear change of Grassmann variables
(matrix ``T``); composing the transformed kernel with its adjoint gives a new
Gaussian kernel ``Gamma'`` times a Pfaffian prefactor, and the trace norm then
follows from the occupations of the state described by ``Gamma'``.
"""
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import BranchCutError, NumericalError, SingularStateError, ValidationError
from .gaussian import CorrelationMatrix

SKEW_TOL = 1e-12
BRANCH_TOL = 1e-6
OCC_TOL = 1e-10


def _as_skew(y, tol=SKEW_TOL):
    y = np.asarray(y, dtype=np.complex128)
    if y.ndim != 2 or y.shape[0] != y.shape[1]:
        raise ValidationError("Pfaffian needs a square matrix")
    if y.shape[0] % 2:
        raise ValidationError(f"Pfaffian needs an even dimension, got {y.shape[0]}")
    scale = max(np.abs(y).max(initial=0.0), 1.0)
    if np.abs(y + y.T).max(initial=0.0) > tol * scale:
        raise ValidationError("matrix is not skew-symmetric")
    return 0.5 * (y - y.T)


def slogpfaffian(y, tol=SKEW_TOL, backend=None):
    """``(phase, log|Pf|)`` of a skew-symmetric matrix, like ``numpy.linalg.slogdet``."""
    y = _as_skew(y, tol)
    if y.shape[0] == 0:
        return 1.0 + 0j, 0.0
    return kernels.slogpfaffian(y, backend=backend)


def pfaffian(y, tol=SKEW_TOL, backend=None):
    """Pfaffian of an even-dimensional skew-symmetric matrix.

    >>> pfaffian([[0, 3], [-3, 0]])
    (3+0j)
    """
    phase, logabs = slogpfaffian(y, tol, backend)
    return complex(phase * np.exp(logabs))


def _j_matrix(n):
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


@dataclass(frozen=True, eq=False)
class GammaMatrix:
    matrix: np.ndarray
    inverse: np.ndarray
    # log-Pfaffian when known in closed form
    slogpf: tuple = None

    @property
    def n_modes(self):
        return self.matrix.shape[0] // 2

    def block(self, a, b):
        n = self.n_modes
        return self.matrix[a * n:(a + 1) * n, b * n:(b + 1) * n]


def _reorder(corr, order):
    if order is None:
        return corr
    order = np.asarray(order)
    mat = corr.matrix[np.ix_(order, order)]
    modes = None if corr.modes is None else corr.modes[order, :]
    return CorrelationMatrix(mat, corr.beta, corr.energies, modes)


def gamma_from_correlations(corr, pairing=None):
    """Kernel matrix ``Gamma`` from ``C[i, j] = <c_i^dag c_j>`` and ``F[i, j] = <c_i c_j>``.

    For number-conserving thermal states carrying their spectrum the inverse is
    formed in the eigenbasis, which keeps near-empty modes well conditioned.
    """
    if not isinstance(corr, CorrelationMatrix):
        corr = CorrelationMatrix(np.asarray(corr))
    c = np.asarray(corr.matrix, dtype=np.complex128)
    n = c.shape[0]
    zero = np.zeros((n, n), dtype=np.complex128)
    f = zero if pairing is None else np.asarray(pairing, dtype=np.complex128)
    inv = np.block([[f.T, -c.T], [c, f.conj()]])
    inv = 0.5 * (inv - inv.T)

    if pairing is None and corr.energies is not None and corr.beta is not None:
        with np.errstate(over="ignore"):
            inv_occ = 1.0 + np.exp(corr.beta * corr.energies)
        if not np.all(np.isfinite(inv_occ)):
            raise SingularStateError("a mode is empty to machine precision; use a smaller beta")
        u = corr.modes
        # C = (u f u^dag)^T, so C^{-1} = (u f^{-1} u^dag)^T
        cinv = ((u * inv_occ) @ u.conj().T).T
        gamma = np.block([[zero, cinv], [-cinv.T, zero]])
        gamma = 0.5 * (gamma - gamma.T)
        # Pf [[0, K], [-K^T, 0]] = (-1)^{n(n-1)/2} det K
        logdet = float(np.sum(np.log1p(np.exp(corr.beta * corr.energies))))
        phase = (-1.0) ** (n * (n - 1) // 2)
        return GammaMatrix(gamma, inv, (complex(phase), logdet))

    try:
        cond = np.linalg.cond(inv)
    except np.linalg.LinAlgError:
        cond = np.inf
    if not np.isfinite(cond) or cond > 1e15:
        raise SingularStateError(
            f"correlation kernel is singular (condition {cond:.2e}); "
            "occupations of exactly 0 or 1 need a finite beta"
        )
    gamma = np.linalg.inv(inv)
    gamma = 0.5 * (gamma - gamma.T)
    return GammaMatrix(gamma, inv)


def time_reversal_matrix(n_a, n_b):
    """Change of variables ``(xi_A, xi_B, xibar_A, xibar_B) -> (-i xibar_A, xi_B, -i xi_A, xibar_B)``."""
    n = n_a + n_b
    t = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    ia = np.arange(n_a)
    ib = np.arange(n_a, n)
    t[ia, n + ia] = -1j
    t[n + ia, ia] = -1j
    t[ib, ib] = 1.0
    t[n + ib, n + ib] = 1.0
    return t


@dataclass
class SsrIntermediates:
    s1: np.ndarray
    s2: np.ndarray
    b: np.ndarray
    gamma_prime: np.ndarray
    n_a: int
    n_b: int
    diagnostics: dict = field(default_factory=dict)


def _blocks(m, n):
    return m[:n, :n], m[:n, n:], m[n:, :n], m[n:, n:]


def _skew(m):
    return 0.5 * (m - m.T)


def ssr_transform(gamma, n_a):
    """Kernel matrices of ``rho^{R_A}``, its adjoint, and of ``(rho^{R_A})^dag rho^{R_A}``.

    ``gamma`` must be expressed with the A modes first; ``n_a`` is their number.
    """
    n = gamma.n_modes
    n_b = n - n_a
    t = time_reversal_matrix(n_a, n_b)
    jm = _j_matrix(n)
    s1 = _skew(t @ (gamma.matrix + jm) @ t)
    p11, p12, p21, p22 = _blocks(s1, n)
    s2 = np.block([[p22.conj().T, p12.conj().T], [p21.conj().T, p11.conj().T]])
    s2 = _skew(s2)
    q11, q12, q21, q22 = _blocks(s2, n)
    eye = np.eye(n)
    zero = np.zeros((n, n), dtype=np.complex128)
    b = _skew(np.block([[p11, -eye], [eye, q22]]))
    cond = np.linalg.cond(b)
    if not np.isfinite(cond) or cond > 1e15:
        raise NumericalError(f"degenerate transform: B has condition {cond:.2e}")
    left = np.block([[zero, q12], [p21, zero]])
    right = np.block([[zero, p12], [q21, zero]])
    gp = -left @ np.linalg.solve(b, right) + np.block([[q11, zero], [zero, p22]]) - jm
    gp = _skew(gp)
    return SsrIntermediates(s1, s2, b, gp, n_a, n_b, {"cond_b": float(cond)})


def _covariance_from_gamma(gp):
    """Covariance of the normalized state with kernel ``gp`` (occupation block form)."""
    n = gp.shape[0] // 2
    g = np.linalg.inv(gp)
    g11, g12, g21, g22 = _blocks(g, n)
    return np.block([[g21, g22.T], [g11.T, np.eye(n) + g12]])


@dataclass
class SsrResult:
    value: float
    raw: float
    log_prefactor: float
    occupation_term: float
    prefactor_phase: complex
    occupations: np.ndarray
    intermediates: SsrIntermediates = None


def ssr_negativity_details(corr, part=None, pairing=None, keep_intermediates=False):
    """Full SSR pipeline with diagnostics; see :func:`ssr_negativity`."""
    if not isinstance(corr, CorrelationMatrix):
        corr = CorrelationMatrix(np.asarray(corr))
    n = corr.n_modes
    if part is None:
        n_a, order = n // 2, None
    else:
        if part.n_sites != n:
            raise ValidationError("bipartition must cover every mode")
        n_a, order = len(part.subset_a), part.order
    if pairing is not None and order is not None:
        pairing = np.asarray(pairing)[np.ix_(order, order)]
    gamma = gamma_from_correlations(_reorder(corr, order), pairing)
    inter = ssr_transform(gamma, n_a)

    ph_b, lb = slogpfaffian(inter.b, tol=1e-9)
    ph_gp, lgp = slogpfaffian(inter.gamma_prime, tol=1e-9)
    if gamma.slogpf is not None:
        ph_g, lg = gamma.slogpf
    else:
        ph_g, lg = slogpfaffian(gamma.matrix, tol=1e-9)
    if ph_b == 0 or ph_gp == 0 or ph_g == 0:
        raise NumericalError("vanishing Pfaffian in the prefactor")
    phase = (-1) ** (n * n) * ph_b * ph_gp / ph_g ** 2
    log_pref = lb + lgp - 2.0 * lg
    if abs(phase.imag) > BRANCH_TOL * abs(phase.real) or phase.real <= 0:
        raise BranchCutError(
            f"prefactor is not a positive real: phase {phase:.6g}, log|.| {log_pref:.6g}"
        )

    cov = _covariance_from_gamma(inter.gamma_prime)
    herm_err = np.abs(cov - cov.conj().T).max()
    nu = np.linalg.eigvalsh(0.5 * (cov + cov.conj().T))
    if nu.min() < -OCC_TOL or nu.max() > 1 + OCC_TOL:
        raise NumericalError(
            f"occupation of rho'' outside [0, 1]: [{nu.min():.3e}, {nu.max():.3e}]"
        )
    nu = np.clip(nu, 0.0, 1.0)
    # eigenvalues come in pairs (nu, 1 - nu); each mode appears twice
    occ_term = 0.5 * float(np.sum(np.log(np.sqrt(nu) + np.sqrt(1.0 - nu))))
    raw = 0.5 * log_pref + occ_term
    inter.diagnostics.update(hermiticity_error=float(herm_err))
    return SsrResult(
        max(raw, 0.0), raw, log_pref, occ_term, complex(phase), nu,
        inter if keep_intermediates else None,
    )


def ssr_negativity(corr, part=None, pairing=None):
    """SSR logarithmic negativity ``log || rho^{R_A} ||_1`` of a Gaussian state.

    ``part`` defaults to the first half of the modes as A. The result is
    clamped at zero; :func:`ssr_negativity_details` keeps the raw value.
    """
    return ssr_negativity_details(corr, part, pairing).value


def ssr_negativity_energy_form(corr, part=None, pairing=None):
    """Same quantity through the pseudo-energies ``eps''`` of ``rho''``.

    Only meaningful when every occupation of ``rho''`` is strictly inside (0, 1).
    """
    det = ssr_negativity_details(corr, part, pairing)
    n = len(det.occupations) // 2
    nu = np.sort(det.occupations)[n:]
    nu = np.clip(nu, 1e-300, 1 - 1e-16)
    eps = np.log((1.0 - nu) / nu)
    term = np.sum(np.logaddexp(0.0, -eps / 2) - 0.5 * np.logaddexp(0.0, -eps))
    return 0.5 * det.log_prefactor + float(term)
