"""Pure NumPy versions of the hot kernels.

These mirror ``_kernels.pyx`` one to one and are used whenever the compiled
extension is not importable.
"""
import numpy as np


def slogpfaffian(a):
    """Parlett-Reid tridiagonalization with partial pivoting.

    ``a`` is overwritten. Returns ``(phase, logabs)`` with
    ``Pf = phase * exp(logabs)``; a singular matrix gives ``(0, -inf)``.
    """
    n = a.shape[0]
    phase = 1.0 + 0.0j
    logabs = 0.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.abs(a[k + 1:, k]).argmax())
        if kp != k + 1:
            tmp = a[k + 1, k:].copy()
            a[k + 1, k:] = a[kp, k:]
            a[kp, k:] = tmp
            tmp = a[k:, k + 1].copy()
            a[k:, k + 1] = a[k:, kp]
            a[k:, kp] = tmp
            phase = -phase
        pivot = a[k, k + 1]
        if pivot == 0:
            return 0.0j, -np.inf
        r = abs(pivot)
        phase *= pivot / r
        logabs += np.log(r)
        if k + 2 < n:
            tau = a[k, k + 2:] / pivot
            col = a[k + 2:, k + 1]
            a[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return complex(phase), float(logabs)


def pair_power_sum(xa, xb, exponent, metric):
    """Sum of ``d(a, b) ** -exponent`` over all rows ``a`` of ``xa`` and ``b`` of ``xb``.

    Returns ``(total, min_distance)`` so callers can reject overlapping sets.
    ``metric`` is 0 for Manhattan, 1 for Euclidean.
    """
    xa = np.asarray(xa, dtype=np.float64)
    xb = np.asarray(xb, dtype=np.float64)
    total = 0.0
    dmin = np.inf
    step = max(1, 2_000_000 // max(1, len(xb)))
    for start in range(0, len(xa), step):
        diff = xa[start:start + step, None, :] - xb[None, :, :]
        if metric == 0:
            d = np.abs(diff).sum(axis=-1)
        else:
            d = np.sqrt((diff * diff).sum(axis=-1))
        dmin = min(dmin, float(d.min()))
        if dmin == 0.0:
            return np.inf, 0.0
        total += float(np.sum(d ** -exponent))
    return total, dmin
