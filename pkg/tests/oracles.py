"""Independent numerical oracles for the test suite.

These deliberately avoid the library's code paths (and numpy's eigensolver):
the spectrum oracle runs a hand-written cyclic Jacobi iteration on the real
symmetric embedding of a complex Hermitian matrix, and the matrix helpers
use naive index loops. Slow on purpose; correctness reference only.
"""

import numpy as np


def naive_gram(h):
    """conj-transpose(h) @ h by explicit triple loop."""
    m, n = h.shape
    w = np.zeros((n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            acc = 0.0 + 0.0j
            for r in range(m):
                acc += np.conj(h[r, a]) * h[r, b]
            w[a, b] = acc
    return w


def naive_combine(weights, grams, shift):
    n = grams[0].shape[0]
    out = np.zeros((n, n), dtype=complex)
    for wgt, g in zip(weights, grams):
        for a in range(n):
            for b in range(n):
                out[a, b] += wgt * g[a, b]
    for a in range(n):
        out[a, a] -= shift
    return out


def naive_trace_quad(w, x):
    """Tr(W x x*) via the explicit outer product and diagonal sum."""
    n = len(x)
    outer = np.zeros((n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            outer[a, b] = x[a] * np.conj(x[b])
    tr = 0.0 + 0.0j
    for a in range(n):
        for b in range(n):
            tr += w[a, b] * outer[b, a]
    return tr.real


def real_embedding(w):
    """Hermitian w = X + iY -> real symmetric [[X, -Y], [Y, X]].

    Its spectrum is the spectrum of w with every eigenvalue doubled.
    """
    w = np.asarray(w, dtype=complex)
    x, y = w.real, w.imag
    return np.block([[x, -y], [y, x]])


def jacobi_spectrum(w, max_sweeps=60):
    """All eigenvalues of Hermitian w (each once), ascending, via cyclic
    Jacobi rotations on the real embedding. Pure Givens arithmetic; no
    library eigensolver involved."""
    a = real_embedding(w)
    n = a.shape[0]
    scale = max(1.0, float(np.sqrt(np.sum(a * a))))
    for _ in range(max_sweeps):
        off = np.sqrt(max(0.0, float(np.sum(a * a) - np.sum(np.diag(a) ** 2))))
        if off <= 1e-14 * scale:
            break
        thresh = off / n
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                diff = a[q, q] - a[p, p]
                # skip pivots too small to matter; also keeps tau finite
                if abs(apq) <= max(1e-2 * thresh / n, 1e-150 * (1.0 + abs(diff))):
                    continue
                tau = diff / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
    vals = np.sort(np.diag(a).real)
    # the embedding doubles every eigenvalue; collapse adjacent pairs
    return 0.5 * (vals[0::2] + vals[1::2])


def random_hermitian(rng, dim, scale=1.0):
    raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * 0.5 * (raw + raw.conj().T)


def random_psd(rng, m, n):
    h = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    return naive_gram(h)
