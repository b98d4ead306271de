"""Collapsed Gibbs sampling kernel for per-slice LDA.

Compiled with numba when available; the pure-Python fallback produces
bit-identical results (the RNG is an explicit splitmix64 stream, so output
never depends on the host RNG or on numba internals).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_DOUBLE_SCALE = 1.0 / 9007199254740992.0  # 2^-53


@njit(cache=True)
def _next_uniform(state):
    """Advance splitmix64 and return (new state, uniform double in [0,1))."""
    state = (state + _GAMMA) & _MASK
    z = state
    z = ((z ^ (z >> np.uint64(30))) * _MIX1) & _MASK
    z = ((z ^ (z >> np.uint64(27))) * _MIX2) & _MASK
    z = z ^ (z >> np.uint64(31))
    return state, float(z >> np.uint64(11)) * _DOUBLE_SCALE


@njit(cache=True)
def _init_assignments(w, n_topics, init_nkw, beta, state):
    """Draw initial topic assignments.

    With init_nkw (previous slice's topic-word counts) the draw is
    proportional to count + beta per word, which chains topic identities
    across slices; otherwise uniform.
    """
    n = w.shape[0]
    z = np.empty(n, dtype=np.int32)
    use_warm = init_nkw.shape[0] == n_topics
    for i in range(n):
        state, u = _next_uniform(state)
        if use_warm:
            wi = w[i]
            total = 0.0
            for k in range(n_topics):
                total += init_nkw[k, wi] + beta
            r = u * total
            acc = 0.0
            zi = n_topics - 1
            for k in range(n_topics):
                acc += init_nkw[k, wi] + beta
                if r < acc:
                    zi = k
                    break
            z[i] = zi
        else:
            zi = int(u * n_topics)
            if zi >= n_topics:
                zi = n_topics - 1
            z[i] = zi
    return z, state


@njit(cache=True)
def _sweep(w, d, z, ndk, nkw, nk, alpha, beta, iterations, state):
    """Run full Gibbs sweeps in place over one slice's token stream."""
    n_topics = nkw.shape[0]
    vbeta = nkw.shape[1] * beta
    p = np.empty(n_topics, dtype=np.float64)
    for _ in range(iterations):
        for i in range(w.shape[0]):
            wi = w[i]
            di = d[i]
            zi = z[i]
            ndk[di, zi] -= 1
            nkw[zi, wi] -= 1
            nk[zi] -= 1
            total = 0.0
            for k in range(n_topics):
                v = ((nkw[k, wi] + beta) / (nk[k] + vbeta)
                     * (ndk[di, k] + alpha))
                p[k] = v
                total += v
            state, u = _next_uniform(state)
            r = u * total
            acc = 0.0
            knew = n_topics - 1
            for k in range(n_topics):
                acc += p[k]
                if r < acc:
                    knew = k
                    break
            z[i] = knew
            ndk[di, knew] += 1
            nkw[knew, wi] += 1
            nk[knew] += 1
    return state


def sample_slice(w: np.ndarray, d: np.ndarray, n_docs: int, n_topics: int,
                 vocab_size: int, alpha: float, beta: float,
                 iterations: int, state: np.uint64,
                 init_nkw: np.ndarray | None = None):
    """Sample one slice; returns (ndk, nkw, new rng state)."""
    if init_nkw is None:
        init_nkw = np.zeros((0, 0), dtype=np.int64)
    # a uint64 returned from a jitted function arrives as a Python int, so
    # re-wrap before handing it back to the kernels
    z, state = _init_assignments(w, n_topics, init_nkw, beta,
                                 np.uint64(state))
    ndk = np.zeros((n_docs, n_topics), dtype=np.int64)
    nkw = np.zeros((n_topics, vocab_size), dtype=np.int64)
    nk = np.zeros(n_topics, dtype=np.int64)
    for i in range(w.shape[0]):
        ndk[d[i], z[i]] += 1
        nkw[z[i], w[i]] += 1
        nk[z[i]] += 1
    state = _sweep(w, d, z, ndk, nkw, nk, alpha, beta, iterations,
                   np.uint64(state))
    return ndk, nkw, np.uint64(state)
