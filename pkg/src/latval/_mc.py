"""Seeded, block-structured Monte Carlo driver.

Samples are drawn in fixed-size blocks, each from its own child generator
derived from (seed, tags, block index). The result depends only on the seed,
the tags and the sample count, never on how many threads ran the blocks.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

BLOCK = 50_000
DEFAULT_SAMPLES = 200_000
THREADS = 1


def set_threads(n):
    """Default worker count for runs that do not pass ``threads`` explicitly."""
    global THREADS
    THREADS = max(1, int(n))


def child_rng(seed, *tags):
    key = tuple(t & (2 ** 32 - 1) if isinstance(t, int) else tag_of(t) for t in tags)
    ss = np.random.SeedSequence(entropy=int(seed) & (2 ** 64 - 1), spawn_key=key)
    return np.random.default_rng(ss)


def tag_of(obj):
    """Stable 32-bit tag for a hashable, deterministic key (tuples of ints and strings)."""
    h = 2166136261
    for ch in repr(obj).encode():
        h = ((h ^ ch) * 16777619) & 0xFFFFFFFF
    return h


def run_blocks(trial, n_samples, seed, tags=(), threads=None, max_rounds=50):
    """Collect ``n_samples`` valid outcomes from ``trial(rng, m) -> (outcome, valid)``.

    ``outcome`` is an integer array (a category per sample); invalid samples
    (degenerate events) are discarded and replaced by further blocks.
    Returns the concatenated valid outcomes, truncated to ``n_samples``, and
    the number of discarded samples.
    """
    n_samples = int(n_samples)
    threads = THREADS if threads is None else threads
    if n_samples <= 0:
        raise ValueError("n_samples must be positive")
    nblocks = -(-n_samples // BLOCK)
    sizes = [min(BLOCK, n_samples - i * BLOCK) for i in range(nblocks)]

    def one(i, m):
        out, valid = trial(child_rng(seed, *tags, i), m)
        return out[valid], int(np.count_nonzero(~valid))

    if threads and threads > 1 and nblocks > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda a: one(*a), enumerate(sizes)))
    else:
        parts = [one(i, m) for i, m in enumerate(sizes)]
    outs = [p[0] for p in parts]
    dropped = sum(p[1] for p in parts)
    have = sum(len(o) for o in outs)
    i = nblocks
    while have < n_samples:
        if i >= nblocks + max_rounds:
            raise RuntimeError("too many degenerate samples")
        o, k = one(i, min(BLOCK, max(n_samples - have, 1000)))
        outs.append(o)
        dropped += k
        have += len(o)
        i += 1
    return np.concatenate(outs)[:n_samples], dropped


def bernoulli(trial, n_samples, seed, tags=(), threads=None):
    """Estimate a probability; returns (p_hat, stderr, n, dropped)."""
    out, dropped = run_blocks(trial, n_samples, seed, tags, threads)
    n = len(out)
    p = float(np.mean(out))
    return p, float(np.sqrt(max(p * (1 - p), 0.0) / n)), n, dropped


def multinomial(trial, n_categories, n_samples, seed, tags=(), threads=None):
    """Estimate category probabilities; returns (p_hat, covariance, n, dropped)."""
    out, dropped = run_blocks(trial, n_samples, seed, tags, threads)
    n = len(out)
    p = np.bincount(out, minlength=n_categories)[:n_categories] / n
    cov = (np.diag(p) - np.outer(p, p)) / n
    return p, cov, n, dropped


def sphere(rng, m, d):
    x = rng.standard_normal((m, d))
    return x / np.linalg.norm(x, axis=1, keepdims=True)
