"""JIT-compiled skip-gram negative-sampling epoch (Hogwild-style workers).

Workers own disjoint corpus shards and write unsynchronized sparse updates
into the shared float32 matrices; races are benign by contract. A single
worker plus a fixed seed is bit-reproducible. Importing this module requires
numba; the trainer falls back to the pure-numpy path when it is missing.
"""

import math

import numpy as np
from numba import njit, prange

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)


@njit(cache=True, inline="always")
def _splitmix64(state):
    state = state + _GOLDEN
    z = state
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    z = z ^ (z >> U64(31))
    return state, z


@njit(cache=True, parallel=True, fastmath=True)
def sgns_epoch(
    triples,
    syn0,
    syn1,
    table,
    negatives,
    alpha0,
    alpha_floor,
    pairs_before,
    total_pairs,
    workers,
    epoch_seed,
    worker_loss,
    worker_pairs,
):
    n = triples.shape[0]
    d = syn0.shape[1]
    table_n = U64(table.shape[0])
    k = negatives

    for w in prange(workers):
        lo = (w * n) // workers
        hi = ((w + 1) * n) // workers
        state = U64(epoch_seed) ^ (U64(w + 1) * _GOLDEN)
        state, _ = _splitmix64(state)
        state, _ = _splitmix64(state)

        loss = 0.0
        local = 0
        neu1e = np.zeros(d, dtype=np.float32)
        targets = np.empty(k + 1, dtype=np.int64)
        gains = np.empty(k + 1, dtype=np.float32)

        for row in range(lo, hi):
            for ci in range(3):
                center = triples[row, ci]
                for cj in range(3):
                    if cj == ci:
                        continue
                    context = triples[row, cj]

                    # linear decay over the global pair count, estimated from
                    # local progress (exact when workers == 1)
                    progress = (pairs_before + float(local) * workers) / total_pairs
                    lr = alpha0 * (1.0 - progress)
                    if lr < alpha_floor:
                        lr = alpha_floor
                    local += 1

                    targets[0] = context
                    for j in range(1, k + 1):
                        state, z = _splitmix64(state)
                        t = table[z % table_n]
                        retry = 0
                        while t == context and retry < 3:
                            state, z = _splitmix64(state)
                            t = table[z % table_n]
                            retry += 1
                        targets[j] = t

                    # forward on pre-update rows
                    for j in range(k + 1):
                        trow = targets[j]
                        f = np.float32(0.0)
                        for i in range(d):
                            f += syn1[trow, i] * syn0[center, i]
                        fj = float(f)
                        if j == 0:
                            loss += math.log1p(math.exp(-fj)) if fj > -30.0 else -fj
                            label = 1.0
                        else:
                            loss += math.log1p(math.exp(fj)) if fj < 30.0 else fj
                            label = 0.0
                        if fj > 30.0:
                            sigma = 1.0
                        elif fj < -30.0:
                            sigma = 0.0
                        else:
                            sigma = 1.0 / (1.0 + math.exp(-fj))
                        gains[j] = np.float32((label - sigma) * lr)

                    for i in range(d):
                        neu1e[i] = np.float32(0.0)
                    for j in range(k + 1):
                        g = gains[j]
                        trow = targets[j]
                        for i in range(d):
                            tmp = syn1[trow, i]
                            neu1e[i] += g * tmp
                            syn1[trow, i] = tmp + g * syn0[center, i]
                    for i in range(d):
                        syn0[center, i] += neu1e[i]

        worker_loss[w] = loss
        worker_pairs[w] = local
