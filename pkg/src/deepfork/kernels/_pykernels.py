"""Pure-Python similarity kernels over a CSR adjacency.

Reference implementation for the compiled extension in ``_ckernels.pyx``.
Both backends must return bit-identical float64 results, so every float
accumulation here follows the same fixed order as the C code: common
neighbours are consumed in ascending node order, and the Katz series is
summed from walk length 1 upward.
"""

import math

import numpy as np

BACKEND = "python"

# Column order of the score block produced per node pair.
SCORE_COLUMNS = (
    "katz",
    "common_neighbors",
    "preferential_attachment",
    "adamic_adar",
    "jaccard",
    "total_neighbors",
)


def _neighbor_slice(indptr, indices, node):
    return indices[indptr[node] : indptr[node + 1]]


def _katz_walks(indptr, indices, a, b, max_len, n_nodes):
    """Exact counts of walks a->b for every length 1..max_len."""
    counts = np.zeros(n_nodes, dtype=np.int64)
    counts[a] = 1
    walks = np.zeros(max_len, dtype=np.int64)
    for level in range(1, max_len):
        nxt = np.zeros(n_nodes, dtype=np.int64)
        for z in np.nonzero(counts)[0]:
            nxt[_neighbor_slice(indptr, indices, z)] += counts[z]
        counts = nxt
        walks[level - 1] = counts[b]
    # Last length: one sparse dot with N(b) instead of a full expansion.
    walks[max_len - 1] = int(counts[_neighbor_slice(indptr, indices, b)].sum())
    return walks


def pair_scores(indptr, indices, pairs_a, pairs_b, beta=0.005, max_len=3):
    """Six similarity scores for each node pair.

    Parameters are the CSR adjacency (``indptr`` int64, ``indices`` int32
    sorted ascending within each row) of the undirected collapsed graph and
    two equal-length arrays of node indices. Returns an (n_pairs, 6) float64
    array with columns ``SCORE_COLUMNS``.
    """
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int32)
    pairs_a = np.asarray(pairs_a, dtype=np.int32)
    pairs_b = np.asarray(pairs_b, dtype=np.int32)
    if pairs_a.shape != pairs_b.shape:
        raise ValueError("pair index arrays must have equal length")
    n_nodes = len(indptr) - 1
    degrees = np.diff(indptr)
    out = np.zeros((len(pairs_a), 6), dtype=np.float64)

    for row, (a, b) in enumerate(zip(pairs_a, pairs_b)):
        a = int(a)
        b = int(b)
        na = _neighbor_slice(indptr, indices, a)
        nb = _neighbor_slice(indptr, indices, b)
        common = np.intersect1d(na, nb, assume_unique=True)
        inter = len(common)
        deg_a = int(degrees[a])
        deg_b = int(degrees[b])
        union = deg_a + deg_b - inter

        aa_sum = 0.0
        for z in common:
            dz = int(degrees[z])
            if dz >= 2:
                aa_sum += 1.0 / math.log(dz)

        walks = _katz_walks(indptr, indices, a, b, max_len, n_nodes)
        katz = 0.0
        beta_pow = 1.0
        for length in range(max_len):
            beta_pow *= beta
            katz += beta_pow * float(walks[length])

        out[row, 0] = katz
        out[row, 1] = float(inter)
        out[row, 2] = float(deg_a * deg_b)
        out[row, 3] = aa_sum
        out[row, 4] = float(inter) / float(union) if union > 0 else 0.0
        out[row, 5] = float(union)
    return out
