"""Pure-numpy batch path sampler (fallback when the extension is absent).

Arc arrays are a single CSR over globally-numbered trellis nodes; the
within-node cumulative probabilities are stored offset by the node id, so
one vectorized searchsorted per step resolves every sample's arc at once.
Consumes the same uniform matrix as the compiled kernel and produces
bit-identical output.
"""

import numpy as np


def sample_paths(entry_cum, entry_node, entry_prefix, indptr, arc_cum,
                 arc_token, arc_next, uniforms, out):
    n_samples, n_cols = uniforms.shape
    k = entry_prefix.shape[1]
    e = np.searchsorted(entry_cum, uniforms[:, 0], side="right")
    if k:
        out[:, :k] = entry_prefix[e]
    cur = entry_node[e]
    for t in range(n_cols - 1):
        idx = np.searchsorted(arc_cum, cur + uniforms[:, t + 1], side="right")
        out[:, k + t] = arc_token[idx]
        cur = arc_next[idx]
    return out
