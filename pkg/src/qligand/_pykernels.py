"""Numpy implementation of the simulator kernels (used when the extension is absent)."""

import numpy as np

KIND_FLIP = 0
KIND_SWAP = 1


def permute(indices, kinds, cmasks, abits, bbits):
    """Apply a packed run of permutation gates to ``indices`` in place."""
    for kind, cm, a, b in zip(kinds.tolist(), cmasks.tolist(), abits.tolist(), bbits.tolist()):
        cm, a, b = np.uint64(cm), np.uint64(a), np.uint64(b)
        hit = (indices & cm) == cm
        if kind == KIND_FLIP:
            indices[hit] ^= a
        else:
            differ = ((indices & a) != 0) != ((indices & b) != 0)
            indices[hit & differ] ^= a | b


def hadamard(indices, amps, qubit, prune):
    """Hadamard on ``qubit`` for a state sorted by index; returns a new sorted state."""
    bit = np.uint64(1) << np.uint64(qubit)
    keys = indices & ~bit
    high = (indices & bit) != 0
    uniq, inv = np.unique(keys, return_inverse=True)
    a0 = np.zeros(len(uniq), dtype=np.complex128)
    a1 = np.zeros(len(uniq), dtype=np.complex128)
    a0[inv[~high]] = amps[~high]
    a1[inv[high]] = amps[high]
    s = np.sqrt(0.5)
    out_idx = np.concatenate([uniq, uniq | bit])
    out_amp = np.concatenate([(a0 + a1) * s, (a0 - a1) * s])
    keep = np.abs(out_amp) >= prune
    out_idx, out_amp = out_idx[keep], out_amp[keep]
    order = np.argsort(out_idx, kind="stable")
    return out_idx[order], out_amp[order]
