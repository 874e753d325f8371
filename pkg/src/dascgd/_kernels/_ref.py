"""Pure-numpy reference kernels.

The compiled versions in ``_core.pyx`` must return bit-identical results,
so every accumulation here is written with an explicit, fixed evaluation
order (plain loops over the batch axis instead of ``.sum``/``.mean``, one
rounding per arithmetic op).  Keep the two files in lockstep.
"""

import numpy as np


def rl_inner_eval(next_state, reward, proj, features, discount):
    """Tail of a sampled inner map and its averaged feature block.

    next_state : (S, B) int64 sampled successor indices
    reward     : (S, B) sampled rewards
    proj       : (S,)   features @ x, precomputed by the caller
    features   : (S, d)
    Returns (value_tail (S,), jac_tail (S, d)) where
    value_tail[s] = mean_b(reward[s,b] + discount * proj[next_state[s,b]])
    jac_tail[s]   = discount * mean_b(features[next_state[s,b]]).
    """
    batch = next_state.shape[1]
    contrib = reward + discount * proj[next_state]
    acc = contrib[:, 0].copy()
    for b in range(1, batch):
        acc += contrib[:, b]
    value_tail = acc / batch

    feat_acc = features[next_state[:, 0]].copy()
    for b in range(1, batch):
        feat_acc += features[next_state[:, b]]
    jac_tail = discount * (feat_acc / batch)
    return value_tail, jac_tail


def quantize_values(x, u, nbits):
    """Stochastic low-bit quantizer given pre-drawn uniforms ``u``.

    Maps x to (xmax / 2^(nbits-1)) * sign(x) * floor(2^(nbits-1)|x|/xmax + u);
    the all-zero input short-circuits to zero.
    """
    xmax = float(np.max(np.abs(x)))
    if xmax == 0.0:
        return np.zeros_like(x)
    step = float(2 ** (nbits - 1))
    scaled = (step * np.abs(x)) / xmax
    levels = np.floor(scaled + u)
    return (xmax / step) * (np.sign(x) * levels)
