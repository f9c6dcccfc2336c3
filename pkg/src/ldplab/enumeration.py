"""Exhaustive word enumeration with duplicate-product merging.

Depth-first enumeration of S^n is replaced by a breadth-first sweep over
*distinct* renormalized products: after each multiplication the running
product is scaled so its largest absolute entry is 1, and two states merge
when their scaled entries and accumulated log scale agree after rounding
to 1e-10.  Merging collapses, e.g., commuting subwords and pure powers,
and is exact for probabilities: weights of merged words add.
"""

from __future__ import annotations

import numpy as np

ROUND_DECIMALS = 10


def _dedup(states, logs, probs, aux):
    n = states.shape[0]
    keys = np.concatenate(
        [states.reshape(n, -1), logs[:, None]], axis=1
    )
    keys = np.round(keys, ROUND_DECIMALS) + 0.0  # normalize -0.0
    _, first, inverse = np.unique(
        keys, axis=0, return_index=True, return_inverse=True
    )
    merged_probs = None
    if probs is not None:
        merged_probs = np.bincount(inverse, weights=probs, minlength=first.size)
    merged_aux = aux[first] if aux is not None else None
    return states[first], logs[first], merged_probs, merged_aux


def level_step(mats, states, logs, probs=None, weights=None, aux=None, aux_atoms=None):
    """Extend every state by every atom, renormalize, and merge duplicates.

    ``aux`` is an optional additive per-state payload (here: exact log
    determinants): the extension by atom a adds ``aux_atoms[a]``.  Merged
    states carry the payload of their first representative; payloads that
    are functions of the product (like log |det|) agree across merges.
    """
    n_atoms = mats.shape[0]
    new_states = np.einsum("aij,njk->anik", mats, states).reshape(
        -1, mats.shape[1], mats.shape[2]
    )
    scale = np.max(np.abs(new_states), axis=(1, 2))
    new_states /= scale[:, None, None]
    new_logs = (np.log(scale).reshape(n_atoms, -1) + logs[None, :]).reshape(-1)
    new_probs = None
    if probs is not None:
        new_probs = (np.asarray(weights)[:, None] * probs[None, :]).reshape(-1)
    new_aux = None
    if aux is not None:
        new_aux = (np.asarray(aux_atoms)[:, None] + aux[None, :]).reshape(-1)
    return _dedup(new_states, new_logs, new_probs, new_aux)


def initial_level(dim):
    return np.eye(dim)[None, :, :], np.zeros(1)
