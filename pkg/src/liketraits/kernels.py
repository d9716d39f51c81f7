"""Hot numeric kernels with numba-compiled and pure-numpy implementations.

The backend is chosen once at import time from the ``LIKETRAITS_BACKEND``
environment variable:

* ``auto`` (default) — numba when importable, numpy otherwise
* ``numba``          — require numba, fail loudly if missing
* ``numpy``          — force the vectorized numpy fallbacks

Both implementations of every kernel are kept importable (``*_numba`` /
``*_numpy``) so tests can check agreement and ``benchmarks/bench_kernels.py``
can time them side by side. Results agree up to floating-point summation
order; tie-breaking rules (lowest feature index, then lowest threshold) are
identical on both paths.
"""

from __future__ import annotations

import math
import os

import numpy as np

_CHOICE = os.environ.get("LIKETRAITS_BACKEND", "auto").strip().lower() or "auto"
if _CHOICE not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"LIKETRAITS_BACKEND must be 'auto', 'numba' or 'numpy', got {_CHOICE!r}"
    )

if _CHOICE == "numpy":
    _numba = None
else:
    try:
        import numba as _numba
    except ImportError:
        if _CHOICE == "numba":
            raise
        _numba = None

#: "numba" or "numpy" — which implementations the public names dispatch to.
ACTIVE_BACKEND = "numba" if _numba is not None else "numpy"


# --------------------------------------------------------------------------
# regression-tree split scan (squared-error criterion)
#
# Gain is measured as the reduction in node SSE, computed from prefix sums:
# SSE(node) - SSE(left) - SSE(right) = sL^2/nL + sR^2/nR - s^2/n.
# A split is only taken when gain is strictly positive; the first candidate
# in (ascending feature, ascending threshold) order wins ties.
# --------------------------------------------------------------------------

def _best_split_sse_loop(X, y, feats, min_leaf):
    n = X.shape[0]
    best_feat = -1
    best_thr = 0.0
    best_gain = 0.0
    total = 0.0
    for i in range(n):
        total += y[i]
    parent = total * total / n
    col = np.empty(n, dtype=np.float64)
    for fi in range(feats.shape[0]):
        f = feats[fi]
        for i in range(n):
            col[i] = X[i, f]
        order = np.argsort(col)
        left_sum = 0.0
        for pos in range(n - 1):
            i = order[pos]
            left_sum += y[i]
            x_here = col[i]
            x_next = col[order[pos + 1]]
            if x_here == x_next:
                continue
            nl = pos + 1
            nr = n - nl
            if nl < min_leaf or nr < min_leaf:
                continue
            right_sum = total - left_sum
            gain = left_sum * left_sum / nl + right_sum * right_sum / nr - parent
            if gain > best_gain:
                best_feat = f
                best_thr = 0.5 * (x_here + x_next)
                best_gain = gain
    return best_feat, best_thr, best_gain


def best_split_sse_numpy(X, y, feats, min_leaf):
    """Vectorized split scan. Same contract as the loop kernel."""
    n = y.shape[0]
    total = float(np.sum(y))
    parent = total * total / n
    best_feat, best_thr, best_gain = -1, 0.0, 0.0
    nl = np.arange(1, n, dtype=np.float64)
    nr = n - nl
    for f in feats:
        col = X[:, f]
        order = np.argsort(col)
        xs = col[order]
        left = np.cumsum(y[order])[:-1]
        valid = (xs[:-1] != xs[1:]) & (nl >= min_leaf) & (nr >= min_leaf)
        if not valid.any():
            continue
        right = total - left
        gains = np.where(valid, left * left / nl + right * right / nr - parent, -np.inf)
        pos = int(np.argmax(gains))
        gain = float(gains[pos])
        if gain > best_gain:
            best_feat = int(f)
            best_thr = 0.5 * float(xs[pos] + xs[pos + 1])
            best_gain = gain
    return best_feat, best_thr, best_gain


# --------------------------------------------------------------------------
# classification-tree split scan (gini criterion)
#
# Equivalent maximization of sum_c cL_c^2/nL + sum_c cR_c^2/nR; gain is the
# weighted impurity decrease, non-negative and 0 for useless splits.
# --------------------------------------------------------------------------

def _best_split_gini_loop(X, labels, feats, min_leaf, n_classes):
    n = X.shape[0]
    total = np.zeros(n_classes, dtype=np.float64)
    for i in range(n):
        total[labels[i]] += 1.0
    parent_score = 0.0
    for c in range(n_classes):
        parent_score += total[c] * total[c]
    parent_score /= n
    best_feat = -1
    best_thr = 0.0
    best_gain = 0.0
    col = np.empty(n, dtype=np.float64)
    left = np.empty(n_classes, dtype=np.float64)
    for fi in range(feats.shape[0]):
        f = feats[fi]
        for i in range(n):
            col[i] = X[i, f]
        order = np.argsort(col)
        for c in range(n_classes):
            left[c] = 0.0
        for pos in range(n - 1):
            i = order[pos]
            left[labels[i]] += 1.0
            x_here = col[i]
            x_next = col[order[pos + 1]]
            if x_here == x_next:
                continue
            nl = pos + 1
            nr = n - nl
            if nl < min_leaf or nr < min_leaf:
                continue
            sl = 0.0
            sr = 0.0
            for c in range(n_classes):
                sl += left[c] * left[c]
                rc = total[c] - left[c]
                sr += rc * rc
            gain = (sl / nl + sr / nr - parent_score) / n
            if gain > best_gain:
                best_feat = f
                best_thr = 0.5 * (x_here + x_next)
                best_gain = gain
    return best_feat, best_thr, best_gain


def best_split_gini_numpy(X, labels, feats, min_leaf, n_classes):
    n = labels.shape[0]
    total = np.bincount(labels, minlength=n_classes).astype(np.float64)
    parent_score = float(np.sum(total * total)) / n
    best_feat, best_thr, best_gain = -1, 0.0, 0.0
    nl = np.arange(1, n, dtype=np.float64)
    nr = n - nl
    onehot_cache = np.eye(n_classes, dtype=np.float64)
    for f in feats:
        col = X[:, f]
        order = np.argsort(col)
        xs = col[order]
        counts = np.cumsum(onehot_cache[labels[order]], axis=0)[:-1]
        valid = (xs[:-1] != xs[1:]) & (nl >= min_leaf) & (nr >= min_leaf)
        if not valid.any():
            continue
        sl = np.sum(counts * counts, axis=1)
        rc = total[None, :] - counts
        sr = np.sum(rc * rc, axis=1)
        gains = np.where(valid, (sl / nl + sr / nr - parent_score) / n, -np.inf)
        pos = int(np.argmax(gains))
        gain = float(gains[pos])
        if gain > best_gain:
            best_feat = int(f)
            best_thr = 0.5 * float(xs[pos] + xs[pos + 1])
            best_gain = gain
    return best_feat, best_thr, best_gain


# --------------------------------------------------------------------------
# pairwise neighbor distances: euclidean + penalty * |support symdiff|
# --------------------------------------------------------------------------

def _pairwise_dist_loop(A, B, SA, SB, penalty):
    na = A.shape[0]
    nb = B.shape[0]
    d = A.shape[1]
    out = np.empty((na, nb), dtype=np.float64)
    for i in range(na):
        for j in range(nb):
            sq = 0.0
            mismatch = 0
            for k in range(d):
                diff = A[i, k] - B[j, k]
                sq += diff * diff
                if SA[i, k] != SB[j, k]:
                    mismatch += 1
            out[i, j] = math.sqrt(sq) + penalty * mismatch
    return out


def pairwise_dist_numpy(A, B, SA, SB, penalty):
    sq = (
        np.sum(A * A, axis=1)[:, None]
        + np.sum(B * B, axis=1)[None, :]
        - 2.0 * (A @ B.T)
    )
    np.maximum(sq, 0.0, out=sq)  # guard tiny negatives from cancellation
    sa = SA.astype(np.float64)
    sb = SB.astype(np.float64)
    mismatch = sa.sum(axis=1)[:, None] + sb.sum(axis=1)[None, :] - 2.0 * (sa @ sb.T)
    return np.sqrt(sq) + penalty * mismatch


# --------------------------------------------------------------------------
# decision-tree routing: leaf index per row for a flat-array tree
# (feature[i] < 0 marks node i as a leaf; route left when x <= threshold)
# --------------------------------------------------------------------------

def _tree_apply_loop(feature, threshold, left, right, X):
    n = X.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = node
    return out


def tree_apply_numpy(feature, threshold, left, right, X):
    node = np.zeros(X.shape[0], dtype=np.int64)
    rows = np.nonzero(feature[node] >= 0)[0]
    while rows.size:
        nd = node[rows]
        go_left = X[rows, feature[nd]] <= threshold[nd]
        node[rows[go_left]] = left[nd[go_left]]
        node[rows[~go_left]] = right[nd[~go_left]]
        rows = rows[feature[node[rows]] >= 0]
    return node


if _numba is not None:
    _jit = _numba.njit(cache=True)
    best_split_sse_numba = _jit(_best_split_sse_loop)
    best_split_gini_numba = _jit(_best_split_gini_loop)
    pairwise_dist_numba = _jit(_pairwise_dist_loop)
    tree_apply_numba = _jit(_tree_apply_loop)

    best_split_sse = best_split_sse_numba
    best_split_gini = best_split_gini_numba
    pairwise_dist = pairwise_dist_numba
    tree_apply = tree_apply_numba
else:
    best_split_sse_numba = None
    best_split_gini_numba = None
    pairwise_dist_numba = None
    tree_apply_numba = None

    best_split_sse = best_split_sse_numpy
    best_split_gini = best_split_gini_numpy
    pairwise_dist = pairwise_dist_numpy
    tree_apply = tree_apply_numpy
