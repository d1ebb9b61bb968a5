"""Independent brute-force oracles used to cross-check the library.

Everything in here deliberately re-derives results from first principles
(per-item loops, pairwise comparisons, direct convolution) and never calls
the code path it is checking.
"""

from __future__ import annotations

import math


def confusion_loop(preds, threshold):
    """Per-item classification loop -> (tp, fp, tn, fn)."""
    tp = fp = tn = fn = 0
    for p in preds:
        positive = p.cancer_probability >= threshold
        malignant = p.truth == "malignant"
        if malignant and positive:
            tp += 1
        elif malignant:
            fn += 1
        elif positive:
            fp += 1
        else:
            tn += 1
    return tp, fp, tn, fn


def auc_pairwise(scores_pos, scores_neg):
    """Mann-Whitney estimate: mean pairwise win share with half credit for ties."""
    wins = 0.0
    for sp in scores_pos:
        for sn in scores_neg:
            if sp > sn:
                wins += 1.0
            elif sp == sn:
                wins += 0.5
    return wins / (len(scores_pos) * len(scores_neg))


def auc_pairwise_fast(scores_pos, scores_neg):
    """Vectorized version of auc_pairwise for larger draws."""
    import numpy as np

    sp = np.asarray(scores_pos)[:, None]
    sn = np.asarray(scores_neg)[None, :]
    wins = (sp > sn).sum() + 0.5 * (sp == sn).sum()
    return float(wins) / (sp.shape[0] * sn.shape[1])


def grid_axis_loop(dim, patch, stride):
    """Every stride anchor, plus the flush window, plus the undersize case."""
    if dim < patch:
        return [0]
    anchors = []
    pos = 0
    while pos <= dim - patch:
        anchors.append(pos)
        pos += stride
    if anchors[-1] != dim - patch:
        anchors.append(dim - patch)
    return anchors


def tissue_fraction_loop(mask_raster, mask_um_per_px, window, window_um_per_px):
    """Per-target-pixel nearest-neighbor lookup, out-of-mask counts as 0."""
    x, y, w, h = window
    scale = window_um_per_px / mask_um_per_px
    rows = len(mask_raster)
    cols = len(mask_raster[0]) if rows else 0
    hits = 0
    for ty in range(y, y + h):
        my = math.floor((ty + 0.5) * scale)
        for tx in range(x, x + w):
            mx = math.floor((tx + 0.5) * scale)
            if 0 <= my < rows and 0 <= mx < cols and mask_raster[my][mx]:
                hits += 1
    return hits / (w * h)


def lanczos_value(x, a=3.0):
    if x == 0.0:
        return 1.0
    if abs(x) >= a:
        return 0.0
    px = math.pi * x
    return a * math.sin(px) * math.sin(px / a) / (px * px)


def lanczos_resample_loop(source, factor, out_size, offset=(0.0, 0.0), a=3):
    """Direct 2-D convolution per output pixel (separable weights, no matrix ops)."""
    import numpy as np

    src = np.asarray(source, dtype=float)
    out_w, out_h = out_size
    scale = max(factor, 1.0)
    support = a * scale
    out = np.zeros((out_h, out_w, 3))
    for oy in range(out_h):
        cy = offset[1] + (oy + 0.5) * factor - 0.5
        y_taps = range(math.ceil(cy - support), math.floor(cy + support) + 1)
        wy = [(ty, lanczos_value((cy - ty) / scale, a)) for ty in y_taps]
        wy = [(ty, w) for ty, w in wy if 0 <= ty < src.shape[0]]
        y_norm = sum(w for _, w in wy)
        for ox in range(out_w):
            cx = offset[0] + (ox + 0.5) * factor - 0.5
            x_taps = range(math.ceil(cx - support), math.floor(cx + support) + 1)
            wx = [(tx, lanczos_value((cx - tx) / scale, a)) for tx in x_taps]
            wx = [(tx, w) for tx, w in wx if 0 <= tx < src.shape[1]]
            x_norm = sum(w for _, w in wx)
            acc = np.zeros(3)
            for ty, vy in wy:
                for tx, vx in wx:
                    acc += vy * vx * src[ty, tx]
            out[oy, ox] = acc / (y_norm * x_norm)
    return np.clip(np.rint(out), 0, 255).astype("uint8")


def attention_loop(features, v, w):
    """Score, softmax, and weighted sum computed with plain Python loops."""
    n = len(features)
    d = len(features[0])
    l = len(w)
    scores = []
    for k in range(n):
        s = 0.0
        for j in range(l):
            t = 0.0
            for i in range(d):
                t += features[k][i] * v[i][j]
            s += w[j] * math.tanh(t)
        scores.append(s)
    m = max(scores)
    exps = [math.exp(s - m) for s in scores]
    z = sum(exps)
    weights = [e / z for e in exps]
    pooled = [0.0] * d
    for k in range(n):
        for i in range(d):
            pooled[i] += weights[k] * features[k][i]
    return pooled, weights


def argmax_prefer_last(values):
    best = 0
    for i, v in enumerate(values):
        if v >= values[best]:
            best = i
    return best


ISUP_OF_SCORE = {
    "benign": 0,
    "3+3": 1,
    "3+4": 2,
    "4+3": 3,
    "4+4": 4,
    "3+5": 4,
    "5+3": 4,
    "4+5": 5,
    "5+4": 5,
    "5+5": 5,
}


def majority_vote_loop(labels):
    """Mode with ties broken toward the highest (isup, primary, secondary)."""
    counts = {}
    for label in labels:
        counts[label] = counts.get(label, 0) + 1
    top = max(counts.values())

    def key(label):
        if label == "benign":
            return (0, 0, 0)
        p, s = label.split("+")
        return (ISUP_OF_SCORE[label], int(p), int(s))

    return max((label for label, c in counts.items() if c == top), key=key)


def median_sort_loop(values):
    ordered = sorted(values)
    n = len(ordered)
    if n % 2:
        return ordered[n // 2]
    return (ordered[n // 2 - 1] + ordered[n // 2]) / 2.0


def heatmap_loop(attention, anchors, patch_px, extent):
    """Per-pixel mean of covering tiles, normalized by the raster max."""
    width, height = extent
    raster = [[0.0] * width for _ in range(height)]
    for py in range(height):
        for px in range(width):
            covering = [
                a
                for (x, y), a in zip(anchors, attention)
                if x <= px < x + patch_px and y <= py < y + patch_px
            ]
            if covering:
                raster[py][px] = sum(covering) / len(covering)
    peak = max(max(row) for row in raster)
    if peak > 0:
        raster = [[v / peak for v in row] for row in raster]
    return raster
