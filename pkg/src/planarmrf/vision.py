"""Stereo disparity as MAP inference on the pixel grid.

Each left-image pixel is a vertex; label i means "shift i-1 columns".
The data term rewards a pixel for matching the right-image pixel i-1
columns to its left, the pairwise term scores neighboring pixels of the
left image, and both are measured as squared CIELUV distances below a
ceiling beta, so a larger beta means a flatter landscape. beta must be
at least the largest distance appearing in any term, which keeps every
table entry nonnegative and the slab scheme applicable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .graph import grid_graph
from .mrf import MRFInstance
from .ptas import PtasConfig, boundary_seed, solve_ptas  # noqa: F401  (boundary_seed re-exported)

_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
# White point: the matrix applied to RGB(1,1,1). Using the row sums keeps
# pure white at exactly L*=100, u*=v*=0 and every neutral gray on u*=v*=0.
_WHITE = _RGB_TO_XYZ.sum(axis=1)


def rgb_to_cieluv(image):
    """uint8 sRGB (h, w, 3) -> float64 CIELUV (h, w, 3) as (L*, u*, v*)."""
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3:
        raise InputError("expected an (h, w, 3) image")
    srgb = image.astype(np.float64) / 255.0
    linear = np.where(
        srgb <= 0.04045, srgb / 12.92, ((srgb + 0.055) / 1.055) ** 2.4
    )
    xyz = linear @ _RGB_TO_XYZ.T
    X, Y, Z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    Xn, Yn, Zn = _WHITE
    y = Y / Yn
    cutoff = (6.0 / 29.0) ** 3
    lstar = np.where(y > cutoff, 116.0 * np.cbrt(y) - 16.0, (29.0 / 3.0) ** 3 * y)
    denom = X + 15.0 * Y + 3.0 * Z
    safe = np.where(denom > 0, denom, 1.0)
    up = np.where(denom > 0, 4.0 * X / safe, 0.0)
    vp = np.where(denom > 0, 9.0 * Y / safe, 0.0)
    un = 4.0 * Xn / (Xn + 15.0 * Yn + 3.0 * Zn)
    vn = 9.0 * Yn / (Xn + 15.0 * Yn + 3.0 * Zn)
    ustar = 13.0 * lstar * (up - un)
    vstar = 13.0 * lstar * (vp - vn)
    return np.stack([lstar, ustar, vstar], axis=-1)


@dataclass
class StereoParams:
    """Model knobs. beta=None means the smallest valid ceiling."""

    num_labels: int = 4
    beta: float | None = None
    two_pass: bool = True
    smooth_radius: int = 1


def _phi_distances(left_luv, right_luv, num_labels):
    """Per-label squared-distance grids; out-of-frame cells hold NaN."""
    h, w, _ = left_luv.shape
    d2 = np.full((num_labels, h, w), np.nan)
    for i in range(num_labels):
        if i >= w:
            break
        diff = left_luv[:, i:] - right_luv[:, : w - i]
        d2[i][:, i:] = (diff**2).sum(axis=-1)
    return d2


def _psi_distances(left_luv):
    """(horizontal, vertical) squared distances between grid neighbors."""
    dh = ((left_luv[:, :-1] - left_luv[:, 1:]) ** 2).sum(axis=-1)
    dv = ((left_luv[:-1] - left_luv[1:]) ** 2).sum(axis=-1)
    return dh, dv


def auto_beta(left, right, num_labels):
    """Smallest beta keeping every phi and psi entry nonnegative."""
    left_luv = rgb_to_cieluv(left)
    right_luv = rgb_to_cieluv(right)
    d2 = _phi_distances(left_luv, right_luv, num_labels)
    dh, dv = _psi_distances(left_luv)
    cands = [np.nanmax(d2) if np.isfinite(d2).any() else 0.0]
    if dh.size:
        cands.append(dh.max())
    if dv.size:
        cands.append(dv.max())
    return float(max(cands))


def build_stereo_instance(left, right, params):
    """MRF over the left image's pixel grid.

    phi[u][i] = beta - d(left u, right u shifted i-1)^2, or 0 when the
    shifted column falls off the frame. psi on every 4-neighbor edge
    rewards agreement: beta - d(left u, left v)^2 on equal labels and 0
    otherwise, so label changes are cheapest across color edges. Raises
    when an explicit beta is below the validity minimum.
    """
    left = np.asarray(left)
    right = np.asarray(right)
    if left.shape != right.shape:
        raise InputError(
            f"image shapes differ: {left.shape} vs {right.shape}"
        )
    L = int(params.num_labels)
    if L < 1:
        raise InputError("num_labels must be >= 1")
    left_luv = rgb_to_cieluv(left)
    right_luv = rgb_to_cieluv(right)
    h, w, _ = left_luv.shape
    d2 = _phi_distances(left_luv, right_luv, L)
    dh, dv = _psi_distances(left_luv)
    required = max(
        float(np.nanmax(d2)) if np.isfinite(d2).any() else 0.0,
        float(dh.max()) if dh.size else 0.0,
        float(dv.max()) if dv.size else 0.0,
    )
    beta = params.beta
    if beta is None:
        beta = required
    elif beta < required:
        raise InputError(
            f"beta={beta} leaves negative entries; needs at least {required}"
        )

    phi = np.where(np.isnan(d2), 0.0, beta - d2)  # (L, h, w)
    phi = phi.transpose(1, 2, 0).reshape(h * w, L)

    graph = grid_graph(h, w)
    edge_d2 = np.concatenate([dh.reshape(-1), dv.reshape(-1)])
    psi = (beta - edge_d2)[:, None, None] * np.eye(L)[None, :, :]
    return MRFInstance(graph, L, phi, psi)


def two_pass_combine(instance, first, second):
    """Best-of two (labels, score) runs; ties keep the first."""
    if second is None or first[1] >= second[1]:
        return first
    return second


def solve_stereo(left, right, params, epsilon=1.0 / 3.0, root=None,
                 width_cap=None, workers=1):
    """Full pipeline: build, sweep both directions, combine, smooth.

    Returns (label grid (h, w), combined score before smoothing,
    per-pass diagnostics list).
    """
    from .exact import DEFAULT_WIDTH_CAP

    instance = build_stereo_instance(left, right, params)
    h, w = instance.graph.grid_shape
    cfg = PtasConfig(
        epsilon=epsilon,
        root=root,
        width_cap=width_cap if width_cap is not None else DEFAULT_WIDTH_CAP,
        workers=workers,
    )
    labels_a, score_a, diag_a = solve_ptas(instance, cfg, seed_order="asc")
    diags = [diag_a]
    second = None
    if params.two_pass:
        labels_b, score_b, diag_b = solve_ptas(instance, cfg, seed_order="desc")
        diags.append(diag_b)
        second = (labels_b, score_b)
    labels, score = two_pass_combine(instance, (labels_a, score_a), second)
    grid = labels.reshape(h, w)
    if params.smooth_radius > 0:
        grid = median_smooth(grid, params.smooth_radius)
    return grid, score, diags


def median_smooth(grid, radius):
    """Per-pixel lower median over a clipped square window.

    The lower median keeps labels integral even for even-sized corner
    windows; output values therefore stay inside the input's range.
    """
    if radius < 0:
        raise InputError("radius must be nonnegative")
    grid = np.asarray(grid)
    if radius == 0:
        return grid.copy()
    h, w = grid.shape
    out = np.empty_like(grid)
    for r in range(h):
        r0, r1 = max(0, r - radius), min(h, r + radius + 1)
        for c in range(w):
            c0, c1 = max(0, c - radius), min(w, c + radius + 1)
            win = np.sort(grid[r0:r1, c0:c1], axis=None)
            out[r, c] = win[(win.size - 1) // 2]
    return out


def mislabel_rate(pred, truth, tolerance=0):
    """Fraction of pixels whose label misses the truth by more than
    `tolerance`."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise InputError("shape mismatch between prediction and truth")
    return float(np.mean(np.abs(pred.astype(np.int64) - truth.astype(np.int64)) > tolerance))


def labels_to_gray(grid, num_labels):
    """Label i -> round((i-1) * 255 / (L-1)); a single label maps to 255."""
    grid = np.asarray(grid)
    if num_labels == 1:
        return np.full(grid.shape, 255, dtype=np.uint8)
    gray = np.rint((grid - 1) * 255.0 / (num_labels - 1))
    return gray.astype(np.uint8)


@dataclass(frozen=True)
class ShiftRegion:
    """Rectangle of the base image moved left by a known disparity.

    Rows [top, bottom) and columns [left, right) are half-open; the
    shifted copy lands at columns [left - disparity, right - disparity)
    in the right image.
    """

    top: int
    bottom: int
    left: int
    right: int
    disparity: int


def shift_scene(base, plan):
    """Synthetic stereo pair with exact ground truth.

    The left image is the base unchanged; the right image repaints each
    planned rectangle of the base shifted left by its disparity, as if
    that patch sat in front of the rest (later regions overwrite
    earlier ones where shifted copies land on them). Returns (left,
    right, truth) with truth as 1-based labels over the left image:
    disparity d becomes label d + 1, background is label 1. Pixels just
    right of a region keep their unshifted match as well, so a sliver
    of each region is genuinely ambiguous, as repeated texture is in
    real pairs.
    """
    base = np.asarray(base)
    if base.ndim != 3 or base.shape[2] != 3:
        raise InputError(f"base must be (h, w, 3), got {base.shape}")
    h, w, _ = base.shape
    left = base.copy()
    right = base.copy()
    truth = np.ones((h, w), dtype=np.int64)
    for reg in plan:
        d = reg.disparity
        if d < 0 or d >= w:
            raise InputError(f"disparity {d} outside 0..{w - 1}")
        if not (0 <= reg.top < reg.bottom <= h):
            raise InputError(f"region rows {reg.top}:{reg.bottom} out of bounds")
        if not (0 <= reg.left < reg.right <= w) or reg.left - d < 0:
            raise InputError(
                f"region columns {reg.left}:{reg.right} shifted by {d} out of bounds"
            )
        right[reg.top : reg.bottom, reg.left - d : reg.right - d] = base[
            reg.top : reg.bottom, reg.left : reg.right
        ]
        truth[reg.top : reg.bottom, reg.left : reg.right] = d + 1
    return left, right, truth


# Four colors at the corners of a near-regular tetrahedron in CIELUV:
# all six pairwise squared distances land within 1% of one another.
# Laid out on anti-diagonal stripes, every pixel pair at column offset
# 1..3 crosses classes, so wrong matches and neighbor contrasts all sit
# at the common distance. That pins the per-edge agreement reward near
# zero while the data term keeps a full-size gap on every wrong label.
_SCENE_PALETTE = np.array(
    [[229, 186, 192], [85, 161, 207], [10, 31, 25], [128, 22, 137]],
    dtype=np.int64,
)
_SCENE_JITTER = 5


def scene_fixture(height, width, num_labels, seed):
    """Colored random-dot base with three bands at disparities 1, 2, 3.

    The base cycles four contrasting colors along anti-diagonals with
    per-pixel channel jitter, the texture a random-dot stereogram
    needs: uniform independent noise would leave neighboring pixels
    close in color often enough to drown the match scores. Band rows sit at
    fixed fractions of the height, columns span the middle of the
    frame, and num_labels caps how many bands appear (L = 4 gives all
    three). Returns the shift_scene triple.
    """
    if height < 8 or width < 16:
        raise InputError("scene needs at least 8x16 pixels")
    rng = np.random.default_rng(seed)
    rows, cols = np.mgrid[0:height, 0:width]
    base = _SCENE_PALETTE[(rows + cols) % 4]
    base = base + rng.integers(
        -_SCENE_JITTER, _SCENE_JITTER + 1, size=(height, width, 3)
    )
    base = np.clip(base, 0, 255).astype(np.uint8)
    bands = [(0.12, 0.32), (0.40, 0.60), (0.68, 0.88)]
    c0, c1 = int(round(width * 0.25)), int(round(width * 0.85))
    plan = []
    for i, (top, bot) in enumerate(bands[: max(0, min(3, num_labels - 1))]):
        r0, r1 = int(round(height * top)), int(round(height * bot))
        plan.append(ShiftRegion(r0, r1, c0, c1, i + 1))
    return shift_scene(base, plan)
