"""Pure-numpy convolution and pooling kernels (im2col + BLAS matmul).

Fallback backend for machines without numba; selected with
``FUITBENCH_BACKEND=numpy``.  All arrays are float64 and the results agree
with the numba backend to floating-point roundoff.
"""

from __future__ import annotations

import numpy as np


def _im2col(x: np.ndarray, kh: int, kw: int, stride: int, pad: int) -> tuple[np.ndarray, int, int]:
    n, cin, h, w = x.shape
    oh = (h + 2 * pad - kh) // stride + 1
    ow = (w + 2 * pad - kw) // stride + 1
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    win = np.lib.stride_tricks.sliding_window_view(xp, (kh, kw), axis=(2, 3))
    win = win[:, :, ::stride, ::stride]  # (n, cin, oh, ow, kh, kw)
    cols = win.transpose(0, 2, 3, 1, 4, 5).reshape(n * oh * ow, cin * kh * kw)
    return np.ascontiguousarray(cols), oh, ow


def conv2d_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray, stride: int, pad: int) -> np.ndarray:
    cout, cin, kh, kw = w.shape
    n = x.shape[0]
    cols, oh, ow = _im2col(x, kh, kw, stride, pad)
    y = cols @ w.reshape(cout, -1).T + b
    return np.ascontiguousarray(y.reshape(n, oh, ow, cout).transpose(0, 3, 1, 2))


def conv2d_backward(
    x: np.ndarray,
    w: np.ndarray,
    dy: np.ndarray,
    stride: int,
    pad: int,
    need_param_grads: bool = True,
) -> tuple[np.ndarray, np.ndarray | None, np.ndarray | None]:
    n, cin, h, wd = x.shape
    cout, _, kh, kw = w.shape
    oh, ow = dy.shape[2], dy.shape[3]

    dw = db = None
    if need_param_grads:
        cols, _, _ = _im2col(x, kh, kw, stride, pad)
        dy_mat = dy.transpose(0, 2, 3, 1).reshape(n * oh * ow, cout)
        dw = (dy_mat.T @ cols).reshape(cout, cin, kh, kw)
        db = dy.sum(axis=(0, 2, 3))

    # dx = full correlation of the (dilated) output gradient with the
    # 180-degree-rotated kernel, channels swapped
    if kh - 1 - pad < 0 or kw - 1 - pad < 0:
        raise ValueError(f"padding {pad} exceeds kernel extent {kh - 1}")
    dil_h = (oh - 1) * stride + 1
    dil_w = (ow - 1) * stride + 1
    rem_h = (h + 2 * pad - kh) - (oh - 1) * stride
    rem_w = (wd + 2 * pad - kw) - (ow - 1) * stride
    dy_dil = np.zeros((n, cout, dil_h + rem_h, dil_w + rem_w))
    dy_dil[:, :, :dil_h:stride, :dil_w:stride] = dy
    w_rot = np.ascontiguousarray(w[:, :, ::-1, ::-1].transpose(1, 0, 2, 3))
    dx = conv2d_forward(dy_dil, w_rot, np.zeros(cin), 1, kh - 1 - pad)
    return dx, dw, db


def maxpool_forward(x: np.ndarray, window: int, stride: int) -> tuple[np.ndarray, np.ndarray]:
    """Max pooling; returns values and the absolute flat argmax per window.

    Ties resolve to the first element in row-major window order, matching the
    numba backend's scan order.
    """
    n, c, h, w = x.shape
    oh = (h - window) // stride + 1
    ow = (w - window) // stride + 1
    win = np.lib.stride_tricks.sliding_window_view(x, (window, window), axis=(2, 3))
    win = win[:, :, ::stride, ::stride].reshape(n, c, oh, ow, window * window)
    rel = win.argmax(axis=-1)
    y = np.take_along_axis(win, rel[..., None], axis=-1)[..., 0]
    u, v = rel // window, rel % window
    rows = np.arange(oh)[None, None, :, None] * stride + u
    cols = np.arange(ow)[None, None, None, :] * stride + v
    arg = rows * w + cols
    return np.ascontiguousarray(y), arg.astype(np.int64)


def maxpool_backward(dy: np.ndarray, arg: np.ndarray, x_shape: tuple[int, ...]) -> np.ndarray:
    n, c, h, w = x_shape
    dx = np.zeros((n, c, h * w))
    nc_idx = np.repeat(np.arange(n * c), dy.shape[2] * dy.shape[3])
    np.add.at(dx.reshape(n * c, h * w), (nc_idx, arg.reshape(n * c, -1).ravel()), dy.ravel())
    return dx.reshape(n, c, h, w)
