"""Numba-jitted convolution and pooling kernels.

Default backend when numba is importable.  Loops are ordered so prange
iterations own disjoint output slices: results are bit-identical regardless
of thread count, and fastmath stays off so the arithmetic is reproducible.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

_JIT = {"cache": True, "fastmath": False}


def _pad2d(x: np.ndarray, pad: int) -> np.ndarray:
    if pad == 0:
        return np.ascontiguousarray(x)
    return np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))


@njit(parallel=True, **_JIT)
def _conv_fwd(xp, w, b, stride, oh, ow):
    n, cin, hp, wp = xp.shape
    cout = w.shape[0]
    kh, kw = w.shape[2], w.shape[3]
    y = np.empty((n, cout, oh, ow), dtype=np.float64)
    for i in prange(n):
        for oc in range(cout):
            for r in range(oh):
                for c in range(ow):
                    y[i, oc, r, c] = b[oc]
            for ic in range(cin):
                for u in range(kh):
                    for v in range(kw):
                        wv = w[oc, ic, u, v]
                        for r in range(oh):
                            hr = r * stride + u
                            for c in range(ow):
                                y[i, oc, r, c] += wv * xp[i, ic, hr, c * stride + v]
    return y


@njit(parallel=True, **_JIT)
def _conv_bwd_dx(dyp_dil, w, h, wd):
    # dyp_dil: output gradient, stride-dilated and padded by (k-1-pad)
    n, cout, hp, wp = dyp_dil.shape
    cin = w.shape[1]
    kh, kw = w.shape[2], w.shape[3]
    dx = np.empty((n, cin, h, wd), dtype=np.float64)
    for i in prange(n):
        for ic in range(cin):
            for r in range(h):
                for c in range(wd):
                    dx[i, ic, r, c] = 0.0
            for oc in range(cout):
                for u in range(kh):
                    for v in range(kw):
                        wv = w[oc, ic, kh - 1 - u, kw - 1 - v]
                        for r in range(h):
                            hr = r + u
                            for c in range(wd):
                                dx[i, ic, r, c] += wv * dyp_dil[i, oc, hr, c + v]
    return dx


@njit(parallel=True, **_JIT)
def _conv_bwd_dw(xp, dy, stride, kh, kw):
    n, cin, hp, wp = xp.shape
    cout, oh, ow = dy.shape[1], dy.shape[2], dy.shape[3]
    dw = np.zeros((cout, cin, kh, kw), dtype=np.float64)
    db = np.zeros(cout, dtype=np.float64)
    for oc in prange(cout):
        for ic in range(cin):
            for u in range(kh):
                for v in range(kw):
                    acc = 0.0
                    for i in range(n):
                        for r in range(oh):
                            hr = r * stride + u
                            for c in range(ow):
                                acc += dy[i, oc, r, c] * xp[i, ic, hr, c * stride + v]
                    dw[oc, ic, u, v] = acc
        s = 0.0
        for i in range(n):
            for r in range(oh):
                for c in range(ow):
                    s += dy[i, oc, r, c]
        db[oc] = s
    return dw, db


def conv2d_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray, stride: int, pad: int) -> np.ndarray:
    n, cin, h, wd = x.shape
    kh, kw = w.shape[2], w.shape[3]
    oh = (h + 2 * pad - kh) // stride + 1
    ow = (wd + 2 * pad - kw) // stride + 1
    return _conv_fwd(_pad2d(x, pad), w, b, stride, oh, ow)


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
    if kh - 1 - pad < 0 or kw - 1 - pad < 0:
        raise ValueError(f"padding {pad} exceeds kernel extent {kh - 1}")

    dw = db = None
    if need_param_grads:
        dw, db = _conv_bwd_dw(_pad2d(x, pad), np.ascontiguousarray(dy), stride, kh, kw)

    edge = kh - 1 - pad
    dil_h = (oh - 1) * stride + 1
    dil_w = (ow - 1) * stride + 1
    rem_h = (h + 2 * pad - kh) - (oh - 1) * stride
    rem_w = (wd + 2 * pad - kw) - (ow - 1) * stride
    dyp = np.zeros((n, cout, dil_h + rem_h + 2 * edge, dil_w + rem_w + 2 * edge))
    dyp[:, :, edge : edge + dil_h : stride, edge : edge + dil_w : stride] = dy
    dx = _conv_bwd_dx(dyp, w, h, wd)
    return dx, dw, db


@njit(parallel=True, **_JIT)
def _pool_fwd(x, window, stride, oh, ow):
    n, c, h, w = x.shape
    y = np.empty((n, c, oh, ow), dtype=np.float64)
    arg = np.empty((n, c, oh, ow), dtype=np.int64)
    for i in prange(n):
        for ch in range(c):
            for r in range(oh):
                for cc in range(ow):
                    best = -np.inf
                    besta = 0
                    for u in range(window):
                        hr = r * stride + u
                        for v in range(window):
                            wc = cc * stride + v
                            val = x[i, ch, hr, wc]
                            if val > best:
                                best = val
                                besta = hr * w + wc
                    y[i, ch, r, cc] = best
                    arg[i, ch, r, cc] = besta
    return y, arg


@njit(parallel=True, **_JIT)
def _pool_bwd(dy, arg, n, c, h, w):
    dx = np.zeros((n, c, h * w), dtype=np.float64)
    oh, ow = dy.shape[2], dy.shape[3]
    for i in prange(n):
        for ch in range(c):
            for r in range(oh):
                for cc in range(ow):
                    dx[i, ch, arg[i, ch, r, cc]] += dy[i, ch, r, cc]
    return dx.reshape(n, c, h, w)


def maxpool_forward(x: np.ndarray, window: int, stride: int) -> tuple[np.ndarray, np.ndarray]:
    n, c, h, w = x.shape
    oh = (h - window) // stride + 1
    ow = (w - window) // stride + 1
    return _pool_fwd(np.ascontiguousarray(x), window, stride, oh, ow)


def maxpool_backward(dy: np.ndarray, arg: np.ndarray, x_shape: tuple[int, ...]) -> np.ndarray:
    n, c, h, w = x_shape
    return _pool_bwd(np.ascontiguousarray(dy), arg, n, c, h, w)
