"""Vectorized numpy implementation of the convolution kernels.

im2col via stride tricks feeding BLAS tensordot; the input-gradient is the
full correlation with the rotated kernel, computed with the same window
machinery on a re-padded gradient.
"""

import numpy as np


def _pad(x, ph, pw):
    if ph == 0 and pw == 0:
        return x
    return np.pad(x, ((0, 0), (0, 0), (ph, ph), (pw, pw)))


def _windows(x, kh, kw):
    # [b,c,H,W] -> [b,c,oh,ow,kh,kw] view
    return np.lib.stride_tricks.sliding_window_view(x, (kh, kw), axis=(2, 3))


def conv2d_forward(x, w, ph, pw):
    kh, kw = w.shape[2], w.shape[3]
    win = _windows(_pad(x, ph, pw), kh, kw)
    y = np.tensordot(win, w, axes=([1, 4, 5], [1, 2, 3]))
    return np.ascontiguousarray(y.transpose(0, 3, 1, 2))


def conv2d_backward_input(gy, w, ph, pw, h, wd):
    kh, kw = w.shape[2], w.shape[3]
    wflip = w[:, :, ::-1, ::-1]
    win = _windows(_pad(gy, kh - 1, kw - 1), kh, kw)
    gxp = np.tensordot(win, wflip, axes=([1, 4, 5], [0, 2, 3]))
    gxp = gxp.transpose(0, 3, 1, 2)
    return np.ascontiguousarray(gxp[:, :, ph:ph + h, pw:pw + wd])


def conv2d_backward_weight(gy, x, ph, pw, kh, kw):
    win = _windows(_pad(x, ph, pw), kh, kw)
    return np.tensordot(gy, win, axes=([0, 2, 3], [0, 2, 3]))


def conv1x1_forward(x, w):
    b, cin, h, wd = x.shape
    y = np.matmul(w[:, :, 0, 0], x.reshape(b, cin, h * wd))
    return y.reshape(b, w.shape[0], h, wd)


def conv1x1_backward_input(gy, w):
    b, cout, h, wd = gy.shape
    gx = np.matmul(w[:, :, 0, 0].T, gy.reshape(b, cout, h * wd))
    return gx.reshape(b, w.shape[1], h, wd)


def conv1x1_backward_weight(gy, x):
    b, cout, h, wd = gy.shape
    cin = x.shape[1]
    gw = np.matmul(gy.reshape(b, cout, h * wd),
                   x.reshape(b, cin, h * wd).transpose(0, 2, 1)).sum(axis=0)
    return gw.reshape(cout, cin, 1, 1)
