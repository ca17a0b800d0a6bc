# Direct-loop convolution kernels for small spatial filters.
# Compiled with boundscheck/wraparound off; all arrays C-contiguous float64.

import numpy as np

cimport cython


def conv2d_forward(double[:, :, :, ::1] x, double[:, :, :, ::1] w,
                   Py_ssize_t ph, Py_ssize_t pw):
    cdef Py_ssize_t b = x.shape[0], cin = x.shape[1]
    cdef Py_ssize_t h = x.shape[2], wd = x.shape[3]
    cdef Py_ssize_t cout = w.shape[0], kh = w.shape[2], kw = w.shape[3]
    cdef Py_ssize_t oh = h + 2 * ph - kh + 1, ow = wd + 2 * pw - kw + 1
    out = np.zeros((b, cout, oh, ow))
    cdef double[:, :, :, ::1] y = out
    cdef Py_ssize_t ib, oc, ic, oy, ox, u, v, iy, ix, u0, u1, v0, v1
    cdef double acc
    with nogil:
        for ib in range(b):
            for oc in range(cout):
                for oy in range(oh):
                    u0 = ph - oy if oy < ph else 0
                    u1 = h + ph - oy if oy > h + ph - kh else kh
                    for ox in range(ow):
                        v0 = pw - ox if ox < pw else 0
                        v1 = wd + pw - ox if ox > wd + pw - kw else kw
                        acc = 0.0
                        for ic in range(cin):
                            for u in range(u0, u1):
                                iy = oy + u - ph
                                for v in range(v0, v1):
                                    ix = ox + v - pw
                                    acc += w[oc, ic, u, v] * x[ib, ic, iy, ix]
                        y[ib, oc, oy, ox] = acc
    return out


def conv2d_backward_input(double[:, :, :, ::1] gy, double[:, :, :, ::1] w,
                          Py_ssize_t ph, Py_ssize_t pw,
                          Py_ssize_t h, Py_ssize_t wd):
    cdef Py_ssize_t b = gy.shape[0], cout = gy.shape[1]
    cdef Py_ssize_t oh = gy.shape[2], ow = gy.shape[3]
    cdef Py_ssize_t cin = w.shape[1], kh = w.shape[2], kw = w.shape[3]
    out = np.zeros((b, cin, h, wd))
    cdef double[:, :, :, ::1] gx = out
    cdef Py_ssize_t ib, ic, oc, iy, ix, u, v, u0, u1, v0, v1
    cdef double acc
    with nogil:
        for ib in range(b):
            for ic in range(cin):
                for iy in range(h):
                    # oy = iy - u + ph must land in [0, oh)
                    u0 = iy + ph - oh + 1
                    if u0 < 0:
                        u0 = 0
                    u1 = iy + ph + 1
                    if u1 > kh:
                        u1 = kh
                    for ix in range(wd):
                        v0 = ix + pw - ow + 1
                        if v0 < 0:
                            v0 = 0
                        v1 = ix + pw + 1
                        if v1 > kw:
                            v1 = kw
                        acc = 0.0
                        for oc in range(cout):
                            for u in range(u0, u1):
                                for v in range(v0, v1):
                                    acc += w[oc, ic, u, v] * \
                                        gy[ib, oc, iy - u + ph, ix - v + pw]
                        gx[ib, ic, iy, ix] = acc
    return out


def conv2d_backward_weight(double[:, :, :, ::1] gy, double[:, :, :, ::1] x,
                           Py_ssize_t ph, Py_ssize_t pw,
                           Py_ssize_t kh, Py_ssize_t kw):
    cdef Py_ssize_t b = gy.shape[0], cout = gy.shape[1]
    cdef Py_ssize_t oh = gy.shape[2], ow = gy.shape[3]
    cdef Py_ssize_t cin = x.shape[1], h = x.shape[2], wd = x.shape[3]
    out = np.zeros((cout, cin, kh, kw))
    cdef double[:, :, :, ::1] gw = out
    cdef Py_ssize_t oc, ic, u, v, ib, oy, ox, oy0, oy1, ox0, ox1
    cdef double acc
    with nogil:
        for oc in range(cout):
            for ic in range(cin):
                for u in range(kh):
                    oy0 = ph - u if u < ph else 0
                    oy1 = h - u + ph if h - u + ph < oh else oh
                    for v in range(kw):
                        ox0 = pw - v if v < pw else 0
                        ox1 = wd - v + pw if wd - v + pw < ow else ow
                        acc = 0.0
                        for ib in range(b):
                            for oy in range(oy0, oy1):
                                for ox in range(ox0, ox1):
                                    acc += gy[ib, oc, oy, ox] * \
                                           x[ib, ic, oy + u - ph, ox + v - pw]
                        gw[oc, ic, u, v] = acc
    return out
