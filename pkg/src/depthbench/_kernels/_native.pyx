# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: exact KD-tree NN queries, exact squared EDT, bilinear gather.

Floating point semantics match depthbench._kernels._fallback bit for bit:
squared distances accumulate per dimension left to right, bilinear weights
combine row-first, and the build is compiled with -ffp-contract=off.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, floor, sqrt

cnp.import_array()

DEF LEAF_SIZE = 16


cdef class KDTree:
    """Exact nearest-neighbour index over an (N, 3) pointcloud.

    Axis-aligned median splits on the widest dimension; queries return the
    exact Euclidean distance to the closest indexed point.
    """

    cdef double[:, ::1] _pts
    cdef long long[::1] _idx
    cdef int[::1] _dim
    cdef double[::1] _split
    cdef long long[::1] _left
    cdef long long[::1] _right
    cdef long long[::1] _start
    cdef long long[::1] _end
    cdef long long _n_nodes

    def __cinit__(self, points):
        pts = np.ascontiguousarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError("points must have shape (N, 3)")
        cdef long long n = pts.shape[0]
        if n == 0:
            raise ValueError("cannot index an empty pointcloud")
        self._pts = pts
        self._idx = np.arange(n, dtype=np.int64)
        cdef long long cap = 2 * n + 1
        self._dim = np.zeros(cap, dtype=np.int32)
        self._split = np.zeros(cap, dtype=np.float64)
        self._left = np.full(cap, -1, dtype=np.int64)
        self._right = np.full(cap, -1, dtype=np.int64)
        self._start = np.zeros(cap, dtype=np.int64)
        self._end = np.zeros(cap, dtype=np.int64)
        self._n_nodes = 0
        self._build(0, n)

    cdef long long _build(self, long long start, long long end):
        cdef long long node = self._n_nodes
        self._n_nodes += 1
        self._start[node] = start
        self._end[node] = end
        if end - start <= LEAF_SIZE:
            return node

        cdef int d, widest = 0
        cdef double lo, hi, v, extent, best_extent = -1.0
        cdef long long i
        for d in range(3):
            lo = INFINITY
            hi = -INFINITY
            for i in range(start, end):
                v = self._pts[self._idx[i], d]
                if v < lo:
                    lo = v
                if v > hi:
                    hi = v
            extent = hi - lo
            if extent > best_extent:
                best_extent = extent
                widest = d

        cdef long long mid = (start + end) // 2
        self._select(start, end, mid, widest)
        self._dim[node] = widest
        self._split[node] = self._pts[self._idx[mid], widest]
        self._left[node] = self._build(start, mid)
        self._right[node] = self._build(mid, end)
        return node

    cdef void _select(self, long long lo, long long hi, long long k, int d):
        # Hoare quickselect on pts[idx, d]; places the k-th element in
        # sorted position with smaller values before it.
        cdef long long i, j, tmp
        cdef double pivot
        hi -= 1
        while lo < hi:
            pivot = self._pts[self._idx[(lo + hi) // 2], d]
            i = lo
            j = hi
            while i <= j:
                while self._pts[self._idx[i], d] < pivot:
                    i += 1
                while self._pts[self._idx[j], d] > pivot:
                    j -= 1
                if i <= j:
                    tmp = self._idx[i]
                    self._idx[i] = self._idx[j]
                    self._idx[j] = tmp
                    i += 1
                    j -= 1
            if k <= j:
                hi = j
            elif k >= i:
                lo = i
            else:
                return

    cdef double _query_node(self, long long node, double q0, double q1, double q2,
                            double best) nogil:
        cdef long long i, p
        cdef double d2, dx, dy, dz, delta
        if self._left[node] < 0:
            for i in range(self._start[node], self._end[node]):
                p = self._idx[i]
                dx = self._pts[p, 0] - q0
                d2 = dx * dx
                dy = self._pts[p, 1] - q1
                d2 = d2 + dy * dy
                dz = self._pts[p, 2] - q2
                d2 = d2 + dz * dz
                if d2 < best:
                    best = d2
            return best
        if self._dim[node] == 0:
            delta = q0 - self._split[node]
        elif self._dim[node] == 1:
            delta = q1 - self._split[node]
        else:
            delta = q2 - self._split[node]
        if delta < 0.0:
            best = self._query_node(self._left[node], q0, q1, q2, best)
            if delta * delta < best:
                best = self._query_node(self._right[node], q0, q1, q2, best)
        else:
            best = self._query_node(self._right[node], q0, q1, q2, best)
            if delta * delta < best:
                best = self._query_node(self._left[node], q0, q1, q2, best)
        return best

    def query(self, queries):
        """Exact NN distance from each query point to the indexed cloud."""
        qs = np.ascontiguousarray(queries, dtype=np.float64)
        if qs.ndim != 2 or qs.shape[1] != 3:
            raise ValueError("queries must have shape (M, 3)")
        cdef double[:, ::1] q = qs
        cdef long long m = qs.shape[0]
        out = np.empty(m, dtype=np.float64)
        cdef double[::1] o = out
        cdef long long i
        with nogil:
            for i in range(m):
                o[i] = sqrt(self._query_node(0, q[i, 0], q[i, 1], q[i, 2], INFINITY))
        return out


def edt_squared(edges):
    """Exact squared Euclidean distance to the nearest edge pixel.

    Felzenszwalb-Huttenlocher two-pass transform; all intermediate values
    are exact integers in float64. Pixels of an edge-free grid get +inf.
    """
    e = np.ascontiguousarray(edges, dtype=np.uint8)
    if e.ndim != 2:
        raise ValueError("edges must be a 2D grid")
    if not e.any():
        return np.full(e.shape, np.inf, dtype=np.float64)

    cdef cnp.uint8_t[:, ::1] ev = e
    cdef long long h = e.shape[0], w = e.shape[1]
    cdef double BIG = 1e30
    g_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] g = g_arr
    cdef long long r, c, q, k
    cdef double dist

    # pass 1: squared distance to the nearest edge within each column
    for c in range(w):
        dist = BIG
        for r in range(h):
            if ev[r, c]:
                dist = 0.0
            elif dist < BIG:
                dist += 1.0
            g[r, c] = dist
        dist = BIG
        for r in range(h - 1, -1, -1):
            if ev[r, c]:
                dist = 0.0
            elif dist < BIG:
                dist += 1.0
            if dist < g[r, c]:
                g[r, c] = dist
        for r in range(h):
            if g[r, c] < BIG:
                g[r, c] = g[r, c] * g[r, c]

    # pass 2: 1D lower envelope along each row
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    v_arr = np.empty(w, dtype=np.int64)
    z_arr = np.empty(w + 1, dtype=np.float64)
    cdef long long[::1] v = v_arr
    cdef double[::1] z = z_arr
    cdef double s, fq, fv

    for r in range(h):
        k = 0
        v[0] = 0
        z[0] = -INFINITY
        z[1] = INFINITY
        for q in range(1, w):
            fq = g[r, q] + <double> (q * q)
            while True:
                fv = g[r, v[k]] + <double> (v[k] * v[k])
                s = (fq - fv) / <double> (2 * (q - v[k]))
                if s <= z[k]:
                    k -= 1
                else:
                    break
            k += 1
            v[k] = q
            z[k] = s
            z[k + 1] = INFINITY
        k = 0
        for q in range(w):
            while z[k + 1] < <double> q:
                k += 1
            out[r, q] = <double> ((q - v[k]) * (q - v[k])) + g[r, v[k]]

    return out_arr


def bilinear_gather(image, u, v):
    """Bilinear samples of ``image`` (H, W, C) at continuous pixel coords.

    Returns (values (P, C), in_bounds (P,)); out-of-bounds samples are 0.
    """
    img = np.ascontiguousarray(image, dtype=np.float64)
    if img.ndim != 3:
        raise ValueError("image must have shape (H, W, C)")
    uu = np.ascontiguousarray(u, dtype=np.float64)
    vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef double[:, :, ::1] im = img
    cdef double[::1] us = uu
    cdef double[::1] vs = vv
    cdef long long h = img.shape[0], w = img.shape[1], nc = img.shape[2]
    cdef long long p, n = uu.shape[0], ix0, iy0, ix1, iy1, ch
    out = np.zeros((n, nc), dtype=np.float64)
    inb = np.zeros(n, dtype=bool)
    cdef double[:, ::1] o = out
    cdef cnp.uint8_t[::1] m = inb.view(np.uint8)
    cdef double x0, y0, tx, ty, row0, row1

    with nogil:
        for p in range(n):
            if not (us[p] >= 0.0 and us[p] <= w - 1.0 and vs[p] >= 0.0 and vs[p] <= h - 1.0):
                continue
            m[p] = 1
            x0 = floor(us[p])
            y0 = floor(vs[p])
            tx = us[p] - x0
            ty = vs[p] - y0
            ix0 = <long long> x0
            iy0 = <long long> y0
            if ix0 < 0:
                ix0 = 0
            if ix0 > w - 1:
                ix0 = w - 1
            if iy0 < 0:
                iy0 = 0
            if iy0 > h - 1:
                iy0 = h - 1
            ix1 = ix0 + 1 if ix0 + 1 < w - 1 else w - 1
            iy1 = iy0 + 1 if iy0 + 1 < h - 1 else h - 1
            for ch in range(nc):
                row0 = im[iy0, ix0, ch] * (1.0 - tx) + im[iy0, ix1, ch] * tx
                row1 = im[iy1, ix0, ch] * (1.0 - tx) + im[iy1, ix1, ch] * tx
                o[p, ch] = row0 * (1.0 - ty) + row1 * ty
    return out, inb
