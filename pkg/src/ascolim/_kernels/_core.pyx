# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels: int64 fast paths for the exact hot loops.

Contracts mirror ``ascolim._kernels.pure``.  Every function checks a
conservative magnitude bound before multiplying and raises
``OverflowError`` when the int64 path cannot be trusted; the dispatcher
falls back to the pure twin, so exactness is never at risk.
"""

from libc.stdlib cimport free, malloc

cdef long long _BOUND = (<long long>1) << 62


cdef long long* _to_ll(object seq, Py_ssize_t n, long long* maxabs) except NULL:
    cdef long long* buf = <long long*> malloc(n * sizeof(long long))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    cdef long long v
    try:
        for i in range(n):
            v = seq[i]  # raises OverflowError past int64 automatically
            buf[i] = v
            if v < 0:
                v = -v
            if v > maxabs[0]:
                maxabs[0] = v
    except BaseException:
        free(buf)
        raise
    return buf


def matvec_q(mat_num, mat_den, vec_num, vec_den):
    cdef Py_ssize_t nrows = len(mat_num)
    cdef Py_ssize_t ncols = len(vec_num)
    cdef long long maxv = 0, maxm = 0
    cdef long long* vec = _to_ll(vec_num, ncols, &maxv)
    cdef long long* mat = NULL
    cdef Py_ssize_t i, j
    cdef long long acc
    out = []
    try:
        mat = <long long*> malloc(nrows * ncols * sizeof(long long))
        if mat == NULL:
            raise MemoryError()
        for i in range(nrows):
            row = mat_num[i]
            for j in range(ncols):
                acc = row[j]
                mat[i * ncols + j] = acc
                if acc < 0:
                    acc = -acc
                if acc > maxm:
                    maxm = acc
        # bound check in Python ints: |row . vec| <= ncols * maxm * maxv
        if int(ncols) * int(maxm) * int(maxv) >= int(_BOUND):
            raise OverflowError("matvec bound")
        for i in range(nrows):
            acc = 0
            for j in range(ncols):
                acc += mat[i * ncols + j] * vec[j]
            out.append(acc)
    finally:
        free(vec)
        if mat != NULL:
            free(mat)
    return tuple(out), mat_den * vec_den


def max_pairwise_sqdist_q(coords_num):
    cdef Py_ssize_t n = len(coords_num)
    if n < 2:
        return 0
    cdef Py_ssize_t dim = len(coords_num[0])
    cdef long long maxc = 0
    cdef long long* buf = NULL
    cdef Py_ssize_t i, j, k
    cdef long long acc, d, best = 0
    buf = <long long*> malloc(n * dim * sizeof(long long))
    if buf == NULL:
        raise MemoryError()
    try:
        for i in range(n):
            row = coords_num[i]
            for k in range(dim):
                d = row[k]
                buf[i * dim + k] = d
                if d < 0:
                    d = -d
                if d > maxc:
                    maxc = d
        # |sum of dim squared diffs| <= dim * (2*maxc)^2, checked exactly
        if int(dim) * (2 * int(maxc)) ** 2 >= int(_BOUND):
            raise OverflowError("sqdist bound")
        for i in range(n):
            for j in range(i + 1, n):
                acc = 0
                for k in range(dim):
                    d = buf[i * dim + k] - buf[j * dim + k]
                    acc += d * d
                if acc > best:
                    best = acc
    finally:
        free(buf)
    return best


def winding_crossings_q(xs, ys, dx_obj, dy_obj):
    cdef Py_ssize_t n = len(xs)
    cdef long long dx = dx_obj
    cdef long long dy = dy_obj
    cdef long long maxv = 0, maxd
    cdef long long* bx = _to_ll(xs, n, &maxv)
    cdef long long* by = NULL
    cdef long long* cr = NULL
    cdef long long* dt = NULL
    cdef Py_ssize_t i, j
    cdef long long ca, cb, total = 0
    try:
        by = _to_ll(ys, n, &maxv)
        maxd = dx if dx >= 0 else -dx
        if (dy if dy >= 0 else -dy) > maxd:
            maxd = dy if dy >= 0 else -dy
        # cross/dot entries are bounded by 2*maxd*maxv; the crossing test
        # multiplies two of them and subtracts, so check in Python ints
        if 2 * (2 * int(maxd) * int(maxv)) ** 2 >= int(_BOUND):
            raise OverflowError("winding bound")
        cr = <long long*> malloc(n * sizeof(long long))
        dt = <long long*> malloc(n * sizeof(long long))
        if cr == NULL or dt == NULL:
            raise MemoryError()
        for i in range(n):
            cr[i] = dx * by[i] - dy * bx[i]
            dt[i] = dx * bx[i] + dy * by[i]
            if cr[i] == 0 and dt[i] >= 0:
                raise ValueError("vertex on ray")
        for i in range(n):
            j = i + 1
            if j == n:
                j = 0
            ca = cr[i]
            cb = cr[j]
            if ca <= 0 < cb:
                if dt[i] * cb - dt[j] * ca > 0:
                    total += 1
            elif cb <= 0 < ca:
                if dt[j] * ca - dt[i] * cb > 0:
                    total -= 1
    finally:
        free(bx)
        if by != NULL:
            free(by)
        if cr != NULL:
            free(cr)
        if dt != NULL:
            free(dt)
    return total
