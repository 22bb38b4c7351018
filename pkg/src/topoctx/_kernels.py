"""Hot array kernels with numba and pure-numpy implementations.

All functions here operate on raw ndarrays (float32 fields, uint8 masks)
and dispatch on the active backend at call time. The two implementations
of each kernel are exact (integer arithmetic, or float min/max without
reassociation), so outputs are bit-identical across backends.

Conventions baked into every kernel:
  * erode = min over the axis cross (center + 2*ndim axis neighbors),
    dilate = max over the full 3^ndim box, both with ZERO outside the grid;
  * squared distances are int64 with INF_SQDIST marking unreachable cells;
  * component labels are dense 1..count in raster first-encounter order.
"""

from __future__ import annotations

import itertools

import numpy as np

from ._backend import HAVE_NUMBA, active_backend

INF_SQDIST = np.iinfo(np.int64).max
# saturation value used while distance passes run; large enough to dominate
# any real squared distance, small enough that adding extent^2 cannot wrap
_SAT = np.int64(1) << 62

if HAVE_NUMBA:
    from numba import njit
else:  # pragma: no cover - numpy-only installs never call the jitted path

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


# ---------------------------------------------------------------------------
# erode / dilate


@njit(cache=True, nogil=True)
def _erode2d_nb(src):
    h, w = src.shape
    out = np.empty_like(src)
    zero = np.float32(0.0)
    for i in range(h):
        for j in range(w):
            v = src[i, j]
            t = src[i - 1, j] if i > 0 else zero
            if t < v:
                v = t
            t = src[i + 1, j] if i < h - 1 else zero
            if t < v:
                v = t
            t = src[i, j - 1] if j > 0 else zero
            if t < v:
                v = t
            t = src[i, j + 1] if j < w - 1 else zero
            if t < v:
                v = t
            out[i, j] = v
    return out


@njit(cache=True, nogil=True)
def _erode3d_nb(src):
    d0, d1, d2 = src.shape
    out = np.empty_like(src)
    zero = np.float32(0.0)
    for z in range(d0):
        for y in range(d1):
            for x in range(d2):
                v = src[z, y, x]
                t = src[z - 1, y, x] if z > 0 else zero
                if t < v:
                    v = t
                t = src[z + 1, y, x] if z < d0 - 1 else zero
                if t < v:
                    v = t
                t = src[z, y - 1, x] if y > 0 else zero
                if t < v:
                    v = t
                t = src[z, y + 1, x] if y < d1 - 1 else zero
                if t < v:
                    v = t
                t = src[z, y, x - 1] if x > 0 else zero
                if t < v:
                    v = t
                t = src[z, y, x + 1] if x < d2 - 1 else zero
                if t < v:
                    v = t
                out[z, y, x] = v
    return out


@njit(cache=True, nogil=True)
def _dilate2d_nb(src):
    h, w = src.shape
    out = np.empty_like(src)
    zero = np.float32(0.0)
    for i in range(h):
        ilo = i - 1 if i > 0 else 0
        ihi = i + 2 if i < h - 1 else i + 1
        for j in range(w):
            v = src[i, j]
            # a border pixel sees at least one outside neighbor, value zero
            if (i == 0 or j == 0 or i == h - 1 or j == w - 1) and v < zero:
                v = zero
            jlo = j - 1 if j > 0 else 0
            jhi = j + 2 if j < w - 1 else j + 1
            for ii in range(ilo, ihi):
                for jj in range(jlo, jhi):
                    t = src[ii, jj]
                    if t > v:
                        v = t
            out[i, j] = v
    return out


@njit(cache=True, nogil=True)
def _dilate3d_nb(src):
    d0, d1, d2 = src.shape
    out = np.empty_like(src)
    zero = np.float32(0.0)
    for z in range(d0):
        zlo = z - 1 if z > 0 else 0
        zhi = z + 2 if z < d0 - 1 else z + 1
        for y in range(d1):
            ylo = y - 1 if y > 0 else 0
            yhi = y + 2 if y < d1 - 1 else y + 1
            for x in range(d2):
                v = src[z, y, x]
                if (
                    z == 0
                    or y == 0
                    or x == 0
                    or z == d0 - 1
                    or y == d1 - 1
                    or x == d2 - 1
                ) and v < zero:
                    v = zero
                xlo = x - 1 if x > 0 else 0
                xhi = x + 2 if x < d2 - 1 else x + 1
                for zz in range(zlo, zhi):
                    for yy in range(ylo, yhi):
                        for xx in range(xlo, xhi):
                            t = src[zz, yy, xx]
                            if t > v:
                                v = t
                out[z, y, x] = v
    return out


def _axis_tap3(arr, axis, op):
    pad = [(0, 0)] * arr.ndim
    pad[axis] = (1, 1)
    p = np.pad(arr, pad)
    lo = [slice(None)] * arr.ndim
    mid = [slice(None)] * arr.ndim
    hi = [slice(None)] * arr.ndim
    lo[axis] = slice(0, -2)
    mid[axis] = slice(1, -1)
    hi[axis] = slice(2, None)
    return op(op(p[tuple(lo)], p[tuple(mid)]), p[tuple(hi)])


def _erode_np(src):
    # min over the axis cross = elementwise min of per-axis 3-tap minima
    out = _axis_tap3(src, 0, np.minimum)
    for ax in range(1, src.ndim):
        np.minimum(out, _axis_tap3(src, ax, np.minimum), out=out)
    return out


def _dilate_np(src):
    # box max is separable: sequential per-axis 3-tap maxima
    out = src
    for ax in range(src.ndim):
        out = _axis_tap3(out, ax, np.maximum)
    return out


def erode(src: np.ndarray) -> np.ndarray:
    """Axis-cross minimum filter, zero outside the grid. float32 in/out."""
    if active_backend() == "numba":
        return _erode2d_nb(src) if src.ndim == 2 else _erode3d_nb(src)
    return _erode_np(src)


def dilate(src: np.ndarray) -> np.ndarray:
    """Full-box maximum filter, zero outside the grid. float32 in/out."""
    if active_backend() == "numba":
        return _dilate2d_nb(src) if src.ndim == 2 else _dilate3d_nb(src)
    return _dilate_np(src)


# ---------------------------------------------------------------------------
# exact squared Euclidean distance transform


@njit(cache=True, nogil=True)
def _sqdist_lines_nb(block):
    # one lower-envelope pass per row of `block`, in place; entries >= _SAT
    # are treated as "no seed reachable yet"
    m, n = block.shape
    v = np.empty(n, np.int64)
    z = np.empty(n + 1, np.float64)
    d = np.empty(n, np.int64)
    for r in range(m):
        f = block[r]
        k = -1
        for q in range(n):
            fq = f[q]
            if fq >= _SAT:
                continue
            if k < 0:
                k = 0
                v[0] = q
                z[0] = -np.inf
                z[1] = np.inf
            else:
                while True:
                    vk = v[k]
                    s = (fq + q * q - (f[vk] + vk * vk)) / (2.0 * (q - vk))
                    if s <= z[k]:
                        k -= 1
                    else:
                        break
                k += 1
                v[k] = q
                z[k] = s
                z[k + 1] = np.inf
        if k < 0:
            for i in range(n):
                d[i] = _SAT
        else:
            j = 0
            for i in range(n):
                while z[j + 1] < i:
                    j += 1
                dq = i - v[j]
                d[i] = f[v[j]] + dq * dq
        for i in range(n):
            f[i] = d[i]


def _sqdist_lines_np(block):
    # exact 1D transform by shift-min against the frozen input line
    n = block.shape[1]
    f = block.copy()
    for k in range(1, n):
        ksq = np.int64(k) * np.int64(k)
        np.minimum(block[:, k:], f[:, :-k] + ksq, out=block[:, k:])
        np.minimum(block[:, :-k], f[:, k:] + ksq, out=block[:, :-k])


def sqdist_from_seeds(seeds: np.ndarray) -> np.ndarray:
    """Exact squared Euclidean distance (int64) to the nonzero cells of
    `seeds`; INF_SQDIST where no seed exists."""
    f = np.where(seeds != 0, np.int64(0), _SAT)
    use_nb = active_backend() == "numba"
    for ax in range(f.ndim):
        moved = np.moveaxis(f, ax, -1)
        shape = moved.shape
        block = np.ascontiguousarray(moved).reshape(-1, shape[-1])
        if use_nb:
            _sqdist_lines_nb(block)
        else:
            _sqdist_lines_np(block)
        f = np.moveaxis(block.reshape(shape), -1, ax)
    out = np.ascontiguousarray(f)
    out[out >= _SAT] = INF_SQDIST
    return out


# ---------------------------------------------------------------------------
# connected component labeling


@njit(cache=True, nogil=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True, nogil=True)
def _union(parent, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra != rb:
        if ra < rb:
            parent[rb] = ra
        else:
            parent[ra] = rb


@njit(cache=True, nogil=True)
def _label2d_nb(mask, offs):
    h, w = mask.shape
    parent = np.empty(h * w, np.int32)
    for i in range(h):
        for j in range(w):
            if mask[i, j] == 0:
                continue
            p = i * w + j
            parent[p] = p
            for t in range(offs.shape[0]):
                ii = i + offs[t, 0]
                jj = j + offs[t, 1]
                if ii >= 0 and 0 <= jj < w and mask[ii, jj] != 0:
                    _union(parent, p, ii * w + jj)
    labels = np.zeros((h, w), np.int32)
    remap = np.zeros(h * w, np.int32)
    count = 0
    for i in range(h):
        for j in range(w):
            if mask[i, j] == 0:
                continue
            r = _find(parent, i * w + j)
            if remap[r] == 0:
                count += 1
                remap[r] = count
            labels[i, j] = remap[r]
    return labels, count


@njit(cache=True, nogil=True)
def _label3d_nb(mask, offs):
    d0, d1, d2 = mask.shape
    parent = np.empty(d0 * d1 * d2, np.int32)
    for z in range(d0):
        for y in range(d1):
            for x in range(d2):
                if mask[z, y, x] == 0:
                    continue
                p = (z * d1 + y) * d2 + x
                parent[p] = p
                for t in range(offs.shape[0]):
                    zz = z + offs[t, 0]
                    yy = y + offs[t, 1]
                    xx = x + offs[t, 2]
                    if (
                        zz >= 0
                        and 0 <= yy < d1
                        and 0 <= xx < d2
                        and mask[zz, yy, xx] != 0
                    ):
                        _union(parent, p, (zz * d1 + yy) * d2 + xx)
    labels = np.zeros((d0, d1, d2), np.int32)
    remap = np.zeros(d0 * d1 * d2, np.int32)
    count = 0
    for z in range(d0):
        for y in range(d1):
            for x in range(d2):
                if mask[z, y, x] == 0:
                    continue
                r = _find(parent, (z * d1 + y) * d2 + x)
                if remap[r] == 0:
                    count += 1
                    remap[r] = count
                labels[z, y, x] = remap[r]
    return labels, count


def _prior_offsets(ndim: int, full: bool) -> np.ndarray:
    # neighbors that precede the origin in raster order
    offs = [
        o
        for o in itertools.product((-1, 0, 1), repeat=ndim)
        if o < (0,) * ndim
    ]
    if not full:
        offs = [o for o in offs if sum(abs(c) for c in o) == 1]
    return np.array(offs, dtype=np.int64)


def _all_offsets(ndim: int, full: bool) -> list[tuple[int, ...]]:
    offs = [
        o
        for o in itertools.product((-1, 0, 1), repeat=ndim)
        if any(c != 0 for c in o)
    ]
    if not full:
        offs = [o for o in offs if sum(abs(c) for c in o) == 1]
    return offs


def _shifted(arr: np.ndarray, off: tuple[int, ...], fill) -> np.ndarray:
    out = np.full_like(arr, fill)
    src = []
    dst = []
    for size, o in zip(arr.shape, off):
        if o >= 0:
            dst.append(slice(o, size))
            src.append(slice(0, size - o))
        else:
            dst.append(slice(0, size + o))
            src.append(slice(-o, size))
    out[tuple(dst)] = arr[tuple(src)]
    return out


def _label_np(mask: np.ndarray, full: bool):
    fg = mask != 0
    idx = np.arange(mask.size, dtype=np.int64).reshape(mask.shape)
    big = np.int64(mask.size)
    lab = np.where(fg, idx, big)
    offs = _all_offsets(mask.ndim, full)
    while True:
        new = lab.copy()
        for off in offs:
            np.minimum(new, _shifted(lab, off, big), out=new)
        new[~fg] = big
        if np.array_equal(new, lab):
            break
        lab = new
    labels = np.zeros(mask.shape, dtype=np.int32)
    vals = lab[fg]
    roots = np.unique(vals)
    labels[fg] = (np.searchsorted(roots, vals) + 1).astype(np.int32)
    return labels, int(roots.size)


def label(mask: np.ndarray, full: bool):
    """Label connected components of a uint8 mask.

    `full` selects the 8/26 neighborhood; False selects the 4/6 one.
    Returns (int32 labels with dense ids 1..count in raster
    first-encounter order, count).
    """
    if mask.size >= 2**31:
        raise ValueError("grid too large to label (flat index exceeds int32)")
    if active_backend() == "numba":
        offs = _prior_offsets(mask.ndim, full)
        if mask.ndim == 2:
            labels, count = _label2d_nb(mask, offs)
        else:
            labels, count = _label3d_nb(mask, offs)
        return labels, int(count)
    return _label_np(mask, full)


# ---------------------------------------------------------------------------
# Euler characteristic of the union of closed unit pixels/voxels


@njit(cache=True, nogil=True)
def _euler2d_nb(mask):
    h, w = mask.shape
    verts = 0
    edges = 0
    faces = 0
    for i in range(h + 1):
        al = i > 0
        ah = i < h
        for j in range(w + 1):
            bl = j > 0
            bh = j < w
            p00 = al and bl and mask[i - 1, j - 1] != 0
            p01 = al and bh and mask[i - 1, j] != 0
            p10 = ah and bl and mask[i, j - 1] != 0
            p11 = ah and bh and mask[i, j] != 0
            if p00 or p01 or p10 or p11:
                verts += 1
            if p10 or p11:
                edges += 1
            if p01 or p11:
                edges += 1
            if p11:
                faces += 1
    return verts - edges + faces


@njit(cache=True, nogil=True)
def _euler3d_nb(mask):
    d0, d1, d2 = mask.shape
    verts = 0
    edges = 0
    faces = 0
    cubes = 0
    for i in range(d0 + 1):
        zl = i > 0
        zh = i < d0
        for j in range(d1 + 1):
            yl = j > 0
            yh = j < d1
            for k in range(d2 + 1):
                xl = k > 0
                xh = k < d2
                v000 = zl and yl and xl and mask[i - 1, j - 1, k - 1] != 0
                v001 = zl and yl and xh and mask[i - 1, j - 1, k] != 0
                v010 = zl and yh and xl and mask[i - 1, j, k - 1] != 0
                v011 = zl and yh and xh and mask[i - 1, j, k] != 0
                v100 = zh and yl and xl and mask[i, j - 1, k - 1] != 0
                v101 = zh and yl and xh and mask[i, j - 1, k] != 0
                v110 = zh and yh and xl and mask[i, j, k - 1] != 0
                v111 = zh and yh and xh and mask[i, j, k] != 0
                if (
                    v000
                    or v001
                    or v010
                    or v011
                    or v100
                    or v101
                    or v110
                    or v111
                ):
                    verts += 1
                if v100 or v101 or v110 or v111:
                    edges += 1
                if v010 or v011 or v110 or v111:
                    edges += 1
                if v001 or v011 or v101 or v111:
                    edges += 1
                if v011 or v111:
                    faces += 1
                if v101 or v111:
                    faces += 1
                if v110 or v111:
                    faces += 1
                if v111:
                    cubes += 1
    return verts - edges + faces - cubes


def _euler2d_np(mask):
    p = np.pad(mask.astype(bool), 1)
    verts = int(
        (p[:-1, :-1] | p[:-1, 1:] | p[1:, :-1] | p[1:, 1:]).sum()
    )
    edges = int((p[1:-1, :-1] | p[1:-1, 1:]).sum())
    edges += int((p[:-1, 1:-1] | p[1:, 1:-1]).sum())
    faces = int(np.count_nonzero(mask))
    return verts - edges + faces


def _euler3d_np(mask):
    p = np.pad(mask.astype(bool), 1)
    v = None
    for sz in (slice(0, -1), slice(1, None)):
        for sy in (slice(0, -1), slice(1, None)):
            for sx in (slice(0, -1), slice(1, None)):
                term = p[sz, sy, sx]
                v = term if v is None else (v | term)
    verts = int(v.sum())
    mid = slice(1, -1)
    lo = slice(0, -1)
    hi = slice(1, None)
    edges = int((p[mid, lo, lo] | p[mid, lo, hi] | p[mid, hi, lo] | p[mid, hi, hi]).sum())
    edges += int((p[lo, mid, lo] | p[lo, mid, hi] | p[hi, mid, lo] | p[hi, mid, hi]).sum())
    edges += int((p[lo, lo, mid] | p[lo, hi, mid] | p[hi, lo, mid] | p[hi, hi, mid]).sum())
    faces = int((p[lo, mid, mid] | p[hi, mid, mid]).sum())
    faces += int((p[mid, lo, mid] | p[mid, hi, mid]).sum())
    faces += int((p[mid, mid, lo] | p[mid, mid, hi]).sum())
    cubes = int(np.count_nonzero(mask))
    return verts - edges + faces - cubes


def euler_char(mask: np.ndarray) -> int:
    """Euler characteristic of the union of closed unit cells of a uint8
    mask; consistent with 8/26 foreground adjacency."""
    if active_backend() == "numba":
        return int(_euler2d_nb(mask) if mask.ndim == 2 else _euler3d_nb(mask))
    return _euler2d_np(mask) if mask.ndim == 2 else _euler3d_np(mask)
