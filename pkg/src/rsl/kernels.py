"""Hot inner loops, each with a numba and a pure-numpy implementation.

The numba path is used when numba imports cleanly and the environment
variable ``RSL_NO_NUMBA`` is unset (or set to ``0``/``false``).  Both paths
are always importable as :data:`numpy_kernels` and :data:`numba_kernels` so
tests and ``benchmarks/bench_kernels.py`` can compare them directly.

Kernels
-------
cycle_counts(perms)
    Number of cycles of each row of a ``(m, L)`` array of 0-based
    permutations in one-line form.
class_counts(edges, n_symbols)
    Number of equivalence classes generated by each ``(E, 2)`` edge list
    over ``n_symbols`` symbols.
log_product_prefix(n, m)
    Prefix sums over ``j = 0..m-1`` of ``log1p(j/n)``, ``log1p(-j/n)`` and
    ``2*atanh(j/n)`` with extended-accuracy accumulation.
recurrence_energies(W, X, t_max, lru)
    Per-sample ``|h^{(t)}|^2 / n`` for ``t = 0..t_max`` of the linear RNN
    (``lru=False``) or the LRU recurrence.
"""
from __future__ import annotations

import os
import types
import warnings

import numpy as np


def _env_disables_numba() -> bool:
    flag = os.environ.get("RSL_NO_NUMBA", "").strip().lower()
    return flag not in ("", "0", "false", "no")


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def _np_cycle_counts(perms):
    perms = np.asarray(perms, dtype=np.int64)
    m, size = perms.shape
    if size == 0:
        return np.zeros(m, dtype=np.int64)
    rows = np.arange(m)[:, None]
    # Each cycle is counted once, at its smallest element.
    cur = np.broadcast_to(np.arange(size), (m, size)).copy()
    orbit_min = cur.copy()
    for _ in range(size - 1):
        cur = perms[rows, cur]
        np.minimum(orbit_min, cur, out=orbit_min)
    return np.count_nonzero(orbit_min == np.arange(size), axis=1).astype(np.int64)


def _np_class_counts(edges, n_symbols):
    edges = np.asarray(edges, dtype=np.int64)
    m = edges.shape[0]
    labels = np.broadcast_to(np.arange(n_symbols), (m, n_symbols)).copy()
    if edges.shape[1] == 0:
        return np.full(m, n_symbols, dtype=np.int64)
    rows = np.repeat(np.arange(m), edges.shape[1])
    u = edges[:, :, 0].ravel()
    v = edges[:, :, 1].ravel()
    flat = labels.ravel()
    # Min-label propagation; converges to the smallest symbol of each class.
    while True:
        lu = flat[rows * n_symbols + u]
        lv = flat[rows * n_symbols + v]
        low = np.minimum(lu, lv)
        before = flat.copy()
        np.minimum.at(flat, rows * n_symbols + u, low)
        np.minimum.at(flat, rows * n_symbols + v, low)
        # pointer jumping: label <- label of label
        flat[:] = flat[(np.arange(m * n_symbols) // n_symbols) * n_symbols + flat]
        if np.array_equal(before, flat):
            break
    labels = flat.reshape(m, n_symbols)
    return np.count_nonzero(labels == np.arange(n_symbols), axis=1).astype(np.int64)


def _np_log_product_prefix(n, m):
    j = np.arange(m, dtype=np.longdouble)
    x = j / np.longdouble(n)
    plus = np.cumsum(np.log1p(x))
    limit = min(m, int(n))
    xs = x[:limit]
    minus = np.cumsum(np.log1p(-xs))
    diff = np.cumsum(np.log1p(xs) - np.log1p(-xs))
    return (plus.astype(np.float64), minus.astype(np.float64),
            diff.astype(np.float64))


def _np_recurrence_energies(W, X, t_max, lru):
    W = np.asarray(W)
    X = np.asarray(X)
    batch, n = W.shape[0], W.shape[1]
    out = np.empty((batch, t_max + 1), dtype=np.float64)
    h = X[:, 0, :].astype(W.dtype)
    out[:, 0] = np.sum(np.abs(h) ** 2, axis=1) / n
    for t in range(1, t_max + 1):
        h = np.matmul(W, h[:, :, None])[:, :, 0]
        if lru:
            h = h + X[:, t, :]
        out[:, t] = np.sum(h.real ** 2 + h.imag ** 2, axis=1) / n
    return out


numpy_kernels = types.SimpleNamespace(
    name="numpy",
    cycle_counts=_np_cycle_counts,
    class_counts=_np_class_counts,
    log_product_prefix=_np_log_product_prefix,
    recurrence_energies=_np_recurrence_energies,
)


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------


def _build_numba_kernels():
    import numba
    from numba import njit

    @njit(cache=True)
    def cycle_counts(perms):
        m, size = perms.shape
        out = np.zeros(m, dtype=np.int64)
        seen = np.zeros(size, dtype=np.bool_)
        for r in range(m):
            seen[:] = False
            count = 0
            for start in range(size):
                if seen[start]:
                    continue
                count += 1
                i = start
                while not seen[i]:
                    seen[i] = True
                    i = perms[r, i]
            out[r] = count
        return out

    @njit(cache=True)
    def class_counts(edges, n_symbols):
        m, n_edges = edges.shape[0], edges.shape[1]
        out = np.zeros(m, dtype=np.int64)
        parent = np.empty(n_symbols, dtype=np.int64)
        for r in range(m):
            for s in range(n_symbols):
                parent[s] = s
            classes = n_symbols
            for e in range(n_edges):
                a = edges[r, e, 0]
                while parent[a] != a:
                    parent[a] = parent[parent[a]]
                    a = parent[a]
                b = edges[r, e, 1]
                while parent[b] != b:
                    parent[b] = parent[parent[b]]
                    b = parent[b]
                if a != b:
                    if a < b:
                        parent[b] = a
                    else:
                        parent[a] = b
                    classes -= 1
            out[r] = classes
        return out

    @njit(cache=True)
    def _neumaier_add(total, comp, term):
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        return t, comp

    @njit(cache=True)
    def log_product_prefix(n, m):
        plus = np.empty(m, dtype=np.float64)
        limit = min(m, n)
        minus = np.empty(limit, dtype=np.float64)
        diff = np.empty(limit, dtype=np.float64)
        sp, cp = 0.0, 0.0
        sm, cm = 0.0, 0.0
        sd, cd = 0.0, 0.0
        for j in range(m):
            x = j / n
            sp, cp = _neumaier_add(sp, cp, np.log1p(x))
            plus[j] = sp + cp
            if j < limit:
                sm, cm = _neumaier_add(sm, cm, np.log1p(-x))
                minus[j] = sm + cm
                sd, cd = _neumaier_add(sd, cd, 2.0 * np.arctanh(x))
                diff[j] = sd + cd
        return plus, minus, diff

    @njit(cache=True)
    def recurrence_energies(W, X, t_max, lru):
        batch, n = W.shape[0], W.shape[1]
        out = np.empty((batch, t_max + 1), dtype=np.float64)
        h = np.empty(n, dtype=W.dtype)
        for b in range(batch):
            Wb = W[b]
            acc = 0.0
            for i in range(n):
                h[i] = X[b, 0, i]
                acc += abs(h[i]) ** 2
            out[b, 0] = acc / n
            for t in range(1, t_max + 1):
                h = np.dot(Wb, h)  # BLAS gemv
                acc = 0.0
                for i in range(n):
                    if lru:
                        h[i] += X[b, t, i]
                    acc += h[i].real * h[i].real + h[i].imag * h[i].imag
                out[b, t] = acc / n
        return out

    def log_product_prefix_entry(n, m):
        return log_product_prefix(int(n), int(m))

    def recurrence_entry(W, X, t_max, lru):
        return recurrence_energies(np.ascontiguousarray(W), np.ascontiguousarray(X),
                                   int(t_max), bool(lru))

    return types.SimpleNamespace(
        name="numba",
        version=numba.__version__,
        cycle_counts=lambda perms: cycle_counts(np.ascontiguousarray(perms, dtype=np.int64)),
        class_counts=lambda edges, n_symbols: class_counts(
            np.ascontiguousarray(edges, dtype=np.int64), int(n_symbols)),
        log_product_prefix=log_product_prefix_entry,
        recurrence_energies=recurrence_entry,
    )


try:
    numba_kernels = _build_numba_kernels()
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_kernels = None

if numba_kernels is not None and not _env_disables_numba():
    active = numba_kernels
else:
    if numba_kernels is None and not _env_disables_numba():
        warnings.warn("numba is not available; using the numpy kernels", RuntimeWarning)
    active = numpy_kernels

BACKEND = active.name

cycle_counts = active.cycle_counts
class_counts = active.class_counts
log_product_prefix = active.log_product_prefix
recurrence_energies = active.recurrence_energies
