"""Inner loops over operation tables.

Set ``SEMISUM_JIT=0`` to run without numba.  The loop kernels below are
then executed by the interpreter unchanged, and term evaluation switches to
the vectorised numpy evaluator in :mod:`semisum.algebra`.

Term programs are postfix int64 arrays: ``op >= 0`` applies symbol ``op``
to the top ``arity[op]`` stack entries, ``op < 0`` pushes variable
``-op - 1``.  Tables are concatenated row-major into ``tabs`` with start
offsets ``offs``.
"""

from __future__ import annotations

import os

import numpy as np


def _jit_requested() -> bool:
    return os.environ.get("SEMISUM_JIT", "1").strip().lower() not in ("0", "false", "no", "off")


try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_JIT = numba is not None and _jit_requested()


def jit(fn):
    if USE_JIT:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


@jit
def eval_program(tabs, offs, arity, n, prog, lo, hi, asg, stack):
    sp = 0
    for pc in range(lo, hi):
        op = prog[pc]
        if op < 0:
            stack[sp] = asg[-op - 1]
            sp += 1
        else:
            k = arity[op]
            base = sp - k
            idx = 0
            for j in range(k):
                idx = idx * n + stack[base + j]
            stack[base] = tabs[offs[op] + idx]
            sp = base + 1
    return stack[0]


@jit
def first_failure(tabs, offs, arity, n, nvars, prog, starts, npremises, start, stop):
    """Index of the first assignment in [start, stop) that satisfies every
    premise pair and violates the conclusion pair, or -1.

    Pair ``i`` compares terms ``2i`` and ``2i + 1``; the conclusion is pair
    ``npremises``.  Assignments are numbered lexicographically with the
    first variable most significant.
    """
    asg = np.zeros(max(nvars, 1), dtype=np.int64)
    stack = np.zeros(prog.shape[0] + 1, dtype=np.int64)
    rem = start
    for v in range(nvars - 1, -1, -1):
        asg[v] = rem % n
        rem //= n
    for index in range(start, stop):
        ok = True
        for p in range(npremises):
            a = eval_program(tabs, offs, arity, n, prog, starts[2 * p], starts[2 * p + 1], asg, stack)
            b = eval_program(tabs, offs, arity, n, prog, starts[2 * p + 1], starts[2 * p + 2], asg, stack)
            if a != b:
                ok = False
                break
        if ok:
            c = 2 * npremises
            a = eval_program(tabs, offs, arity, n, prog, starts[c], starts[c + 1], asg, stack)
            b = eval_program(tabs, offs, arity, n, prog, starts[c + 1], starts[c + 2], asg, stack)
            if a != b:
                return index
        v = nvars - 1
        while v >= 0:
            asg[v] += 1
            if asg[v] < n:
                break
            asg[v] = 0
            v -= 1
    return -1


@jit
def first_failing_identity(tabs, offs, arity, n, prog, starts, nvars):
    """(identity index, assignment index) of the first failure in a batch of
    identities, or (-1, -1).  Identity ``i`` is terms ``2i`` and ``2i + 1``
    over ``nvars[i]`` variables."""
    width = 1
    for i in range(nvars.shape[0]):
        if nvars[i] > width:
            width = nvars[i]
    asg = np.zeros(width, dtype=np.int64)
    stack = np.zeros(prog.shape[0] + 1, dtype=np.int64)
    for i in range(nvars.shape[0]):
        k = nvars[i]
        total = 1
        for _ in range(k):
            total *= n
        for v in range(k):
            asg[v] = 0
        for index in range(total):
            a = eval_program(tabs, offs, arity, n, prog, starts[2 * i], starts[2 * i + 1], asg, stack)
            b = eval_program(tabs, offs, arity, n, prog, starts[2 * i + 1], starts[2 * i + 2], asg, stack)
            if a != b:
                return i, index
            v = k - 1
            while v >= 0:
                asg[v] += 1
                if asg[v] < n:
                    break
                asg[v] = 0
                v -= 1
    return -1, -1


# -- bands -----------------------------------------------------------------


@jit
def _associative_so_far(T, n):
    for a in range(n):
        for b in range(n):
            ab = T[a, b]
            if ab < 0:
                continue
            for c in range(n):
                bc = T[b, c]
                if bc < 0:
                    continue
                lhs = T[ab, c]
                rhs = T[a, bc]
                if lhs >= 0 and rhs >= 0 and lhs != rhs:
                    return False
    return True


@jit
def band_search(n, out):
    """Fill ``out[i]`` with the i-th idempotent associative table on n
    elements (row-major backtracking order); return the total count, which
    may exceed ``out.shape[0]``."""
    T = np.full((n, n), -1, dtype=np.int64)
    for i in range(n):
        T[i, i] = i
    m = n * n - n
    ci = np.zeros(m, dtype=np.int64)
    cj = np.zeros(m, dtype=np.int64)
    c = 0
    for i in range(n):
        for j in range(n):
            if i != j:
                ci[c] = i
                cj[c] = j
                c += 1
    vals = np.full(m, -1, dtype=np.int64)
    count = 0
    pos = 0
    while pos >= 0:
        if pos == m:
            if count < out.shape[0]:
                out[count] = T
            count += 1
            pos -= 1
            continue
        i = ci[pos]
        j = cj[pos]
        v = vals[pos] + 1
        placed = False
        while v < n:
            T[i, j] = v
            if _associative_so_far(T, n):
                placed = True
                break
            v += 1
        if placed:
            vals[pos] = v
            pos += 1
        else:
            T[i, j] = -1
            vals[pos] = -1
            pos -= 1
    return count


# -- congruences of binary tables ------------------------------------------


@jit
def _find(par, a):
    while par[a] != a:
        par[a] = par[par[a]]
        a = par[a]
    return a


@jit
def _union(par, a, b):
    ra = _find(par, a)
    rb = _find(par, b)
    if ra == rb:
        return False
    if ra < rb:
        par[rb] = ra
    else:
        par[ra] = rb
    return True


@jit
def _close_binary(T, n, par):
    changed = True
    while changed:
        changed = False
        for a in range(n):
            for b in range(a + 1, n):
                if _find(par, a) != _find(par, b):
                    continue
                for c in range(n):
                    if _union(par, T[a, c], T[b, c]):
                        changed = True
                    if _union(par, T[c, a], T[c, b]):
                        changed = True
    for a in range(n):
        par[a] = _find(par, a)


@jit
def binary_replica(T, n, par):
    """Least congruence of a groupoid with semilattice quotient, as the
    congruence generated by every instance of the semilattice laws."""
    for a in range(n):
        par[a] = a
    for a in range(n):
        _union(par, T[a, a], a)
        for b in range(n):
            _union(par, T[a, b], T[b, a])
            for c in range(n):
                _union(par, T[a, T[b, c]], T[T[a, b], c])
    _close_binary(T, n, par)


@jit
def _is_binary_congruence(T, n, p):
    for a in range(n):
        for b in range(a + 1, n):
            if p[a] != p[b]:
                continue
            for c in range(n):
                if p[T[a, c]] != p[T[b, c]] or p[T[c, a]] != p[T[c, b]]:
                    return False
    return True


@jit
def lemma_check(T, n, parts, counts, scratch):
    """Check one groupoid against the three-permutability and block-transfer
    properties for every congruence in ``parts``.

    ``counts`` accumulates [algebras, congruences, three-perm violations,
    block-transfer violations, uncertified algebras].  Returns True when
    the algebra is clean.
    """
    rho = scratch[0]
    join = scratch[1]
    binary_replica(T, n, rho)
    counts[0] += 1
    clean = True
    for a in range(n):
        for b in range(n):
            if rho[a] == rho[b] and T[a, b] != a:
                counts[4] += 1
                return False
    r1 = np.zeros((n, n), dtype=np.bool_)
    seen = np.zeros((n, n), dtype=np.bool_)
    for q in range(parts.shape[0]):
        p = parts[q]
        if not _is_binary_congruence(T, n, p):
            continue
        counts[1] += 1
        # join of theta and rho
        for a in range(n):
            join[a] = a
        for a in range(n):
            for b in range(a + 1, n):
                if p[a] == p[b] or rho[a] == rho[b]:
                    _union(join, a, b)
        _close_binary(T, n, join)
        # theta o rho o theta
        for a in range(n):
            for c in range(n):
                hit = False
                for b in range(n):
                    if p[a] == p[b] and rho[b] == rho[c]:
                        hit = True
                        break
                r1[a, c] = hit
        bad = False
        for a in range(n):
            for d in range(n):
                hit = False
                for c in range(n):
                    if r1[a, c] and p[c] == p[d]:
                        hit = True
                        break
                if hit != (join[a] == join[d]):
                    bad = True
        if bad:
            counts[2] += 1
            clean = False
        # theta-related blocks force b ~ b.a
        for a in range(n):
            for b in range(n):
                seen[a, b] = False
        bad = False
        for a1 in range(n):
            for b1 in range(n):
                if p[a1] != p[b1]:
                    continue
                r = rho[a1]
                s = rho[b1]
                if seen[r, s]:
                    continue
                seen[r, s] = True
                for a in range(n):
                    if rho[a] != r:
                        continue
                    for b in range(n):
                        if rho[b] == s and p[b] != p[T[b, a]]:
                            bad = True
        if bad:
            counts[3] += 1
            clean = False
    return clean


@jit
def lz_sum_scan(T0, cells_a, cells_b, tgt_start, tgt_size, n, parts, counts, first_bad):
    """Run :func:`lemma_check` over every completion of the cross-block
    cells of ``T0``; ``first_bad[0]`` receives the odometer index of the
    first offending table (or stays -1)."""
    m = cells_a.shape[0]
    digits = np.zeros(m, dtype=np.int64)
    T = T0.copy()
    for i in range(m):
        T[cells_a[i], cells_b[i]] = tgt_start[i]
    scratch = np.zeros((2, n), dtype=np.int64)
    index = 0
    while True:
        if not lemma_check(T, n, parts, counts, scratch):
            if first_bad[0] < 0:
                first_bad[0] = index
        index += 1
        i = m - 1
        while i >= 0:
            digits[i] += 1
            if digits[i] < tgt_size[i]:
                T[cells_a[i], cells_b[i]] = tgt_start[i] + digits[i]
                break
            digits[i] = 0
            T[cells_a[i], cells_b[i]] = tgt_start[i]
            i -= 1
        if i < 0:
            break
    return index


def set_partitions(n: int) -> np.ndarray:
    """All partitions of range(n) as restricted growth strings, in
    lexicographic order."""
    out = []

    def grow(prefix, top):
        if len(prefix) == n:
            out.append(list(prefix))
            return
        for v in range(top + 2):
            prefix.append(v)
            grow(prefix, max(top, v))
            prefix.pop()

    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grow([0], 0)
    return np.array(out, dtype=np.int64)
