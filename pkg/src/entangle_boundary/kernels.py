"""Hot numeric kernels (numba-compiled unless disabled, see ``_accel``).

Everything here works on plain arrays and scalars so that the same source runs
compiled or interpreted.
"""

import math

import numpy as np

from ._accel import kernel

# tie tolerance when picking the largest-magnitude component for phase fixing
_PIVOT_TIE = 1e-10


@kernel
def jacobi_hermitian(h, rel_tol, max_sweeps):
    """Cyclic complex Jacobi eigensolver for a small Hermitian matrix.

    Returns ``(values, vectors, sweeps, converged)`` with ascending values,
    column eigenvectors, and each column's largest-magnitude component made
    real positive. Only the upper triangle drives the rotations; the input is
    assumed Hermitian.
    """
    n = h.shape[0]
    a = np.empty((n, n), dtype=np.complex128)
    v = np.zeros((n, n), dtype=np.complex128)
    fro = 0.0
    for i in range(n):
        v[i, i] = 1.0
        for j in range(n):
            a[i, j] = h[i, j]
            fro += a[i, j].real * a[i, j].real + a[i, j].imag * a[i, j].imag
    thresh = rel_tol * math.sqrt(fro)

    converged = False
    sweeps = 0
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                z = a[p, q]
                off += z.real * z.real + z.imag * z.imag
        if math.sqrt(2.0 * off) <= thresh:
            converged = True
            break
        if sweep == max_sweeps:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                ec = (apq / mag).conjugate()
                theta = 0.5 * math.atan2(2.0 * mag, a[q, q].real - a[p, p].real)
                c = math.cos(theta)
                s = math.sin(theta)
                # J = diag(1, conj(e)) @ [[c, s], [-s, c]] acting on (p, q)
                jpp = complex(c, 0.0)
                jpq = complex(s, 0.0)
                jqp = -s * ec
                jqq = c * ec
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * jpp + akq * jqp
                    a[k, q] = akp * jpq + akq * jqq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = jpp.conjugate() * apk + jqp.conjugate() * aqk
                    a[q, k] = jpq.conjugate() * apk + jqq.conjugate() * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * jpp + vkq * jqp
                    v[k, q] = vkp * jpq + vkq * jqq

    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i].real
    order = np.argsort(w, kind="mergesort")
    values = np.empty(n)
    vectors = np.empty((n, n), dtype=np.complex128)
    for col in range(n):
        src = order[col]
        values[col] = w[src]
        big = 0.0
        for k in range(n):
            m = abs(v[k, src])
            if m > big:
                big = m
        piv = 0
        for k in range(n):
            if abs(v[k, src]) >= big * (1.0 - _PIVOT_TIE):
                piv = k
                break
        ph = v[piv, src] / abs(v[piv, src])
        for k in range(n):
            vectors[k, col] = v[k, src] * ph.conjugate()
        vectors[piv, col] = abs(v[piv, src])
    return values, vectors, sweeps, converged


@kernel
def log_mean_scalar(a, b, rel_switch):
    """Logarithmic mean of two positive reals, stable near a == b."""
    m = 0.5 * (a + b)
    d = a - b
    if abs(d) <= rel_switch * max(a, b):
        u = d / (a + b)
        return m * (1.0 - u * u / 3.0)
    u = d / (a + b)
    if abs(u) < 0.5:
        return m * u / math.atanh(u)
    return d / (math.log(a) - math.log(b))


@kernel
def log_mean_matrix(gamma, rel_switch):
    """Matrix of pairwise logarithmic means; zero where exactly one entry vanishes."""
    n = gamma.shape[0]
    g = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            a = gamma[i]
            b = gamma[j]
            if i == j:
                g[i, j] = a
            elif a <= 0.0 or b <= 0.0:
                g[i, j] = 0.0
            else:
                g[i, j] = log_mean_scalar(a, b, rel_switch)
    return g


@kernel
def herm2_min(h00, h01, h11):
    """Smallest eigenpair of the 2x2 Hermitian [[h00, h01], [conj(h01), h11]]."""
    half = 0.5 * (h00 - h11)
    r = math.sqrt(half * half + h01.real * h01.real + h01.imag * h01.imag)
    lam = 0.5 * (h00 + h11) - r
    x0 = h01
    x1 = complex(lam - h00, 0.0)
    y0 = complex(lam - h11, 0.0)
    y1 = h01.conjugate()
    nx = abs(x0) ** 2 + abs(x1) ** 2
    ny = abs(y0) ** 2 + abs(y1) ** 2
    if nx >= ny and nx > 0.0:
        s = 1.0 / math.sqrt(nx)
        return lam, x0 * s, x1 * s
    if ny > 0.0:
        s = 1.0 / math.sqrt(ny)
        return lam, y0 * s, y1 * s
    return lam, complex(1.0, 0.0), complex(0.0, 0.0)


@kernel
def product_min_search(h, starts, tol, max_alt):
    """Minimise <a b|h|a b> over unit product vectors by alternating 2x2 eigensolves.

    ``starts`` holds initial second-qubit vectors, one per row; the best local
    minimum over all starts is returned as ``(value, a, b)``.
    """
    best = np.inf
    best_a = np.zeros(2, dtype=np.complex128)
    best_b = np.zeros(2, dtype=np.complex128)
    a0 = complex(1.0, 0.0)
    a1 = complex(0.0, 0.0)
    for s in range(starts.shape[0]):
        b0 = starts[s, 0]
        b1 = starts[s, 1]
        nb = math.sqrt(abs(b0) ** 2 + abs(b1) ** 2)
        b0 = b0 / nb
        b1 = b1 / nb
        prev = np.inf
        val = np.inf
        for _ in range(max_alt):
            # contract the second qubit with b: m[i, j] = sum_kl conj(b_k) h[2i+k, 2j+l] b_l
            m00 = 0.0
            m01 = complex(0.0, 0.0)
            m11 = 0.0
            for k in range(2):
                bk = b0 if k == 0 else b1
                for l in range(2):
                    bl = b0 if l == 0 else b1
                    w = bk.conjugate() * bl
                    m00 += (w * h[k, l]).real
                    m01 += w * h[k, 2 + l]
                    m11 += (w * h[2 + k, 2 + l]).real
            val, a0, a1 = herm2_min(m00, m01, m11)
            # contract the first qubit with a: m[k, l] = sum_ij conj(a_i) h[2i+k, 2j+l] a_j
            n00 = 0.0
            n01 = complex(0.0, 0.0)
            n11 = 0.0
            for i in range(2):
                ai = a0 if i == 0 else a1
                for j in range(2):
                    aj = a0 if j == 0 else a1
                    w = ai.conjugate() * aj
                    n00 += (w * h[2 * i, 2 * j]).real
                    n01 += w * h[2 * i, 2 * j + 1]
                    n11 += (w * h[2 * i + 1, 2 * j + 1]).real
            val, b0, b1 = herm2_min(n00, n01, n11)
            if prev - val <= tol:
                break
            prev = val
        if val < best:
            best = val
            best_a[0] = a0
            best_a[1] = a1
            best_b[0] = b0
            best_b[1] = b1
    return best, best_a, best_b
