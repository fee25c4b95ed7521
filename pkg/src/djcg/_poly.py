"""Dense polynomial helpers, descending-coefficient convention (np.polyval).

Everything downstream works with small polynomials (degree <= 2n+2, n <= 20),
so companion-matrix root finding plus Newton polishing is both robust and
cheap.  Coefficients are complex throughout; callers take real parts where
reality is guaranteed.
"""

import numpy as np

from .errors import DegenerateBethe, DivisionRemainder


def as_poly(c):
    a = np.atleast_1d(np.asarray(c, dtype=complex))
    return a if a.size else np.zeros(1, dtype=complex)


def ptrim(c, rel=1e-12):
    """Drop leading coefficients below rel * max|c|."""
    a = as_poly(c)
    m = np.max(np.abs(a))
    if m == 0.0:
        return np.zeros(1, dtype=complex)
    keep = np.abs(a) > rel * m
    first = int(np.argmax(keep))
    return a[first:] if keep.any() else np.zeros(1, dtype=complex)


def pval(c, x):
    return np.polyval(as_poly(c), x)


def pmul(a, b):
    return np.convolve(as_poly(a), as_poly(b))


def padd(a, b):
    a, b = as_poly(a), as_poly(b)
    m = max(a.size, b.size)
    out = np.zeros(m, dtype=complex)
    out[m - a.size:] += a
    out[m - b.size:] += b
    return out


def psub(a, b):
    return padd(a, -as_poly(b))


def pder(c):
    c = as_poly(c)
    n = c.size - 1
    if n == 0:
        return np.zeros(1, dtype=complex)
    return c[:-1] * np.arange(n, 0, -1)


def from_roots(roots):
    """Monic polynomial with the given roots."""
    c = np.ones(1, dtype=complex)
    for r in roots:
        c = np.convolve(c, np.array([1.0, -r], dtype=complex))
    return c


def newton_polish(c, roots, maxiter=12, rtol=1e-15):
    """Polish roots of the polynomial c in place by Newton iteration."""
    c = as_poly(c)
    dc = pder(c)
    z = np.asarray(roots, dtype=complex).copy()
    for _ in range(maxiter):
        f = np.polyval(c, z)
        df = np.polyval(dc, z)
        ok = np.abs(df) > 0
        step = np.zeros_like(z)
        step[ok] = f[ok] / df[ok]
        z -= step
        if np.all(np.abs(step) <= rtol * (1.0 + np.abs(z))):
            break
    return z


def roots_polished(c):
    c = ptrim(c)
    if c.size <= 1:
        return np.zeros(0, dtype=complex)
    r = np.roots(c)
    return newton_polish(c, r)


def pdiv_exact(num, den, tol_rel=1e-8, norm_ref=None):
    """Divide num by den, requiring the remainder to vanish.

    norm_ref defaults to the sup norm of num; the remainder must stay below
    tol_rel * norm_ref or DivisionRemainder is raised.
    """
    num, den = as_poly(num), as_poly(den)
    q, r = np.polydiv(num, den)
    ref = norm_ref if norm_ref is not None else max(np.max(np.abs(num)), 1e-300)
    if np.max(np.abs(r)) > tol_rel * ref:
        raise DivisionRemainder(
            f"remainder {np.max(np.abs(r)):.3e} exceeds {tol_rel:.1e} * {ref:.3e}"
        )
    return np.atleast_1d(q)


def lagrange_value(nodes, values, x):
    """Evaluate the interpolating polynomial through (nodes, values) at x."""
    nodes = np.asarray(nodes, dtype=complex)
    values = np.asarray(values, dtype=complex)
    total = 0.0 + 0.0j
    for i, (ni, vi) in enumerate(zip(nodes, values)):
        w = vi
        for j, nj in enumerate(nodes):
            if j != i:
                w *= (x - nj) / (ni - nj)
        total += w
    return total


def fit_poly(nodes, values, degree):
    """Exact-degree polynomial through len(nodes) = degree+1 points."""
    nodes = np.asarray(nodes, dtype=complex)
    values = np.asarray(values, dtype=complex)
    if nodes.size != degree + 1:
        raise ValueError("need exactly degree+1 nodes")
    V = np.vander(nodes, degree + 1)
    return np.linalg.solve(V, values)


def split_conjugate(roots, tol, symmetrize=True):
    """Split a conjugation-closed root set into real roots and (upper, lower) pairs.

    Roots with |Im| < tol are treated as real (and symmetrized to exactly
    real).  Pairing is greedy on min |z - conj(z')|; an ambiguous match
    within tol raises DegenerateBethe.  Returns (real_roots ascending,
    pairs sorted by real part, borderline flags).
    """
    roots = np.asarray(roots, dtype=complex)
    real = []
    upper = []
    lower = []
    borderline = []
    for z in roots:
        if abs(z.imag) < tol:
            real.append(z.real if symmetrize else z)
            if abs(z.imag) > 0.1 * tol:
                borderline.append(z)
        elif z.imag > 0:
            upper.append(z)
        else:
            lower.append(z)
    if len(upper) != len(lower):
        raise DegenerateBethe(
            f"conjugation-closed set expected: {len(upper)} upper vs {len(lower)} lower roots"
        )
    pairs = []
    lower = list(lower)
    for zu in sorted(upper, key=lambda z: (z.real, z.imag)):
        d = [abs(np.conj(zu) - zl) for zl in lower]
        order = np.argsort(d)
        if len(order) > 1 and abs(d[order[0]] - d[order[1]]) < tol:
            raise DegenerateBethe("ambiguous conjugate pairing")
        zl = lower.pop(int(order[0]))
        pairs.append((zu, zl))
    return sorted(real), pairs, borderline
