"""Spectral polynomials with prescribed double roots.

Q_{2n+2} = 4 p_{2m+2}(lambda) prod_i (lambda - E_i)^2 with p monic and
positive on the real axis.  m = -1 (all roots double) labels equilibria;
m = 0 labels the rank-one lines of the moment map.  The sign freedoms
alpha_j = +-1 live in sqrt(p(eps_j)); the positive real branch of the
square root is always taken.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import root as _scipy_root

from . import _poly
from ._tol import tol
from .errors import Inconsistent, InputError, InvalidM, NoSolution
from .critical import solve_bethe
from .model import hvals_from_qcoeffs, _check_signs


@dataclass(frozen=True)
class DegenerateCurve:
    m: int                 # half-degree parameter of p_{2m+2}; m >= -1
    pcoeffs: tuple         # monic, descending, length 2m+3
    doubles: tuple         # n - m double roots, conjugation-closed
    alphas: tuple          # per-level signs
    hvals: tuple           # induced conserved values

    def __post_init__(self):
        object.__setattr__(self, "pcoeffs", tuple(float(c) for c in self.pcoeffs))
        object.__setattr__(self, "doubles", tuple(complex(z) for z in self.doubles))
        if len(self.pcoeffs) != 2 * self.m + 3:
            raise InputError("pcoeffs must have length 2m+3")
        if abs(self.pcoeffs[0] - 1.0) > 1e-12:
            raise InputError("p_{2m+2} must be monic")

    @property
    def p(self):
        return np.asarray(self.pcoeffs)

    def pval(self, lam):
        return _poly.pval(self.p, lam)

    @property
    def qcoeffs(self):
        d = _poly.from_roots(self.doubles)
        q = 4.0 * _poly.pmul(self.p, _poly.pmul(d, d))
        return np.real_if_close(q, tol=1000)

    def qval(self, lam):
        return _poly.pval(self.qcoeffs, lam)

    @property
    def delta(self):
        """Discriminant b1^2 - 4 b0 of p_2 (m = 0 only)."""
        if self.m != 0:
            raise InvalidM("delta is defined for m = 0 curves")
        _, b1, b0 = self.pcoeffs
        return b1 * b1 - 4.0 * b0

    def positivity_residual(self, p, n_samples=100):
        """min over real samples of p_{2m+2}; should stay positive."""
        xs = np.linspace(-3 * p.scale, 3 * p.scale, n_samples)
        return float(np.min(np.real(self.pval(xs))))

    def pole_weight_residual(self, p):
        """Relative deviation of the double-pole weights of Q from s^2."""
        worst = 0.0
        for j, e in enumerate(p.epsilon):
            den = np.prod([(e - ek) ** 2 for k, ek in enumerate(p.epsilon) if k != j])
            w = self.qval(e) / den
            worst = max(worst, abs(w - p.s ** 2) / p.s ** 2)
        return worst


def build_rank0_curve(p, signs):
    """Fully degenerate curve of an equilibrium: Q/prod(lam-eps)^2 = a(lam)^2."""
    signs = _check_signs(p, signs)
    doubles = solve_bethe(p, signs)
    d = _poly.from_roots(doubles)
    hv = hvals_from_qcoeffs(p, np.real(4.0 * _poly.pmul(d, d)))
    return DegenerateCurve(-1, (1.0,), tuple(doubles), signs, tuple(hv))


def _sqrt_p_at_levels(curve, p):
    vals = np.real(curve.pval(np.asarray(p.epsilon)))
    if np.any(vals <= 0):
        raise NoSolution("p_{2m+2} not positive at some spin level")
    return np.sqrt(vals)


def check_consistency(p, curve):
    """Verify the compatibility conditions of a curve with m >= 0.

    Checks, each to 1e-9:
      * sum_j alpha_j eps_j^k / (2 sqrt(p(eps_j))) = 0 for k = 0..m-2,
      * sum_j s alpha_j eps_j^{m-1} / (2 sqrt(p(eps_j))) = 1   (m >= 1),
      * b_{2m+1} + sum_j s alpha_j eps_j^m / sqrt(p(eps_j)) = 0,
      * the double-root polynomial matches its interpolation form built
        from the values s alpha_j prod_{k!=j}(eps_j-eps_k)/(2 sqrt(p(eps_j))).
    Raises Inconsistent with the violated condition on failure.
    """
    if curve.m < 0:
        raise InvalidM("consistency conditions apply to m >= 0 (use build_rank0_curve)")
    m = curve.m
    sq = _sqrt_p_at_levels(curve, p)
    al = np.asarray(curve.alphas, dtype=float)
    eps = p.eps
    report = {}
    for k in range(0, m - 1):
        r = np.sum(al * eps ** k / (2.0 * sq))
        report[f"moment_k{k}"] = r
        if abs(r) > tol(1e-9):
            raise Inconsistent(f"moment condition k={k} fails: {r:.2e}",
                               condition=f"moment_k{k}")
    if m >= 1:
        r = np.sum(p.s * al * eps ** (m - 1) / (2.0 * sq)) - 1.0
        report["normalization"] = r
        if abs(r) > tol(1e-9):
            raise Inconsistent(f"normalization condition fails: {r:.2e}",
                               condition="normalization")
    b_top = curve.pcoeffs[1]
    r = b_top + np.sum(p.s * al * eps ** m / sq)
    report["subleading"] = r
    if abs(r) > tol(1e-9) * p.scale:
        raise Inconsistent(f"subleading-coefficient condition fails: {r:.2e}",
                           condition="subleading")
    # interpolation form of prod(lam - E_i); for m = 0 the monic degree-n
    # part prod(lam - eps_j) must be added by hand
    interp = np.zeros(1, dtype=complex)
    for j, e in enumerate(eps):
        others = [ek for k, ek in enumerate(eps) if k != j]
        interp = _poly.padd(interp, p.s * al[j] / (2.0 * sq[j])
                            * _poly.from_roots(others))
    if m == 0:
        interp = _poly.padd(interp, _poly.from_roots(eps))
    target = _poly.from_roots(curve.doubles)
    diff = np.max(np.abs(_poly.psub(target, interp)))
    report["interpolation"] = diff
    if diff > tol(1e-9) * p.scale ** len(curve.doubles):
        raise Inconsistent(f"double-root interpolation fails: {diff:.2e}",
                           condition="interpolation")
    return report


def _doubles_from_p2(p, b1, b0, alphas):
    """Double roots induced by p_2 = lam^2 + b1 lam + b0 and a sign pattern."""
    pv = np.polyval([1.0, b1, b0], p.eps)
    if np.any(pv <= 0):
        raise NoSolution("p_2 not positive at all spin levels")
    sq = np.sqrt(pv)
    c = _poly.from_roots(p.epsilon)
    for j, e in enumerate(p.epsilon):
        others = [ek for k, ek in enumerate(p.epsilon) if k != j]
        c = _poly.padd(c, p.s * alphas[j] / (2.0 * sq[j]) * _poly.from_roots(others))
    return _poly.roots_polished(c)


def _rank1_residual(p, b1, b0, x1, alphas):
    pv = np.polyval([1.0, b1, b0], p.eps)
    if np.any(pv <= 0):
        return None
    sq = np.sqrt(pv)
    r1 = b1 + np.sum(p.s * np.asarray(alphas) / sq)          # compatibility
    r2 = pv[0] - (p.s / x1) ** 2                              # grid parametrization
    return np.array([r1, r2])


def rank1_curve_at(p, x, alphas=None):
    """One m = 0 curve at grid parameter x = s alpha_1 / sqrt(p_2(eps_1)).

    n = 1 uses the closed form; for n >= 2 a damped Newton (scipy hybr)
    solves (b1, b0) for the given sign pattern, seeded by the closed form
    attached to the first level.  alphas defaults to sign(x) on every level.
    """
    x = float(x)
    if abs(x) < 1e-3:
        raise NoSolution("grid parameter too close to the pole at x = 0")
    if alphas is None:
        alphas = (int(np.sign(x)),) * p.n
    alphas = tuple(int(a) for a in alphas)
    if any(a not in (-1, 1) for a in alphas) or len(alphas) != p.n:
        raise InputError("alphas must be a length-n sequence of +-1")
    if int(np.sign(x)) != alphas[0]:
        raise InputError("sign(x) must match alphas[0]")
    e1 = p.epsilon[0]
    # closed form of the single-spin family, used as seed for n >= 2
    b1 = -x
    b0 = p.s ** 2 / x ** 2 - e1 ** 2 + x * e1
    if p.n > 1:
        def fun(v):
            r = _rank1_residual(p, v[0], v[1], x, alphas)
            return r if r is not None else np.array([1e6, 1e6])

        sol = _scipy_root(fun, np.array([b1, b0]), method="hybr", tol=1e-13)
        res = _rank1_residual(p, sol.x[0], sol.x[1], x, alphas)
        if res is None or np.max(np.abs(res)) > 1e-8:
            raise NoSolution(f"no admissible (b1, b0) for x = {x}, alphas = {alphas}")
        b1, b0 = sol.x
    delta = b1 * b1 - 4.0 * b0
    if delta > tol(1e-9) * p.scale ** 2:
        raise NoSolution(f"p_2 not positive definite at x = {x} (delta = {delta:.2e})")
    doubles = _doubles_from_p2(p, b1, b0, alphas)
    curve = _finish_curve(p, 0, (1.0, b1, b0), doubles, alphas)
    return curve


def _finish_curve(p, m, pcoeffs, doubles, alphas):
    q = 4.0 * _poly.pmul(np.asarray(pcoeffs, dtype=complex),
                         _poly.pmul(_poly.from_roots(doubles), _poly.from_roots(doubles)))
    hv = hvals_from_qcoeffs(p, np.real(q))
    return DegenerateCurve(m, pcoeffs, tuple(doubles), alphas, tuple(hv))


def rank1_family(p, xs=None, alphas=None):
    """Curves along the rank-one line, one per admissible grid point.

    Returns (curves, failures); failures is a list of (x, message).  The
    default grid has 400 points on [-3, 3]*scale with |x| >= 1e-3 excluded.
    """
    if xs is None:
        xs = np.linspace(-3.0 * p.scale, 3.0 * p.scale, 400)
    curves, failures = [], []
    for x in np.asarray(xs, dtype=float):
        if abs(x) < 1e-3:
            failures.append((float(x), "excluded near pole x = 0"))
            continue
        a = alphas if alphas is not None else (int(np.sign(x)),) * p.n
        if int(np.sign(x)) != a[0]:
            failures.append((float(x), "sign(x) != alphas[0]"))
            continue
        try:
            curves.append(rank1_curve_at(p, float(x), a))
        except NoSolution as exc:
            failures.append((float(x), str(exc)))
    return curves, failures


def rank1_closed_form_n2(p, x, y):
    """The two-spin closed form: curve data from the (x, y) parametrization.

    x, y must satisfy the constraint
    s^2 (y^2 - x^2) + (eps1 - eps2)(x + y - eps1 - eps2) x^2 y^2 = 0;
    then a-quadratic (double roots) and p_2 follow in closed form.
    """
    if p.n != 2:
        raise InputError("closed form is the two-spin one")
    e1, e2 = p.epsilon
    a0 = -(e1 * y + e2 * x - 2.0 * e1 * e2) / 2.0
    a1 = (y + x - 2.0 * e2 - 2.0 * e1) / 2.0
    b1 = -(y + x)
    b0 = (e2 * y ** 3 + e2 * x * y ** 2 - e2 ** 2 * y ** 2 + p.s ** 2) / y ** 2
    doubles = _poly.roots_polished(np.array([1.0, a1, a0]))
    alphas = (int(np.sign(x)), int(np.sign(y)))
    return _finish_curve(p, 0, (1.0, b1, b0), doubles, alphas)


def s1_constraint_residual(p, x, y):
    e1, e2 = p.epsilon
    return (p.s ** 2 * (y ** 2 - x ** 2)
            + (e1 - e2) * (x + y - e1 - e2) * x ** 2 * y ** 2)


def rank1_ys_for_x_n2(p, x):
    """Real solutions y of the two-spin constraint at given x."""
    if p.n != 2:
        raise InputError("two-spin helper")
    e1, e2 = p.epsilon
    # cubic in y: (e1-e2) x^2 y^3 + [s^2 + (e1-e2) x^2 (x - e1 - e2)] y^2 - s^2 x^2 = 0
    c3 = (e1 - e2) * x ** 2
    c2 = p.s ** 2 + (e1 - e2) * x ** 2 * (x - e1 - e2)
    c1 = 0.0
    c0 = -p.s ** 2 * x ** 2
    ys = _poly.roots_polished(np.array([c3, c2, c1, c0]))
    return sorted(float(np.real(y)) for y in ys
                  if abs(np.imag(y)) < 1e-9 * p.scale and abs(y) > 1e-12)
