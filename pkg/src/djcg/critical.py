"""Equilibria of the moment map: classical Bethe roots, stability type,
quadratic normal forms.

There are 2^n equilibria b = bbar = 0, splus = sminus = 0, sz_j = s e_j.
Their type is read off the roots of a(E) = 2E + sum_j s e_j/(E - eps_j):
all real roots -> elliptic, each conjugate pair -> one focus-focus block,
with eigenfrequencies omega + 2 E_i.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from . import _poly
from .errors import DegenerateBethe, InputError
from .model import PhaseState, critical_state, eval_hamiltonians, eval_physical_H, _check_signs

ELLIPTIC = "elliptic"
FOCUS_FOCUS = "focus-focus"


def bethe_a(p, signs, lam):
    """a(lam) = 2 lam + sum_j s e_j / (lam - eps_j)."""
    v = 2.0 * np.asarray(lam, dtype=complex)
    for e, ej in zip(p.epsilon, signs):
        v = v + p.s * ej / (np.asarray(lam, dtype=complex) - e)
    return v


def bethe_a_prime(p, signs, lam):
    v = 2.0 * np.ones_like(np.asarray(lam, dtype=complex))
    for e, ej in zip(p.epsilon, signs):
        v = v - p.s * ej / (np.asarray(lam, dtype=complex) - e) ** 2
    return v


def bethe_polynomial(p, signs):
    """Clear denominators of a(lam): degree n+1, leading coefficient 2."""
    c = 2.0 * _poly.pmul(np.array([1.0, 0.0]), _poly.from_roots(p.epsilon))
    for j, (e, ej) in enumerate(zip(p.epsilon, signs)):
        others = [ek for k, ek in enumerate(p.epsilon) if k != j]
        c = _poly.padd(c, p.s * ej * _poly.from_roots(others))
    return c


def solve_bethe(p, signs):
    """Roots of the classical Bethe equation for one sign vector.

    Companion-matrix roots of the cleared polynomial, polished by Newton
    iteration on a(lam) itself.  Real roots are returned ascending,
    then conjugate pairs (Im > 0 member first) ordered by real part.
    """
    signs = _check_signs(p, signs)
    c = bethe_polynomial(p, signs)
    roots = np.roots(c)
    # polish on a(lam): restores accuracy lost to companion balancing
    for _ in range(50):
        f = bethe_a(p, signs, roots)
        df = bethe_a_prime(p, signs, roots)
        step = f / df
        roots = roots - step
        if np.max(np.abs(step)) < 1e-15 * p.scale:
            break
    gap = min(abs(a - b) for a, b in itertools.combinations(roots, 2)) \
        if roots.size > 1 else np.inf
    if gap < 1e-8 * p.scale:
        raise DegenerateBethe(f"multiple Bethe root (gap {gap:.2e})")
    real, pairs, _ = _poly.split_conjugate(roots, 1e-8 * p.scale)
    ordered = [complex(r) for r in real]
    for zu, zl in sorted(pairs, key=lambda pr: pr[0].real):
        ordered.extend([zu, zl])
    return np.asarray(ordered, dtype=complex)


@dataclass(frozen=True)
class CriticalPoint:
    """One equilibrium: sign vector, Bethe roots, type, critical H values."""

    signs: tuple
    roots: tuple          # real ascending, then (upper, lower) per pair
    n_real: int
    n_pairs: int
    classification: str
    hcrit: tuple

    @property
    def real_roots(self):
        return self.roots[:self.n_real]

    @property
    def pairs(self):
        """Conjugate pairs as (upper, lower) tuples."""
        out = []
        for k in range(self.n_pairs):
            i = self.n_real + 2 * k
            out.append((self.roots[i], self.roots[i + 1]))
        return out

    def state(self, p):
        return critical_state(p, self.signs)


def make_critical_point(p, signs):
    signs = _check_signs(p, signs)
    roots = solve_bethe(p, signs)
    real, pairs, _ = _poly.split_conjugate(roots, 1e-8 * p.scale)
    n_real, n_pairs = len(real), len(pairs)
    cls = ELLIPTIC if n_pairs == 0 else FOCUS_FOCUS
    h = eval_hamiltonians(p, critical_state(p, signs))
    return CriticalPoint(signs, tuple(roots), n_real, n_pairs, cls,
                         tuple(np.real(h)))


def enumerate_critical_points(p):
    """All 2^n equilibria (n <= 20 combinatorial guard)."""
    if p.n > 20:
        raise InputError("enumeration limited to n <= 20")
    out = []
    for signs in itertools.product((1, -1), repeat=p.n):
        out.append(make_critical_point(p, signs))
    return out


@dataclass(frozen=True)
class NormalForm:
    """Data of the quadratic normal form H = H_cp + sum (omega+2E_i)/(2a'_i) B_i C_i."""

    aprime: tuple
    freqs: tuple
    hcp: float


def normal_form(p, cp):
    """Normal-form frequencies omega + 2E_i and weights a'(E_i).

    a' is computed both from the derivative sum and from the product formula
    2 prod_{j!=i}(E_i-E_j)/prod_k(E_i-eps_k); they must agree to 1e-9.
    """
    roots = np.asarray(cp.roots)
    ap_sum = bethe_a_prime(p, cp.signs, roots)
    ap_prod = np.empty_like(ap_sum)
    for i, E in enumerate(roots):
        num = np.prod([E - Ej for j, Ej in enumerate(roots) if j != i]) if roots.size > 1 else 1.0
        den = np.prod([E - e for e in p.epsilon])
        ap_prod[i] = 2.0 * num / den
    rel = np.max(np.abs(ap_sum - ap_prod) / np.maximum(1.0, np.abs(ap_sum)))
    if rel > 1e-9:
        raise DegenerateBethe(f"a'(E_i) routes disagree (rel {rel:.2e})")
    if np.min(np.abs(ap_sum)) < 1e-8 * p.scale:
        raise DegenerateBethe("a'(E_i) ~ 0: degenerate Bethe root")
    freqs = p.omega + 2.0 * roots
    hcp = float(np.real(eval_physical_H(p, cp.state(p))))
    return NormalForm(tuple(ap_sum), tuple(freqs), hcp)


def normal_reconstruct(p, cp, Bcoef, Ccoef):
    """Linearized state from normal coordinates (B_i, C_i).

    b = sum B_i/a'_i, bbar = sum C_i/a'_i,
    sminus_j = s e_j sum B_i/(a'_i (eps_j - E_i)), splus_j likewise with C,
    sz_j = s e_j - (e_j/2s) splus_j sminus_j   (second order).
    """
    Bcoef = np.asarray(Bcoef, dtype=complex)
    Ccoef = np.asarray(Ccoef, dtype=complex)
    if Bcoef.size != p.n + 1 or Ccoef.size != p.n + 1:
        raise InputError("coefficient sequences must have length n+1")
    nf = normal_form(p, cp)
    ap = np.asarray(nf.aprime)
    roots = np.asarray(cp.roots)
    b = np.sum(Bcoef / ap)
    bbar = np.sum(Ccoef / ap)
    sz, sp, sm = [], [], []
    for j, (e, ej) in enumerate(zip(p.epsilon, cp.signs)):
        w = 1.0 / (ap * (e - roots))
        smj = p.s * ej * np.sum(Bcoef * w)
        spj = p.s * ej * np.sum(Ccoef * w)
        sz.append(p.s * ej - ej / (2.0 * p.s) * spj * smj)
        sp.append(spj)
        sm.append(smj)
    return PhaseState(b, bbar, tuple(sz), tuple(sp), tuple(sm))
