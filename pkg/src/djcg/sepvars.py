"""Separated variables (lambda_k, mu_k = A(lambda_k)) and reconstruction.

The lambda_k are the zeros of C(lambda); together with bbar they coordinatize
the complexified reduced phase space.  Going back to spin variables uses the
interpolated polynomial P_{n+1} for A(lambda) and exact division of
Q - P_{n+1}^2 for B(lambda).  Sign data for mu on a fixed torus is always
explicit input: the branch choices select the stratum.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from . import _poly
from ._tol import tol
from .errors import (InputError, NearDegenerateDivisor, NegativeBB,
                     OscillatorZero)
from .model import (PhaseState, eval_hamiltonians, qcoeffs_from_hvals,
                    spectral_from_hvals)


@dataclass(frozen=True)
class SeparatedConfig:
    lambdas: tuple
    mus: tuple
    bbar: complex
    hvals: tuple = None  # set when working on a fixed torus

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(complex(v) for v in self.lambdas))
        object.__setattr__(self, "mus", tuple(complex(v) for v in self.mus))
        object.__setattr__(self, "bbar", complex(self.bbar))
        if self.hvals is not None:
            object.__setattr__(self, "hvals", tuple(float(h) for h in self.hvals))
        if len(self.lambdas) != len(self.mus):
            raise InputError("lambdas and mus must have equal length")

    @property
    def n(self):
        return len(self.lambdas)


def _check_divisor(p, lambdas):
    lam = np.asarray(lambdas, dtype=complex)
    if lam.size > 1:
        gap = min(abs(a - b) for a, b in itertools.combinations(lam, 2))
        if gap < 1e-8 * p.scale:
            raise NearDegenerateDivisor(f"divisor points within {gap:.2e}")
    for z in lam:
        if min(abs(z - e) for e in p.epsilon) < 1e-10 * p.scale:
            raise NearDegenerateDivisor("divisor point on a spin level")
    return lam


def mu_consistency_residual(p, cfg):
    """Relative residual of (prod(lam_j-eps_k) mu_j)^2 = Q(lam_j)."""
    if cfg.hvals is None:
        return 0.0
    spoly = spectral_from_hvals(p, cfg.hvals)
    worst = 0.0
    for lam, mu in zip(cfg.lambdas, cfg.mus):
        lhs = (np.prod([lam - e for e in p.epsilon]) * mu) ** 2
        rhs = spoly.qval(lam)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return worst


def make_separated(p, lambdas, hvals, signs, bbar=None):
    """Build a config on the torus hvals with explicit branch signs.

    signs: one of +1/-1 per divisor point, or 0 to mark a point frozen at a
    double root (mu = 0 there).
    """
    lam = _check_divisor(p, lambdas)
    spoly = spectral_from_hvals(p, hvals)
    mus = []
    for z, sg in zip(lam, signs):
        if sg == 0:
            mus.append(0.0)
            continue
        if sg not in (-1, 1):
            raise InputError("mu signs must be -1, 0 or +1")
        root = np.sqrt(complex(spoly.qval(z)))
        mus.append(sg * root / np.prod([z - e for e in p.epsilon]))
    if bbar is None:
        cfg0 = SeparatedConfig(tuple(lam), tuple(mus), 1.0, tuple(hvals))
        st = from_separated(p, cfg0)
        bbar = np.sqrt(complex(st.bbar * st.b))
    return SeparatedConfig(tuple(lam), tuple(mus), bbar, tuple(hvals))


def to_separated(p, st):
    """Extract (lambda_k, mu_k, bbar) from a state.  Requires bbar != 0."""
    if abs(st.bbar) <= 1e-10 * p.scale:
        raise OscillatorZero("bbar ~ 0: separated variables undefined")
    # numerator of C(lambda): 2 bbar prod(lam-eps) + sum splus_j prod_{k!=j}(lam-eps_k)
    num = 2.0 * st.bbar * _poly.from_roots(p.epsilon)
    for j, e in enumerate(p.epsilon):
        others = [ek for k, ek in enumerate(p.epsilon) if k != j]
        num = _poly.padd(num, st.splus[j] * _poly.from_roots(others))
    lam = _poly.roots_polished(num)
    if lam.size != p.n:
        raise OscillatorZero("C(lambda) numerator degenerated")
    lam = _check_divisor(p, lam)
    # mu_k = A(lambda_k)
    mus = []
    for z in lam:
        A = 2.0 * z + sum(st.sz[j] / (z - e) for j, e in enumerate(p.epsilon))
        mus.append(A)
    h = eval_hamiltonians(p, st)
    hv = tuple(np.real(h)) if np.max(np.abs(np.imag(h))) < tol(1e-9) * p.scale else None
    return SeparatedConfig(tuple(lam), tuple(mus), st.bbar, hv)


def build_P(p, cfg):
    """Interpolated A-numerator P_{n+1}(lambda), degree n+1.

    P = 2 lam prod(lam-eps) + sum_i (mu_i - 2 lam_i) prod_k(lam_i-eps_k) L_i(lam)
    with L_i the Lagrange basis on the divisor; P(lam_i) = mu_i prod(lam_i-eps_k).
    """
    lam = _check_divisor(p, cfg.lambdas)
    P = 2.0 * _poly.pmul(np.array([1.0, 0.0]), _poly.from_roots(p.epsilon))
    scale_n = p.scale ** max(p.n - 1, 0)
    for i, (zi, mi) in enumerate(zip(lam, cfg.mus)):
        others = [z for k, z in enumerate(lam) if k != i]
        den = np.prod([zi - z for z in others]) if others else 1.0
        if abs(den) < 1e-8 * scale_n:
            raise NearDegenerateDivisor("Lagrange denominator underflow")
        w = (mi - 2.0 * zi) * np.prod([zi - e for e in p.epsilon]) / den
        P = _poly.padd(P, w * _poly.from_roots(others))
    return P


def from_separated(p, cfg, phase=0.0, hn1=None):
    """Reconstruct the phase state from a separated configuration.

    Needs H_{n+1} (last of cfg.hvals, or hn1) for bbar*b.  The free reduced
    -model phase is applied as b -> e^{i phase} b, splus -> e^{-i phase} splus
    (and mirrors), on top of the phase already carried by cfg.bbar.
    """
    if cfg.hvals is None and hn1 is None:
        raise InputError("from_separated needs hvals or an explicit H_{n+1}")
    hn1 = float(hn1) if hn1 is not None else cfg.hvals[-1]
    lam = _check_divisor(p, cfg.lambdas)
    if cfg.hvals is not None:
        res = mu_consistency_residual(p, cfg)
        if res > tol(1e-8):
            raise InputError(f"mu values off the torus (residual {res:.2e})")

    P = build_P(p, cfg)
    sz = []
    for j, e in enumerate(p.epsilon):
        den = np.prod([e - ek for k, ek in enumerate(p.epsilon) if k != j])
        sz.append(_poly.pval(P, e) / den)
    bb = hn1 - sum(sz)
    if abs(bb.imag) < tol(1e-9) * p.scale and bb.real < -tol(1e-9) * p.scale:
        raise NegativeBB(f"H_(n+1) - sum sz = {bb.real:.3e} < 0")

    bbar = cfg.bbar
    if bbar is None:
        bbar = np.sqrt(complex(bb))
        if abs(bbar) <= 1e-10 * p.scale:
            raise OscillatorZero("bbar ~ 0 on this configuration")

    # splus from the residues of C(lambda)
    sp = []
    for j, e in enumerate(p.epsilon):
        den = np.prod([e - ek for k, ek in enumerate(p.epsilon) if k != j])
        sp.append(2.0 * bbar * np.prod([e - z for z in lam]) / den)

    # sminus from exact division: B = (Q - P^2) / (2 bbar prod(lam-lam_i) prod(lam-eps))
    if cfg.hvals is not None:
        q = spectral_from_hvals(p, cfg.hvals).q
    else:
        q = qcoeffs_from_hvals(p, _hvals_from_divisor(p, lam, cfg.mus, hn1))
    num = _poly.psub(q, _poly.pmul(P, P))
    num = num[2:]  # top two coefficients cancel identically
    qnorm = np.max(np.abs(q))
    bnum = _poly.pdiv_exact(num, _poly.from_roots(lam), tol_rel=tol(1e-8),
                            norm_ref=qnorm)
    sm = []
    for j, e in enumerate(p.epsilon):
        den = np.prod([e - ek for k, ek in enumerate(p.epsilon) if k != j])
        sm.append(_poly.pval(bnum, e) / (2.0 * bbar * den))

    b = bb / bbar
    ph = complex(np.exp(1j * phase))
    st = PhaseState(b * ph, bbar / ph,
                    tuple(sz),
                    tuple(v / ph for v in sp),
                    tuple(v * ph for v in sm))
    return st


def _hvals_from_divisor(p, lambdas, mus, hn1):
    """Solve for (H_1..H_n, hn1) from mu_k^2 = Lambda(lambda_k).

    On the divisor 2 sum_j H_j/(lam_k - eps_j) = mu_k^2 - 4 lam_k^2 - 4 hn1
    - sum_j s^2/(lam_k - eps_j)^2, an n x n linear system for the H_j; the
    result may be complex for complexified configurations.
    """
    lam = np.asarray(lambdas, dtype=complex)
    mus = np.asarray(mus, dtype=complex)
    A = np.empty((p.n, p.n), dtype=complex)
    rhs = np.empty(p.n, dtype=complex)
    for k, (z, mu) in enumerate(zip(lam, mus)):
        A[k] = [2.0 / (z - e) for e in p.epsilon]
        rhs[k] = (mu ** 2 - 4.0 * z ** 2 - 4.0 * hn1
                  - sum(p.s ** 2 / (z - e) ** 2 for e in p.epsilon))
    hj = np.linalg.solve(A, rhs)
    return np.concatenate((hj, [hn1]))


def physical_flow_rhs(p, cfg):
    """d lambda_k/dt = i mu_k prod_j(lam_k-eps_j) / prod_{l!=k}(lam_k-lam_l)."""
    lam = _check_divisor(p, cfg.lambdas)
    out = []
    for k, (z, mu) in enumerate(zip(lam, cfg.mus)):
        num = np.prod([z - e for e in p.epsilon])
        den = np.prod([z - zl for l, zl in enumerate(lam) if l != k]) \
            if lam.size > 1 else 1.0
        out.append(1j * mu * num / den)
    return np.asarray(out, dtype=complex)


def u1_phase_rhs(p, cfg):
    """d(log bbar)/dt = i (omega - 2 (sum lam_k - sum eps_j))."""
    return 1j * (p.omega - 2.0 * (np.sum(np.asarray(cfg.lambdas))
                                  - np.sum(p.eps)))
