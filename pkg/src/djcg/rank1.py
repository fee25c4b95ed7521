"""Exact trajectories on rank-one critical level sets.

The spectral polynomial has n double roots and one simple complex-conjugate
pair, Q = 4 p_2(lambda) prod (lambda - E_i)^2 with p_2 = lambda^2 + b1
lambda + b0, Delta = b1^2 - 4 b0 < 0.  The genus-zero curve is uniformized by
lambda = -b1/2 + (sqrt|Delta|/4)(La - 1/La); the hyperelliptic involution is
La -> -1/La.  Moving divisor points obey the linear conditions
P_plus(B_j) = X_j(t) P_plus(B_j^eta) with B_j = A_j + sqrt(A_j^2+1),
A_j = (b1 + 2 E_j)/sqrt|Delta| and X_j(t) = X_j(0) exp(2 i sqrt(p_2(E_j)) t).
Reality fixes conj(X_l) X_lbar = -(conj B_l)^(2(n-n0)+2); the conjugate-root
constants are auto-filled from the upper-root ones.

The U(1) phase of bbar is not part of the reduced dynamics; it is recovered
by integrating the phase-flow rate omega - 2 (Re sum lambda_k - sum eps_j),
with a free initial value (default 0).
"""

from dataclasses import dataclass

import numpy as np

from . import _poly
from ._tol import COND_MAX, tol
from .errors import (InputError, NegativeBB, RealityViolation, SingularSystem)
from .model import PhaseState
from .sepvars import SeparatedConfig
from .trajectory import Trajectory, diagnose

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


def uniformize(curve, lam):
    """The two preimages of lam on the rational curve, involution partners."""
    c = np.sqrt(abs(curve.delta)) / 4.0
    sh = complex(lam) + curve.pcoeffs[1] / 2.0
    disc = np.sqrt(sh * sh + 4.0 * c * c)
    r1 = (sh + disc) / (2.0 * c)
    r2 = (sh - disc) / (2.0 * c)
    return r1, r2


def lambda_of(curve, La):
    c = np.sqrt(abs(curve.delta)) / 4.0
    La = np.asarray(La, dtype=complex)
    return -curve.pcoeffs[1] / 2.0 + c * (La - 1.0 / La)


def q_uniform(curve, La, avals):
    """sqrt(Q_{2n+2}) on the curve: 2 c^{n+1} (La + 1/La) prod(La - 1/La - 2A_i).

    Antisymmetric under the involution La -> -1/La.
    """
    c = np.sqrt(abs(curve.delta)) / 4.0
    La = np.asarray(La, dtype=complex)
    n = len(avals)
    out = 2.0 * c ** (n + 1) * (La + 1.0 / La)
    for a in avals:
        out = out * (La - 1.0 / La - 2.0 * a)
    return out


@dataclass(frozen=True)
class Rank1SolitonSpec:
    curve: object
    frozen_pairs: tuple       # indices into the conjugate pairs of doubles
    x0_upper: tuple           # X_l(0) per unfrozen pair (Im E_l > 0 member)
    omega: float = 0.0

    def __post_init__(self):
        real, pairs, _ = _poly.split_conjugate(
            self.curve.doubles, 1e-10 * max(1.0, max(abs(z) for z in self.curve.doubles)))
        object.__setattr__(self, "_real_doubles", tuple(real))
        object.__setattr__(self, "_pairs", tuple(pairs))

    @property
    def pairs(self):
        return self._pairs

    @property
    def real_doubles(self):
        return self._real_doubles

    @property
    def frozen_roots(self):
        out = list(self._real_doubles)
        for i in self.frozen_pairs:
            out.extend(self._pairs[i])
        return tuple(out)

    @property
    def unfrozen_pairs(self):
        return tuple(pr for i, pr in enumerate(self._pairs)
                     if i not in self.frozen_pairs)

    @property
    def unfrozen_roots(self):
        out = []
        for pr in self.unfrozen_pairs:
            out.extend(pr)
        return tuple(out)

    @property
    def n0(self):
        return len(self.frozen_roots)

    @property
    def nmoving(self):
        return len(self.unfrozen_roots)

    def avals(self, roots):
        b1 = self.curve.pcoeffs[1]
        sd = np.sqrt(abs(self.curve.delta))
        return (b1 + 2.0 * np.asarray(roots, dtype=complex)) / sd

    def bvals_upper(self):
        """B_l per unfrozen pair, principal sqrt with |B| >= 1 post-selection.
        The conjugate-root value is conj(B_l) by construction."""
        A = self.avals([pr[0] for pr in self.unfrozen_pairs])
        B = A + np.sqrt(A * A + 1.0)
        swap = np.abs(B) < 1.0
        B[swap] = A[swap] - np.sqrt(A[swap] * A[swap] + 1.0)
        return B

    @property
    def x0(self):
        """X(0) interleaved (upper, lower); lower filled from reality."""
        B = self.bvals_upper()
        N = self.nmoving
        out = []
        for x, b in zip(self.x0_upper, B):
            out.extend([x, -np.conj(b) ** (2 * N + 2) / np.conj(x)])
        return tuple(out)


def make_rank1_spec(p, curve, x0_upper, frozen_pairs=()):
    """Build a trajectory spec on a rank-one level set (curve must have m=0).

    All real double roots are always frozen; frozen_pairs freezes complex
    pairs on top of that.  One X(0) per unfrozen pair is required.
    """
    if curve.m != 0:
        raise InputError("rank-one trajectories need an m = 0 curve")
    if curve.delta >= -1e-12 * p.scale ** 2:
        raise InputError(f"p_2 must be positive definite (delta = {curve.delta:.2e})")
    scale = max(1.0, max(abs(z) for z in curve.doubles))
    real, pairs, _ = _poly.split_conjugate(curve.doubles, 1e-10 * scale)
    frozen_pairs = tuple(sorted(set(int(i) for i in frozen_pairs)))
    if any(i < 0 or i >= len(pairs) for i in frozen_pairs):
        raise InputError(f"frozen pair index out of range 0..{len(pairs) - 1}")
    n_unfrozen = len(pairs) - len(frozen_pairs)
    x0_upper = tuple(complex(x) for x in x0_upper)
    if len(x0_upper) != n_unfrozen:
        raise InputError(f"need one X(0) per unfrozen pair ({n_unfrozen})")
    if any(x == 0 for x in x0_upper):
        raise RealityViolation("X_l(0) = 0 admits no conjugate partner")
    return Rank1SolitonSpec(curve, frozen_pairs, x0_upper, p.omega)


def evolve_X(spec, t):
    """X interleaved (upper, lower) at time t.

    The exponent rate for root E_j is i sqrt|Delta| (B_j - A_j)
    = 2 i sqrt(p_2(E_j)) on the branch that defines B_j.
    """
    sd = np.sqrt(abs(spec.curve.delta))
    Bu = spec.bvals_upper()
    Au = spec.avals([pr[0] for pr in spec.unfrozen_pairs])
    x0 = np.asarray(spec.x0)
    out = np.empty_like(x0)
    for i, (b, a) in enumerate(zip(Bu, Au)):
        nu = sd * (b - a)
        out[2 * i] = x0[2 * i] * np.exp(1j * nu * t)
        out[2 * i + 1] = x0[2 * i + 1] * np.exp(1j * np.conj(nu) * t)
    return out


def _bfull(spec):
    """B interleaved (upper, conj(upper)) aligned with unfrozen_roots."""
    Bu = spec.bvals_upper()
    out = []
    for b in Bu:
        out.extend([b, np.conj(b)])
    return np.asarray(out, dtype=complex)


def evolve_rank1(spec, t):
    """Monic P_plus(La) of degree n - n0 from P_plus(B_j) = X_j P_plus(B_j^eta)."""
    N = spec.nmoving
    if N == 0:
        return np.ones(1, dtype=complex)
    B = _bfull(spec)
    Be = -1.0 / B
    X = evolve_X(spec, t)
    M = np.empty((N, N), dtype=complex)
    rhs = -(B ** N - X * Be ** N)
    for k in range(N):
        M[:, k] = B ** k - X * Be ** k
    if np.linalg.cond(M) > COND_MAX:
        raise SingularSystem("divisor system ill-conditioned", t=t)
    ck = np.linalg.solve(M, rhs)
    return np.concatenate(([1.0], ck[::-1]))


def _frozen_quadratics(spec):
    """prod over frozen roots of (La^2 - 2 A La - 1) = P_0(La) P_0^eta(La)."""
    out = np.ones(1, dtype=complex)
    for a in spec.avals(spec.frozen_roots):
        out = _poly.pmul(out, np.array([1.0, -2.0 * a, -1.0]))
    return out


def _lambda_q_poly(spec):
    """La^{n+1} Q(La) as a polynomial: 2 c^{n+1} (La^2+1) prod_i(La^2-2A_i La-1)."""
    curve = spec.curve
    n = len(curve.doubles)
    c = np.sqrt(abs(curve.delta)) / 4.0
    out = 2.0 * c ** (n + 1) * np.array([1.0, 0.0, 1.0], dtype=complex)
    for a in spec.avals(curve.doubles):
        out = _poly.pmul(out, np.array([1.0, -2.0 * a, -1.0]))
    return out


def _s_plus(spec, pp, lam_roots):
    """S_plus of degree N by interpolation at the involution images of the
    moving points, plus the known constant term 2 c^{n+1} / prod La_k."""
    curve = spec.curve
    n = len(curve.doubles)
    N = spec.nmoving
    c = np.sqrt(abs(curve.delta)) / 4.0
    prodla = _poly.pval(pp, 0.0) * (-1.0) ** N  # = prod La_k, N even
    p0q = _frozen_quadratics(spec)
    avals_all = spec.avals(curve.doubles)
    nodes, vals = [0.0 + 0.0j], [2.0 * c ** (n + 1) / prodla]
    for La in lam_roots:
        Le = -1.0 / La
        qk = q_uniform(curve, La, avals_all)
        val = -(Le ** (n + 1)) * qk / (_poly.pval(pp, Le) * _poly.pval(p0q, Le))
        nodes.append(Le)
        vals.append(val)
    return _poly.fit_poly(nodes, vals, N)


def reconstruct_rank1(p, spec, t, phase=None):
    """Physical state at time t; phase overrides the integrated U(1) angle.

    bbar*b comes out of the leading coefficient of S_plus and is cross
    -checked against |Delta|/4 / |prod La_k|^2; the divisor, sz (through
    P_{n+1} evaluated on the curve) and the sminus division all run in the
    lambda plane after mapping down from La.
    """
    curve = spec.curve
    n = p.n
    c = np.sqrt(abs(curve.delta)) / 4.0
    pp = evolve_rank1(spec, t)
    lam_roots = _poly.roots_polished(pp) if spec.nmoving else np.zeros(0, dtype=complex)
    S = _s_plus(spec, pp, lam_roots)
    bb = 2.0 * S[0] / c ** (n - 1)
    if abs(bb.imag) > tol(1e-8) * max(1.0, abs(bb)):
        raise RealityViolation(f"bbar*b = {bb} not real: X(0) off the stratum")
    bb = bb.real
    if bb < -tol(1e-9) * p.scale:
        raise NegativeBB(f"bbar*b = {bb:.3e} < 0")
    prodla = _poly.pval(pp, 0.0)
    bb_alt = abs(curve.delta) / 4.0 / abs(prodla) ** 2
    if abs(bb - bb_alt) > tol(1e-8) * max(1.0, abs(bb)):
        raise RealityViolation(
            f"bbar*b routes disagree: {bb} vs {bb_alt} (reality broken)")

    theta = phase if phase is not None else phase_integral(p, spec, t)
    bbar = np.sqrt(max(bb, 0.0)) * np.exp(1j * theta)

    # T(La) = La^{n+1} P_{n+1}(La); s_z from residues of P_{n+1}(lambda)
    p0q = _frozen_quadratics(spec)
    T = _poly.psub(_lambda_q_poly(spec),
                   2.0 * _poly.pmul(S, _poly.pmul(pp, p0q)))

    def pn1_at(lam):
        La1, La2 = uniformize(curve, lam)
        La = La1 if abs(La1) >= abs(La2) else La2
        return _poly.pval(T, La) / La ** (n + 1)

    moving = lambda_of(curve, lam_roots) if spec.nmoving else np.zeros(0, dtype=complex)
    divisor = np.concatenate((moving, np.asarray(spec.frozen_roots, dtype=complex)))
    calP = _poly.from_roots(divisor)

    sz, sp = [], []
    for j, e in enumerate(p.epsilon):
        den = np.prod([e - ek for k, ek in enumerate(p.epsilon) if k != j])
        sz.append(pn1_at(e) / den)
        sp.append(2.0 * bbar * _poly.pval(calP, e) / den)

    # P_{n+1} as a lambda polynomial: exact-degree fit at curve samples
    us = 1.3 + 0.45 * np.arange(n + 2)
    lam_nodes = lambda_of(curve, us)
    P = _poly.fit_poly(lam_nodes, [pn1_at(z) for z in lam_nodes], n + 1)

    q = np.asarray(curve.qcoeffs, dtype=complex)
    num = _poly.psub(q, _poly.pmul(P, P))[2:]
    bnum = _poly.pdiv_exact(num, calP, tol_rel=tol(1e-8),
                            norm_ref=np.max(np.abs(q)))
    sm = []
    if abs(bbar) < 1e-13 * p.scale:
        raise SingularSystem("bbar ~ 0: sminus reconstruction degenerates", t=t)
    for j, e in enumerate(p.epsilon):
        den = np.prod([e - ek for k, ek in enumerate(p.epsilon) if k != j])
        sm.append(_poly.pval(bnum, e) / (2.0 * bbar * den))

    b = bb / bbar
    st = PhaseState(b, bbar, tuple(sz), tuple(sp), tuple(sm))
    if st.reality_residual() > tol(1e-8) * max(1.0, p.scale):
        raise RealityViolation(
            f"reconstructed state not real (residual {st.reality_residual():.2e})")
    mus = ([pn1_at(z) / np.prod(z - p.eps) for z in moving]
           + [0.0] * len(spec.frozen_roots))
    cfg = SeparatedConfig(tuple(divisor), tuple(mus), bbar, tuple(curve.hvals))
    return st, cfg


def u1_rate(p, spec, t):
    """omega - 2 (Re sum lambda_k(t) - sum eps_j): d/dt of arg bbar."""
    tot = float(np.sum(np.real(spec.frozen_roots)))
    if spec.nmoving:
        lam_roots = _poly.roots_polished(evolve_rank1(spec, t))
        tot += float(np.sum(np.real(lambda_of(spec.curve, lam_roots))))
    return p.omega - 2.0 * (tot - float(np.sum(p.eps)))


def phase_integral(p, spec, t, t0=0.0, theta0=0.0, max_h=0.05):
    """Integrate the U(1) rate from t0 to t with composite Gauss-Legendre."""
    if t == t0:
        return theta0
    a, b = (t0, t) if t > t0 else (t, t0)
    sgn = 1.0 if t > t0 else -1.0
    panels = max(1, int(np.ceil((b - a) / max_h)))
    edges = np.linspace(a, b, panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        for xk, wk in zip(_GL_NODES, _GL_WEIGHTS):
            total += wk * half * u1_rate(p, spec, mid + half * xk)
    return theta0 + sgn * total


def sample_trajectory_rank1(p, spec, t0, t1, dt):
    """Dense sampling with the U(1) phase accumulated across samples."""
    if not (t0 < t1 and dt > 0):
        raise InputError("need t0 < t1 and dt > 0")
    times = np.arange(t0, t1 + 0.5 * dt, dt)
    theta = phase_integral(p, spec, times[0])
    states, cfgs = [], []
    prev_t = times[0]
    for t in times:
        theta = phase_integral(p, spec, t, t0=prev_t, theta0=theta)
        prev_t = t
        try:
            st, cfg = reconstruct_rank1(p, spec, t, phase=theta)
        except SingularSystem:
            st, cfg = None, None
        states.append(st)
        cfgs.append(cfg)
    traj = Trajectory(times, states, cfgs)
    diagnose(p, traj, href=spec.curve.hvals)
    return traj


def conjugation_residuals_n2(spec, t):
    """The two closed two-spin conjugation relations at time t:
    S/P + conj(S)/conj(P) = -2(A + conj A) and
    (1 + 1/P)(1 + 1/conj P) + (S/P)(conj S/conj P) = 4 A conj(A),
    with S, P the symmetric functions of the moving points."""
    if spec.nmoving != 2:
        raise InputError("two moving points required")
    pp = evolve_rank1(spec, t)
    S, P = -pp[1], pp[2]
    A = spec.avals([spec.unfrozen_pairs[0][0]])[0]
    r1 = S / P + np.conj(S / P) + 2.0 * (A + np.conj(A))
    r2 = ((1.0 + 1.0 / P) * (1.0 + 1.0 / np.conj(P))
          + (S / P) * np.conj(S / P) - 4.0 * A * np.conj(A))
    return abs(r1), abs(r2)


def p3_closed_form_n2(spec, t, La):
    """Closed-form two-spin P_3 at a sample La, for cross-checking the
    general reconstruction."""
    curve = spec.curve
    c = np.sqrt(abs(curve.delta)) / 4.0
    pp = evolve_rank1(spec, t)
    S, P = -pp[1], pp[2]
    Sb, Pb = np.conj(S), np.conj(P)
    w = La - 1.0 / La
    val = (P * Pb * w ** 3 + (Pb * S + P * Sb) * w ** 2
           + (S * Sb + 3.0 * P * Pb + P + Pb - 1.0) * w
           + 2.0 * (Pb * S + P * Sb + S + Sb))
    return 2.0 * c ** 3 * val / (P * Pb)


def x_reality_residual(spec, t):
    """|conj(X_l(t)) X_lbar(t) + (conj B_l)^(2N+2)|, max over pairs."""
    X = evolve_X(spec, t)
    B = spec.bvals_upper()
    N = spec.nmoving
    worst = 0.0
    for i, b in enumerate(B):
        r = np.conj(X[2 * i]) * X[2 * i + 1] + np.conj(b) ** (2 * N + 2)
        worst = max(worst, abs(r))
    return worst
