"""Exact trajectories on the level set of an unstable equilibrium.

All n+1 roots of the spectral polynomial are double.  Real roots must carry
frozen divisor points; unfrozen conjugate pairs (E_l, E_lbar) evolve through
X_l(t) = X_l(0) exp(-i (2 E_l + omega) t), and the divisor polynomials
P_minus (degree n_minus, monic) and bbar * P_plus (degree n_plus) solve the
linear system P_minus(E_l) = bbar X_l(t) P_plus(E_l) over the unfrozen roots.
The reality constraints conj(X_l) X_lbar = -1/4 are enforced by construction:
callers hand over one constant per unfrozen pair (the Im E > 0 member) and
the conjugate-root constant is filled in as -1/(4 conj(X_l)).
"""

from dataclasses import dataclass

import numpy as np

from . import _poly
from ._tol import COND_MAX, tol
from .errors import (InputError, NegativeBB, RealityViolation, SingularSystem)
from .model import PhaseState
from .sepvars import SeparatedConfig
from .trajectory import Trajectory, diagnose


@dataclass(frozen=True)
class Rank0SolitonSpec:
    cp: object                   # CriticalPoint with n_pairs >= 1
    frozen_pairs: tuple          # indices into cp.pairs
    x0_upper: tuple              # X_l(0) per unfrozen pair, Im E_l > 0 member
    omega: float = 0.0

    @property
    def n0(self):
        return self.cp.n_real + 2 * len(self.frozen_pairs)

    @property
    def frozen_roots(self):
        out = list(self.cp.real_roots)
        for i in self.frozen_pairs:
            out.extend(self.cp.pairs[i])
        return tuple(out)

    @property
    def unfrozen_pairs(self):
        return tuple(pr for i, pr in enumerate(self.cp.pairs)
                     if i not in self.frozen_pairs)

    @property
    def unfrozen_roots(self):
        """Interleaved (upper, lower) per unfrozen pair."""
        out = []
        for pr in self.unfrozen_pairs:
            out.extend(pr)
        return tuple(out)

    @property
    def x0(self):
        """X_l(0) aligned with unfrozen_roots; conjugates auto-filled."""
        out = []
        for x in self.x0_upper:
            out.extend([x, -1.0 / (4.0 * np.conj(x))])
        return tuple(out)

    @property
    def n_minus(self):
        return len(self.unfrozen_pairs)

    @property
    def n_plus(self):
        return self.n_minus - 1

    @property
    def free_real_parameters(self):
        """Stratum dimension bookkeeping: 2 per unfrozen pair, minus the
        time-origin shift."""
        return 2 * len(self.unfrozen_pairs) - 1


def make_rank0_spec(p, cp, x0_upper, frozen_pairs=(), x0_lower=None):
    """Validate and build a trajectory spec on the equilibrium level set.

    x0_lower, if given, must satisfy conj(X_l(0)) * X_lbar(0) = -1/4 against
    x0_upper; otherwise the lower-root constants are derived from it.
    """
    frozen_pairs = tuple(sorted(set(int(i) for i in frozen_pairs)))
    if any(i < 0 or i >= cp.n_pairs for i in frozen_pairs):
        raise InputError(f"frozen pair index out of range 0..{cp.n_pairs - 1}")
    n_unfrozen = cp.n_pairs - len(frozen_pairs)
    if n_unfrozen < 1:
        raise InputError("at least one conjugate pair must stay unfrozen "
                         "(all-frozen means the static critical point)")
    x0_upper = tuple(complex(x) for x in x0_upper)
    if len(x0_upper) != n_unfrozen:
        raise InputError(f"need one X(0) per unfrozen pair ({n_unfrozen})")
    if any(x == 0 for x in x0_upper):
        raise RealityViolation("X_l(0) = 0 admits no conjugate partner")
    if x0_lower is not None:
        x0_lower = tuple(complex(x) for x in x0_lower)
        for xu, xl in zip(x0_upper, x0_lower):
            if abs(np.conj(xu) * xl + 0.25) > tol(1e-10):
                raise RealityViolation(
                    f"conj(X) Xbar = {np.conj(xu) * xl} != -1/4")
    return Rank0SolitonSpec(cp, frozen_pairs, x0_upper, p.omega)


def evolve_X(spec, t):
    """X_l(t) = X_l(0) exp(-i (2 E_l + omega) t), over unfrozen roots."""
    roots = np.asarray(spec.unfrozen_roots)
    x0 = np.asarray(spec.x0)
    return x0 * np.exp(-1j * (2.0 * roots + spec.omega) * t)


def solve_divisor(spec, t):
    """Coefficients of P_minus, P_plus (both monic) and bbar at time t.

    Unknowns are the non-leading coefficients of P_minus and all coefficients
    of the product bbar * P_plus, in the monomial basis; the matrix is
    Vandermonde-like in the unfrozen roots.
    """
    roots = np.asarray(spec.unfrozen_roots)
    X = evolve_X(spec, t)
    nm, np_ = spec.n_minus, spec.n_plus
    N = roots.size
    M = np.zeros((N, N), dtype=complex)
    rhs = -roots ** nm
    for k in range(nm):
        M[:, k] = roots ** k
    for k in range(np_ + 1):
        M[:, nm + k] = -X * roots ** k
    if np.linalg.cond(M) > COND_MAX:
        raise SingularSystem("divisor system ill-conditioned", t=t)
    sol = np.linalg.solve(M, rhs)
    cm = sol[:nm]
    d = sol[nm:]
    bbar = d[-1]
    if abs(bbar) == 0.0:
        raise SingularSystem("bbar = 0: separated chart degenerates", t=t)
    # descending coefficient arrays, monic
    pm = np.concatenate(([1.0], cm[::-1]))
    pp = np.concatenate(([1.0], (d[:-1] / bbar)[::-1]))
    return pm, pp, bbar


def solve_divisor_determinant(spec, t):
    """Determinant-ratio solution for the four-root stratum (N = 4,
    P_minus quadratic, P_plus linear): lam0 = D1/D0, sigma2 = D2/D4,
    sigma1 = D3/D4, bbar = -D0/D4."""
    roots = np.asarray(spec.unfrozen_roots)
    if roots.size != 4 or spec.n_minus != 2:
        raise InputError("determinant path applies to the N = 4 stratum")
    E = roots
    X = evolve_X(spec, t)
    one = np.ones(4, dtype=complex)
    cols = {
        "1": one, "E": E, "E2": E ** 2, "X": X, "EX": E * X,
    }
    D0 = np.linalg.det(np.column_stack([cols["1"], cols["E"], cols["E2"], cols["X"]]))
    D1 = np.linalg.det(np.column_stack([cols["1"], cols["E"], cols["E2"], cols["EX"]]))
    D2 = np.linalg.det(np.column_stack([cols["E"], cols["E2"], cols["X"], cols["EX"]]))
    D3 = np.linalg.det(np.column_stack([cols["1"], cols["E2"], cols["X"], cols["EX"]]))
    D4 = np.linalg.det(np.column_stack([cols["1"], cols["E"], cols["X"], cols["EX"]]))
    if abs(D0) == 0.0 or abs(D4) == 0.0:
        raise SingularSystem("vanishing determinant", t=t)
    lam0 = D1 / D0
    sigma2 = D2 / D4
    sigma1 = D3 / D4
    bbar = -D0 / D4
    pm = np.array([1.0, -sigma1, sigma2])
    pp = np.array([1.0, -lam0])
    return pm, pp, bbar


def _s_plus_poly(spec, pm, pp):
    """S_plus(lambda) = sum over P_minus roots of
    prod'(lam_i - E_l) L_i(lambda) / (P'_minus(lam_i) P_plus(lam_i)),
    plus the scalar bbar*b = 4 * leading coefficient of S_plus."""
    lam_m = _poly.roots_polished(pm)
    roots = np.asarray(spec.unfrozen_roots)
    S = np.zeros(1, dtype=complex)
    dpm = _poly.pder(pm)
    for i, zi in enumerate(lam_m):
        others = [z for k, z in enumerate(lam_m) if k != i]
        num = np.prod(zi - roots)
        w = num / (_poly.pval(dpm, zi) * _poly.pval(pp, zi))
        S = _poly.padd(S, w * _poly.from_roots(others))
    bb = 4.0 * S[0]  # leading coefficient of S_plus against monic conj(P_plus)
    return S, lam_m, bb


def bbarb_from_divisor(spec, pm, pp):
    """bbar * b = 4 sum_i prod'(lam_i^- - E_l)/(P'_minus(lam_i^-) P_plus(lam_i^-))."""
    if _poly.as_poly(pm).size <= 1:
        return 0.0  # no minus-branch points: static critical point
    _, _, bb = _s_plus_poly(spec, pm, pp)
    return bb


def reconstruct_rank0(p, spec, t, with_config=True):
    """Physical state at time t (and the separated configuration).

    P_{n+1} = 2 prod(lam - E_l) - 4 S_plus P_plus P_0;  sz_j and splus_j come
    from residues, sminus_j from the exact division of Q - P_{n+1}^2, and the
    output is checked to be physical.
    """
    pm, pp, bbar = solve_divisor(spec, t)
    S, lam_m, bb = _s_plus_poly(spec, pm, pp)
    if abs(bb.imag) > tol(1e-8) * p.scale:
        raise RealityViolation(f"bbar*b = {bb} not real: X(0) off the stratum")
    if bb.real < -tol(1e-9) * p.scale:
        raise NegativeBB(f"bbar*b = {bb.real:.3e} < 0")
    roots_all = np.asarray(spec.cp.roots)
    p0 = _poly.from_roots(spec.frozen_roots)
    P = _poly.psub(2.0 * _poly.from_roots(roots_all),
                   4.0 * _poly.pmul(S, _poly.pmul(pp, p0)))

    lam_p = _poly.roots_polished(pp)
    divisor = np.concatenate((lam_m, lam_p, np.asarray(spec.frozen_roots)))
    mus = _divisor_mus(spec, lam_m, lam_p, p)

    sz, sp = [], []
    calP = _poly.from_roots(divisor)
    for j, e in enumerate(p.epsilon):
        den = np.prod([e - ek for k, ek in enumerate(p.epsilon) if k != j])
        sz.append(_poly.pval(P, e) / den)
        sp.append(2.0 * bbar * _poly.pval(calP, e) / den)

    # sminus via division of Q - P^2 by the divisor polynomial
    d = _poly.from_roots(roots_all)
    q = 4.0 * _poly.pmul(d, d)
    num = _poly.psub(q, _poly.pmul(P, P))[2:]
    bnum = _poly.pdiv_exact(num, calP, tol_rel=tol(1e-8),
                            norm_ref=np.max(np.abs(q)))
    sm = []
    for j, e in enumerate(p.epsilon):
        den = np.prod([e - ek for k, ek in enumerate(p.epsilon) if k != j])
        sm.append(_poly.pval(bnum, e) / (2.0 * bbar * den))

    b = bb / bbar
    st = PhaseState(b, bbar, tuple(sz), tuple(sp), tuple(sm))
    if st.reality_residual() > tol(1e-9) * max(1.0, p.scale):
        raise RealityViolation(
            f"reconstructed state not real (residual {st.reality_residual():.2e})")
    if not with_config:
        return st, None
    cfg = SeparatedConfig(tuple(divisor), tuple(mus), bbar,
                          tuple(spec.cp.hcrit))
    return st, cfg


def _divisor_mus(spec, lam_m, lam_p, p):
    """mu on each branch: -(+) 2 prod(lam - E_l)/prod(lam - eps) on the
    minus (plus) points, 0 on frozen points."""
    roots_all = np.asarray(spec.cp.roots)

    def mu(z, sign):
        return sign * 2.0 * np.prod(z - roots_all) / np.prod(z - p.eps)

    out = [mu(z, -1.0) for z in lam_m]
    out += [mu(z, +1.0) for z in lam_p]
    out += [0.0] * len(spec.frozen_roots)
    return np.asarray(out, dtype=complex)


def asymptotic_bbar(spec, t):
    """Normal-mode limit of bbar(t): for t -> +inf,
    sum_i prod_lbar(E_i - E_lbar) / prod_{j!=i}(E_i - E_j) / X_i(t)
    over unfrozen upper roots (mirror for t -> -inf)."""
    uppers = np.array([pr[0] for pr in spec.unfrozen_pairs])
    lowers = np.array([pr[1] for pr in spec.unfrozen_pairs])
    X = evolve_X(spec, t)
    xu = X[0::2]
    xl = X[1::2]
    if t >= 0:
        src, other, xs = uppers, lowers, xu
    else:
        src, other, xs = lowers, uppers, xl
    total = 0.0 + 0.0j
    for i, Ei in enumerate(src):
        num = np.prod(Ei - other)
        den = np.prod([Ei - Ej for j, Ej in enumerate(src) if j != i]) \
            if src.size > 1 else 1.0
        total += num / den / xs[i]
    return total


def sample_trajectory(p, spec, t0, t1, dt):
    """Dense sampling of reconstruct_rank0 with diagnostics.

    Samples where the divisor system is ill-conditioned are skipped and
    recorded as gaps.  The U(1) phase consistency (arg bbar vs the
    integrated phase-flow rate) is reported in diagnostics["u1_residual"].
    """
    if not (t0 < t1 and dt > 0):
        raise InputError("need t0 < t1 and dt > 0")
    times = np.arange(t0, t1 + 0.5 * dt, dt)
    states, cfgs = [], []
    for t in times:
        try:
            st, cfg = reconstruct_rank0(p, spec, t)
        except SingularSystem:
            st, cfg = None, None
        states.append(st)
        cfgs.append(cfg)
    traj = Trajectory(times, states, cfgs)
    diagnose(p, traj, href=spec.cp.hcrit)
    traj.diagnostics["u1_residual"] = _u1_consistency(p, traj)
    return traj


def _u1_consistency(p, traj):
    """|d arg bbar - Re(omega - 2(sum lam - sum eps)) dt| accumulated over
    consecutive non-gap samples (midpoint rule)."""
    res = 0.0
    eps_sum = float(np.sum(p.eps))
    for i in range(len(traj.times) - 1):
        c0, c1 = traj.lambdas[i], traj.lambdas[i + 1]
        s0, s1 = traj.states[i], traj.states[i + 1]
        if None in (c0, c1, s0, s1):
            continue
        dt = traj.times[i + 1] - traj.times[i]
        dphase = np.angle(s1.bbar / s0.bbar)
        rate0 = p.omega - 2.0 * (np.sum(np.real(c0.lambdas)) - eps_sum)
        rate1 = p.omega - 2.0 * (np.sum(np.real(c1.lambdas)) - eps_sum)
        res = max(res, abs(dphase - 0.5 * (rate0 + rate1) * dt))
    return res
