"""Model definition, phase states, conserved quantities and equations of motion.

The system is n spins of Casimir radius s (vec(s_j).vec(s_j) = s^2) coupled
to one harmonic oscillator (b, bbar) with levels 2*eps_j + omega.  States are
kept complexified: bbar and sminus are independent fields, and "physical"
(bbar = conj(b), sminus = conj(splus), sz real) is a checked predicate, not
an invariant.
"""

import cmath
import json
from dataclasses import dataclass

import numpy as np

from . import _poly
from ._tol import tol
from .errors import InputError, PoleAtSpinLevel


@dataclass(frozen=True)
class ModelParams:
    """Spin levels eps_j, Casimir radius s, oscillator frequency omega."""

    epsilon: tuple
    s: float = 0.5
    omega: float = 0.0

    def __post_init__(self):
        eps = tuple(float(e) for e in self.epsilon)
        object.__setattr__(self, "epsilon", eps)
        if len(eps) < 1:
            raise InputError("need at least one spin level")
        if not self.s > 0:
            raise InputError("Casimir radius s must be positive")
        scale = max(1.0, max(abs(e) for e in eps))
        for i in range(len(eps)):
            for j in range(i + 1, len(eps)):
                if abs(eps[i] - eps[j]) <= 1e-10 * scale:
                    raise InputError(f"spin levels {i} and {j} are not distinct")

    @property
    def n(self):
        return len(self.epsilon)

    @property
    def scale(self):
        return max(1.0, max(abs(e) for e in self.epsilon), self.s)

    @property
    def eps(self):
        return np.asarray(self.epsilon)

    def to_dict(self):
        return {"epsilon": list(self.epsilon), "s": self.s, "omega": self.omega}

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(tuple(d["epsilon"]), float(d.get("s", 0.5)),
                       float(d.get("omega", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad model config: {exc}") from exc

    @classmethod
    def from_json(cls, path):
        try:
            with open(path) as fh:
                return cls.from_dict(json.load(fh))
        except OSError as exc:
            raise InputError(f"cannot read model file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"model file is not valid JSON: {exc}") from exc


@dataclass(frozen=True)
class PhaseState:
    """Oscillator pair (b, bbar) and spin triples (sz_j, splus_j, sminus_j)."""

    b: complex
    bbar: complex
    sz: tuple
    splus: tuple
    sminus: tuple

    def __post_init__(self):
        object.__setattr__(self, "sz", tuple(complex(v) for v in self.sz))
        object.__setattr__(self, "splus", tuple(complex(v) for v in self.splus))
        object.__setattr__(self, "sminus", tuple(complex(v) for v in self.sminus))
        object.__setattr__(self, "b", complex(self.b))
        object.__setattr__(self, "bbar", complex(self.bbar))
        if not len(self.sz) == len(self.splus) == len(self.sminus):
            raise InputError("spin component tuples must have equal length")

    @property
    def n(self):
        return len(self.sz)

    def casimir_residual(self, s):
        """max_j |sz_j^2 + splus_j*sminus_j - s^2|"""
        vals = [self.sz[j] ** 2 + self.splus[j] * self.sminus[j] - s * s
                for j in range(self.n)]
        return max(abs(v) for v in vals)

    def physicality_residual(self):
        r = abs(self.bbar - np.conj(self.b))
        for j in range(self.n):
            r = max(r, abs(self.sminus[j] - np.conj(self.splus[j])),
                    abs(self.sz[j].imag))
        return r

    def reality_residual(self):
        """max of |Im sz_j|, |Im bbar*b|, |sminus_j - conj(splus_j)|."""
        r = abs((self.bbar * self.b).imag)
        for j in range(self.n):
            r = max(r, abs(self.sminus[j] - np.conj(self.splus[j])),
                    abs(self.sz[j].imag))
        return r

    def is_physical(self, scale=1.0, rtol=1e-10):
        return self.physicality_residual() <= tol(rtol) * scale

    def to_vector(self):
        """Complex layout [b, bbar, sz_1..n, splus_1..n, sminus_1..n]."""
        return np.concatenate((
            [self.b, self.bbar],
            self.sz, self.splus, self.sminus,
        )).astype(complex)

    @classmethod
    def from_vector(cls, z, n):
        z = np.asarray(z, dtype=complex)
        return cls(z[0], z[1], tuple(z[2:2 + n]),
                   tuple(z[2 + n:2 + 2 * n]), tuple(z[2 + 2 * n:2 + 3 * n]))


def critical_state(p, signs):
    """The equilibrium b = bbar = 0, splus = sminus = 0, sz_j = s*e_j."""
    signs = _check_signs(p, signs)
    return PhaseState(0.0, 0.0, tuple(p.s * e for e in signs),
                      (0.0,) * p.n, (0.0,) * p.n)


def _check_signs(p, signs):
    signs = tuple(int(e) for e in signs)
    if len(signs) != p.n or any(e not in (-1, 1) for e in signs):
        raise InputError("signs must be a length-n sequence of +-1")
    return signs


def random_physical_state(p, rng, sz_margin=0.05):
    """Random state exactly on the Casimir sphere with sminus = conj(splus)."""
    b = complex(rng.normal(), rng.normal())
    szs, sps = [], []
    for _ in range(p.n):
        z = rng.uniform(-1 + sz_margin, 1 - sz_margin) * p.s
        phi = rng.uniform(0.0, 2.0 * np.pi)
        sp_ = np.sqrt(p.s ** 2 - z ** 2) * cmath.exp(1j * phi)
        szs.append(z)
        sps.append(sp_)
    return PhaseState(b, np.conj(b), tuple(szs), tuple(sps),
                      tuple(np.conj(v) for v in sps))


def eval_hamiltonians(p, st):
    """The n+1 commuting conserved quantities (H_1..H_n, H_{n+1}).

    H_j = 2 eps_j sz_j + (b splus_j + bbar sminus_j)
          + sum_{k != j} vec(s_j).vec(s_k) / (eps_j - eps_k)
    H_{n+1} = bbar b + sum_j sz_j
    """
    n = p.n
    eps = p.epsilon
    out = np.zeros(n + 1, dtype=complex)
    for j in range(n):
        h = 2.0 * eps[j] * st.sz[j] + st.b * st.splus[j] + st.bbar * st.sminus[j]
        for k in range(n):
            if k == j:
                continue
            dot = (st.sz[j] * st.sz[k]
                   + 0.5 * (st.sminus[j] * st.splus[k] + st.splus[j] * st.sminus[k]))
            h += dot / (eps[j] - eps[k])
        out[j] = h
    out[n] = st.bbar * st.b + sum(st.sz)
    return out


def eval_physical_H(p, st):
    """omega * H_{n+1} + sum_j H_j."""
    h = eval_hamiltonians(p, st)
    return p.omega * h[-1] + np.sum(h[:-1])


def eval_lax(p, st, lam):
    """Lax entries (A, B, C) at spectral parameter lam.

    A = 2 lam + sum sz_j/(lam-eps_j), B = 2b + sum sminus_j/(lam-eps_j),
    C = 2 bbar + sum splus_j/(lam-eps_j).
    """
    lam = complex(lam)
    if min(abs(lam - e) for e in p.epsilon) <= 1e-12 * p.scale:
        raise PoleAtSpinLevel(f"lambda = {lam} sits on a spin level")
    A = 2.0 * lam
    B = 2.0 * st.b
    C = 2.0 * st.bbar
    for j, e in enumerate(p.epsilon):
        d = lam - e
        A += st.sz[j] / d
        B += st.sminus[j] / d
        C += st.splus[j] / d
    return A, B, C


def eom_rhs(p, st):
    """Time derivatives of all fields under the physical Hamiltonian.

    bbar and sminus evolve by the conjugate-mirror equations, so the
    complexified flow restricts to the physical one on real states.
    """
    om = p.omega
    db = -1j * om * st.b - 1j * sum(st.sminus)
    dbbar = 1j * om * st.bbar + 1j * sum(st.splus)
    dsz, dsp, dsm = [], [], []
    for j, e in enumerate(p.epsilon):
        dsz.append(1j * (st.bbar * st.sminus[j] - st.b * st.splus[j]))
        dsp.append(1j * (2.0 * e + om) * st.splus[j] - 2j * st.bbar * st.sz[j])
        dsm.append(-1j * (2.0 * e + om) * st.sminus[j] + 2j * st.b * st.sz[j])
    return PhaseState(db, dbbar, tuple(dsz), tuple(dsp), tuple(dsm))


@dataclass(frozen=True)
class SpectralPolynomial:
    """Conserved values H_1..H_{n+1} and the matching Q_{2n+2} coefficients."""

    hvals: tuple
    qcoeffs: tuple  # descending, length 2n+3, leading coefficient 4

    @property
    def q(self):
        return np.asarray(self.qcoeffs, dtype=complex)

    def qval(self, lam):
        return _poly.pval(self.q, lam)

    def lambda_big(self, p, lam):
        """The rational invariant Q/(prod (lam-eps)^2), from the H-side."""
        v = 4.0 * lam * lam + 4.0 * self.hvals[-1]
        for j, e in enumerate(p.epsilon):
            v += 2.0 * self.hvals[j] / (lam - e) + p.s ** 2 / (lam - e) ** 2
        return v

    def consistency_residual(self, p, n_samples=None):
        """Relative agreement of qcoeffs with the H-side at sample points."""
        n = p.n
        m = n_samples or (2 * n + 3)
        rng = np.random.RandomState(12345)
        worst = 0.0
        for _ in range(m):
            lam = complex(rng.uniform(-2, 2) * p.scale, rng.uniform(0.5, 2) * p.scale)
            lhs = self.qval(lam) / np.prod([(lam - e) ** 2 for e in p.epsilon])
            rhs = self.lambda_big(p, lam)
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
        return worst


def qcoeffs_from_hvals(p, hvals):
    """Expand Q_{2n+2} from conserved values (partial fractions cleared).

    hvals may be complex (complexified tori); physical tori give real q.
    """
    if len(hvals) != p.n + 1:
        raise InputError("hvals must have length n+1")
    eps = p.epsilon
    prod_all = _poly.from_roots(eps)
    prod_all2 = _poly.pmul(prod_all, prod_all)
    q = _poly.pmul(prod_all2, 4.0 * _poly.padd(
        np.array([1.0, 0.0, 0.0]), np.array([hvals[-1]])))
    for j, e in enumerate(eps):
        others = [ek for k, ek in enumerate(eps) if k != j]
        pj = _poly.from_roots(others)
        pj2 = _poly.pmul(pj, pj)
        q = _poly.padd(q, 2.0 * hvals[j] * _poly.pmul(np.array([1.0, -e]), pj2))
        q = _poly.padd(q, p.s ** 2 * pj2)
    return q


def spectral_from_hvals(p, hvals):
    hvals = tuple(float(h) for h in hvals)
    q = qcoeffs_from_hvals(p, hvals)
    return SpectralPolynomial(hvals, tuple(np.real(q)))


def hvals_from_qcoeffs(p, qcoeffs):
    """Invert spectral_from_hvals: pole weights give H_j, the lam^{2n}
    coefficient gives H_{n+1}.  Requires the detL pole structure (double
    pole weight s^2 at each eps_j)."""
    q = _poly.as_poly(qcoeffs)
    n = p.n
    eps = p.epsilon
    hv = np.zeros(n + 1)
    for j, e in enumerate(eps):
        others = [ek for k, ek in enumerate(eps) if k != j]
        den = _poly.pmul(_poly.from_roots(others), _poly.from_roots(others))
        # g = Q / prod_{k!=j}(lam-eps_k)^2 near eps_j: g(eps_j) = s^2, g'(eps_j) = 2 H_j
        gnum = _poly.pval(q, e)
        gden = _poly.pval(den, e)
        gpnum = _poly.pval(_poly.pder(q), e)
        gpden = _poly.pval(_poly.pder(den), e)
        gp = (gpnum * gden - gnum * gpden) / gden ** 2
        hv[j] = 0.5 * np.real(gp)
    # coefficient of lam^{2n}: 4*c2 + 4*H_{n+1} with c2 from lam^2 * prod^2
    prod_all = _poly.from_roots(eps)
    p2 = _poly.pmul(prod_all, prod_all)
    c2 = _poly.pmul(np.array([1.0, 0.0, 0.0]), p2)
    qpad = np.zeros(2 * n + 3, dtype=complex)
    qpad[-q.size:] = q
    hv[n] = np.real(qpad[2] - 4.0 * c2[2]) / 4.0
    return hv
