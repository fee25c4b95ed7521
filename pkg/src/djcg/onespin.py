"""Closed-form geometry of the single-spin model.

The exact real slice of a generic torus (H1, H2) is a planar cubic in the
lambda_1 = x + i y plane; an affine substitution brings it to Weierstrass
form v^2 = 4u^3 - g2 u - g3.  Near a critical value the slice factorizes
into the line 2x = eps_1 and a pencil of circles through the Bethe roots.
No elliptic functions are evaluated; the cubic serves validation and
plotting.
"""

from dataclasses import dataclass

import numpy as np

from .critical import solve_bethe
from .errors import DegenerateAlpha, InputError, PoleAtHalfLine


def _require_n1(p):
    if p.n != 1:
        raise InputError("single-spin operation requires n = 1")
    return p.epsilon[0]


def slice_residual(p, H1, H2, lam1, lam1bar):
    """The real-slice relation R(lambda_1, conj(lambda_1)) on torus (H1, H2)."""
    e1 = _require_n1(p)
    D = H1 - 2.0 * e1 * H2
    L = lam1 + lam1bar - e1
    return (D * D
            + 4.0 * D * L * (H2 - 2.0 * lam1 * lam1bar + 2.0 * e1 * L)
            + 4.0 * (H2 ** 2 - p.s ** 2) * L * L)


@dataclass(frozen=True)
class CubicData:
    g2: float
    g3: float
    e1: float
    H1: float
    H2: float

    def to_xy(self, u, v):
        """The affine map (u, v) -> (x, y) taking the cubic to the slice."""
        den = 4.0 * (-3.0 * u + 2.0 * self.H2 - self.e1 ** 2)
        x = (-6.0 * self.e1 * u + 10.0 * self.e1 * self.H2 - 3.0 * self.H1
             - 2.0 * self.e1 ** 3) / den
        y = -3.0 * v / den
        return x, y

    def to_uv(self, x, y):
        """Inverse map: u solves the linear relation in x, then v from y."""
        e1, H1, H2 = self.e1, self.H1, self.H2
        num = -4.0 * x * (2.0 * H2 - e1 ** 2) + 10.0 * e1 * H2 - 3.0 * H1 - 2.0 * e1 ** 3
        den = -12.0 * x + 6.0 * e1
        if abs(den) < 1e-14:
            raise PoleAtHalfLine("x = eps_1/2 maps to u = infinity")
        u = num / den
        v = -4.0 * y * (-3.0 * u + 2.0 * H2 - e1 ** 2) / 3.0
        return u, v

    def cubic_residual(self, u, v):
        return v ** 2 - (4.0 * u ** 3 - self.g2 * u - self.g3)


def real_slice_cubic(p, H1, H2):
    """Weierstrass invariants of the torus (H1, H2) of the one-spin model."""
    e1 = _require_n1(p)
    s = p.s
    g2 = 4.0 / 3.0 * (H2 ** 2 + 2.0 * e1 ** 2 * H2 - 3.0 * e1 * H1
                      + e1 ** 4 + 3.0 * s ** 2)
    g3 = (8.0 * H2 ** 3 + 24.0 * e1 ** 2 * H2 ** 2 - 36.0 * e1 * H1 * H2
          - 72.0 * s ** 2 * H2 + 24.0 * e1 ** 4 * H2 + 27.0 * H1 ** 2
          - 36.0 * e1 ** 3 * H1 + 36.0 * e1 ** 2 * s ** 2 + 8.0 * e1 ** 6) / 27.0
    return CubicData(g2, g3, e1, float(H1), float(H2))


def admissible_range(p, H1, H2, x):
    """(bbar*b, s1z, admissible) on the slice at abscissa x.

    bbar*b = -(H1 - 2 eps1 H2)/(2 (2x - eps1)); admissible iff bbar*b >= 0
    and |s1z| <= s.
    """
    e1 = _require_n1(p)
    D = H1 - 2.0 * e1 * H2
    L = 2.0 * x - e1
    if abs(L) < 1e-12 * p.scale:
        if abs(D) > 1e-12 * p.scale:
            raise PoleAtHalfLine("2x = eps_1 with H1 != 2 eps1 H2")
        # on the degenerate line the split of H2 into bbar*b + s1z is free
        return np.nan, np.nan, True
    bb = -D / (2.0 * L)
    s1z = H2 - bb
    admissible = bool(bb >= 0.0 and abs(s1z) <= p.s)
    return bb, s1z, admissible


def pencil_circle(p, e1sign, alpha):
    """Circle of the pencil attached to the critical point with sign e1.

    (lambda - lam_a)(conj(lambda) - lam_a) = (E1 - lam_a)(E2 - lam_a) with
    lam_a = eps1 + alpha s e1/(1 - 2 eps1 alpha).  Unstable sign: all circles
    pass through the conjugate Bethe pair (base points); stable sign: the
    pencil has the two real roots as limit points.
    """
    e1 = _require_n1(p)
    if abs(1.0 - 2.0 * e1 * alpha) < 1e-12:
        raise DegenerateAlpha("alpha = 1/(2 eps1) degenerates the pencil")
    lam_a = e1 + alpha * p.s * e1sign / (1.0 - 2.0 * e1 * alpha)
    E = solve_bethe(p, (e1sign,))
    radius2 = (E[0] - lam_a) * (E[1] - lam_a)
    return float(lam_a), complex(radius2)


def sample_real_slice(p, H1, H2, xs):
    """Rows (x, y_plus, y_minus, admissible) solving R = 0 in y for each x.

    R is quadratic in y^2 through lam1*conj(lam1); complex y are dropped
    (y columns are NaN there).
    """
    e1 = _require_n1(p)
    rows = []
    for x in np.asarray(xs, dtype=float):
        D = H1 - 2.0 * e1 * H2
        L = 2.0 * x - e1
        # R = D^2 + 4 D L (H2 + 2 e1 L) - 8 D L (x^2+y^2) + 4 (H2^2-s^2) L^2
        c0 = (D * D + 4.0 * D * L * (H2 + 2.0 * e1 * L)
              + 4.0 * (H2 ** 2 - p.s ** 2) * L * L - 8.0 * D * L * x * x)
        c1 = -8.0 * D * L
        if abs(c1) < 1e-14:
            rows.append((x, np.nan, np.nan, False))
            continue
        y2 = c0 / (-c1)
        if y2 < 0.0:
            rows.append((x, np.nan, np.nan, False))
            continue
        y = float(np.sqrt(y2))
        _, _, adm = admissible_range(p, H1, H2, x)
        rows.append((x, y, -y, adm))
    return rows
