"""Sampled trajectory container shared by the analytic and ODE paths."""

from dataclasses import dataclass, field

import numpy as np

from .model import eval_hamiltonians


@dataclass
class Trajectory:
    times: np.ndarray
    states: list                 # PhaseState per sample (None on a gap)
    lambdas: list = None         # SeparatedConfig per sample, when available
    diagnostics: dict = field(default_factory=dict)

    @property
    def gaps(self):
        return [i for i, st in enumerate(self.states) if st is None]

    def bbarb(self):
        return np.array([np.real(st.bbar * st.b) if st is not None else np.nan
                         for st in self.states])


def diagnose(p, traj, href=None):
    """Fill per-sample diagnostics: reality residual, Casimir residual,
    and drift of every conserved quantity against href (or the first sample)."""
    imag_max, conj_drift, cas, hdrift = [], [], [], []
    h0 = np.asarray(href, dtype=float) if href is not None else None
    for st in traj.states:
        if st is None:
            imag_max.append(np.nan)
            conj_drift.append(np.nan)
            cas.append(np.nan)
            hdrift.append(np.full(p.n + 1, np.nan))
            continue
        imag_max.append(st.reality_residual())
        conj_drift.append(st.physicality_residual())
        cas.append(st.casimir_residual(p.s))
        h = np.real(eval_hamiltonians(p, st))
        if h0 is None:
            h0 = h
        hdrift.append(h - h0)
    traj.diagnostics["imag_max"] = np.asarray(imag_max)
    traj.diagnostics["conjugacy"] = np.asarray(conj_drift)
    traj.diagnostics["casimir"] = np.asarray(cas)
    traj.diagnostics["h_drift"] = np.asarray(hdrift)
    return traj
