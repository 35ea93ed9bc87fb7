"""Statz GaAs FET drain-current model, its analytic derivatives and a two-parameter fitter.

    I_d = beta * (u_gs - u_t)**2 * (1 + lam * u_ds) * tanh(alpha * u_ds)

The square law is clamped to zero at and below threshold (u_gs <= u_t).
Only forward operation (u_ds >= 0) is accepted by the public functions.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class StatzParams:
    beta: float  # A/V^2
    u_t: float  # V
    lam: float = 0.0  # 1/V
    alpha: float = 2.0  # 1/V
    c_in: float = 0.0  # F, gate-source
    r_in: float = math.inf  # Ohm, gate-source

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.lam < 0:
            raise ValueError(f"lambda must be non-negative, got {self.lam}")
        if self.c_in < 0 or self.r_in < 0:
            raise ValueError("c_in and r_in must be non-negative")

    def model_line(self, name: str) -> str:
        return (
            f".model {name} STATZ beta={self.beta:.9g} vto={self.u_t:.9g} lambda={self.lam:.9g} "
            f"alpha={self.alpha:.9g} cin={self.c_in:.9g} rin={self.r_in:.9g}"
        )


@dataclass(frozen=True)
class IVSample:
    u_gs: float
    u_ds: float
    i_d: float


@dataclass(frozen=True)
class SmallSignal:
    g_m: float
    g_ds: float


def _check_forward(u_ds) -> None:
    if np.any(np.asarray(u_ds) < 0):
        raise ValueError("reverse operation (u_ds < 0) is not modelled")


def statz_eval(p: StatzParams, u_gs, u_ds):
    """Drain current and both partial derivatives, vectorised and total on all reals.

    Used directly by the Newton solver, where iterates may briefly visit u_ds < 0.
    """
    u_gs = np.asarray(u_gs, dtype=float)
    u_ds = np.asarray(u_ds, dtype=float)
    ov = np.maximum(u_gs - p.u_t, 0.0)
    th = np.tanh(p.alpha * u_ds)
    clm = 1.0 + p.lam * u_ds
    sech2 = 1.0 - th * th
    i_d = p.beta * ov**2 * clm * th
    g_m = 2.0 * p.beta * ov * clm * th
    g_ds = p.beta * ov**2 * (p.lam * th + clm * p.alpha * sech2)
    return i_d, g_m, g_ds


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def drain_current(p: StatzParams, u_gs, u_ds):
    """Drain current in A for u_ds >= 0; zero in cutoff."""
    _check_forward(u_ds)
    return _scalar(statz_eval(p, u_gs, u_ds)[0])


def small_signal(p: StatzParams, u_gs, u_ds) -> SmallSignal:
    """Analytic transconductance dI/du_gs and output conductance dI/du_ds."""
    _check_forward(u_ds)
    _, g_m, g_ds = statz_eval(p, u_gs, u_ds)
    return SmallSignal(_scalar(g_m), _scalar(g_ds))


class DegenerateFitError(ValueError):
    """The samples cannot separate beta from u_t (rank-deficient Jacobian)."""


@dataclass(frozen=True)
class FitReport:
    params: StatzParams
    rms_residual: float
    iterations: int
    converged: bool


def read_iv_csv(path: str | Path) -> list[IVSample]:
    """Read samples from a CSV file with header ``u_gs,u_ds,i_d`` (SI units)."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"u_gs", "u_ds", "i_d"} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        return [IVSample(float(r["u_gs"]), float(r["u_ds"]), float(r["i_d"])) for r in reader]


def write_iv_csv(path: str | Path, samples: Iterable[IVSample]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["u_gs", "u_ds", "i_d"])
        for s in samples:
            w.writerow([f"{s.u_gs:.9g}", f"{s.u_ds:.9g}", f"{s.i_d:.9g}"])


def fit_statz(
    samples: Sequence[IVSample],
    fixed: dict | None = None,
    init: dict | None = None,
    *,
    max_iter: int = 200,
    xtol: float = 1e-9,
) -> FitReport:
    """Least-squares fit of beta and u_t with Levenberg-Marquardt damping.

    ``fixed`` may hold ``lam``, ``alpha``, ``c_in``, ``r_in``; ``init`` holds
    ``beta`` and ``u_t`` (defaults 0.1 and -0.55). Iteration stops when the
    largest relative parameter step drops below ``xtol`` or after ``max_iter``
    iterations; in the latter case the best point so far is returned with
    ``converged=False``.
    """
    if len({s.u_gs for s in samples}) < 2:
        raise DegenerateFitError("samples span a single u_gs value; beta and u_t are not separable")
    if len(samples) < 4:
        raise ValueError("need at least 4 samples")
    if any(s.u_ds < 0 for s in samples):
        raise ValueError("all samples must be in the forward region (u_ds >= 0)")

    fixed = {("lam" if k == "lambda" else k): v for k, v in (fixed or {}).items()}
    init = {"beta": 0.1, "u_t": -0.55, **(init or {})}
    base = StatzParams(beta=init["beta"], u_t=init["u_t"], **fixed)

    u_gs = np.array([s.u_gs for s in samples])
    u_ds = np.array([s.u_ds for s in samples])
    meas = np.array([s.i_d for s in samples])
    shape = (1.0 + base.lam * u_ds) * np.tanh(base.alpha * u_ds)

    def residual_and_jac(theta):
        beta, u_t = theta
        ov = np.maximum(u_gs - u_t, 0.0)
        r = beta * ov**2 * shape - meas
        jac = np.column_stack([ov**2 * shape, -2.0 * beta * ov * shape])
        return r, jac

    theta = np.array([init["beta"], init["u_t"]], dtype=float)
    r, jac = residual_and_jac(theta)
    cost = r @ r
    jtj = jac.T @ jac
    if np.linalg.matrix_rank(jtj, tol=1e-12 * max(np.abs(jtj).max(), 1e-300)) < 2:
        raise DegenerateFitError("Jacobian is rank-deficient at the initial point")

    mu = 1e-3
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        jtj = jac.T @ jac
        grad = jac.T @ r
        scale = np.diag(np.diag(jtj))
        try:
            step = np.linalg.solve(jtj + mu * scale, -grad)
        except np.linalg.LinAlgError:
            mu *= 10.0
            continue
        trial = theta + step
        if not trial[0] > 0:
            mu *= 10.0
            continue
        r_new, jac_new = residual_and_jac(trial)
        cost_new = r_new @ r_new
        rel = np.max(np.abs(step) / np.maximum(np.abs(theta), 1e-30))
        if cost_new <= cost:
            theta, r, jac, cost = trial, r_new, jac_new, cost_new
            mu = max(mu / 3.0, 1e-12)
            if rel < xtol:
                converged = True
                break
        else:
            mu *= 2.0
            if rel < xtol * 1e-3:
                # step has collapsed without improving: at the floating-point floor
                converged = True
                break

    params = replace(base, beta=float(theta[0]), u_t=float(theta[1]))
    return FitReport(
        params=params,
        rms_residual=float(math.sqrt(cost / len(samples))),
        iterations=it,
        converged=converged,
    )


def synthetic_samples(
    p: StatzParams,
    u_gs_values: Iterable[float],
    u_ds_values: Iterable[float],
    noise: float = 0.0,
    rng: np.random.Generator | None = None,
) -> list[IVSample]:
    """Grid of model samples, optionally with multiplicative Gaussian noise."""
    u_ds_values = list(u_ds_values)
    out = []
    for ug in u_gs_values:
        for ud in u_ds_values:
            i = drain_current(p, ug, ud)
            if noise:
                i *= 1.0 + noise * rng.standard_normal()
            out.append(IVSample(float(ug), float(ud), float(i)))
    return out
