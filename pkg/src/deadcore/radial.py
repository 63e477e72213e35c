"""Radial ODE integration and dead-core shooting.

Integrates the full radial equation

    h'' = [ c*H(h, h') + lambda * f(s, h) ] * (h')^(beta - 2),

with the degenerate initial point h(0) = h'(0) = 0 handled by an analytic
start: on a leading interval the solution is replaced by the power-law
profile tau * s^p of the dominant balance, which is the unique power law
compatible with a dead core.  The boundary-value problem h(0) = 0,
h(T) = d is then solved by bisecting the integration length.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .balance import BarrierProfile, select_pair, select_profile
from .barrier import RadialBarrier, eval_profile
from .errors import (
    BracketError,
    DeadcoreError,
    DegenerateGradient,
    InvalidInput,
    Overflow,
)
from .model import HamiltonianKind, ModelSpec, NonlinearityKind

__all__ = [
    "RadialSolution",
    "DeadCoreComparison",
    "integrate_ivp",
    "shoot_bvp",
    "measure_deadcore",
    "richardson_error",
    "write_solution_csv",
]

_BLOWUP_GUARD = 1e12


@dataclass
class RadialSolution:
    """Discrete samples (s_i, h_i, h'_i) of a radial solution.

    ``measured_T`` is the first s at which h crosses the datum spec.d
    (linear interpolation between samples), or None if it never does.
    """

    s_grid: np.ndarray
    h_vals: np.ndarray
    hp_vals: np.ndarray
    spec: ModelSpec
    measured_T: float | None

    def interpolate(self, s):
        """Piecewise-linear evaluation of h, clamped to 0 below the grid."""
        return np.interp(np.maximum(s, 0.0), self.s_grid, self.h_vals)

    def discrete_residuals(self) -> np.ndarray:
        """|(h')^(2-beta) h'' - rhs| at interior nodes, h'' by central differences."""
        s, h, hp = self.s_grid, self.h_vals, self.hp_vals
        if s.size < 3:
            return np.zeros(0)
        ds = s[1] - s[0]
        hpp = (hp[2:] - hp[:-2]) / (2.0 * ds)
        forcing = _forcing_fn(self.spec)
        rhs = np.array([forcing(si, hi, hpi) for si, hi, hpi in zip(s[1:-1], h[1:-1], hp[1:-1])])
        lhs = hp[1:-1] ** (2.0 - self.spec.beta) * hpp
        return np.abs(lhs - rhs)


def _forcing_fn(spec: ModelSpec) -> Callable[[float, float, float], float]:
    """c*H + lambda*f as a plain-float closure (hot path of the integrator)."""
    beta, m, q, gamma, alpha, lam, c = (
        spec.beta,
        spec.m,
        spec.q,
        spec.gamma,
        spec.alpha,
        spec.lam,
        spec.c,
    )
    ham = spec.hamiltonian
    nl = spec.nonlinearity

    def forcing(s: float, h: float, hp: float) -> float:
        total = 0.0
        if ham is HamiltonianKind.GRADIENT_POWER:
            total += c * hp**m
        elif ham is HamiltonianKind.NEGATIVE_MIXED:
            total += -c * max(h, 0.0) ** q * hp**m
        elif ham is HamiltonianKind.POSITIVE_MIXED:
            total += c * max(h, 0.0) ** q * hp**m
        if nl is NonlinearityKind.HARDY_HENON:
            if h > 0.0:
                total += lam * s**alpha * h**gamma
        elif nl is NonlinearityKind.LANE_EMDEN_MATUKUMA:
            weight = (1.0 + s * s) ** (-alpha)
            total += lam * weight * (1.0 if gamma == 0.0 else max(h, 0.0) ** gamma)
        else:
            upow = 1.0 if gamma == 0.0 else abs(h) ** gamma
            total += lam * upow * math.exp(h)
        return total

    return forcing


def _acceleration(spec: ModelSpec, forcing, s: float, h: float, hp: float) -> float:
    rhs = forcing(s, h, hp)
    if hp <= 0.0:
        if spec.beta == 2.0:
            return rhs
        if rhs == 0.0:
            return 0.0
        raise DegenerateGradient(f"h' vanished at s = {s} with nonzero forcing {rhs}")
    return rhs * hp ** (spec.beta - 2.0)


def _leading_pair(spec: ModelSpec):
    """Exponent/scale of the power law the dead-core branch follows at s -> 0+."""
    if spec.nonlinearity is NonlinearityKind.EXPONENTIAL:
        raise InvalidInput(
            "the exponential absorption has no dead-core power law; pass an explicit seed"
        )
    pair, _ = select_pair(spec)
    return pair


def integrate_ivp(
    spec: ModelSpec,
    s_end: float,
    steps: int,
    seed: tuple[float, float] | None = None,
    seed_fraction: float = 0.125,
) -> RadialSolution:
    """Fixed-step RK4 integration of the radial equation on [0, s_end].

    With ``seed`` None or (0, 0) the degenerate start is desingularized by
    the analytic power-law profile on the leading interval
    [0, seed_fraction*s_end] (exact for single-term equations, leading
    order otherwise); integration then proceeds from its edge.  A nonzero
    seed (h0, h'0) starts the integrator directly at s = 0.
    """
    if steps < 16:
        raise InvalidInput(f"steps must be >= 16, got {steps}")
    if s_end <= 0.0:
        raise InvalidInput(f"s_end must be positive, got {s_end}")
    if not 0.0 < seed_fraction < 1.0:
        raise InvalidInput(f"seed_fraction must lie in (0, 1), got {seed_fraction}")

    s = np.linspace(0.0, s_end, steps + 1)
    h = np.zeros(steps + 1)
    hp = np.zeros(steps + 1)
    ds = s_end / steps
    forcing = _forcing_fn(spec)

    if seed is None or tuple(seed) == (0.0, 0.0):
        if spec.lam == 0.0 and spec.hamiltonian is HamiltonianKind.NONE:
            return RadialSolution(s, h, hp, spec, None)
        pair = _leading_pair(spec)
        i_start = min(max(1, round(seed_fraction * steps)), steps)
        seg = s[: i_start + 1]
        h[: i_start + 1] = pair.tau * seg**pair.p
        hp[: i_start + 1] = pair.tau * pair.p * seg ** (pair.p - 1.0)
        hp[0] = 0.0
    else:
        h0, hp0 = float(seed[0]), float(seed[1])
        if h0 < 0.0 or hp0 < 0.0:
            raise InvalidInput(f"seed must be componentwise nonnegative, got {seed}")
        h[0], hp[0] = h0, hp0
        i_start = 0

    y0, y1 = h[i_start], hp[i_start]
    for i in range(i_start, steps):
        si = s[i]
        try:
            a1 = _acceleration(spec, forcing, si, y0, y1)
            k1h, k1p = y1, a1
            a2 = _acceleration(spec, forcing, si + 0.5 * ds, y0 + 0.5 * ds * k1h, y1 + 0.5 * ds * k1p)
            k2h, k2p = y1 + 0.5 * ds * k1p, a2
            a3 = _acceleration(spec, forcing, si + 0.5 * ds, y0 + 0.5 * ds * k2h, y1 + 0.5 * ds * k2p)
            k3h, k3p = y1 + 0.5 * ds * k2p, a3
            a4 = _acceleration(spec, forcing, si + ds, y0 + ds * k3h, y1 + ds * k3p)
            k4h, k4p = y1 + ds * k3p, a4
        except OverflowError as exc:
            raise Overflow(f"forcing overflowed at s = {si}") from exc
        y0 = y0 + ds / 6.0 * (k1h + 2.0 * k2h + 2.0 * k3h + k4h)
        y1 = y1 + ds / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        if y0 > _BLOWUP_GUARD:
            raise Overflow(f"h exceeded {_BLOWUP_GUARD:g} at s = {s[i + 1]}")
        h[i + 1], hp[i + 1] = y0, y1

    measured = _crossing(s, h, spec.d)
    return RadialSolution(s, h, hp, spec, measured)


def _crossing(s: np.ndarray, h: np.ndarray, d: float) -> float | None:
    above = np.nonzero(h > d)[0]
    if above.size == 0:
        return None
    i = int(above[0])
    if i == 0:
        return float(s[0])
    frac = (d - h[i - 1]) / (h[i] - h[i - 1])
    return float(s[i - 1] + frac * (s[i] - s[i - 1]))


def richardson_error(spec: ModelSpec, s_end: float, steps: int, **kwargs) -> float:
    """Step-halving error estimate for the endpoint value h(s_end)."""
    coarse = integrate_ivp(spec, s_end, steps, **kwargs)
    fine = integrate_ivp(spec, s_end, 2 * steps, **kwargs)
    return abs(fine.h_vals[-1] - coarse.h_vals[-1]) / 15.0


def shoot_bvp(
    spec: ModelSpec,
    d: float,
    T_bracket: tuple[float, float],
    steps: int = 512,
    rel_tol: float = 1e-8,
    seed_fraction: float = 0.125,
) -> tuple[float, RadialSolution]:
    """Solve h(0) = 0, h(T) = d by bisection on the integration length.

    The bracket must straddle the datum: h at the upper length exceeds d,
    h at the lower length falls below it.  Bisection stops when
    |h(T_found) - d| <= rel_tol * d.
    """
    lo, hi = float(T_bracket[0]), float(T_bracket[1])
    if not 0.0 < lo < hi:
        raise InvalidInput(f"need 0 < lo < hi, got bracket ({lo}, {hi})")
    if d <= 0.0:
        raise InvalidInput(f"datum must be positive, got {d}")

    def end_value(length: float) -> float:
        return float(integrate_ivp(spec, length, steps, seed_fraction=seed_fraction).h_vals[-1])

    if not end_value(lo) < d:
        raise BracketError(f"h({lo}) = {end_value(lo)} does not fall below d = {d}")
    if not end_value(hi) > d:
        raise BracketError(f"h({hi}) = {end_value(hi)} does not exceed d = {d}")

    mid = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = end_value(mid)
        if abs(val - d) <= rel_tol * d:
            break
        if val < d:
            lo = mid
        else:
            hi = mid
    else:
        raise DeadcoreError("shooting bisection failed to reach the datum tolerance")
    return mid, integrate_ivp(spec, mid, steps, seed_fraction=seed_fraction)


@dataclass
class DeadCoreComparison:
    """Radial shooting vs the closed-form barrier on the annulus."""

    profile: BarrierProfile
    solution: RadialSolution
    T_found: float
    rho_measured: float
    max_abs_rel_dev: float
    max_signed_dev: float
    min_signed_dev: float

    def evaluate_embedded(self, r):
        """u(x) = h(|x - x0| - rho_measured), extended by 0 on the plateau."""
        r_arr = np.asarray(r, dtype=float)
        s_arr = r_arr - self.rho_measured
        out = np.where(s_arr > 0.0, self.solution.interpolate(s_arr), 0.0)
        return float(out) if np.ndim(r) == 0 else out


def measure_deadcore(
    spec: ModelSpec,
    R: float,
    d: float | None = None,
    steps: int = 512,
    annulus_samples: int = 256,
    seed_fraction: float = 0.125,
) -> tuple[float, DeadCoreComparison]:
    """Measure the plateau radius by shooting and compare with the barrier.

    Builds the radial solution on [0, T_found], embeds it as
    u(x) = h(|x - x0| - rho_measured) with rho_measured = R - T_found, and
    reports the deviation from the closed-form barrier over the annulus
    (relative to the datum).  For two-term equations the deviation is
    one-sided: the numerical solution stays below the barrier when the
    barrier is a supersolution.
    """
    datum = spec.d if d is None else float(d)
    spec_d = spec.with_(d=datum)
    profile = select_profile(spec_d, R)

    def end_value(length: float) -> float:
        return float(
            integrate_ivp(spec_d, length, steps, seed_fraction=seed_fraction).h_vals[-1]
        )

    hi = 1.05 * profile.T
    for _ in range(60):
        if end_value(hi) > datum:
            break
        hi *= 1.3
    lo = 0.5 * profile.T
    for _ in range(60):
        if end_value(lo) < datum:
            break
        lo *= 0.5
    T_found, sol = shoot_bvp(
        spec_d, datum, (lo, hi), steps=steps, seed_fraction=seed_fraction
    )
    rho_measured = R - T_found

    comparison = DeadCoreComparison(
        profile=profile,
        solution=sol,
        T_found=T_found,
        rho_measured=rho_measured,
        max_abs_rel_dev=0.0,
        max_signed_dev=-math.inf,
        min_signed_dev=math.inf,
    )
    barrier = RadialBarrier(profile=profile, center=np.zeros(1))
    radii = np.linspace(min(profile.rho, rho_measured), R, annulus_samples)
    u_num = comparison.evaluate_embedded(radii)
    u_bar = eval_profile(barrier, radii - profile.rho)
    dev = (u_num - u_bar) / datum
    comparison.max_abs_rel_dev = float(np.max(np.abs(dev)))
    comparison.max_signed_dev = float(np.max(dev))
    comparison.min_signed_dev = float(np.min(dev))
    return rho_measured, comparison


def write_solution_csv(sol: RadialSolution, path) -> None:
    """Samples with columns s, h, hp, residual (endpoint residuals are 0)."""
    res = sol.discrete_residuals()
    padded = np.zeros_like(sol.s_grid)
    if res.size:
        padded[1:-1] = res
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s", "h", "hp", "residual"])
        for si, hi, hpi, ri in zip(sol.s_grid, sol.h_vals, sol.hp_vals, padded):
            writer.writerow([f"{si:.12g}", f"{hi:.12g}", f"{hpi:.12g}", f"{ri:.12g}"])
