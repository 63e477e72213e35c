"""Monotone wide-stencil scheme on a masked 2-D disc.

The beta-normalized infinity Laplacian is discretized on a uniform lattice
by a ring stencil: at each interior node the solution is sampled at
``stencil_dirs`` equally spaced directions on the circle of radius eps
(axis directions hit lattice nodes, the rest are bilinearly interpolated),
and

    scheme = |Du|^(2-beta) * (max_ring + min_ring - 2u) / eps^2,
    |Du|   = (max_ring - min_ring) / (2 eps).

For beta = 2 the factor is identically 1 (normalized operator); for
beta < 2 a flat ring (|Du| = 0) gives the degenerate value 0.  The discrete
equation  scheme - c*H - lambda*f - shift = 0  is solved by damped
nonlinear Gauss-Seidel sweeps (or Jacobi, which must reach the same fixed
point); each nodal update solves its scalar equation by monotone bisection.
The sweep kernels are numba-compiled.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import InvalidInput
from .model import HamiltonianKind, ModelSpec, NonlinearityKind, validate_admissible

__all__ = [
    "DiscGrid",
    "GridSolution",
    "SolverOptions",
    "scheme_value",
    "solve",
    "rotation_invariance_check",
    "lipschitz_estimate",
    "grid_to_csv",
]

_HAM_CODE = {
    HamiltonianKind.NONE: 0,
    HamiltonianKind.GRADIENT_POWER: 1,
    HamiltonianKind.NEGATIVE_MIXED: 2,
    HamiltonianKind.POSITIVE_MIXED: 3,
}
_NL_CODE = {
    NonlinearityKind.HARDY_HENON: 0,
    NonlinearityKind.LANE_EMDEN_MATUKUMA: 1,
}


@dataclass
class SolverOptions:
    """Iteration controls; mode is 'gauss_seidel' or 'jacobi'."""

    max_iters: int = 50_000
    damping: float = 0.5
    tol: float = 1e-8
    mode: str = "gauss_seidel"
    check_every: int = 10


class DiscGrid:
    """Uniform lattice covering the disc B_R(center) plus a Dirichlet band.

    Interior nodes keep their full eps-ring inside the disc
    (|x - center| <= R - eps); every other lattice node within R + 2 eps is
    a Dirichlet node carrying the boundary datum evaluated at its radial
    projection onto the circle.
    """

    def __init__(self, center, R: float, epsilon: float, stencil_dirs: int = 16):
        if R <= 0.0 or epsilon <= 0.0:
            raise InvalidInput(f"need R > 0 and epsilon > 0, got R = {R}, epsilon = {epsilon}")
        if epsilon >= R:
            raise InvalidInput(f"epsilon = {epsilon} does not resolve the disc of radius {R}")
        if stencil_dirs < 4:
            raise InvalidInput(f"need at least 4 stencil directions, got {stencil_dirs}")
        self.center = np.asarray(center, dtype=float).reshape(2)
        self.R = float(R)
        self.eps = float(epsilon)
        self.stencil_dirs = int(stencil_dirs)

        pad = 2.0 * self.eps
        half = int(math.ceil((self.R + pad) / self.eps))
        offsets = np.arange(-half, half + 1) * self.eps
        self.xs = self.center[0] + offsets
        self.ys = self.center[1] + offsets
        self.X, self.Y = np.meshgrid(self.xs, self.ys, indexing="ij")
        self.radius = np.hypot(self.X - self.center[0], self.Y - self.center[1])
        slack = 1e-9 * self.eps
        self.interior_mask = self.radius <= self.R - self.eps + slack
        self.dirichlet_mask = ~self.interior_mask & (self.radius <= self.R + pad + slack)
        self.values = np.zeros_like(self.X)
        self._stencil = None
        self._interior_pos = None

    @classmethod
    def from_resolution(cls, center, R: float, n: int, stencil_dirs: int = 16) -> "DiscGrid":
        """Grid whose core lattice spans the diameter with n nodes per side."""
        if n < 5:
            raise InvalidInput(f"need n >= 5, got {n}")
        return cls(center, R, 2.0 * R / (n - 1), stencil_dirs=stencil_dirs)

    @property
    def shape(self) -> tuple[int, int]:
        return self.X.shape

    def set_boundary(self, g) -> None:
        """Fill Dirichlet nodes with g at their radial projection onto the circle."""
        ii, jj = np.nonzero(self.dirichlet_mask)
        rad = self.radius[ii, jj]
        rad = np.where(rad > 0.0, rad, 1.0)
        px = self.center[0] + (self.X[ii, jj] - self.center[0]) * self.R / rad
        py = self.center[1] + (self.Y[ii, jj] - self.center[1]) * self.R / rad
        if callable(g):
            self.values[ii, jj] = np.asarray([g(x, y) for x, y in zip(px, py)], dtype=float)
        else:
            self.values[ii, jj] = float(g)

    def stencil(self):
        """(interior flat indices, ring indices (n,dirs,4), ring weights)."""
        if self._stencil is None:
            ii, jj = np.nonzero(self.interior_mask)  # row-major order
            nx, ny = self.shape
            angles = 2.0 * np.pi * np.arange(self.stencil_dirs) / self.stencil_dirs
            px = self.X[ii, jj][:, None] + self.eps * np.cos(angles)[None, :]
            py = self.Y[ii, jj][:, None] + self.eps * np.sin(angles)[None, :]
            fx = (px - self.xs[0]) / self.eps
            fy = (py - self.ys[0]) / self.eps
            ix = np.clip(np.floor(fx).astype(np.int64), 0, nx - 2)
            iy = np.clip(np.floor(fy).astype(np.int64), 0, ny - 2)
            tx = np.clip(fx - ix, 0.0, 1.0)
            ty = np.clip(fy - iy, 0.0, 1.0)
            tx[tx < 1e-9] = 0.0
            tx[tx > 1.0 - 1e-9] = 1.0
            ty[ty < 1e-9] = 0.0
            ty[ty > 1.0 - 1e-9] = 1.0
            ring_idx = np.stack(
                [
                    ix * ny + iy,
                    (ix + 1) * ny + iy,
                    ix * ny + iy + 1,
                    (ix + 1) * ny + iy + 1,
                ],
                axis=-1,
            )
            ring_w = np.stack(
                [
                    (1.0 - tx) * (1.0 - ty),
                    tx * (1.0 - ty),
                    (1.0 - tx) * ty,
                    tx * ty,
                ],
                axis=-1,
            )
            int_flat = (ii * ny + jj).astype(np.int64)
            rads = self.radius[ii, jj].copy()
            self._stencil = (int_flat, ring_idx, ring_w, rads)
            pos = np.full(self.shape, -1, dtype=np.int64)
            pos[ii, jj] = np.arange(int_flat.size)
            self._interior_pos = pos
        return self._stencil

    def interior_position(self, node) -> int:
        self.stencil()
        t = int(self._interior_pos[node])
        if t < 0:
            raise InvalidInput(f"node {node} is not an interior node")
        return t


@dataclass
class GridSolution:
    """Converged (or best-effort) grid values with the residual certificate."""

    grid: DiscGrid
    iterations: int
    residual_inf: float
    converged: bool

    @property
    def values(self) -> np.ndarray:
        return self.grid.values


@njit(cache=True)
def _rhs_val(v, grad, rad, ham, c, q, m, nl, lam, alpha, gamma, shift):
    vp = v if v > 0.0 else 0.0
    total = shift
    if ham == 1:
        total += c * grad**m
    elif ham == 2:
        total += -c * vp**q * grad**m
    elif ham == 3:
        total += c * vp**q * grad**m
    if nl == 0:
        if v > 0.0:
            total += lam * rad**alpha * vp**gamma
    else:
        weight = (1.0 + rad * rad) ** (-alpha)
        if gamma == 0.0:
            total += lam * weight
        else:
            total += lam * weight * vp**gamma
    return total


@njit(cache=True)
def _node_root(A, big, small, grad, eps2, v_old, rad, floor, ham, c, q, m, nl, lam, alpha, gamma, shift):
    if A == 0.0:
        # Flat ring, beta < 2: the operator term vanishes, so the A -> 0+
        # limit of the nodal equation is rhs(v) = 0.  Move to its largest
        # root (the rest point of the absorption) but never above the ring
        # level; with no root below the ring, keep the level and let the
        # residual report the unsatisfiable node.
        lo = small
        step = 1.0 + 0.25 * abs(small)
        bracketed = False
        for _ in range(64):
            if -_rhs_val(lo, grad, rad, ham, c, q, m, nl, lam, alpha, gamma, shift) >= 0.0:
                bracketed = True
                break
            lo -= step
            step *= 2.0
        if not bracketed:
            return small if small > floor else floor
        hi = small
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if -_rhs_val(mid, grad, rad, ham, c, q, m, nl, lam, alpha, gamma, shift) >= 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-14 * (1.0 + abs(hi)):
                break
        root = 0.5 * (lo + hi)
        if root > small:
            root = small
        return root if root > floor else floor
    lo = small if small < v_old else v_old
    hi = big if big > v_old else v_old
    step = 1.0 + 0.25 * (abs(big) + abs(small))
    for _ in range(64):
        g_lo = A * (big + small - 2.0 * lo) / eps2 - _rhs_val(
            lo, grad, rad, ham, c, q, m, nl, lam, alpha, gamma, shift
        )
        if g_lo >= 0.0:
            break
        lo -= step
        step *= 2.0
    step = 1.0 + 0.25 * (abs(big) + abs(small))
    for _ in range(64):
        g_hi = A * (big + small - 2.0 * hi) / eps2 - _rhs_val(
            hi, grad, rad, ham, c, q, m, nl, lam, alpha, gamma, shift
        )
        if g_hi <= 0.0:
            break
        hi += step
        step *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g_mid = A * (big + small - 2.0 * mid) / eps2 - _rhs_val(
            mid, grad, rad, ham, c, q, m, nl, lam, alpha, gamma, shift
        )
        if g_mid >= 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * (1.0 + abs(hi)):
            break
    root = 0.5 * (lo + hi)
    return root if root > floor else floor


@njit(cache=True)
def _sweep(
    u_read,
    u_write,
    int_flat,
    ring_idx,
    ring_w,
    rads,
    eps,
    beta,
    floor,
    damping,
    ham,
    c,
    q,
    m,
    nl,
    lam,
    alpha,
    gamma,
    shift,
):
    eps2 = eps * eps
    max_change = 0.0
    for t in range(int_flat.size):
        i = int_flat[t]
        big = -1e300
        small = 1e300
        for k in range(ring_idx.shape[1]):
            val = (
                ring_w[t, k, 0] * u_read[ring_idx[t, k, 0]]
                + ring_w[t, k, 1] * u_read[ring_idx[t, k, 1]]
                + ring_w[t, k, 2] * u_read[ring_idx[t, k, 2]]
                + ring_w[t, k, 3] * u_read[ring_idx[t, k, 3]]
            )
            if val > big:
                big = val
            if val < small:
                small = val
        grad = (big - small) / (2.0 * eps)
        if beta == 2.0:
            A = 1.0
        elif grad > 0.0:
            A = grad ** (2.0 - beta)
        else:
            A = 0.0
        v_old = u_read[i]
        root = _node_root(
            A, big, small, grad, eps2, v_old, rads[t], floor, ham, c, q, m, nl, lam, alpha, gamma, shift
        )
        new_val = v_old + damping * (root - v_old)
        change = abs(new_val - v_old)
        if change > max_change:
            max_change = change
        u_write[i] = new_val
    return max_change


@njit(cache=True)
def _residual_inf(
    u, int_flat, ring_idx, ring_w, rads, eps, beta, floor, ham, c, q, m, nl, lam, alpha, gamma, shift
):
    eps2 = eps * eps
    worst = 0.0
    for t in range(int_flat.size):
        i = int_flat[t]
        big = -1e300
        small = 1e300
        for k in range(ring_idx.shape[1]):
            val = (
                ring_w[t, k, 0] * u[ring_idx[t, k, 0]]
                + ring_w[t, k, 1] * u[ring_idx[t, k, 1]]
                + ring_w[t, k, 2] * u[ring_idx[t, k, 2]]
                + ring_w[t, k, 3] * u[ring_idx[t, k, 3]]
            )
            if val > big:
                big = val
            if val < small:
                small = val
        grad = (big - small) / (2.0 * eps)
        if beta == 2.0:
            A = 1.0
        elif grad > 0.0:
            A = grad ** (2.0 - beta)
        else:
            A = 0.0
        res = A * (big + small - 2.0 * u[i]) / eps2 - _rhs_val(
            u[i], grad, rads[t], ham, c, q, m, nl, lam, alpha, gamma, shift
        )
        # at a node pinned to the subsolution floor the complementarity
        # condition allows the residual to be one-sidedly negative
        if u[i] <= floor + 1e-12 * (1.0 + abs(floor)) and res < 0.0:
            res = 0.0
        if abs(res) > worst:
            worst = abs(res)
    return worst


def _ring_samples(grid: DiscGrid, t: int) -> np.ndarray:
    _, ring_idx, ring_w, _ = grid.stencil()
    flat = grid.values.ravel()
    return np.sum(ring_w[t] * flat[ring_idx[t]], axis=1)


def scheme_value(grid: DiscGrid, node, beta: float = 0.0) -> float:
    """Discrete beta-normalized infinity Laplacian at one interior node.

    For beta = 2 the prefactor |Du|^(2-beta) is identically 1 (normalized
    operator); for beta < 2 a flat ring yields the degenerate value 0.
    """
    t = grid.interior_position(node)
    ring = _ring_samples(grid, t)
    big, small = float(np.max(ring)), float(np.min(ring))
    u0 = float(grid.values[node])
    eps = grid.eps
    grad = (big - small) / (2.0 * eps)
    if beta == 2.0:
        factor = 1.0
    elif grad > 0.0:
        factor = grad ** (2.0 - beta)
    else:
        return 0.0
    return factor * (big + small - 2.0 * u0) / (eps * eps)


def _spec_codes(spec: ModelSpec):
    if spec.nonlinearity is NonlinearityKind.EXPONENTIAL:
        raise InvalidInput("the grid solver supports the power-type absorptions only")
    if spec.nonlinearity is NonlinearityKind.HARDY_HENON and spec.alpha < 0.0:
        raise InvalidInput("singular Hardy-Henon weights (alpha < 0) are not representable on the grid")
    return _HAM_CODE[spec.hamiltonian], _NL_CODE[spec.nonlinearity]


def solve(
    spec: ModelSpec,
    grid: DiscGrid,
    g,
    source_shift: float = 0.0,
    options: SolverOptions | None = None,
    init: float | str | None = None,
    floor: float | None = None,
) -> GridSolution:
    """Damped nonlinear sweeps for  scheme - c*H - lambda*f - shift = 0.

    ``g`` is the Dirichlet datum (callable of (x, y) or a constant);
    ``source_shift`` is the constant forcing h of the perturbed equation:
    a larger shift pushes the solution down.  ``init`` seeds the interior:
    None starts from the constant supersolution max(0, sup g), a float
    fills that value, "keep" leaves the current grid values.

    ``floor`` restricts the iteration to the sandwich class u >= floor.
    For beta < 2 the degenerate operator (flat regions have operator value
    0 at any level) admits spurious solutions with plateaus below zero;
    uniqueness only holds between an ordered sub/supersolution pair, so by
    default the zero subsolution is enforced whenever it is one (datum
    >= 0 and shift <= 0).  Pass -inf to disable.  Nodes pinned at the
    floor satisfy the one-sided complementarity residual.

    Returns the solution with its convergence certificate;
    non-convergence is reported, not raised.
    """
    report = validate_admissible(spec)
    if not report.admissible:
        raise InvalidInput("inadmissible spec: " + "; ".join(report.violations))
    ham, nl = _spec_codes(spec)
    opts = options or SolverOptions()
    if opts.mode not in ("gauss_seidel", "jacobi"):
        raise InvalidInput(f"unknown mode {opts.mode!r}")

    grid.set_boundary(g)
    int_flat, ring_idx, ring_w, rads = grid.stencil()
    flat = grid.values.ravel()
    if init is None:
        # Start from the constant supersolution: sweeping down from above
        # keeps every iterate above the nonnegative solution (monotone
        # updates), so the spurious negative plateaus of the degenerate
        # beta < 2 operator are never entered.
        dir_vals = grid.values[grid.dirichlet_mask]
        top = max(0.0, float(dir_vals.max())) if dir_vals.size else 0.0
        flat[int_flat] = top
    elif init != "keep":
        flat[int_flat] = float(init)

    if floor is None:
        dir_vals = grid.values[grid.dirichlet_mask]
        datum_min = float(dir_vals.min()) if dir_vals.size else 0.0
        floor = 0.0 if (datum_min >= 0.0 and source_shift <= 0.0) else -math.inf

    args = (
        rads,
        grid.eps,
        spec.beta,
        float(floor),
    )
    params = (ham, spec.c, spec.q, spec.m, nl, spec.lam, spec.alpha, spec.gamma, float(source_shift))

    u = grid.values.ravel()
    iterations = 0
    residual = math.inf
    converged = False
    for sweep in range(1, opts.max_iters + 1):
        if opts.mode == "gauss_seidel":
            change = _sweep(u, u, int_flat, ring_idx, ring_w, *args, opts.damping, *params)
        else:
            u_new = u.copy()
            change = _sweep(u, u_new, int_flat, ring_idx, ring_w, *args, opts.damping, *params)
            u[:] = u_new
        iterations = sweep
        if change == 0.0 or sweep % opts.check_every == 0 or sweep == opts.max_iters:
            residual = _residual_inf(u, int_flat, ring_idx, ring_w, *args, *params)
            if residual <= opts.tol or change == 0.0:
                converged = residual <= opts.tol
                break
    if math.isinf(residual):
        residual = _residual_inf(u, int_flat, ring_idx, ring_w, *args, *params)
        converged = residual <= opts.tol
    return GridSolution(grid=grid, iterations=iterations, residual_inf=residual, converged=converged)


def _bilinear(grid: DiscGrid, px: np.ndarray, py: np.ndarray) -> np.ndarray:
    nx, ny = grid.shape
    fx = (px - grid.xs[0]) / grid.eps
    fy = (py - grid.ys[0]) / grid.eps
    ix = np.clip(np.floor(fx).astype(np.int64), 0, nx - 2)
    iy = np.clip(np.floor(fy).astype(np.int64), 0, ny - 2)
    tx = np.clip(fx - ix, 0.0, 1.0)
    ty = np.clip(fy - iy, 0.0, 1.0)
    v = grid.values
    return (
        v[ix, iy] * (1.0 - tx) * (1.0 - ty)
        + v[ix + 1, iy] * tx * (1.0 - ty)
        + v[ix, iy + 1] * (1.0 - tx) * ty
        + v[ix + 1, iy + 1] * tx * ty
    )


def rotation_invariance_check(sol: GridSolution, angles) -> list[float]:
    """max |u(x) - u(O_theta x)| over interior nodes, one entry per angle.

    u(O_theta x) is sampled bilinearly; with radially symmetric boundary
    data the deviation is bounded by the interpolation error, i.e. by a
    grid-size multiple of the Lipschitz constant.
    """
    grid = sol.grid
    ii, jj = np.nonzero(grid.interior_mask)
    x = grid.X[ii, jj] - grid.center[0]
    y = grid.Y[ii, jj] - grid.center[1]
    u_node = grid.values[ii, jj]
    out = []
    for theta in np.atleast_1d(np.asarray(angles, dtype=float)):
        ct, st = math.cos(theta), math.sin(theta)
        px = grid.center[0] + ct * x - st * y
        py = grid.center[1] + st * x + ct * y
        u_rot = _bilinear(grid, px, py)
        out.append(float(np.max(np.abs(u_node - u_rot))))
    return out


def lipschitz_estimate(sol: GridSolution, fraction: float = 0.5) -> float:
    """Largest difference quotient over node pairs within fraction*R."""
    if not 0.0 < fraction <= 1.0:
        raise InvalidInput(f"fraction must lie in (0, 1], got {fraction}")
    grid = sol.grid
    keep = grid.interior_mask & (grid.radius <= fraction * grid.R)
    ii, jj = np.nonzero(keep)
    pts = np.column_stack([grid.X[ii, jj], grid.Y[ii, jj]])
    vals = grid.values[ii, jj]
    best = 0.0
    chunk = 256
    for start in range(0, pts.shape[0], chunk):
        p = pts[start : start + chunk]
        v = vals[start : start + chunk]
        dist = np.sqrt(np.sum((p[:, None, :] - pts[None, :, :]) ** 2, axis=-1))
        dv = np.abs(v[:, None] - vals[None, :])
        mask = dist > 0.0
        if np.any(mask):
            best = max(best, float(np.max(dv[mask] / dist[mask])))
    return best


def grid_to_csv(sol_or_grid, path) -> None:
    """Rows (x, y, u, interior_flag) for every disc node, row-major order."""
    grid = sol_or_grid.grid if isinstance(sol_or_grid, GridSolution) else sol_or_grid
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "u", "interior_flag"])
        keep = grid.interior_mask | grid.dirichlet_mask
        ii, jj = np.nonzero(keep)
        for i, j in zip(ii, jj):
            writer.writerow(
                [
                    f"{grid.X[i, j]:.12g}",
                    f"{grid.Y[i, j]:.12g}",
                    f"{grid.values[i, j]:.12g}",
                    int(grid.interior_mask[i, j]),
                ]
            )
