"""Green potentials, curve-pullback potentials, weighted densities, volumes.

The dynamical Green function is computed through the renormalized log-norm
recurrence with a certified geometric tail; curve potentials are the
normalized pullback potentials of plane curves, whose L1 distance to the
Green function measures equidistribution of the pulled-back curve currents.
Weighted (directional) density estimates and sublevel-volume experiments use
seeded Monte Carlo sampling throughout.

Potential callbacks used by the density and volume estimators are vectorized:
they receive an (N, 2) complex array of chart points and return N reals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FitUnstable, OnCurve
from .maps import ProjMap, ProjPoint
from .polys import HomogPoly3
from .sampling import ball_points, fs_points, polydisk_points, rng_from, torus_points

#: values of a curve potential below this floor are treated as on-curve hits
CLIP_FLOOR = 30.0


@dataclass
class GreenEval:
    value: float
    n_used: int
    tail_bound: float
    sup_log: float  # safety-padded sup-sphere estimate of |log ||F|| |


@dataclass
class EquidistRow:
    n: int
    l1_distance: float
    stderr: float
    clip_fraction: float


@dataclass
class EquidistReport:
    curve: HomogPoly3
    per_n: list
    samples: int
    seed: int
    tol: float


@dataclass
class KiselmanEstimate:
    point: tuple
    weights: tuple
    slope: float
    r_grid: np.ndarray
    fit_residual: float


def _tail_n(f: ProjMap, tol: float) -> int:
    M = f.lognorm_sup()
    d = f.degree
    return max(1, int(math.ceil(math.log(max(M / ((d - 1) * tol), 1.0)) / math.log(d))))


def green(f: ProjMap, x: ProjPoint, tol: float = 1e-6) -> GreenEval:
    """Green function value with a certified geometric tail bound."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = f.lognorm_sup()
    d = f.degree
    n = _tail_n(f, tol)
    orbit = f.iterate_lognorm(x, n)
    value = orbit.lognorms[-1] / d**n
    return GreenEval(float(value), n, M * d ** (-n) / (d - 1), M)


def green_batch(f: ProjMap, points: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """Vectorized Green values over an (N, 3) array of unit representatives."""
    n = _tail_n(f, tol)
    a, _ = _orbit_arrays(f, points, n)
    return a[n] / f.degree**n


def _orbit_arrays(f: ProjMap, points: np.ndarray, n: int):
    """Renormalized orbit (unit representatives) and log-norm accumulators.

    Returns (a, X) with a[k] the log-norm array at step k and X the list of
    normalized point arrays along the orbit.
    """
    d = f.degree
    X = [np.asarray(points, dtype=complex)]
    a = [np.zeros(X[0].shape[0])]
    for _ in range(n):
        img = f.lift(X[-1])
        norms = np.linalg.norm(img, axis=1)
        a.append(d * a[-1] + np.log(norms))
        X.append(img / norms[:, None])
    return a, X


def curve_potential(f: ProjMap, phi: HomogPoly3, n: int, x: ProjPoint) -> float:
    """Normalized pullback potential of the curve {phi = 0} at x after n steps."""
    k = phi.degree
    orbit = f.iterate_lognorm(x, n)
    val = abs(phi(orbit.points[n].coords))
    if val < 1e-300:
        raise OnCurve(f"{x} hits the pullback curve at depth {n}")
    return float((math.log(val) + k * orbit.lognorms[n]) / (k * f.degree**n))


def equidist_distance(
    f: ProjMap,
    phi: HomogPoly3,
    n_max: int,
    samples: int,
    seed: int,
    tol: float = 1e-6,
    clip: float = CLIP_FLOOR,
) -> EquidistReport:
    """Per-iterate L1 distance between pullback potentials and the Green function.

    Sample values with potential below -clip are excluded from the mean and
    reported in clip_fraction (the potential has log poles on the curve).
    """
    d = f.degree
    k = phi.degree
    n_green = max(n_max, _tail_n(f, tol))
    pts = fs_points(samples, seed)
    a, X = _orbit_arrays(f, pts, n_green)
    g = a[n_green] / d**n_green
    rows = []
    for n in range(n_max + 1):
        vals = np.abs(phi.eval_batch(X[n]))
        vals = np.maximum(vals, 1e-300)
        vn = (np.log(vals) + k * a[n]) / (k * d**n)
        keep = vn > -clip
        diffs = np.abs(vn[keep] - g[keep])
        rows.append(
            EquidistRow(
                n=n,
                l1_distance=float(diffs.mean()),
                stderr=float(diffs.std(ddof=1) / math.sqrt(max(len(diffs), 2))),
                clip_fraction=float(1.0 - keep.mean()),
            )
        )
    return EquidistReport(phi, rows, samples, seed, tol)


# -- weighted density (directional Lelong) estimates --------------------------------


def _slope_fit_weighted(logr, vals):
    """Least-squares slope discarding the largest radius (transient regime)."""
    order = np.argsort(logr)
    x = logr[order][:-1]
    y = vals[order][:-1]
    A = np.stack([x, np.ones_like(x)], axis=1)
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((y - A @ sol) ** 2)))
    return float(sol[0]), resid


def default_r_grid():
    return np.geomspace(2.0**-4, 2.0**-14, 11)


def lelong_estimate(u, p, r_grid=None, samples: int = 64, seed: int = 73) -> float:
    """Logarithmic pole order of the potential u at the chart point p.

    Fits sup-over-sphere values of u against log r; raises FitUnstable when
    the linear fit residual exceeds 0.1.
    """
    r_grid = default_r_grid() if r_grid is None else np.asarray(r_grid, dtype=float)
    if len(r_grid) < 5:
        raise ValueError("need at least 5 radii")
    rng = rng_from(seed)
    p = np.asarray(p, dtype=complex)
    sups = []
    for r in r_grid:
        sphere = _unit_sphere2(samples, rng)
        sups.append(float(np.max(u(p[None, :] + r * sphere))))
    slope, resid = _slope_fit_weighted(np.log(r_grid), np.array(sups))
    if resid > 0.1:
        raise FitUnstable(f"sup fit residual {resid:.3f} over the radius grid")
    return slope


def _unit_sphere2(n, rng):
    v = rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
    return v / np.linalg.norm(v.view(float).reshape(n, 4), axis=1)[:, None]


def kiselman_estimate(
    u, p, weights, r_grid=None, samples: int = 64, seed: int = 74
) -> KiselmanEstimate:
    """Directional (weighted-polydisk) density of u at p with the given weights."""
    a1, a2 = float(weights[0]), float(weights[1])
    if a1 <= 0 or a2 <= 0:
        raise ValueError("weights must be positive")
    r_grid = default_r_grid() if r_grid is None else np.asarray(r_grid, dtype=float)
    rng = rng_from(seed)
    p = np.asarray(p, dtype=complex)
    sups = []
    for r in r_grid:
        radii = (r ** (1.0 / a1), r ** (1.0 / a2))
        pts = torus_points(samples, p, radii, rng)
        sups.append(float(np.max(u(pts))))
    slope, resid = _slope_fit_weighted(np.log(r_grid), a1 * a2 * np.array(sups))
    if resid > 0.1 * max(1.0, abs(slope)):
        raise FitUnstable(f"weighted sup fit residual {resid:.3f}")
    return KiselmanEstimate(tuple(p), (a1, a2), slope, r_grid, resid)


def kiselman_decay_scan(u, line_points, alpha_grid, r_grid=None, samples: int = 64):
    """Sup over line points of the weighted density, per weight in the grid.

    For a potential whose current puts no mass on the line, the table must
    decay to zero as the transverse weight degenerates.
    """
    table = []
    for alpha in alpha_grid:
        worst = 0.0
        for p in line_points:
            est = kiselman_estimate(u, p, (alpha, 1.0), r_grid=r_grid, samples=samples)
            worst = max(worst, est.slope)
        table.append((float(alpha), worst))
    return table


# -- volume experiments ---------------------------------------------------------------


def sublevel_volume(u, box, t_grid, samples: int, seed: int = 75):
    """Monte Carlo fractions of {u <= -t} in a polydisk box, per t."""
    center, radii = box
    pts = polydisk_points(samples, center, radii, seed)
    vals = u(pts)
    return [(float(t), float(np.mean(vals <= -t))) for t in t_grid]


@dataclass
class VolumeDecayReport:
    n: int
    jacobian_bound: float
    jacobian_stderr: float
    occupancy: float
    occupancy_cells: int
    samples: int
    seed: int


def volume_decay(
    f: ProjMap, ball, n: int, samples: int, seed: int = 76, grid: int = 16
) -> VolumeDecayReport:
    """Jacobian-integral lower-bound proxy and grid-occupancy image volume.

    The integral d^{-2n} * int |J f^n|^2 over the ball is estimated in the
    normalized study metric; the occupancy estimate bins forward images of
    the ball in the chart of the image centroid.
    """
    chart, center, radius = ball
    pts2 = ball_points(samples, center, radius, seed)
    lift = _chart_lift(pts2, chart)
    lift_norms = np.linalg.norm(lift, axis=1)
    X = lift / lift_norms[:, None]

    d = f.degree
    Dn = d**n
    logdet, a_n, Y = _orbit_log_jacobian(f, X, n)
    img_chart = int(np.argmax(np.mean(np.abs(Y), axis=0)))
    denom = np.abs(Y[:, img_chart])
    ok = denom > 1e-13
    img = np.stack(
        [Y[ok, j] / Y[ok, img_chart] for j in range(3) if j != img_chart], axis=1
    )

    # the chart Jacobian of the n-th iterate on the chart representative:
    # J_chart = J(F^n) / (d^n * (F^n)_c^3), with homogeneity folding the
    # chart-lift norm into a -3 log ||lift|| term
    log_chart_jac = (
        logdet[ok]
        - math.log(Dn)
        - 3.0 * (a_n[ok] + np.log(denom[ok]))
        - 3.0 * np.log(lift_norms[ok])
    )
    tgt_density = (1.0 + np.sum(np.abs(img) ** 2, axis=1)) ** -3
    vals = np.exp(2.0 * log_chart_jac) * tgt_density
    leb_ball = math.pi**2 * radius**4 / 2.0
    factor = leb_ball * (2.0 / math.pi**2) / Dn**2
    jac_bound = float(np.mean(vals) * factor)
    jac_stderr = float(np.std(vals, ddof=1) / math.sqrt(len(vals)) * factor)

    occupancy, cells = _grid_occupancy(img, grid)
    return VolumeDecayReport(n, jac_bound, jac_stderr, occupancy, cells, samples, seed)


def _chart_lift(pts2, chart):
    n = pts2.shape[0]
    X = np.zeros((n, 3), dtype=complex)
    keep = [i for i in range(3) if i != chart]
    X[:, keep[0]] = pts2[:, 0]
    X[:, keep[1]] = pts2[:, 1]
    X[:, chart] = 1.0
    return X


def _orbit_log_jacobian(f: ProjMap, X: np.ndarray, n: int):
    """log |J(F^n)| on unit representatives, via chained differentials.

    Differentials are evaluated at renormalized orbit points; homogeneity
    folds the accumulated scales back in as 3(d-1) * lognorm terms.  Returns
    (logdet, lognorms, Y) with Y the unit representatives of the n-th images.
    """
    d = f.degree
    parts = [[f.components[i].partial(j) for j in range(3)] for i in range(3)]
    cur = X.copy()
    acc = np.zeros(X.shape[0])  # log-norm accumulator a_k
    logdet = np.zeros(X.shape[0])
    for _ in range(n):
        D = np.empty((X.shape[0], 3, 3), dtype=complex)
        for i in range(3):
            for j in range(3):
                D[:, i, j] = parts[i][j].eval_batch(cur)
        _, ld = np.linalg.slogdet(D)
        logdet = logdet + ld + 3.0 * (d - 1) * acc
        img = f.lift(cur)
        norms = np.linalg.norm(img, axis=1)
        acc = d * acc + np.log(norms)
        cur = img / norms[:, None]
    return logdet, acc, cur


def _grid_occupancy(img: np.ndarray, grid: int):
    """Occupied-cell volume of an image cloud in normalized metric units."""
    if img.shape[0] == 0:
        return 0.0, 0
    flat = img.view(float).reshape(img.shape[0], 4)
    lo = flat.min(axis=0)
    hi = flat.max(axis=0)
    span = np.maximum(hi - lo, 1e-300)
    h = span / grid
    idx = np.minimum(((flat - lo) / h).astype(int), grid - 1)
    cells = {}
    for row, point in zip(idx, img):
        key = tuple(row)
        if key not in cells:
            cells[key] = float((1.0 + np.sum(np.abs(point) ** 2)) ** -3)
    cell_leb = float(np.prod(h))
    vol = (2.0 / math.pi**2) * cell_leb * sum(cells.values())
    return vol, len(cells)
