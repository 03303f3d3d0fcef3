"""Totally invariant lines and points, exceptional structure, and classification.

A line {l = 0} is totally invariant exactly when l o F = lambda * l^d in
coordinates; candidates are found by damped Gauss-Newton on that
overdetermined coefficient-matching system, batched over multistarts.
On each such line the map restricts to a degree-d rational self-map of the
line, and totally invariant periodic orbits of the restriction are the
line-borne exceptional points.  Off the lines, exceptional points are fixed
points whose one-step contraction order equals the degree (pencil-preserving
points).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ComponentInvalid,
    NonIntegerOrder,
    NotSuperattracting,
)
from .maps import ProjMap, ProjPoint
from .multiplicities import contraction_order, jacobian_multiplicity
from .polys import HomogPoly3, monomial_exponents
from .roots import roots_univariate

LINE_TOL = 1e-7
_SEED_LINES = 715225741


# -- totally invariant lines ------------------------------------------------------


@dataclass
class InvariantLine:
    form: HomogPoly3  # degree 1, unit coefficient 2-norm, canonical phase
    lam: complex
    residual: float

    def basis(self):
        """Two spanning points of the line, pivoted on the largest coefficient."""
        l = self.form.coeffs
        j = int(np.argmax(np.abs(l)))
        basis = []
        for i in range(3):
            if i == j:
                continue
            v = np.zeros(3, dtype=complex)
            v[i] = 1.0
            v[j] = -l[i] / l[j]
            basis.append(v / np.linalg.norm(v))
        return basis[0], basis[1]

    def sample_points(self, count, seed=0):
        rng = np.random.default_rng(seed)
        b1, b2 = self.basis()
        pars = rng.standard_normal((count, 2)) + 1j * rng.standard_normal((count, 2))
        return [ProjPoint(s * b1 + u * b2) for s, u in pars]

    def contains(self, point: ProjPoint, tol=1e-6) -> bool:
        return abs(np.dot(self.form.coeffs, point.coords)) <= tol


def _canonical_coeffs(v):
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    top = np.max(np.abs(v))
    for c in v:
        if abs(c) > 1e-3 * top:
            v = v * (c.conjugate() / abs(c))
            break
    v[np.abs(v) < 1e-12] = 0.0
    return v


def invariant_lines(
    f: ProjMap, starts: int = 200, line_tol: float = LINE_TOL, seed: int = _SEED_LINES
):
    """All lines with l o F = lambda l^d, by batched multistart Gauss-Newton."""
    d = f.degree
    exps = monomial_exponents(d)
    multi = np.array(
        [math.factorial(d) // (math.factorial(i) * math.factorial(j) * math.factorial(k))
         for i, j, k in exps],
        dtype=complex,
    )
    comp_mat = np.stack([p.coeffs for p in f.components], axis=1)  # (M, 3)
    scale = max(1.0, max(p.coeff_norm for p in f.components))
    rng = np.random.default_rng(seed)

    found = []
    for norm_chart in range(3):
        free = [i for i in range(3) if i != norm_chart]
        # seeded starts: coordinate lines, sums, then random
        seeds = [np.eye(3)[i] for i in range(3)] + [
            np.array([1.0, 1.0, 1.0]),
            np.array([1.0, -1.0, 0.0]),
            np.array([1.0, 0.0, -1.0]),
            np.array([0.0, 1.0, -1.0]),
        ]
        seeds = [s for s in seeds if abs(s[norm_chart]) > 0.5]
        rand = rng.standard_normal((starts, 3)) + 1j * rng.standard_normal((starts, 3))
        ell = np.concatenate([np.array(seeds, dtype=complex), rand], axis=0)
        ell = ell / ell[:, norm_chart][:, None]
        lam = _lsq_lambda(ell, comp_mat, multi, exps)
        ell, lam = _gauss_newton_lines(ell, lam, comp_mat, multi, exps, free, d)
        res = _line_residual(ell, lam, comp_mat, multi, exps)
        for b in range(ell.shape[0]):
            if not np.isfinite(res[b]) or res[b] > line_tol * scale:
                continue
            coeffs = _canonical_coeffs(ell[b])
            form = HomogPoly3(1, coeffs)
            lam_b = _lsq_lambda(coeffs[None, :], comp_mat, multi, exps)[0]
            resid = float(
                _line_residual(coeffs[None, :], np.array([lam_b]), comp_mat, multi, exps)[0]
            ) / scale
            if resid > line_tol:
                continue
            for other in found:
                if np.linalg.norm(other.form.coeffs - coeffs) < 1e-5:
                    break
            else:
                found.append(InvariantLine(form, complex(lam_b), resid))
    found.sort(key=lambda L: L.residual)
    found = found[:3]
    found.sort(key=lambda L: tuple(np.round(np.abs(L.form.coeffs), 6)))
    return found


def _power_tables(ell, dmax):
    tables = []
    for v in range(3):
        t = np.ones((dmax + 1, ell.shape[0]), dtype=complex)
        for e in range(1, dmax + 1):
            t[e] = t[e - 1] * ell[:, v]
        tables.append(t)
    return tables


def _ell_power_coeffs(ell, multi, exps):
    d = int(exps[0].sum())
    pz, pw, pt = _power_tables(ell, d)
    return (multi[None, :] * pz[exps[:, 0]].T * pw[exps[:, 1]].T * pt[exps[:, 2]].T)


def _lsq_lambda(ell, comp_mat, multi, exps):
    u = ell @ comp_mat.T  # (B, M): coefficients of l o F
    v = _ell_power_coeffs(ell, multi, exps)
    num = np.sum(np.conj(v) * u, axis=1)
    den = np.sum(np.abs(v) ** 2, axis=1)
    den = np.where(den == 0, 1.0, den)
    return num / den


def _line_residual(ell, lam, comp_mat, multi, exps):
    u = ell @ comp_mat.T
    v = _ell_power_coeffs(ell, multi, exps)
    return np.linalg.norm(u - lam[:, None] * v, axis=1)


def _gauss_newton_lines(ell, lam, comp_mat, multi, exps, free, d, iters=60):
    B = ell.shape[0]
    for _ in range(iters):
        u = ell @ comp_mat.T
        v = _ell_power_coeffs(ell, multi, exps)
        R = u - lam[:, None] * v
        # holomorphic Jacobian columns: two free line coefficients and lambda
        pz, pw, pt = _power_tables(ell, d)
        cols = []
        for a in free:
            e_a = exps[:, a]
            dv = np.zeros_like(v)
            mask = e_a >= 1
            facs = [pz, pw, pt]
            prod = np.ones((B, mask.sum()), dtype=complex)
            for vv in range(3):
                e = exps[mask, vv] - (1 if vv == a else 0)
                prod *= facs[vv][e].T
            dv[:, mask] = multi[None, mask] * e_a[None, mask] * prod
            cols.append(comp_mat[:, a][None, :] - lam[:, None] * dv)
        cols.append(-v)
        J = np.stack(cols, axis=2)  # (B, M, 3)
        JH = np.conj(np.transpose(J, (0, 2, 1)))
        G = JH @ J + 1e-12 * np.eye(3)[None, :, :]
        rhs = -(JH @ R[:, :, None])
        try:
            delta = np.linalg.solve(G, rhs)[:, :, 0]
        except np.linalg.LinAlgError:
            delta = np.linalg.lstsq(G.reshape(-1, 3), rhs.reshape(-1, 1), rcond=None)[0]
        # clip wild steps; dead diverging starts are zeroed out
        with np.errstate(over="ignore", invalid="ignore"):
            mag = np.abs(delta)
            cap = 2.0 * (1.0 + np.abs(np.concatenate([ell[:, free], lam[:, None]], axis=1)))
            delta = np.where(mag > cap, delta * cap / np.where(mag == 0, 1, mag), delta)
        delta[~np.isfinite(delta)] = 0.0
        for idx, a in enumerate(free):
            ell[:, a] += delta[:, idx]
        lam = lam + delta[:, 2]
    return ell, lam


# -- restriction of the map to an invariant line ---------------------------------


@dataclass
class LineRestriction:
    """Degree-d self-map of a line as a pair of binary forms in (s, u)."""

    num: np.ndarray  # coefficients, num[m] for s^(d-m) u^m
    den: np.ndarray
    basis: tuple
    residual: float

    @property
    def degree(self):
        return len(self.num) - 1

    def apply(self, pair):
        s, u = pair
        d = self.degree
        pows = np.array([s ** (d - m) * u**m for m in range(d + 1)])
        return _p1_normalize((self.num @ pows, self.den @ pows))


def line_restriction(f: ProjMap, line: InvariantLine) -> LineRestriction:
    b1, b2 = line.basis()
    d = f.degree
    npts = d + 2
    theta = np.exp(2j * np.pi * np.arange(npts) / npts)
    pts = b1[None, :] + theta[:, None] * b2[None, :]
    images = f.lift(pts)  # (npts, 3)
    basis_mat = np.stack([b1, b2], axis=1)  # (3, 2)
    coords, res, *_ = np.linalg.lstsq(basis_mat, images.T, rcond=None)
    normal_res = float(
        np.max(np.linalg.norm(images.T - basis_mat @ coords, axis=0))
        / max(1.0, float(np.max(np.abs(images))))
    )
    # values at [1:theta] of the two binary forms; coefficients via DFT
    num = np.fft.fft(coords[0])[: d + 1] / npts
    den = np.fft.fft(coords[1])[: d + 1] / npts
    return LineRestriction(num, den, (b1, b2), normal_res)


def _p1_normalize(pair):
    v = np.array(pair, dtype=complex)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero representative on the line")
    v = v / n
    top = np.max(np.abs(v))
    for c in v:
        if abs(c) > 1e-3 * top:
            v = v * (c.conjugate() / abs(c))
            break
    return (complex(v[0]), complex(v[1]))


def _p1_dist(a, b):
    # wedge form of the chordal distance (no cancellation near zero)
    return min(1.0, abs(a[0] * b[1] - a[1] * b[0]))


def _p1_preimages(rest: LineRestriction, q):
    """Preimages on the line with multiplicities: roots of q_u*num - q_s*den."""
    qs, qu = q
    co = qu * rest.num - qs * rest.den  # binary form coefficients, s^(d-m) u^m
    d = rest.degree
    # affine roots in tau = u/s plus the root at [0:1] for each degree drop
    col = np.abs(co)
    if col.max() == 0:
        raise ValueError("restriction preimage form vanished")
    return _binary_roots(co, d)


def _binary_roots(co, formal_degree):
    """Roots of a binary form with multiplicities, including [0:1] on degree drop."""
    stripped = _strip(co)
    out = []
    if len(stripped) >= 2:
        rr = roots_univariate(stripped)
        out = [(_p1_normalize((1.0, cl.root)), cl.multiplicity) for cl in rr.clusters]
    drop = formal_degree - (len(stripped) - 1)
    if drop > 0:
        out.append((_p1_normalize((0.0, 1.0)), drop))
    return out


def _strip(co, rel=1e-9):
    c = np.asarray(co)
    top = np.max(np.abs(c))
    keep = np.nonzero(np.abs(c) > rel * top)[0]
    return c[: keep[-1] + 1]


def _p1_iterate_forms(rest: LineRestriction, k: int):
    """Coefficients of the k-fold composition as binary форms, via DFT sampling."""
    d = rest.degree
    D = d**k
    npts = D + 2
    theta = np.exp(2j * np.pi * np.arange(npts) / npts)
    s = np.ones(npts, dtype=complex)
    u = theta.copy()
    for _ in range(k):
        pows = np.stack([s ** (d - m) * u**m for m in range(d + 1)], axis=0)
        s, u = rest.num @ pows, rest.den @ pows
    return np.fft.fft(s)[: D + 1] / npts, np.fft.fft(u)[: D + 1] / npts


def _p1_periodic_orbits(rest: LineRestriction, max_period: int):
    """Orbits of period <= max_period as lists of normalized pairs."""
    points = []
    for k in range(1, max_period + 1):
        nk, dk = _p1_iterate_forms(rest, k)
        D = rest.degree**k
        # fixed points of the k-th iterate: u*nk - s*dk = 0, binary of degree D+1
        co = np.zeros(D + 2, dtype=complex)
        co[1:] += nk
        co[:-1] -= dk
        cands = [pt for pt, _ in _binary_roots(co, D + 1)]
        for c in cands:
            if all(_p1_dist(c, p) > 1e-6 for p in points):
                points.append(c)
    orbits = []
    used = []
    for p in points:
        if any(_p1_dist(p, q) <= 1e-6 for q in used):
            continue
        orbit = [p]
        cur = rest.apply(p)
        while _p1_dist(cur, p) > 1e-6 and len(orbit) <= max_period:
            orbit.append(cur)
            cur = rest.apply(cur)
        if len(orbit) > max_period:
            continue
        used.extend(orbit)
        orbits.append(orbit)
    return orbits


def _p1_orbit_totally_invariant(rest: LineRestriction, orbit) -> bool:
    d = rest.degree
    for i, q in enumerate(orbit):
        prev = orbit[(i - 1) % len(orbit)]
        pre = _p1_preimages(rest, q)
        total_here = sum(m for x, m in pre if _p1_dist(x, prev) <= 1e-3)
        if total_here != d:
            return False
    return True


# -- totally invariant points ------------------------------------------------------


def _iterate_map(f: ProjMap, k: int) -> ProjMap:
    if k == 1:
        return f
    return ProjMap(f.iterate_lift(k), f.nondegeneracy_residual)


def invariant_orbits(f: ProjMap, max_period: int = 3, lift_degree_cap: int = 10):
    """Totally invariant periodic orbits as lists of points, ordered by period.

    Periods whose iterate lift stays under the degree cap are solved exactly;
    longer periods are covered through the invariant-line restrictions, which
    is where higher-period totally invariant orbits must live (two or more
    pencil-preserving points force the line through them to be invariant).
    """
    d = f.degree
    seen = []
    orbits = []
    for k in range(1, max_period + 1):
        if d**k > lift_degree_cap:
            break
        try:
            fixed = _iterate_map(f, k).fixed_points()
        except Exception:
            continue
        for p, _ in fixed:
            if any(p.dist(q) <= 1e-5 for q in seen):
                continue
            orbit = [p]
            cur = f.apply(p)
            while cur.dist(p) > 1e-5 and len(orbit) <= max_period:
                orbit.append(cur)
                cur = f.apply(cur)
            if len(orbit) > max_period:
                continue
            seen.extend(orbit)
            if _orbit_totally_invariant(f, orbit):
                orbits.append(orbit)

    for line in invariant_lines(f):
        rest = line_restriction(f, line)
        if rest.residual > 1e-6:
            continue
        b1, b2 = rest.basis
        for orb1 in _p1_periodic_orbits(rest, max_period):
            pts = [ProjPoint(s * b1 + u * b2) for s, u in orb1]
            if any(pts[0].dist(q) <= 1e-5 for q in seen):
                continue
            seen.extend(pts)
            if _orbit_totally_invariant(f, pts):
                orbits.append(pts)
    return orbits


def _polish_periodic(f: ProjMap, orbit):
    """Forward iteration sharpens superattracting periodic points quadratically.

    Candidates that drift are left alone (repelling points cannot be polished
    this way, but they never pass the total-invariance test anyway).
    """
    cur = orbit[0]
    for _ in range(3 * len(orbit)):
        cur = f.apply(cur)
    if cur.dist(orbit[0]) <= 1e-3:
        out = [cur]
        for _ in range(len(orbit) - 1):
            out.append(f.apply(out[-1]))
        return out
    return orbit


def _orbit_totally_invariant(f: ProjMap, orbit) -> bool:
    # a multiplicity-m fiber point computed in floats splits on the scale
    # eps^(1/m); the match radius must sit above that for m up to degree^2
    d2 = f.degree**2
    radius = min(max(2e-3, 20.0 * 1e-14 ** (1.0 / d2)), 0.05)
    orbit = _polish_periodic(f, orbit)
    for i, q in enumerate(orbit):
        prev = orbit[(i - 1) % len(orbit)]
        fib = f.preimages(q)
        near = sum(m for x, m in fib.preimages if x.dist(prev) <= radius)
        if near != d2:
            return False
    return True


def invariant_points(f: ProjMap, max_period: int = 3):
    """Flat list of points on totally invariant periodic orbits."""
    pts = [p for orbit in invariant_orbits(f, max_period) for p in orbit]
    pts.sort(key=lambda p: tuple(np.round(np.abs(p.coords), 6)))
    return pts


# -- critical transition matrix ----------------------------------------------------


@dataclass
class TransitionMatrix:
    components: list
    matrix: np.ndarray  # integer exponents t[i, j]
    rho: float
    perron: np.ndarray

    def as_dict(self):
        return {
            "components": [c.to_string() for c in self.components],
            "matrix": self.matrix.tolist(),
            "rho": self.rho,
            "perron": [float(x) for x in self.perron],
        }


def _critical_samples(f: ProjMap, count=24, seed=11):
    """Points on the critical curve, found along random lines."""
    rng = np.random.default_rng(seed)
    J = f.lift_jacobian
    out = []
    while len(out) < count:
        b1 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        b2 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        co = J.restrict_line(b1 / np.linalg.norm(b1), b2 / np.linalg.norm(b2))
        rr = roots_univariate(co)
        for cl in rr.clusters:
            out.append(ProjPoint(b1 / np.linalg.norm(b1) + cl.root * b2 / np.linalg.norm(b2)))
            if len(out) >= count:
                break
    return out


def _line_divides_jacobian(f: ProjMap, coeffs, tol=1e-7) -> bool:
    line = InvariantLine(HomogPoly3(1, _canonical_coeffs(coeffs)), 0.0, 0.0)
    b1, b2 = line.basis()
    co = f.lift_jacobian.restrict_line(b1, b2)
    return float(np.max(np.abs(co))) <= tol * max(f.lift_jacobian.coeff_norm, 1e-300)


def detect_linear_critical_components(f: ProjMap, seed=11):
    """Linear factors of the lift Jacobian.

    Candidates are the coordinate lines, every detected invariant line, and
    lines through pairs of critical-curve samples; each candidate is kept if
    the Jacobian vanishes identically along it.
    """
    samples = _critical_samples(f, seed=seed)
    candidates = [np.eye(3, dtype=complex)[i] for i in range(3)]
    candidates += [line.form.coeffs for line in invariant_lines(f)]
    for i in range(len(samples)):
        for j in range(i + 1, min(i + 4, len(samples))):
            ell = np.cross(samples[i].coords, samples[j].coords)
            n = np.linalg.norm(ell)
            if n > 1e-9:
                candidates.append(ell / n)
    out = []
    for cand in candidates:
        if not _line_divides_jacobian(f, cand):
            continue
        c = _canonical_coeffs(cand)
        if all(np.linalg.norm(c - o.coeffs) > 1e-5 for o in out):
            out.append(HomogPoly3(1, c))
    out.sort(key=lambda p: tuple(np.round(np.abs(p.coeffs), 6)))
    return out


def _component_sample(f: ProjMap, comp: HomogPoly3, others, seed=17):
    """A smooth sample point of {comp = 0} away from the other components."""
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(40):
        b1 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        b2 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        b1, b2 = b1 / np.linalg.norm(b1), b2 / np.linalg.norm(b2)
        co = comp.restrict_line(b1, b2)
        if np.max(np.abs(co)) < 1e-12:
            continue
        for cl in roots_univariate(co).clusters:
            x = ProjPoint(b1 + cl.root * b2)
            clearance = min(
                (abs(o(x.coords)) / max(o.coeff_norm, 1e-300) for o in others),
                default=1.0,
            )
            if best is None or clearance > best[0]:
                best = (clearance, x)
    if best is None or best[0] < 1e-6:
        raise ComponentInvalid("no clean smooth sample point on a component")
    return best[1]


def transition_matrix(f: ProjMap, components=None, seed=17) -> TransitionMatrix:
    """Pullback exponents of critical components, with Perron-Frobenius data.

    t[i, j] is the generic vanishing order of comp_i o F along component j,
    fitted as a log-log slope along a transverse arc and rounded to an
    integer.
    """
    if components is None:
        components = detect_linear_critical_components(f)
    else:
        components = list(components)
        for comp in components:
            if not _divides_jacobian(f, comp):
                raise ComponentInvalid(f"{comp.to_string()} does not divide the Jacobian")
    k = len(components)
    if k == 0:
        return TransitionMatrix([], np.zeros((0, 0), dtype=int), 0.0, np.zeros(0))

    pulled = [c.compose(f.components) for c in components]
    t = np.zeros((k, k), dtype=int)
    for j, comp_j in enumerate(components):
        others = [c for i, c in enumerate(components) if i != j]
        x = _component_sample(f, comp_j, others, seed=seed + j)
        v = _transverse_direction(comp_j, x)
        for i in range(k):
            t[i, j] = _arc_vanishing_order(pulled[i], x, v)
    rho, perron = _perron(t)
    return TransitionMatrix(components, t, rho, perron)


def _divides_jacobian(f: ProjMap, comp: HomogPoly3) -> bool:
    if comp.degree == 1:
        return _line_divides_jacobian(f, comp.coeffs)
    others: list = []
    try:
        for s in range(3):
            x = _component_sample(f, comp, others, seed=23 + s)
            val = abs(f.lift_jacobian(x.coords))
            if val > 1e-6 * max(f.lift_jacobian.coeff_norm, 1e-300):
                return False
        return True
    except ComponentInvalid:
        return False


def _transverse_direction(comp: HomogPoly3, x: ProjPoint):
    grad = np.array([comp.partial(v)(x.coords) for v in range(3)])
    n = np.linalg.norm(grad)
    if n < 1e-12:
        raise ComponentInvalid("sample point is singular on the component")
    return np.conj(grad) / n


def _arc_vanishing_order(pulled: HomogPoly3, x: ProjPoint, v, s_grid=None) -> int:
    if s_grid is None:
        s_grid = np.geomspace(1e-3, 1e-6, 8)
    vals = np.array([abs(pulled(x.coords + s * v)) for s in s_grid])
    scale = max(pulled.coeff_norm, 1e-300)
    if np.max(vals) <= 1e-12 * scale:
        # vanishes beyond slope resolution: the order is the full arc degree
        raise NonIntegerOrder("pullback vanishes identically along the arc")
    vals = np.maximum(vals, 1e-290)
    slope, resid = _slope_fit(np.log(s_grid), np.log(vals))
    order = round(slope)
    if abs(slope - order) > 0.1 or order < 0:
        raise NonIntegerOrder(f"fitted slope {slope:.3f} is not an integer order")
    return int(order)


def _slope_fit(x, y):
    A = np.stack([x, np.ones_like(x)], axis=1)
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((y - A @ sol) ** 2)))
    return float(sol[0]), resid


def _perron(t: np.ndarray, tol=1e-12, max_iter=200000):
    """Spectral radius and non-negative eigenvector of t^T by power iteration.

    Iterates on t^T + I so periodic (permutation-like) parts still converge;
    the shift leaves eigenvectors alone and adds one to the radius.
    """
    k = t.shape[0]
    M = t.T.astype(float) + np.eye(k)
    x = np.ones(k) / k
    lam = 1.0
    for _ in range(max_iter):
        y = M @ x
        lam_new = float(np.max(np.abs(y)))
        if lam_new == 0.0:
            return 0.0, x
        y = y / lam_new
        if abs(lam_new - lam) <= tol * lam_new and np.max(np.abs(y - x)) <= tol:
            x = y
            lam = lam_new
            break
        x, lam = y, lam_new
    x = np.maximum(x, 0.0)
    x = x / np.max(x)
    return float(lam - 1.0), x


# -- exceptional sets and classification ------------------------------------------


@dataclass
class ExceptionalSets:
    e1_lines: list
    e2_points: list  # (ProjPoint, kind) with kind in {"on_E1", "homogeneous", "undetermined"}
    assumption_flag: bool
    line_order_checks: list = field(default_factory=list)


def exceptional_sets(f: ProjMap, horizon: int = 3, line_starts: int = 200) -> ExceptionalSets:
    """The totally invariant lines and the finite superattracting exceptional points."""
    if horizon < 2:
        raise ValueError("horizon must be at least 2")
    d = f.degree
    lines = invariant_lines(f, starts=line_starts)

    checks = []
    for line in lines:
        ok = True
        for p in line.sample_points(5, seed=29):
            try:
                ok = ok and jacobian_multiplicity(f, p, 1) == d - 1
            except Exception:
                ok = False
        checks.append(bool(ok))

    points = []

    def _register(pt, kind):
        for existing, _ in points:
            if existing.dist(pt) <= 1e-5:
                return
        points.append((pt, kind))

    # line-borne exceptional points: totally invariant orbits of the restriction
    for line in lines:
        rest = line_restriction(f, line)
        if rest.residual > 1e-6:
            continue
        for orbit in _p1_periodic_orbits(rest, max_period=3):
            if _p1_orbit_totally_invariant(rest, orbit):
                b1, b2 = rest.basis
                for (s, u) in orbit:
                    _register(ProjPoint(s * b1 + u * b2), "on_E1")

    # pencil-preserving fixed points away from the lines
    assumption_used = False
    for p, _ in f.fixed_points():
        if any(line.contains(p) for line in lines):
            continue
        assumption_used = True
        if contraction_order(f, p, 1) == d:
            _register(p, "homogeneous")
        else:
            # candidate evidence for maximal Jacobian growth without the
            # pencil structure: consecutive-ratio estimate separates
            # polynomial from exponential order growth at short horizons
            mu_hi = jacobian_multiplicity(f, p, horizon)
            if mu_hi >= d**horizon // 2:
                mu_lo = jacobian_multiplicity(f, p, horizon - 1)
                ratio = (3.0 + 2.0 * mu_hi) / (3.0 + 2.0 * mu_lo)
                if ratio >= d - 0.1:
                    _register(p, "undetermined")

    points.sort(key=lambda e: tuple(np.round(np.abs(e[0].coords), 6)))
    flag = assumption_used and any(kind != "on_E1" for _, kind in points)
    return ExceptionalSets(lines, points, flag, checks)


@dataclass
class ConfigurationRow:
    n_lines: int
    n_points: int
    row_id: str
    label: str
    incidence: list  # per point: sorted list of containing line indices
    note: str = ""


_ROW_LABELS = {
    "0-0": "no exceptional structure",
    "1-0": "[P:Q:t^d]",
    "0-1": "[P(z,t):Q:R(z,t)]",
    "1-1-incident": "[P:w^d+tQ:t^d]",
    "1-1-free": "[P(z,w):Q(z,w):t^d]",
    "1-2": "[P(z,t):w^d+tQ:t^d]",
    "2-1": "[P:w^d:t^d]",
    "2-2": "[z^d+tP:w^d:t^d]",
    "2-3": "[z^d+wtP:w^d:t^d]",
    "3-3": "[z^d:w^d:t^d]",
}

#: expected multiset of per-point line-incidence counts for each configuration
_ROW_INCIDENCE = {
    "0-0": (),
    "1-0": (),
    "0-1": (0,),
    "1-1-incident": (1,),
    "1-1-free": (0,),
    "1-2": (1, 1),
    "2-1": (2,),
    "2-2": (1, 2),
    "2-3": (1, 1, 2),
    "3-3": (2, 2, 2),
}


def classify(sets: ExceptionalSets) -> ConfigurationRow:
    """Match the detected exceptional structure against the known configurations."""
    n1 = len(sets.e1_lines)
    n2 = len(sets.e2_points)
    incidence = [
        sorted(i for i, line in enumerate(sets.e1_lines) if line.contains(p))
        for p, _ in sets.e2_points
    ]
    counts = tuple(sorted(len(ix) for ix in incidence))

    if (n1, n2) == (1, 1):
        row_id = "1-1-incident" if counts == (1,) else "1-1-free"
    else:
        row_id = f"{n1}-{n2}"
    label = _ROW_LABELS.get(row_id)
    if label is None or _ROW_INCIDENCE.get(row_id) != counts:
        return ConfigurationRow(
            n1, n2, "unlisted", "unlisted configuration", incidence,
            note=f"incidence counts {counts} match no known row",
        )
    note = "" if n2 == 0 else "kinds: " + ",".join(kind for _, kind in sets.e2_points)
    return ConfigurationRow(n1, n2, row_id, label, incidence, note)


# -- local normal form check at exceptional points ---------------------------------


@dataclass
class ConjugacyReport:
    period: int
    kind: str  # "pencil" or "line_skew"
    terms: int
    deviation: float
    samples: int
    radius: float


def conjugacy_check(
    f: ProjMap, p: ProjPoint, terms: int, lines=None, samples: int = 30, radius: float = 0.2
) -> ConjugacyReport:
    """Deviation of the truncated-conjugacy's image from the predicted normal form.

    The conjugator is the truncated infinite product built from the chart
    denominator along the forward orbit.  The deviation must decay at least
    geometrically in the truncation length.
    """
    if terms < 1 or terms > 30:
        raise ValueError("terms must be in 1..30")
    # find the period (<= 3) of p
    period = None
    q = p
    for k in range(1, 4):
        q = f.apply(q)
        if q.dist(p) <= 1e-8:
            period = k
            break
    if period is None:
        raise NotSuperattracting(f"{p} is not periodic with period <= 3")
    g = _iterate_map(f, period)
    D = g.degree
    # superattracting = nilpotent-or-zero differential; the one-step
    # contraction order can still be 1 in the skew normal form
    if _differential_radius(g, p) > 1e-6:
        raise NotSuperattracting(f"{p} has a non-nilpotent derivative")

    if lines is None:
        lines = invariant_lines(f)
    through = [line for line in lines if line.contains(p)]
    kind = "line_skew" if len(through) == 1 else "pencil"

    G = _move_to_origin(g, p, through[0] if kind == "line_skew" else None)
    # normalize the chart denominator at the fixed point to one
    c0 = G[2].coeff(0, 0, D)
    G = tuple(comp.scale(1.0 / c0) for comp in G)
    if kind == "line_skew":
        G = _normalize_skew(G, D)

    num1 = G[0].dehomogenize(2)
    num2 = G[1].dehomogenize(2)
    den = G[2].dehomogenize(2)
    top1 = _binary_part(G[0], D)
    top2 = _binary_part(G[1], D)

    rng = np.random.default_rng(97)
    zz = rng.standard_normal((samples, 2)) + 1j * rng.standard_normal((samples, 2))
    zz = radius * zz / np.abs(zz).max(axis=1)[:, None]

    def chart_apply(x):
        e = _eval2(den, x)
        return np.stack([_eval2(num1, x) / e, _eval2(num2, x) / e], axis=-1)

    def phi(x, T):
        out = np.ones(x.shape[0], dtype=complex)
        cur = x
        for j in range(T):
            eta = 1.0 / _eval2(den, cur) - 1.0
            out = out * (1.0 + eta) ** (1.0 / D ** (j + 1))
            cur = chart_apply(cur)
        return out

    fx = chart_apply(zz)
    psi_x = zz * phi(zz, terms)[:, None]
    psi_fx = fx * phi(fx, terms)[:, None]

    if kind == "pencil":
        pred = np.stack(
            [_eval_binary(top1, psi_x), _eval_binary(top2, psi_x)], axis=-1
        )
        dev = float(np.max(np.abs(psi_fx - pred)))
    else:
        # second coordinate must follow w -> w^D; first is z^D plus w times a
        # factor recovered from the chart numerator along the conjugacy
        dev2 = np.abs(psi_fx[:, 1] - psi_x[:, 1] ** D)
        qtilde = (_eval2(num1, zz) - zz[:, 0] ** D) / zz[:, 1]
        pred1 = psi_x[:, 0] ** D + psi_x[:, 1] * qtilde * phi(zz, terms) ** (D - 1)
        dev1 = np.abs(psi_fx[:, 0] - pred1)
        dev = float(np.max(np.maximum(dev1, dev2)))
    return ConjugacyReport(period, kind, terms, dev, samples, radius)


def _differential_radius(g: ProjMap, p: ProjPoint) -> float:
    """Spectral radius of the chart differential of g at the fixed point p."""
    from .multiplicities import orbit_chart_series

    _, _, series = orbit_chart_series(g, p, 1, trunc=2)
    s1, s2 = series[1]
    D = np.array(
        [[s1.coeffs[1, 0], s1.coeffs[0, 1]], [s2.coeffs[1, 0], s2.coeffs[0, 1]]]
    )
    return float(np.max(np.abs(np.linalg.eigvals(D))))


def _move_to_origin(g: ProjMap, p: ProjPoint, line: InvariantLine | None):
    """Conjugate so p becomes [0:0:1]; an invariant line through p becomes {w=0}.

    Row 1 must be the line's coefficient vector itself (bilinear incidence),
    while rows built from conjugates implement Hermitian orthogonality to p.
    """
    if line is None:
        b = _orthonormal_completion(p.coords)
        rows = np.stack([np.conj(b[0]), np.conj(b[1]), np.conj(p.coords)])
    else:
        b1, b2 = line.basis()
        # direction of the line Hermitian-orthogonal to p
        t_dir = b1 - np.vdot(p.coords, b1) * p.coords
        if np.linalg.norm(t_dir) < 1e-6:
            t_dir = b2 - np.vdot(p.coords, b2) * p.coords
        t_dir = t_dir / np.linalg.norm(t_dir)
        rows = np.stack([np.conj(t_dir), line.form.coeffs, np.conj(p.coords)])
    inv = np.linalg.inv(rows)
    lin_rows = [HomogPoly3(1, rows[i]) for i in range(3)]
    lin_inv = tuple(HomogPoly3(1, inv[i]) for i in range(3))
    moved = tuple(comp.compose(lin_inv) for comp in g.components)
    return tuple(lin_rows[i].compose(moved) for i in range(3))


def _normalize_skew(G, D: int):
    """Scale coordinates so the skew form reads (z^D + w*..., w^D, ...)."""
    a = G[0].coeff(D, 0, 0)
    c = G[1].coeff(0, D, 0)
    if abs(a) < 1e-10 or abs(c) < 1e-10:
        raise NotSuperattracting("skew normal form has a degenerate leading term")
    alpha = a ** (1.0 / (D - 1))
    beta = c ** (1.0 / (D - 1))
    inv = (
        HomogPoly3(1, [1.0 / alpha, 0.0, 0.0]),
        HomogPoly3(1, [0.0, 1.0 / beta, 0.0]),
        HomogPoly3(1, [0.0, 0.0, 1.0]),
    )
    scales = (alpha, beta, 1.0)
    return tuple(G[i].compose(inv).scale(scales[i]) for i in range(3))


def _orthonormal_completion(v):
    M = np.eye(3, dtype=complex)
    idx = int(np.argmin(np.abs(v)))
    basis = [M[idx], M[(idx + 1) % 3]]
    out = []
    for b in basis:
        w = b - np.vdot(v, b) * v
        for o in out:
            w = w - np.vdot(o, w) * o
        n = np.linalg.norm(w)
        if n > 1e-8:
            out.append(w / n)
    return out


def _binary_part(poly: HomogPoly3, D: int):
    """Coefficients c[m] of the (z, w)-binary part z^(D-m) w^m (t-degree zero)."""
    co = np.zeros(D + 1, dtype=complex)
    for (i, j, k), c in zip(monomial_exponents(D), poly.coeffs):
        if k == 0:
            co[j] = c
    return co


def _eval_binary(co, x):
    D = len(co) - 1
    out = np.zeros(x.shape[0], dtype=complex)
    for m, c in enumerate(co):
        if c != 0:
            out = out + c * x[:, 0] ** (D - m) * x[:, 1] ** m
    return out


def _eval2(C, x):
    nu, nv = C.shape
    pu = x[:, 0][:, None] ** np.arange(nu)[None, :]
    pv = x[:, 1][:, None] ** np.arange(nv)[None, :]
    return np.einsum("ni,ij,nj->n", pu, C, pv)
