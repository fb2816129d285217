"""Spray coefficients, geodesic initial- and boundary-value solving, and the
induced distance.

Geodesics are integrated exclusively in arc-length form: the initial vector
is normalized to unit Finsler norm and the solution of
x'' + G(x, x') = 0 then keeps F(x, x') = 1 up to integrator error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .core import BOUNDARY_MARGIN, as_components, as_coords
from .diffengine import fundamental_tensor
from .errors import (ConnectivityError, ConvexityError, DomainError,
                     StiffnessError)

EXTENSION_CAP = 50.0
# Chain construction needs the chart endpoints to sit at machine accuracy,
# so maximal extension runs much closer to the boundary than plain IVPs.
EXTENSION_MARGIN = 1e-12


# ======================================================================
# Spray
# ======================================================================

@dataclass(frozen=True)
class SprayData:
    """Spray coefficients G^i at a line element, optionally with dG/dy."""

    vector: np.ndarray
    jacobian_y: np.ndarray | None = None


def _spray_from_tensor(metric, x, y):
    """Formal-Christoffel route: G^i = g^{is}(dg_sj/dx^k - dg_jk/dx^s / 2) y^j y^k."""
    n = metric.dimension

    def g_at(xx):
        ga = metric.metric_tensor(xx, y)
        if ga is not None:
            ga = np.asarray(ga, dtype=float)
            return 0.5 * (ga + ga.T)
        return fundamental_tensor(metric, xx, y)

    analytic = metric.metric_tensor(x, y) is not None
    h = (1e-5 if analytic else 1e-3) * max(1.0, float(np.abs(x).max()))
    if metric.bounded_domain:
        # keep the stencil inside the domain
        phi = metric.domain_value(x)
        probe = 1e-6 * max(1.0, float(np.abs(x).max()))
        gphi = np.array([(metric.domain_value(x + probe * e) - metric.domain_value(x - probe * e))
                         / (2 * probe) for e in np.eye(n)])
        dist = phi / (np.abs(gphi).sum() + 1e-300)
        h = min(h, 0.25 * dist)
        if h <= 0:
            raise DomainError("spray stencil cannot stay inside the domain")

    g0 = g_at(x)
    dg = np.empty((n, n, n))  # dg[a, b, k] = d g_ab / d x^k
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        dg[:, :, k] = (g_at(x - 2 * e) - 8 * g_at(x - e)
                       + 8 * g_at(x + e) - g_at(x + 2 * e)) / (12 * h)
    rhs = np.einsum("sjk,j,k->s", dg, y, y) - 0.5 * np.einsum("jks,j,k->s", dg, y, y)
    try:
        return np.linalg.solve(g0, rhs)
    except np.linalg.LinAlgError as exc:
        raise ConvexityError(f"singular fundamental tensor at x={x.tolist()}") from exc


def spray_vector(metric, x, y) -> np.ndarray:
    """Spray coefficients G(x, y) of the geodesic equation x'' + G = 0."""
    x, y = metric.check_line_element(x, y)
    g = metric.spray_vector(x, y)
    if g is not None:
        return np.asarray(g, dtype=float)
    return _spray_from_tensor(metric, x, y)


def spray(metric, x, y, with_jacobian=False) -> SprayData:
    """SprayData at a line element; jacobian_y on request (finite differences)."""
    x, y = metric.check_line_element(x, y)
    vec = spray_vector(metric, x, y)
    jac = None
    if with_jacobian:
        n = metric.dimension
        h = 1e-5 * max(1.0, float(np.abs(y).max()))
        jac = np.empty((n, n))
        for j in range(n):
            e = np.zeros(n)
            e[j] = h
            jac[:, j] = (spray_vector(metric, x, y - 2 * e) - 8 * spray_vector(metric, x, y - e)
                         + 8 * spray_vector(metric, x, y + e) - spray_vector(metric, x, y + 2 * e)) / (12 * h)
    return SprayData(vec, jac)


# ======================================================================
# Segments
# ======================================================================

class GeodesicSegment:
    """Arc-length parametrized geodesic with dense output.

    The anchor sits at s = 0; the segment covers [s_min, s_max] with
    s_min <= 0 <= s_max. `samples` collects the integrator steps as
    (s, x, v) triples; `truncated` flags a boundary stop before the
    requested length was reached.
    """

    def __init__(self, metric, anchor_state, forward=None, backward=None,
                 requested=(0.0, 0.0), truncated=(False, False)):
        self.metric = metric
        self._anchor = np.asarray(anchor_state, dtype=float)
        self._forward = forward
        self._backward = backward
        self.requested_backward, self.requested_forward = requested
        self.truncated_backward, self.truncated_forward = truncated
        self.s_min = float(backward.t[-1]) if backward is not None else 0.0
        self.s_max = float(forward.t[-1]) if forward is not None else 0.0
        ss, states = [], []
        if backward is not None:
            ss.extend(backward.t[::-1].tolist())
            states.extend(backward.y[:, ::-1].T.tolist())
        ss.append(0.0)
        states.append(self._anchor.tolist())
        if forward is not None:
            ss.extend(forward.t.tolist())
            states.extend(forward.y.T.tolist())
        # the legs meet at the anchor; keep s strictly increasing
        keep = [0] + [i for i in range(1, len(ss)) if ss[i] > ss[i - 1]]
        self.sample_s = np.asarray([ss[i] for i in keep])
        self.sample_states = np.asarray([states[i] for i in keep])

    @property
    def truncated(self):
        return self.truncated_forward or self.truncated_backward

    @property
    def length(self) -> float:
        return self.s_max - self.s_min

    def state(self, s):
        s = float(s)
        slack = 1e-10 * max(1.0, abs(self.s_min), abs(self.s_max))
        if s < self.s_min - slack or s > self.s_max + slack:
            raise DomainError(f"parameter {s} outside segment [{self.s_min}, {self.s_max}]")
        s = min(max(s, self.s_min), self.s_max)
        if s >= 0.0:
            sol = self._forward
        else:
            sol = self._backward
        if sol is None:
            return self._anchor.copy()
        return np.asarray(sol.sol(s), dtype=float)

    def position(self, s):
        return self.state(s)[: self.metric.dimension]

    def velocity(self, s):
        return self.state(s)[self.metric.dimension:]

    def positions(self, ss) -> np.ndarray:
        """Bulk dense-output positions, shape (len(ss), n)."""
        ss = np.clip(np.asarray(ss, dtype=float), self.s_min, self.s_max)
        n = self.metric.dimension
        out = np.empty((ss.size, n))
        fwd = ss >= 0.0
        if fwd.any():
            if self._forward is None:
                out[fwd] = self._anchor[:n]
            else:
                out[fwd] = self._forward.sol(ss[fwd])[:n].T
        if (~fwd).any():
            if self._backward is None:
                out[~fwd] = self._anchor[:n]
            else:
                out[~fwd] = self._backward.sol(ss[~fwd])[:n].T
        return out

    @property
    def samples(self):
        n = self.metric.dimension
        return [(float(s), st[:n], st[n:]) for s, st in zip(self.sample_s, self.sample_states)]

    def unit_speed_drift(self) -> float:
        worst = 0.0
        for s, x, v in self.samples:
            worst = max(worst, abs(self.metric.norm(x, v) - 1.0))
        return worst


def _solve_leg(metric, z0, s_end, rtol, atol, margin, escape_as_truncation=False):
    n = metric.dimension
    analytic = metric.spray_vector

    def rhs(s, z):
        x = z[:n]
        v = z[n:]
        G = analytic(x, v)
        if G is None:
            G = _spray_from_tensor(metric, x, v)
        out = np.empty(2 * n)
        out[:n] = v
        out[n:] = -G
        return out

    events = None
    if metric.bounded_domain:
        threshold = margin * metric.domain_scale

        def boundary(s, z):
            return metric.domain_value(z[:n]) - threshold

        boundary.terminal = True
        events = [boundary]

    sol = integrate.solve_ivp(rhs, (0.0, s_end), z0, method="DOP853",
                              rtol=rtol, atol=atol, dense_output=True, events=events)
    if sol.status == -1:
        # geodesics escaping the chart in finite arc length end the maximal
        # extension there; plain IVPs report the underflow as an error
        if escape_as_truncation and sol.sol is not None and len(sol.t) > 1:
            return sol, True
        raise StiffnessError(f"geodesic integration failed: {sol.message}")
    truncated = sol.status == 1
    return sol, truncated


def integrate_geodesic(metric, x0, y0, length, *, tol=1e-11,
                       boundary_margin=BOUNDARY_MARGIN) -> GeodesicSegment:
    """Unit-speed geodesic from x0 in direction y0, integrated for the given length.

    y0 is normalized to F(x0, y0) = 1. A boundary approach within the margin
    stops the integration and flags the segment truncated.
    """
    x0, y0 = metric.check_line_element(as_coords(x0), as_components(y0))
    y0 = y0 / metric.norm(x0, y0)
    z0 = np.concatenate([x0, y0])
    if length < 0:
        raise ValueError("length must be nonnegative; integrate the reverse direction instead")
    if length == 0.0:
        return GeodesicSegment(metric, z0)
    sol, truncated = _solve_leg(metric, z0, float(length), tol, tol * 1e-1, boundary_margin)
    return GeodesicSegment(metric, z0, forward=sol,
                           requested=(0.0, float(length)), truncated=(False, truncated))


def extend_geodesic(metric, x0, y0, *, cap=EXTENSION_CAP, tol=1e-11,
                    boundary_margin=EXTENSION_MARGIN) -> GeodesicSegment:
    """Maximal extension through (x0, y0): both directions to the boundary
    margin or the length cap."""
    x0, y0 = metric.check_line_element(as_coords(x0), as_components(y0))
    y0 = y0 / metric.norm(x0, y0)
    z0 = np.concatenate([x0, y0])
    fwd, tf = _solve_leg(metric, z0, float(cap), tol, tol * 1e-1, boundary_margin,
                         escape_as_truncation=True)
    back, tb = _solve_leg(metric, z0, -float(cap), tol, tol * 1e-1, boundary_margin,
                          escape_as_truncation=True)
    return GeodesicSegment(metric, z0, forward=fwd, backward=back,
                           requested=(-float(cap), float(cap)), truncated=(tb, tf))


# ======================================================================
# Boundary-value solving and distance
# ======================================================================

@dataclass
class BVPResult:
    """Connecting geodesic with its terminal miss distance."""

    segment: GeodesicSegment
    miss: float
    iterations: int


def _chord_length(metric, x, y, samples=64):
    ts = (np.arange(samples) + 0.5) / samples
    d = y - x
    acc = 0.0
    for t in ts:
        acc += metric.norm(x + t * d, d)
    return acc / samples


def _closest_approach(segment, target):
    ss = np.linspace(segment.s_min, segment.s_max, 65)
    dists = np.linalg.norm(segment.positions(ss) - target, axis=1)
    i = int(np.argmin(dists))
    lo = ss[max(0, i - 1)]
    hi = ss[min(len(ss) - 1, i + 1)]
    # the squared distance is a smooth parabola through the approach point
    res = optimize.minimize_scalar(
        lambda s: float(np.sum((segment.position(s) - target) ** 2)),
        bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-14, "maxiter": 300})
    fun = math.sqrt(max(res.fun, 0.0))
    if fun <= dists[i]:
        return float(res.x), fun
    return float(ss[i]), float(dists[i])


def connect(metric, x, y, tol=1e-8, max_nfev=60) -> BVPResult:
    """Shooting solve for the geodesic from x to y.

    The search runs over the initial direction only (the straight chord is
    the starting guess); the arc length of the hit comes out as a by-product.
    """
    x = metric.check_point(as_coords(x))
    y = metric.check_point(as_coords(y))
    if np.array_equal(x, y):
        raise ConnectivityError("connect needs two distinct points", best_miss=0.0)
    n = metric.dimension
    chord = y - x
    dir0 = chord / metric.norm(x, chord)
    L0 = _chord_length(metric, x, y)
    L_max = 1.5 * L0 + 0.25

    # orthonormal basis of the chord's complement parametrizes the search
    basis = np.linalg.qr(np.column_stack([chord] + list(np.eye(n))))[0][:, 1:n]
    evals = 0

    def shoot(u):
        nonlocal evals
        evals += 1
        d = dir0 + basis @ u
        d = d / metric.norm(x, d)
        seg = None
        for length in (L_max, 1.15 * L0 + 0.02, 1.02 * L0):
            try:
                seg = integrate_geodesic(metric, x, d, length)
                break
            except StiffnessError:
                continue  # geodesic escapes just past the target; shoot shorter
        if seg is None:
            raise StiffnessError("shooting integration failed at every overshoot")
        s_star, miss = _closest_approach(seg, y)
        return seg, d, s_star, miss

    def residual(u):
        if not np.all(np.isfinite(u)):
            return np.full(n, 1e6)
        try:
            seg, _, s_star, _ = shoot(u)
        except DomainError:
            return np.full(n, 1e6)
        return seg.position(s_star) - y

    best = None
    for start in ([np.zeros(n - 1)] +
                  [0.1 * e for e in np.eye(n - 1)] + [-0.1 * e for e in np.eye(n - 1)]):
        try:
            res = optimize.least_squares(residual, start, method="lm", xtol=1e-15,
                                         ftol=1e-15, gtol=1e-15, max_nfev=max_nfev,
                                         diff_step=1e-8)
        except DomainError:
            continue
        miss = float(np.linalg.norm(res.fun))
        if best is None or miss < best[1]:
            best = (res.x, miss)
        if miss <= tol:
            break
    if best is None or best[1] > tol:
        raise ConnectivityError(
            f"no geodesic from {x.tolist()} to {y.tolist()} within tolerance "
            f"{tol:g}", best_miss=None if best is None else best[1])
    _, d, s_star, _ = shoot(best[0])
    final = integrate_geodesic(metric, x, d, s_star)
    miss = float(np.linalg.norm(final.position(final.s_max) - y))
    return BVPResult(final, miss, evals)


def finsler_distance(metric, x, y, tol=1e-8) -> float:
    """Induced distance d(x, y), the length of the connecting geodesic.

    Asymmetric in general: d(x, y) and d(y, x) differ whenever F is only
    positively homogeneous.
    """
    x = metric.check_point(as_coords(x))
    y = metric.check_point(as_coords(y))
    if np.array_equal(x, y):
        return 0.0
    return connect(metric, x, y, tol=tol).segment.length
