"""Schwarzian derivative, Moebius-group utilities, and the projective
normal parameter of a geodesic.

The parameter pi solves {pi, s} = q with q = 2 Ric / (n - 1) along a
unit-speed geodesic. The third-order Schwarzian equation is never integrated
directly: with w'' + q w / 2 = 0 and basis solutions w1(s0)=0, w1'(s0)=1,
w2(s0)=1, w2'(s0)=0, the ratio pi = w1/w2 solves it with pi(s0) = 0,
pi'(s0) = 1, and the Moebius freedom is exactly the freedom of basis. Poles
of w2 split the segment into Moebius charts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np
from scipy import integrate, interpolate, optimize

from .curvature import ricci_scalar
from .diffengine import Jet
from .errors import ChartError, CriticalPointError, PoleError
from .geodesics import GeodesicSegment


# ======================================================================
# Moebius transforms
# ======================================================================

@dataclass(frozen=True)
class MobiusTransform:
    """t -> (a t + b) / (c t + d), normalized to |ad - bc| = 1."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if det == 0.0 or not math.isfinite(det):
            raise ValueError("Moebius transform needs ad - bc nonzero and finite")
        scale = math.sqrt(abs(det))
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, getattr(self, name) / scale)

    @property
    def determinant(self) -> float:
        return self.a * self.d - self.b * self.c

    def __call__(self, t):
        return self.apply(t)

    def apply(self, t):
        den = self.c * t + self.d
        if isinstance(t, Jet):
            return (self.a * t + self.b) / den
        if abs(den) < 1e-14 * (abs(self.c * t) + abs(self.d) + 1.0):
            raise PoleError(f"Moebius transform evaluated at its pole t={t}")
        return (self.a * t + self.b) / den

    def apply_inf(self):
        """Image of the point at infinity (math.inf when c == 0)."""
        if self.c == 0.0:
            return math.inf
        return self.a / self.c

    @property
    def pole(self) -> float:
        if self.c == 0.0:
            return math.inf
        return -self.d / self.c

    def inverse(self) -> "MobiusTransform":
        return MobiusTransform(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "MobiusTransform") -> "MobiusTransform":
        """self after other: (self o other)(t)."""
        return MobiusTransform(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    # -- canonical members -------------------------------------------------

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def swap(cls):
        """Orientation reversal u -> -u of the interval."""
        return cls(-1.0, 0.0, 0.0, 1.0)

    @classmethod
    def translation(cls, tau):
        """Hyperbolic self-map of (-1, 1) fixing the endpoints.

        In artanh coordinates this is a shift by tau; as a Moebius map it is
        u -> (u + tanh tau) / (1 + u tanh tau).
        """
        lam = math.tanh(tau)
        return cls(1.0, lam, lam, 1.0)

    @classmethod
    def interval_onto(cls, lo, hi):
        """Affine map of (-1, 1) onto (lo, hi)."""
        if not lo < hi:
            raise ValueError("interval_onto needs lo < hi")
        return cls(0.5 * (hi - lo), 0.5 * (hi + lo), 0.0, 1.0)


def mobius_apply(m: MobiusTransform, t):
    return m.apply(t)


def mobius_compose(m1: MobiusTransform, m2: MobiusTransform) -> MobiusTransform:
    return m1.compose(m2)


def mobius_invert(m: MobiusTransform) -> MobiusTransform:
    return m.inverse()


def cross_ratio(t1, t2, t3, t4) -> float:
    """(t1 - t3)(t2 - t4) / ((t1 - t4)(t2 - t3))."""
    num = (t1 - t3) * (t2 - t4)
    den = (t1 - t4) * (t2 - t3)
    if den == 0.0:
        raise ValueError("degenerate four-point configuration")
    return num / den


# ======================================================================
# Schwarzian derivative
# ======================================================================

@dataclass(frozen=True)
class SchwarzianSample:
    """A parameter value and the Schwarzian there."""

    t: float
    value: float


_CRITICAL_SLOPE = 1e-9


def _schwarzian_from_derivs(d1, d2, d3, t):
    if abs(d1) < _CRITICAL_SLOPE:
        raise CriticalPointError(f"first derivative {d1:.2e} vanishes near t={t}")
    r2 = d2 / d1
    return d3 / d1 - 1.5 * r2 * r2


def schwarzian(f, t, *, step=0.02) -> float:
    """Schwarzian derivative {f, t} = f'''/f' - 3/2 (f''/f')^2.

    f may be a callable or a (t_samples, f_samples) pair of dense samples.
    Callables are differentiated by a forward Taylor jet when they accept
    one, with a high-order central stencil as the fallback.
    """
    if not callable(f):
        ts, vs = f
        spline = interpolate.make_interp_spline(np.asarray(ts, float),
                                                np.asarray(vs, float), k=5)
        return _schwarzian_from_derivs(float(spline(t, 1)), float(spline(t, 2)),
                                       float(spline(t, 3)), t)
    try:
        jet = f(Jet.variable(float(t), 3))
    except (TypeError, AttributeError):
        jet = None
    if isinstance(jet, Jet):
        return _schwarzian_from_derivs(jet.coef[1], 2.0 * jet.coef[2],
                                       6.0 * jet.coef[3], t)
    return schwarzian_fd(f, t, step=step)


# 9-point O(h^6) central stencils for orders 1..3
_STENCIL9 = {
    1: np.array([0.0, -1 / 60, 3 / 20, -3 / 4, 0.0, 3 / 4, -3 / 20, 1 / 60, 0.0]),
    2: np.array([0.0, 1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90, 0.0]),
    3: np.array([-7 / 240, 3 / 10, -169 / 120, 61 / 30, 0.0,
                 -61 / 30, 169 / 120, -3 / 10, 7 / 240]),
}
_OFFSETS9 = np.arange(-4.0, 5.0)


def schwarzian_fd(f, t, step=0.02) -> float:
    """Finite-difference Schwarzian for black-box callables."""
    vals = np.array([float(f(t + o * step)) for o in _OFFSETS9])
    d1 = float(_STENCIL9[1] @ vals) / step
    d2 = float(_STENCIL9[2] @ vals) / step ** 2
    d3 = float(_STENCIL9[3] @ vals) / step ** 3
    return _schwarzian_from_derivs(d1, d2, d3, t)


def schwarzian_profile(f, ts, **kw):
    return [SchwarzianSample(float(t), schwarzian(f, t, **kw)) for t in ts]


def check_composition(f, g, t, *, step=0.02) -> float:
    """Residual of the chain rule {f o g, t} = {f, g(t)} (g'(t))^2 + {g, t}."""
    def composed(u):
        return f(g(u))

    lhs = schwarzian(composed, t, step=step)
    try:
        jet = g(Jet.variable(float(t), 3))
    except (TypeError, AttributeError):
        jet = None
    if isinstance(jet, Jet):
        gt, dg = jet.coef[0], jet.coef[1]
    else:
        gt = float(g(t))
        vals = np.array([float(g(t + o * step)) for o in _OFFSETS9])
        dg = float(_STENCIL9[1] @ vals) / step
    rhs = schwarzian(f, gt, step=step) * dg * dg + schwarzian(g, t, step=step)
    return abs(lhs - rhs)


# ======================================================================
# Projective parameter
# ======================================================================

class ProjectiveParameter:
    """Sampled projective normal parameter along a geodesic segment.

    Carries the curvature samples q(s), the dense basis solutions (w1, w2)
    with their derivatives, the pole locations of w2, and evaluation of
    pi = w1/w2 with its derivative. pi is Moebius-chart-valid only between
    consecutive poles.
    """

    def __init__(self, segment, s0, s_grid, q_values, sol, poles):
        self.segment = segment
        self.s0 = float(s0)
        self.s_grid = np.asarray(s_grid)
        self.q_values = np.asarray(q_values)
        self._sol = sol
        self.poles = list(poles)
        self._w2_scale = max(1.0, max(abs(float(sol.sol(s)[2])) for s in self.s_grid))

    # -- raw solutions ----------------------------------------------------

    def basis(self, s):
        """(w1, w1', w2, w2') at s."""
        return np.asarray(self._sol.sol(float(s)), dtype=float)

    def w1(self, s):
        return float(self.basis(s)[0])

    def w2(self, s):
        return float(self.basis(s)[2])

    def wronskian(self, s) -> float:
        w1, dw1, w2, dw2 = self.basis(s)
        return float(dw1 * w2 - w1 * dw2)

    def wronskian_drift(self, max_scale=1e3, points=200) -> float:
        """Worst deviation of the Wronskian from its initial value 1.

        Measured where the basis magnitude stays below max_scale; past that
        the bilinear form w1' w2 - w1 w2' sits on the floating-point
        cancellation floor and conservation is no longer observable.
        """
        worst = 0.0
        for s in np.linspace(self.s_min, self.s_max, points):
            w = self.basis(s)
            if np.abs(w).max() > max_scale:
                continue
            worst = max(worst, abs(float(w[1] * w[2] - w[0] * w[3]) - 1.0))
        return worst

    # -- charts -------------------------------------------------------------

    @property
    def s_min(self):
        return self.segment.s_min

    @property
    def s_max(self):
        return self.segment.s_max

    def chart_interval(self, s):
        """Maximal pole-free parameter interval containing s."""
        s = float(s)
        for p in self.poles:
            if abs(s - p) < 1e-9:
                raise ChartError(f"s={s} sits at the pole {p}")
        lo = self.s_min
        hi = self.s_max
        for p in self.poles:
            if p < s:
                lo = max(lo, p)
            else:
                hi = min(hi, p)
        return lo, hi

    def same_chart(self, s_values) -> bool:
        charts = {self.chart_interval(s) for s in s_values}
        return len(charts) == 1

    def value(self, s) -> float:
        """pi(s) = w1/w2; raises ChartError at (or numerically on) a pole."""
        w1, _, w2, _ = self.basis(s)
        if abs(w2) < 1e-12 * self._w2_scale:
            nearest = min(self.poles, key=lambda p: abs(p - s)) if self.poles else s
            raise ChartError(f"pi evaluated at the pole near s={nearest}")
        return float(w1 / w2)

    def derivative(self, s) -> float:
        """pi'(s), computed from the Wronskian identity pi' = W / w2^2."""
        w1, dw1, w2, dw2 = self.basis(s)
        return float((dw1 * w2 - w1 * dw2) / (w2 * w2))

    def chart_range(self, s):
        """Image of the chart containing s under pi, as an open interval.

        Pole ends map to +-inf according to the sign of the approach.
        """
        lo, hi = self.chart_interval(s)
        eps = 1e-9 * max(1.0, abs(hi - lo))
        if any(abs(lo - p) < 1e-12 for p in self.poles):
            left = -math.inf if self.derivative(s) > 0 else math.inf
        else:
            left = self.value(lo)
        if any(abs(hi - p) < 1e-12 for p in self.poles):
            right = math.inf if self.derivative(s) > 0 else -math.inf
        else:
            right = self.value(hi)
        if left > right:
            left, right = right, left
        return float(left), float(right)

    def solve_value(self, target, s_hint) -> float:
        """Invert pi on the chart containing s_hint (pi is monotone there)."""
        lo, hi = self.chart_interval(s_hint)
        width = hi - lo
        f = lambda s: self.value(s) - target

        def end_value(end, inward):
            pad = 1e-12 * max(1.0, abs(end))
            for _ in range(60):
                try:
                    return end + inward * pad, f(end + inward * pad)
                except ChartError:
                    pad = max(pad * 8.0, 1e-9 * width)
            raise ChartError("chart end is numerically unreachable")

        lo, flo = end_value(lo, +1.0)
        hi, fhi = end_value(hi, -1.0)
        if flo == 0.0:
            return lo
        if fhi == 0.0:
            return hi
        if flo * fhi > 0:
            raise ChartError(f"target {target} outside the chart range")
        return float(optimize.brentq(f, lo, hi, xtol=1e-14, rtol=8.9e-16))


def _q_window(metric, segment, margin_fraction=1e-6, drift_limit=1e-6):
    """Sub-span of the segment where curvature samples are trustworthy.

    Two trims: the segment data itself must still be healthy (unit-speed
    residual within drift_limit; maximal extensions end at boundary slivers
    or chart escapes where the last steps sit at the precision edge), and
    finite-difference sprays additionally need stencil room away from a
    domain boundary. Jet-backed sprays need no stencil room.
    """
    lo, hi = segment.s_min, segment.s_max
    ss = np.linspace(lo, hi, 201)
    needs_room = metric.bounded_domain and not metric.spray_supports_jets
    threshold = margin_fraction * metric.domain_scale

    def healthy(s):
        x = segment.position(s)
        v = segment.velocity(s)
        try:
            if abs(metric.norm(x, v) - 1.0) > drift_limit:
                return False
            if needs_room and metric.domain_value(x) < threshold:
                return False
        except Exception:
            return False
        return True

    flags = [healthy(s) for s in ss]
    anchor = int(np.argmin(np.abs(ss)))
    if not flags[anchor]:
        return lo, hi
    a = anchor
    while a > 0 and flags[a - 1]:
        a -= 1
    b = anchor
    while b < len(ss) - 1 and flags[b + 1]:
        b += 1
    return float(ss[a]), float(ss[b])


def projective_parameter(metric, segment: GeodesicSegment, *, s0=0.0,
                         q_step=0.25, tol=1e-12) -> ProjectiveParameter:
    """Solve for the projective normal parameter along a unit-speed segment.

    q(s) = 2 Ric(x(s), x'(s)) / (n - 1) is sampled on a uniform grid, splined,
    and the linear system w'' = -q w / 2 is integrated densely for both basis
    solutions. Normalization: pi(s0) = 0, pi'(s0) = 1. On the sliver where
    the segment runs closer to the domain boundary than the curvature
    stencils allow, q is held at its nearest sampled value.
    """
    n = metric.dimension
    lo, hi = segment.s_min, segment.s_max
    if not lo <= s0 <= hi:
        raise ValueError("normalization point must lie inside the segment")
    q_lo, q_hi = _q_window(metric, segment)
    count = max(9, int(math.ceil((q_hi - q_lo) / q_step)) + 1)
    s_grid = np.linspace(q_lo, q_hi, count)
    q_values = np.array([
        2.0 / (n - 1) * ricci_scalar(metric, segment.position(s), segment.velocity(s))
        for s in s_grid
    ])
    k = min(5, count - 1)
    q_spline = interpolate.make_interp_spline(s_grid, q_values, k=k)

    def rhs(s, w):
        q = float(q_spline(min(max(s, q_lo), q_hi)))
        return [w[1], -0.5 * q * w[0], w[3], -0.5 * q * w[2]]

    spans = []
    if hi > s0:
        spans.append((s0, hi))
    if lo < s0:
        spans.append((s0, lo))
    sols = {}
    for a, b in spans:
        sols[b] = integrate.solve_ivp(rhs, (a, b), [0.0, 1.0, 1.0, 0.0],
                                      method="DOP853", rtol=tol, atol=tol * 1e-1,
                                      dense_output=True)

    class _Glue:
        def __init__(self, fw, bw, s0):
            self.fw = fw
            self.bw = bw
            self.s0 = s0

        def sol(self, s):
            if np.ndim(s) == 0:
                sol = self.fw if s >= self.s0 else self.bw
                if sol is None:
                    return np.array([0.0, 1.0, 1.0, 0.0])
                return sol.sol(s)
            return np.column_stack([self.sol(si) for si in np.atleast_1d(s)])

    fw = sols.get(hi)
    bw = sols.get(lo)
    glue = _Glue(fw, bw, s0)

    # pole locations: sign changes of w2 on a fine grid, refined by brentq
    fine = np.linspace(lo, hi, max(4 * count, 257))
    w2_vals = np.array([float(glue.sol(s)[2]) for s in fine])
    poles = []
    for i in range(len(fine) - 1):
        a, b = w2_vals[i], w2_vals[i + 1]
        if a == 0.0:
            poles.append(float(fine[i]))
        elif a * b < 0:
            poles.append(float(optimize.brentq(
                lambda s: float(glue.sol(s)[2]), fine[i], fine[i + 1], xtol=1e-13)))
    return ProjectiveParameter(segment, s0, s_grid, q_values, glue, poles)


# ======================================================================
# Projective invariance cross-check
# ======================================================================

def invariance_cross_check(metric_a, metric_b, x0, direction, probe_arclengths,
                           *, cap=20.0) -> float:
    """Cross-ratio comparison of the projective parameters of two metrics
    sharing a straight-line geodesic through x0.

    The probes are arc lengths of metric_a; the corresponding points are
    located on metric_b's geodesic through the same chart coordinate along
    the line. Moebius-related parameters have equal cross-ratios; the
    residual is their difference.
    """
    from .geodesics import extend_geodesic

    probes = sorted(float(s) for s in probe_arclengths)
    if len(probes) != 4:
        raise ValueError("exactly 4 probe arc-lengths are needed")
    x0 = np.asarray(x0, dtype=float)
    direction = np.asarray(direction, dtype=float)
    unit = direction / np.linalg.norm(direction)

    seg_a = extend_geodesic(metric_a, x0, direction, cap=cap)
    seg_b = extend_geodesic(metric_b, x0, direction, cap=cap)
    par_a = projective_parameter(metric_a, seg_a)
    par_b = projective_parameter(metric_b, seg_b)

    if not par_a.same_chart(probes):
        raise ChartError("probes do not sit inside one Moebius chart of metric_a")

    def along(seg, s):
        return float((seg.position(s) - x0) @ unit)

    pa, pb = [], []
    sb_values = []
    for s in probes:
        t = along(seg_a, s)
        sb = optimize.brentq(lambda ss: along(seg_b, ss) - t,
                             seg_b.s_min, seg_b.s_max, xtol=1e-13)
        sb_values.append(sb)
        pa.append(par_a.value(s))
        pb.append(par_b.value(sb))
    if not par_b.same_chart(sb_values):
        raise ChartError("probes do not sit inside one Moebius chart of metric_b")
    return abs(cross_ratio(*pa) - cross_ratio(*pb))
