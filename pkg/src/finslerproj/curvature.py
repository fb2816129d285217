"""Ricci scalar and tensor of the geodesic spray, the negative-Ricci-bound
checker, and the projective-factor machinery.

The Ricci scalar is built from the spray coefficients:

    2 F^2 Ric = 2 (G^i)_{x^i} - (G^i)_{y^j} (G^j)_{y^i} / 2
                - y^j (G^i)_{y^i x^j} + G^j (G^i)_{y^i y^j}

so it is 0-homogeneous in y and equals (n-1) times the flag curvature on
constant-curvature metrics. The Ricci tensor is the y-Hessian of F^2 Ric / 2,
which keeps the contraction identity Ric_ik l^i l^k = Ric automatic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import _pmap, as_components, as_coords
from .diffengine import Jet, extract_coefficient, fundamental_tensor
from .errors import AccuracyError, DomainError, NotProjectiveError
from .geodesics import spray_vector


# ======================================================================
# finite-difference helpers on vector fields (5-point, O(h^4))
# ======================================================================

def _d1(fn, v, i, h):
    e = np.zeros(len(v))
    e[i] = h
    return (np.asarray(fn(v - 2 * e)) - 8 * np.asarray(fn(v - e))
            + 8 * np.asarray(fn(v + e)) - np.asarray(fn(v + 2 * e))) / (12 * h)


def _scale(v):
    return max(1.0, float(np.abs(v).max()))


def _yscale(y):
    # steps in y must follow the vector's own magnitude: unit-speed
    # velocities shrink toward domain boundaries and an absolute step would
    # reach past the cone tip where the spray is not smooth
    return float(np.abs(y).max())


def _boundary_distance(metric, x):
    """Coordinate-space room before an x-stencil exits the domain."""
    if not metric.bounded_domain:
        return math.inf
    n = metric.dimension
    phi = metric.domain_value(x)
    probe = 1e-6 * _scale(x)
    grad = sum(abs(metric.domain_value(x + probe * e) - metric.domain_value(x - probe * e))
               for e in np.eye(n)) / (2 * probe)
    return phi / (grad + 1e-300)


def _x_steps(metric, x):
    """Boundary-aware (first-derivative, nested-derivative) steps in x."""
    dist = _boundary_distance(metric, x)
    if dist <= 1e-8:
        raise DomainError("curvature stencil cannot stay inside the domain; "
                          "the line element sits too close to the boundary")
    hx = min(1e-5 * _scale(x), dist / 10.0)
    Hx = min(1e-3 * _scale(x), dist / 10.0)
    return hx, Hx


def _ricci_scalar_jets(metric, x, y):
    """Exact spray derivatives by nested Taylor jets; no stencil room needed."""
    n = metric.dimension
    impl = metric._spray_impl
    xs = list(map(float, x))
    ys = list(map(float, y))

    def d_dx(j):
        xj = xs.copy()
        xj[j] = Jet.variable(xs[j], 1)
        return [extract_coefficient(gi, 1, 1) for gi in impl(xj, ys)]

    def d_dy(j):
        yj = ys.copy()
        yj[j] = Jet.variable(ys[j], 1)
        return [extract_coefficient(gi, 1, 1) for gi in impl(xs, yj)]

    tr_gx = sum(d_dx(i)[i] for i in range(n))
    gy = np.array([d_dy(j) for j in range(n)]).T  # gy[i, j] = dG^i/dy^j
    sx = np.empty(n)
    for j in range(n):
        xj = xs.copy()
        xj[j] = Jet.variable(xs[j], 1, level=2)
        acc = 0.0
        for i in range(n):
            yi = ys.copy()
            yi[i] = Jet.variable(ys[i], 1, level=1)
            gi = impl(xj, yi)[i]
            acc += extract_coefficient(extract_coefficient(gi, 2, 1), 1, 1)
        sx[j] = acc
    sy = np.empty(n)
    for j in range(n):
        acc = 0.0
        for i in range(n):
            yi = ys.copy()
            if i == j:
                yi[i] = Jet.variable(ys[i], 2)
                gi = impl(xs, yi)[i]
                acc += 2.0 * extract_coefficient(gi, 1, 2)
            else:
                yi[j] = Jet.variable(ys[j], 1, level=2)
                yi[i] = Jet.variable(ys[i], 1, level=1)
                gi = impl(xs, yi)[i]
                acc += extract_coefficient(extract_coefficient(gi, 2, 1), 1, 1)
        sy[j] = acc
    g0 = np.array([float(v) for v in impl(xs, ys)])
    f2 = metric.norm(x, y) ** 2
    rhs = 2.0 * tr_gx - 0.5 * float(np.trace(gy @ gy)) - float(y @ sx) + float(g0 @ sy)
    return rhs / (2.0 * f2)


def ricci_scalar(metric, x, y) -> float:
    """Ricci scalar at the line element (x, y); 0-homogeneous in y."""
    x, y = metric.check_line_element(as_coords(x), as_components(y))
    if metric.spray_supports_jets:
        return _ricci_scalar_jets(metric, x, y)
    n = metric.dimension
    G = lambda xx, yy: spray_vector(metric, xx, yy)
    hx, Hx = _x_steps(metric, x)
    hy = 1e-5 * _yscale(y)

    Gx = np.column_stack([_d1(lambda xx: G(xx, y), x, j, hx) for j in range(n)])
    Gy = np.column_stack([_d1(lambda yy: G(x, yy), y, j, hy) for j in range(n)])

    def S(xx, yy):
        h = 1e-4 * _yscale(yy)
        return sum(_d1(lambda w: G(xx, w), yy, i, h)[i] for i in range(n))

    Hy = 1e-3 * _yscale(y)
    Sx = np.array([_d1(lambda xx: S(xx, y), x, j, Hx) for j in range(n)])
    Sy = np.array([_d1(lambda yy: S(x, yy), y, j, Hy) for j in range(n)])

    G0 = G(x, y)
    F2 = metric.norm(x, y) ** 2
    rhs = 2.0 * np.trace(Gx) - 0.5 * float(np.trace(Gy @ Gy)) - float(y @ Sx) + float(G0 @ Sy)
    return rhs / (2.0 * F2)


def weighted_ricci(metric, x, y) -> float:
    """F^2 Ric, the 2-homogeneous Ricci weight entering the parameter ODE."""
    return metric.norm(x, y) ** 2 * ricci_scalar(metric, x, y)


# ======================================================================
# Ricci tensor
# ======================================================================

@dataclass(frozen=True)
class CurvatureData:
    """Curvature quantities at one line element."""

    ric: float
    ric_tensor: np.ndarray
    ell: np.ndarray
    curvature_matrix: np.ndarray | None = None

    @property
    def contraction_residual(self) -> float:
        return abs(float(self.ell @ self.ric_tensor @ self.ell) - self.ric)


def ricci_tensor(metric, x, y, step=0.05, contraction_limit=1e-3) -> CurvatureData:
    """Akbar-Zadeh Ricci tensor, the y-Hessian of F^2 Ric / 2.

    A cached weighted-Ricci field is differenced in y with O(h^4) stencils.
    The contraction identity is enforced a posteriori; a residual above
    contraction_limit raises AccuracyError.
    """
    x, y = metric.check_line_element(as_coords(x), as_components(y))
    n = metric.dimension
    h = step * _yscale(y)
    cache = {}

    def r(offset):
        key = tuple(offset)
        if key not in cache:
            yy = y + h * np.asarray(offset, dtype=float)
            cache[key] = weighted_ricci(metric, x, yy)
        return cache[key]

    zero = [0] * n
    hess = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            if i == j:
                o = lambda k: [k if m == i else 0 for m in range(n)]
                hess[i, i] = (-r(o(2)) + 16 * r(o(1)) - 30 * r(zero)
                              + 16 * r(o(-1)) - r(o(-2))) / (12 * h * h)
            else:
                def cross(scale):
                    o = lambda a, b: [a if m == i else (b if m == j else 0) for m in range(n)]
                    return (r(o(scale, scale)) + r(o(-scale, -scale))
                            - r(o(scale, -scale)) - r(o(-scale, scale))) / (4.0 * (scale * h) ** 2)
                c1, c2 = cross(1), cross(2)
                hess[i, j] = (4.0 * c1 - c2) / 3.0
                hess[j, i] = hess[i, j]
    ric_ij = 0.5 * (hess + hess.T) * 0.5  # symmetrize, then the 1/2 of the definition
    F = metric.norm(x, y)
    ric = r(zero) / F ** 2
    data = CurvatureData(ric=ric, ric_tensor=ric_ij, ell=y / F)
    if data.contraction_residual > contraction_limit * max(1.0, abs(ric)):
        raise AccuracyError(
            f"Ricci contraction identity residual {data.contraction_residual:.3e}",
            achieved=data.contraction_residual)
    return data


def curvature_matrix(metric, x, y) -> np.ndarray:
    """Cross-check path for R^i_k via horizontal derivatives.

    Uses delta/delta x^k = d/dx^k - N^j_k d/dy^j with the nonlinear
    connection N = (dG/dy)/2, applied to G^i_j / F; the trace reproduces the
    Ricci scalar of `ricci_scalar`.
    """
    x, y = metric.check_line_element(as_coords(x), as_components(y))
    n = metric.dimension
    hy = 1e-4 * _yscale(y)

    def T(xx, yy):
        # (i, j) -> (dG^i/dy^j) / F
        cols = [_d1(lambda w: spray_vector(metric, xx, w), yy, j, hy) for j in range(n)]
        return np.column_stack(cols) / metric.norm(xx, yy)

    N0 = 0.5 * np.column_stack(
        [_d1(lambda w: spray_vector(metric, x, w), y, j, hy) for j in range(n)])
    _, H = _x_steps(metric, x)
    Ty = [_d1_mat(lambda yy: T(x, yy), y, m, 1e-3 * _yscale(y)) for m in range(n)]
    delta = []
    for k in range(n):
        dTk = _d1_mat(lambda xx: T(xx, y), x, k, H)
        for m in range(n):
            dTk = dTk - N0[m, k] * Ty[m]
        delta.append(dTk)
    F = metric.norm(x, y)
    ell = y / F
    R = np.empty((n, n))
    for i in range(n):
        for k in range(n):
            R[i, k] = 0.5 * sum(ell[j] * (delta[k][i, j] - delta[j][i, k]) for j in range(n))
    return R


def _d1_mat(fn, v, i, h):
    e = np.zeros(len(v))
    e[i] = h
    return (fn(v - 2 * e) - 8 * fn(v - e) + 8 * fn(v + e) - fn(v + 2 * e)) / (12 * h)


# ======================================================================
# Ricci bound checker
# ======================================================================

@dataclass
class RicciBoundReport:
    """Eigenvalue test of Ric_ij + c^2 g_ij <= 0 over a sample set.

    The pass test is relative to the fundamental tensor's spectral scale at
    each sample: both matrices grow like the metric coefficients toward a
    domain boundary, so an absolute eigenvalue threshold would be
    meaningless there.
    """

    c: float
    tolerance: float
    max_eigenvalues: list = field(default_factory=list)
    scales: list = field(default_factory=list)
    samples: list = field(default_factory=list)

    @property
    def normalized_eigenvalues(self):
        return [e / s for e, s in zip(self.max_eigenvalues, self.scales)]

    @property
    def passed(self) -> bool:
        return bool(self.max_eigenvalues) and all(
            e <= self.tolerance * s
            for e, s in zip(self.max_eigenvalues, self.scales))

    @property
    def worst(self) -> float:
        norm = self.normalized_eigenvalues
        return max(norm) if norm else math.nan

    def to_dict(self):
        return {
            "c": self.c,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "worst_normalized_eigenvalue": self.worst,
            "max_eigenvalues": list(self.max_eigenvalues),
            "scales": list(self.scales),
        }


def check_ricci_bound(metric, samples, c, tolerance=1e-3) -> RicciBoundReport:
    """Check (Ric)_ij <= -c^2 g_ij, as matrices, over sampled line elements."""
    if not c > 0:
        raise ValueError("the Ricci bound constant c must be positive")
    samples = [(as_coords(x), as_components(y)) for x, y in samples]

    def one(sample):
        x, y = sample
        data = ricci_tensor(metric, x, y)
        g = fundamental_tensor(metric, x, y)
        eig = float(np.linalg.eigvalsh(data.ric_tensor + c * c * g)[-1])
        scale = max(1.0, float(np.abs(np.linalg.eigvalsh(g)).max()))
        return eig, scale

    report = RicciBoundReport(c=float(c), tolerance=float(tolerance))
    results = _pmap(one, samples)
    report.max_eigenvalues = [r[0] for r in results]
    report.scales = [r[1] for r in results]
    report.samples = samples
    return report


# ======================================================================
# Projective factor and the transformation law
# ======================================================================

@dataclass(frozen=True)
class ProjectiveFactor:
    """Scalar P with G_b = G_a + P y, and the fit residual."""

    value: float
    residual: float


def projective_factor(metric_a, metric_b, x, y, tolerance=1e-6) -> ProjectiveFactor:
    """Least-squares fit of P from G_b - G_a = P y.

    Raises NotProjectiveError when the spray difference is not proportional
    to y at this line element.
    """
    x = as_coords(x)
    y = as_components(y)
    ga = spray_vector(metric_a, x, y)
    gb = spray_vector(metric_b, x, y)
    delta = gb - ga
    p = float(delta @ y / (y @ y))
    residual = float(np.abs(delta - p * y).max())
    scale = max(1.0, float(np.abs(ga).max()), float(np.abs(gb).max()))
    if residual > tolerance * scale:
        raise NotProjectiveError(
            f"spray difference is not proportional to y at x={x.tolist()}, "
            f"y={y.tolist()} (residual {residual:.3e})", residual=residual)
    return ProjectiveFactor(p, residual)


def verify_ric_transformation(metric_a, metric_b, x, y) -> float:
    """Residual of the projective transformation law of the Ricci weight.

    For projectively related metrics with factor P (G_b = G_a + P y),

        F_b^2 Ric_b - F_a^2 Ric_a
            = (n - 1)/2 * ( P_{y^i} G_a^i - P_{x^i} y^i + P^2/2 ),

    with the P derivatives taken from the pointwise-fitted factor field.
    Both sides are computed independently; the return value is their gap.
    """
    x = as_coords(x)
    y = as_components(y)
    n = metric_a.dimension

    def p_field(xx, yy):
        delta = spray_vector(metric_b, xx, yy) - spray_vector(metric_a, xx, yy)
        return float(delta @ yy / (yy @ yy))

    projective_factor(metric_a, metric_b, x, y)  # validates relatedness
    hx = 1e-4 * _scale(x)
    hy = 1e-4 * _yscale(y)
    px = np.array([_d1(lambda xx: p_field(xx, y), x, j, hx) for j in range(n)])
    py = np.array([_d1(lambda yy: p_field(x, yy), y, j, hy) for j in range(n)])
    p0 = p_field(x, y)
    ga = spray_vector(metric_a, x, y)
    lhs = weighted_ricci(metric_b, x, y) - weighted_ricci(metric_a, x, y)
    law = 0.5 * (n - 1) * (float(py @ ga) - float(px @ y) + 0.5 * p0 * p0)
    return abs(lhs - law)
