"""Angular integral of [1 + cos(n pi e1)][1 + cos(n pi e2)] / [(1 - e1^2)(1 - e2^2)]
over the sphere, with e1 = cos(theta), e2 = sin(theta) sin(phi), for odd n.

The large-n closed form is 4 pi [ln(n pi) + gamma - Ci(n pi)].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

EULER_GAMMA = 0.57721566490153286061
SERIES_SWITCH = 1e-6
CI_SWITCH = 8.0
GL_POINTS = 10
DEFAULT_BUDGET = 20_000_000  # panel evaluations (each is 3 Gauss rules)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_POINTS)


class QuadratureBudgetError(RuntimeError):
    def __init__(self, estimate: float, error_bound: float):
        super().__init__(f"quadrature budget exceeded (best estimate {estimate!r}, error bound {error_bound!r})")
        self.estimate = estimate
        self.error_bound = error_bound


def _check_n(n: int) -> None:
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive odd integer")
    if n % 2 == 0:
        raise ValueError("even n diverges under this form")


def edge_factor(n: int, e) -> np.ndarray:
    """[1 + cos(n pi e)] / (1 - e^2) for odd n, finite up to |e| = 1.

    With u = 1 - |e| and n odd, 1 + cos(n pi e) = 2 sin^2(n pi u / 2), so the
    factor is 2 sin^2(n pi u/2) / (u (1 + |e|)); below u = 1e-6 the leading
    series term (n pi)^2 u / (2 (1 + |e|)) is used.
    """
    a = np.minimum(np.abs(np.asarray(e, dtype=float)), 1.0)
    u = 1.0 - a
    out = np.empty_like(u)
    small = u < SERIES_SWITCH
    big = ~small
    ub = u[big]
    out[big] = 2.0 * np.sin(0.5 * n * math.pi * ub) ** 2 / (ub * (1.0 + a[big]))
    us = u[small]
    out[small] = (n * math.pi) ** 2 * us / (2.0 * (1.0 + a[small]))
    return out


def integrand(n: int, theta, phi) -> np.ndarray | float:
    _check_n(n)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    val = edge_factor(n, np.cos(theta)) * edge_factor(n, st * np.sin(phi))
    return float(val) if val.ndim == 0 else val


# ------------------------------------------------------------ quadrature


@dataclass
class BatchResult:
    values: np.ndarray
    errors: np.ndarray
    panels: int


def adaptive_gl(
    fun: Callable[[np.ndarray, np.ndarray], np.ndarray],
    a: np.ndarray,
    b: np.ndarray,
    groups: np.ndarray,
    n_groups: int,
    rel_tol: float,
    abs_floor: float = 1e-300,
    max_depth: int = 30,
    budget: int | None = None,
) -> BatchResult:
    """Adaptive Gauss-Legendre over many integrals at once.

    Each panel [a, b] belongs to integral ``groups[i]``; ``fun(x, g)`` gets
    nodes of shape (P, k) and group ids of shape (P,).  A panel is accepted
    when its 10-point rule and the sum over its halves agree within its share
    (by width) of rel_tol times the group's first-pass estimate; otherwise it
    is split.  The halves' value is kept and the difference is the error.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    groups = np.asarray(groups, dtype=np.int64)
    width_tot = np.bincount(groups, weights=b - a, minlength=n_groups)
    values = np.zeros(n_groups)
    errors = np.zeros(n_groups)
    scale = None
    panels = 0
    depth = 0
    while a.size:
        panels += a.size
        mid = 0.5 * (a + b)
        h = 0.5 * (b - a)
        x_whole = mid[:, None] + h[:, None] * _GL_X[None, :]
        hl = 0.5 * h
        x_left = (a + hl)[:, None] + hl[:, None] * _GL_X[None, :]
        x_right = (mid + hl)[:, None] + hl[:, None] * _GL_X[None, :]
        f = fun(np.concatenate([x_whole, x_left, x_right], axis=1), groups)
        k = GL_POINTS
        whole = h * (f[:, :k] @ _GL_W)
        halves = hl * (f[:, k : 2 * k] @ _GL_W + f[:, 2 * k :] @ _GL_W)
        err = np.abs(halves - whole)
        if scale is None:
            scale = np.abs(np.bincount(groups, weights=halves, minlength=n_groups))
        allowed = rel_tol * np.maximum(scale[groups], abs_floor) * (b - a) / width_tot[groups]
        ok = err <= allowed
        if depth >= max_depth:
            ok[:] = True
        values += np.bincount(groups[ok], weights=halves[ok], minlength=n_groups)
        errors += np.bincount(groups[ok], weights=err[ok], minlength=n_groups)
        if budget is not None and panels > budget and not ok.all():
            bad = ~ok
            values += np.bincount(groups[bad], weights=halves[bad], minlength=n_groups)
            errors += np.bincount(groups[bad], weights=err[bad], minlength=n_groups)
            raise QuadratureBudgetError(float(values.sum()), float(errors.sum()))
        keep = ~ok
        a, b, m, groups = a[keep], b[keep], mid[keep], groups[keep]
        a, b, groups = np.concatenate([a, m]), np.concatenate([m, b]), np.concatenate([groups, groups])
        depth += 1
    return BatchResult(values, errors, panels)


def initial_panels(n: int, length: float) -> int:
    """About two panels per oscillation period 2/n of the phase n pi e (|de| <= |d angle|)."""
    return max(4, math.ceil(length * n))


DOMAINS = {
    # (theta range, phi range, multiplicity)
    "octant": ((0.0, math.pi / 2), (0.0, math.pi / 2), 8),
    "quarter": ((0.0, math.pi / 2), (0.0, math.pi), 4),
    "full": ((0.0, math.pi), (0.0, 2 * math.pi), 1),
}


@dataclass
class QuadResult:
    n: int
    value: float
    error_bound: float
    panels_used: int
    measure: str
    domain: str


def angular_integral(
    n: int,
    rel_tol: float = 1e-6,
    measure: str = "solid",
    domain: str = "octant",
    budget: int = DEFAULT_BUDGET,
    chunk: int = 4096,
) -> QuadResult:
    """Nested adaptive quadrature: outer theta, inner phi.

    ``measure="solid"`` integrates against sin(theta) dtheta dphi;
    ``measure="plain"`` against dtheta dphi.  Symmetry under theta -> pi - theta,
    phi -> pi - phi and phi -> -phi lets the default integrate one octant.
    """
    _check_n(n)
    if n > 201:
        raise ValueError("n must be <= 201")
    if rel_tol < 1e-8:
        raise ValueError("rel_tol must be >= 1e-8")
    if measure not in ("solid", "plain"):
        raise ValueError(f"unknown measure {measure!r}")
    (t0, t1), (p0, p1), mult = DOMAINS[domain]
    inner_tol = rel_tol / 4
    n_phi = initial_panels(n, p1 - p0)
    used = [0]

    def inner(theta: np.ndarray) -> np.ndarray:
        """phi-integral for each theta node (flat array)."""
        out = np.empty(theta.size)
        for s in range(0, theta.size, chunk):
            th = theta[s : s + chunk]
            st = np.sin(th)
            m = th.size
            edges = np.linspace(p0, p1, n_phi + 1)
            a = np.tile(edges[:-1], m)
            b = np.tile(edges[1:], m)
            g = np.repeat(np.arange(m), n_phi)
            res = adaptive_gl(
                lambda x, gg: edge_factor(n, st[gg][:, None] * np.sin(x)),
                a, b, g, m, inner_tol, budget=budget - used[0],
            )
            used[0] += res.panels
            out[s : s + chunk] = res.values
        return out

    def outer_fun(x: np.ndarray, _g: np.ndarray) -> np.ndarray:
        flat = x.ravel()
        w = edge_factor(n, np.cos(flat))
        if measure == "solid":
            w = w * np.sin(flat)
        return (w * inner(flat)).reshape(x.shape)

    n_theta = initial_panels(n, t1 - t0)
    edges = np.linspace(t0, t1, n_theta + 1)
    try:
        res = adaptive_gl(outer_fun, edges[:-1], edges[1:], np.zeros(n_theta, dtype=np.int64), 1, rel_tol / 2, budget=budget)
    except QuadratureBudgetError as exc:
        raise QuadratureBudgetError(mult * exc.estimate, mult * exc.error_bound) from None
    return QuadResult(n, mult * float(res.values[0]), mult * float(res.errors[0]), used[0] + res.panels, measure, domain)


# -------------------------------------------------------- cosine integral


def _ci_series(x: float) -> float:
    total = 0.0
    term = 1.0  # (-x^2)^k / (2k)!
    k = 0
    while True:
        k += 1
        term *= -x * x / ((2 * k - 1) * (2 * k))
        add = term / (2 * k)
        total += add
        if abs(add) < 1e-18 * max(1.0, abs(total)):
            break
    return EULER_GAMMA + math.log(x) + total


def _ci_continued_fraction(x: float) -> float:
    """-Re E1(ix) from the continued fraction for E1, by modified Lentz."""
    tiny = 1e-300
    b = complex(1.0, x)
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 100_000):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    h *= complex(math.cos(x), -math.sin(x))
    return -h.real


def ci_asymptotic(x: float, terms: int = 8) -> float:
    """sin(x)/x P(1/x^2) - cos(x)/x^2 Q(1/x^2), truncated; accurate only for large x."""
    P = sum((-1) ** k * math.factorial(2 * k) / x ** (2 * k) for k in range(terms))
    Q = sum((-1) ** k * math.factorial(2 * k + 1) / x ** (2 * k) for k in range(terms))
    return math.sin(x) / x * P - math.cos(x) / x**2 * Q


def cosine_integral(x: float) -> float:
    """Ci(x) for x > 0: power series up to 8, continued fraction beyond."""
    if not x > 0:
        raise ValueError("domain error: Ci needs x > 0")
    return _ci_series(x) if x <= CI_SWITCH else _ci_continued_fraction(x)


def asymptotic_form(n: int) -> float:
    x = n * math.pi
    return 4 * math.pi * (math.log(x) + EULER_GAMMA - cosine_integral(x))


def prefactor(n: int, g_mu2: float = 1.0) -> float:
    return 32 * g_mu2 / (math.pi**3 * n * n)


@dataclass
class CompareRow:
    n: int
    quadrature: float
    asymptotic: float
    rel_error: float
    panels_used: int
    prefactor: float


def compare_table(ns: Sequence[int], rel_tol: float = 1e-6, mapper: Callable | None = None) -> list[CompareRow]:
    for n in ns:
        _check_n(n)
    mapper = mapper or (lambda fn, xs: [fn(x) for x in xs])

    def one(n: int) -> CompareRow:
        q = angular_integral(n, rel_tol)
        asym = asymptotic_form(n)
        return CompareRow(n, q.value, asym, abs(q.value - asym) / asym, q.panels_used, prefactor(n))

    return list(mapper(one, list(ns)))
