"""Convex body chasing in the plane: the follow-the-leader blow-up instance and
the rotating-line adversary (plus its product over coordinate planes).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np

# ------------------------------------------------------------ FTL instance


@dataclass(frozen=True)
class FtlSchedule:
    """Angles phi_m = c/m (or an explicit array), starting radius r1, N pairs."""

    r1: float
    pairs: int
    c: float = 0.3
    angles: tuple[float, ...] | None = None

    def phi(self, count: int) -> np.ndarray:
        if self.angles is not None:
            if len(self.angles) < count:
                raise ValueError(f"schedule needs {count} angles, has {len(self.angles)}")
            return np.asarray(self.angles[:count], dtype=float)
        m = np.arange(1, count + 1, dtype=float)
        return self.c / m


def _check_angles(phi: np.ndarray) -> None:
    if np.any(phi <= 0) or np.any(phi >= math.pi / 8):
        raise ValueError("angle out of range: need 0 < phi_m < pi/8")
    if np.any(np.diff(phi) > 0):
        raise ValueError("angle out of range: phi_m must be nonincreasing")


def sup_radius_bound(schedule: FtlSchedule, count: int | None = None) -> float:
    """r1 * exp(8 * sum phi_m^2), an upper bound for every radius.

    Each radius ratio is 1/cos(x) with x = 2 phi_m or phi_m + phi_{m+1}, both
    below pi/4, where 1/cos(x) <= exp(x^2).  Summing the squares gives at most
    8 sum phi_m^2.  For phi_m = c/m the infinite sum is c^2 pi^2/6.
    """
    if schedule.angles is None and count is None:
        s2 = schedule.c**2 * math.pi**2 / 6
    else:
        s2 = float(np.sum(schedule.phi(count if count is not None else len(schedule.angles)) ** 2))
    return schedule.r1 * math.exp(8 * s2)


@dataclass
class FtlInstance:
    schedule: FtlSchedule
    phi: np.ndarray  # phi_1..phi_{N+1}
    radii: np.ndarray  # r_1..r_{2N+1}
    angles: np.ndarray  # signed direction angles of the support points
    points: np.ndarray  # p_1..p_{2N+1}, shape (2N+1, 2)

    @property
    def directions(self) -> np.ndarray:
        return np.stack([np.cos(self.angles), np.sin(self.angles)], axis=1)

    def system(self, t: int) -> "HalfPlaneSystem":
        """Constraints 1..t (1-based) as a half-plane system."""
        return HalfPlaneSystem(self.directions[:t], self.radii[:t])


def ftl_radii(schedule: FtlSchedule) -> tuple[np.ndarray, np.ndarray]:
    N = schedule.pairs
    phi = schedule.phi(N + 1)
    _check_angles(phi)
    args = np.empty(2 * N)
    args[0::2] = 2 * phi[:N]
    args[1::2] = phi[:N] + phi[1 : N + 1]
    logr = math.log(schedule.r1) + np.concatenate([[0.0], np.cumsum(-np.log(np.cos(args)))])
    return phi, np.exp(logr)


def build_ftl_instance(schedule: FtlSchedule, check_pairs: int = 2000, sample_pairs: int = 100_000, rng: np.random.Generator | None = None) -> FtlInstance:
    """Alternating construction: odd points at angle -phi_m, even at +phi_m."""
    if not 0 < schedule.r1 < 1:
        raise ValueError("r1 must lie in (0, 1)")
    if sup_radius_bound(schedule) > 1:
        raise ValueError("r1 too large: radius bound exceeds 1")
    phi, radii = ftl_radii(schedule)
    N = schedule.pairs
    ang = np.empty(2 * N + 1)
    ang[0 : 2 * N : 2] = -phi[:N]
    ang[1 : 2 * N : 2] = phi[:N]
    ang[2 * N] = -phi[N]
    pts = radii[:, None] * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    inst = FtlInstance(schedule, phi, radii, ang, pts)
    if radii.max() > 1:
        raise ValueError("r1 too large: a radius exceeds 1")
    if check_pairs:
        ok, worst = check_feasibility(inst, check_pairs, sample_pairs, rng)
        if not ok:
            raise ArithmeticError(f"feasibility condition failed (worst slack {worst:g})")
    return inst


def check_feasibility(inst: FtlInstance, exhaustive_pairs: int = 2000, sample_pairs: int = 100_000, rng: np.random.Generator | None = None, tol: float = 1e-12) -> tuple[bool, float]:
    """cos(angle(u_i, u_j)) >= r_i / r_j for all i <= j among the first
    ``exhaustive_pairs`` pairs of points, and on random pairs beyond."""
    n_ex = min(2 * exhaustive_pairs + 1, len(inst.radii))
    r = inst.radii
    a = inst.angles
    worst = math.inf
    block = 512
    for s in range(0, n_ex, block):
        i = np.arange(s, min(s + block, n_ex))[:, None]
        j = np.arange(n_ex)[None, :]
        cos_ij = np.cos(a[i] - a[j])
        slack = np.where(j >= i, cos_ij - r[i] / r[j], np.inf)
        worst = min(worst, float(slack.min()))
    total = len(r)
    if total > n_ex and sample_pairs:
        rng = rng or np.random.default_rng(0)
        i = rng.integers(0, total, size=sample_pairs)
        j = rng.integers(0, total, size=sample_pairs)
        i, j = np.minimum(i, j), np.maximum(i, j)
        slack = np.cos(a[i] - a[j]) - r[i] / r[j]
        worst = min(worst, float(slack.min()))
    return worst >= -tol, worst


@dataclass(frozen=True)
class FtlCost:
    cost_N: float
    lower_bound_sum: float
    sup_r: float
    sup_r_bound: float


def ftl_cost(schedule: FtlSchedule) -> FtlCost:
    """Total movement of follow-the-leader over N pairs, plus the tan x >= x
    lower bound computed from the same radii."""
    phi, radii = ftl_radii(schedule)
    N = schedule.pairs
    r_odd = radii[0 : 2 * N : 2]
    r_even = radii[1 : 2 * N : 2]
    flip = 2 * phi[:N]
    cross = phi[:N] + phi[1 : N + 1]
    cost = float(np.sum(r_odd * np.tan(flip)) + np.sum(r_even * np.tan(cross)))
    lower = float(np.sum(r_odd * flip) + np.sum(r_even * cross))
    if cost < lower:
        raise ArithmeticError("cost below its lower bound")
    return FtlCost(cost, lower, float(radii.max()), sup_radius_bound(schedule))


def ftl_step_costs(inst: FtlInstance) -> np.ndarray:
    """Distances between consecutive served points (first entry: from the origin)."""
    pts = np.vstack([[0.0, 0.0], inst.points])
    return np.linalg.norm(np.diff(pts, axis=0), axis=1)


# ---------------------------------------------------------- min-norm point


class InfeasibleBodyError(ValueError):
    def __init__(self) -> None:
        super().__init__("infeasible body")


@dataclass
class HalfPlaneSystem:
    """Unit disk intersected with {x : <u_i, x> >= b_i} (u_i unit)."""

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self) -> None:
        self.normals = np.asarray(self.normals, dtype=float).reshape(-1, 2)
        self.offsets = np.asarray(self.offsets, dtype=float).reshape(-1)
        nrm = np.linalg.norm(self.normals, axis=1)
        if np.any(nrm == 0):
            raise ValueError("zero normal")
        self.offsets = self.offsets / nrm
        self.normals = self.normals / nrm[:, None]

    @classmethod
    def from_support_points(cls, points) -> "HalfPlaneSystem":
        p = np.asarray(points, dtype=float).reshape(-1, 2)
        r = np.linalg.norm(p, axis=1)
        return cls(p / r[:, None], r)

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        if x @ x > (1 + tol) ** 2:
            return False
        return bool(np.all(self.normals @ x >= self.offsets - tol))

    def __len__(self) -> int:
        return len(self.offsets)


def min_norm_point(system: HalfPlaneSystem, tol: float = 1e-12, seed: int = 0) -> np.ndarray:
    """Minimum-norm point of the body by randomized incremental 2-D optimization.

    Constraints are added in a shuffled order.  Whenever the current optimum
    violates the new constraint, the optimum moves onto that constraint's line,
    where minimizing |x| over the earlier constraints is a 1-D interval problem.
    The optimum over all half-planes is the answer if its norm is at most 1;
    otherwise the body is empty.
    """
    U = system.normals
    b = system.offsets
    n = len(b)
    x = np.zeros(2)
    order = np.random.default_rng(seed).permutation(n)
    Uo, bo = U[order], b[order]
    pos = 0
    while pos < n:
        # violations are rare: find the next one with one vectorized pass
        slack = Uo[pos:] @ x - bo[pos:]
        bad = np.flatnonzero(slack < -tol)
        if not bad.size:
            break
        pos += int(bad[0])
        i = order[pos]
        base = b[i] * U[i]
        perp = np.array([-U[i, 1], U[i, 0]])
        prev = order[:pos]
        lo, hi = -math.inf, math.inf
        if prev.size:
            coef = U[prev] @ perp
            rhs = b[prev] - U[prev] @ base
            flat = np.abs(coef) <= 1e-15
            if np.any(rhs[flat] > tol):
                raise InfeasibleBodyError()
            pos_c = coef > 1e-15
            neg_c = coef < -1e-15
            if np.any(pos_c):
                lo = float(np.max(rhs[pos_c] / coef[pos_c]))
            if np.any(neg_c):
                hi = float(np.min(rhs[neg_c] / coef[neg_c]))
        if lo > hi + tol:
            raise InfeasibleBodyError()
        t = min(max(0.0, lo), hi) if lo <= hi else 0.5 * (lo + hi)
        x = base + t * perp
        pos += 1
    if x @ x > (1 + 1e-9) ** 2:
        raise InfeasibleBodyError()
    return x


def min_norm_point_bruteforce(system: HalfPlaneSystem, tol: float = 1e-9) -> np.ndarray:
    """Candidate enumeration (origin, single-line projections, pairwise line
    intersections, line/circle intersections); O(n^3), test oracle only."""
    U, b = system.normals, system.offsets
    cands = [np.zeros(2)]
    cands += [b[i] * U[i] for i in range(len(b))]
    for i in range(len(b)):
        for j in range(i + 1, len(b)):
            M = np.array([U[i], U[j]])
            if abs(np.linalg.det(M)) > 1e-14:
                cands.append(np.linalg.solve(M, [b[i], b[j]]))
        if abs(b[i]) <= 1:
            h = math.sqrt(max(0.0, 1 - b[i] ** 2))
            perp = np.array([-U[i, 1], U[i, 0]])
            cands += [b[i] * U[i] + h * perp, b[i] * U[i] - h * perp]
    feas = [c for c in cands if system.contains(c, tol)]
    if not feas:
        raise InfeasibleBodyError()
    return min(feas, key=lambda c: float(c @ c))


# ------------------------------------------------------- line adversaries


class AlgorithmViolationError(RuntimeError):
    def __init__(self, step: int):
        super().__init__(f"algorithm violated constraint at step {step}")
        self.step = step


@dataclass
class LineRequest:
    """Points x whose plane-``plane`` coordinates lie on the chord of the unit
    circle through ``pivot`` with direction ``direction`` (length ``chord``),
    with the coordinates of earlier planes pinned to ``fixed``; all other
    coordinates are free."""

    dim: int
    plane: int
    pivot: np.ndarray
    direction: np.ndarray
    chord: float
    fixed: np.ndarray  # values for coordinates [0, 2*plane)

    def _plane(self, x: np.ndarray) -> np.ndarray:
        return x[2 * self.plane : 2 * self.plane + 2]

    def project(self, x) -> np.ndarray:
        y = np.array(x, dtype=float)
        y[: 2 * self.plane] = self.fixed
        t = float((self._plane(y) - self.pivot) @ self.direction)
        t = min(max(t, 0.0), self.chord)
        y[2 * self.plane : 2 * self.plane + 2] = self.pivot + t * self.direction
        return y

    def min_norm_point(self) -> np.ndarray:
        y = np.zeros(self.dim)
        y[: 2 * self.plane] = self.fixed
        t = min(max(float(-self.pivot @ self.direction), 0.0), self.chord)
        y[2 * self.plane : 2 * self.plane + 2] = self.pivot + t * self.direction
        return y

    def anchor(self) -> np.ndarray:
        y = np.zeros(self.dim)
        y[: 2 * self.plane] = self.fixed
        y[2 * self.plane : 2 * self.plane + 2] = self.pivot
        return y

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            return False
        if np.any(np.abs(x[: 2 * self.plane] - self.fixed) > tol):
            return False
        rel = self._plane(x) - self.pivot
        t = float(rel @ self.direction)
        off = rel - t * self.direction
        return bool(off @ off <= tol * tol and -tol <= t <= self.chord + tol)


class OnlineAlgorithm(Protocol):
    name: str

    def respond(self, request: LineRequest, position: np.ndarray) -> np.ndarray: ...


@dataclass
class Greedy:
    """Move to the nearest feasible point."""

    name: str = "greedy"

    def respond(self, request, position):
        return request.project(position)


@dataclass
class Lazy:
    """Stay put while feasible, otherwise move to the nearest feasible point."""

    name: str = "lazy"

    def respond(self, request, position):
        return position if request.contains(position) else request.project(position)


@dataclass
class FollowTheLeader:
    """Always sit at the minimum-norm point of the current request."""

    name: str = "ftl"

    def respond(self, request, position):
        return request.min_norm_point()


@dataclass
class PivotChaser:
    """Jump to the current pivot (the far end of the offline path)."""

    name: str = "pivot"

    def respond(self, request, position):
        return request.anchor()


ALGORITHMS: dict[str, Callable[[], OnlineAlgorithm]] = {
    "greedy": Greedy,
    "lazy": Lazy,
    "ftl": FollowTheLeader,
    "pivot": PivotChaser,
}


@dataclass
class ChasingTrace:
    points: list[np.ndarray] = field(default_factory=list)
    step_costs: list[float] = field(default_factory=list)
    switches: list[int] = field(default_factory=list)  # cumulative switch count per step
    post_switch_offsets: list[float] = field(default_factory=list)
    offline_opt: float = 0.0
    offline_correction: float = 0.0
    final_pivots: list[np.ndarray] = field(default_factory=list)
    requests: list["LineRequest"] = field(default_factory=list, repr=False)

    @property
    def cost(self) -> float:
        return float(math.fsum(self.step_costs))

    @property
    def ratio(self) -> float:
        return self.cost / self.offline_opt if self.offline_opt > 0 else math.inf

    @property
    def pivot_switches(self) -> int:
        return self.switches[-1] if self.switches else 0

    def hysteresis_ok(self, eps: float) -> bool:
        return all(u >= eps - 1e-12 for u in self.post_switch_offsets)


def _rot(v: np.ndarray, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def _angle_grid(angle_step: float) -> np.ndarray:
    count = max(1, math.ceil(round((math.pi / 2) / angle_step, 9)))
    grid = np.arange(count + 1) * angle_step
    grid[-1] = math.pi / 2
    return grid[grid <= math.pi / 2]


def _run_plane(alg, trace, dim, plane, fixed, x, eps, angle_step, tangent_tol):
    pivot = np.array([1.0, 0.0])
    sigma = 1.0
    switches = trace.switches[-1] if trace.switches else 0
    for psi in _angle_grid(angle_step):
        d = _rot(-pivot, -sigma * psi)
        chord = 2 * math.cos(psi)
        req = LineRequest(dim, plane, pivot, d, chord, fixed)
        y = np.asarray(alg.respond(req, x.copy()), dtype=float)
        step = len(trace.step_costs)
        if not req.contains(y):
            raise AlgorithmViolationError(step)
        # signed offset of the algorithm from the Thales point along the line
        u = float((y[2 * plane : 2 * plane + 2] - pivot) @ d) - math.cos(psi)
        if u <= -eps and chord > 0:
            pivot = pivot + chord * d
            pivot /= np.linalg.norm(pivot)
            sigma = -sigma
            switches += 1
            trace.post_switch_offsets.append(-u)
        trace.step_costs.append(float(np.linalg.norm(y - x)))
        trace.points.append(y)
        trace.requests.append(req)
        trace.switches.append(switches)
        x = y
        if math.sin(psi) >= 1 - tangent_tol and psi >= math.pi / 2 - 1e-15:
            break
    return x, pivot


def product_adversary(alg: OnlineAlgorithm, d: int, eps: float, angle_step: float = 1e-3, tangent_tol: float = 1e-6) -> ChasingTrace:
    """Run the rotating-line adversary in each coordinate plane in turn.

    While plane k is active, coordinates of planes before k are pinned to the
    final pivots chosen there and later planes are unconstrained.  The offline
    player walks straight to the concatenated final pivots.
    """
    if d < 2 or d % 2 or d > 16:
        raise ValueError("d must be even with 2 <= d <= 16")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if angle_step <= 0:
        raise ValueError("angle_step must be positive")
    trace = ChasingTrace()
    x = np.zeros(d)
    fixed = np.zeros(0)
    for plane in range(d // 2):
        x, pivot = _run_plane(alg, trace, d, plane, fixed, x, eps, angle_step, tangent_tol)
        trace.final_pivots.append(pivot)
        fixed = np.concatenate([fixed, pivot])
    trace.offline_opt = float(np.linalg.norm(fixed))
    trace.offline_correction = eps
    return trace


def line_chasing_adversary(alg: OnlineAlgorithm, eps: float, angle_step: float = 1e-3, tangent_tol: float = 1e-6) -> ChasingTrace:
    """Lines rotating about a pivot on the unit circle from the diameter
    direction to the tangent; the pivot jumps to the far chord end when the
    algorithm falls ``eps`` behind the Thales point."""
    return product_adversary(alg, 2, eps, angle_step, tangent_tol)


def offline_exact(trace: ChasingTrace) -> float:
    """Exact offline optimum over the served request sequence (needs cvxpy)."""
    import cvxpy as cp

    requests = trace.requests

    dim = requests[0].dim
    X = cp.Variable((len(requests), dim))
    cons = []
    for t, req in enumerate(requests):
        p = 2 * req.plane
        if p:
            cons.append(X[t, :p] == req.fixed)
        rel = X[t, p : p + 2] - req.pivot
        normal = np.array([-req.direction[1], req.direction[0]])
        cons.append(rel @ normal == 0)
        cons.append(rel @ req.direction >= 0)
        cons.append(rel @ req.direction <= req.chord)
    moves = cp.hstack([cp.norm(X[0])] + [cp.norm(X[t] - X[t - 1]) for t in range(1, len(requests))])
    prob = cp.Problem(cp.Minimize(cp.sum(moves)), cons)
    prob.solve()
    return float(prob.value)
