"""Fixed-step gradient descent on smooth convex functions.

The quantity of interest is the decrease sequence D_k = f(x_k) - f(x_{k+1}).
The value curve is convex when D_k is nonincreasing, which is guaranteed for
step sizes up to 1.75/L.  The per-step audit evaluates the three inequalities
used to prove it for eta <= 1.5/L, plus their combination.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

FAMILIES = ("quadratic", "logsumexp", "logistic", "huber")


class NumericOverflowError(ArithmeticError):
    def __init__(self, step: int):
        super().__init__(f"numeric overflow at step {step}")
        self.step = step


@dataclass
class SmoothConvexFn:
    name: str
    dimension: int
    L: float
    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    data: dict = field(default_factory=dict, repr=False)


def power_iteration(M: np.ndarray, tol: float = 1e-12, max_iter: int = 200_000, seed: int = 0) -> float:
    """Largest eigenvalue of a symmetric PSD matrix (relative change below ``tol``)."""
    n = M.shape[0]
    v = np.random.default_rng(seed).standard_normal(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = M @ v
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        new = float(v @ w)
        v = w / nrm
        if abs(new - lam) <= tol * max(abs(new), 1e-300):
            return max(new, float(v @ (M @ v)))
        lam = new
    return lam


def quadratic(Q: np.ndarray, L: float | None = None) -> SmoothConvexFn:
    """f(x) = x^T Q x / 2 for symmetric PSD ``Q``; L from power iteration."""
    Q = np.asarray(Q, dtype=float)
    Q = (Q + Q.T) / 2
    if L is None:
        L = power_iteration(Q)
    return SmoothConvexFn(
        "quadratic",
        Q.shape[0],
        float(L),
        lambda x: 0.5 * float(x @ (Q @ x)),
        lambda x: Q @ x,
        {"Q": Q},
    )


def _spectral_sq(A: np.ndarray) -> float:
    return float(np.linalg.norm(A, 2) ** 2)


def logsumexp_fn(A: np.ndarray, b: np.ndarray, lam: float) -> SmoothConvexFn:
    """log sum exp(Ax + b) + lam/2 |x|^2.  The softmax Jacobian has norm at most
    1/2, so L = |A|^2/2 + lam."""

    def value(x):
        z = A @ x + b
        m = z.max()
        return float(m + np.log(np.exp(z - m).sum()) + 0.5 * lam * (x @ x))

    def grad(x):
        z = A @ x + b
        p = np.exp(z - z.max())
        p /= p.sum()
        return A.T @ p + lam * x

    return SmoothConvexFn("logsumexp", A.shape[1], _spectral_sq(A) / 2 + lam, value, grad, {"A": A, "b": b, "lam": lam})


def logistic_fn(X: np.ndarray, y: np.ndarray, lam: float) -> SmoothConvexFn:
    """Mean logistic loss plus lam/2 |x|^2; L = |X|^2/(4m) + lam."""
    m = X.shape[0]

    def value(w):
        z = -y * (X @ w)
        return float(np.logaddexp(0.0, z).mean() + 0.5 * lam * (w @ w))

    def grad(w):
        z = -y * (X @ w)
        s = 0.5 * (1.0 + np.tanh(0.5 * z))  # sigmoid(z), overflow free
        return X.T @ (-y * s) / m + lam * w

    return SmoothConvexFn("logistic", X.shape[1], _spectral_sq(X) / (4 * m) + lam, value, grad, {"X": X, "y": y, "lam": lam})


def huber_fn(A: np.ndarray, b: np.ndarray, delta: float) -> SmoothConvexFn:
    """sum_i h(a_i.x - b_i) with the Huber loss h of width delta; L = |A|^2/delta."""

    def value(x):
        r = A @ x - b
        a = np.abs(r)
        return float(np.where(a <= delta, r * r / (2 * delta), a - delta / 2).sum())

    def grad(x):
        r = A @ x - b
        return A.T @ np.clip(r / delta, -1.0, 1.0)

    return SmoothConvexFn("huber", A.shape[1], _spectral_sq(A) / delta, value, grad, {"A": A, "b": b, "delta": delta})


def random_instance(family: str, dim: int, rng: np.random.Generator) -> SmoothConvexFn:
    if family == "quadratic":
        rank = int(rng.integers(1, dim + 1))
        A = rng.standard_normal((rank, dim))
        return quadratic(A.T @ A / dim)
    if family == "logsumexp":
        A = rng.standard_normal((2 * dim, dim)) / np.sqrt(dim)
        return logsumexp_fn(A, rng.standard_normal(2 * dim), float(rng.uniform(0.0, 0.05)))
    if family == "logistic":
        X = rng.standard_normal((3 * dim, dim))
        y = rng.choice([-1.0, 1.0], size=3 * dim)
        return logistic_fn(X, y, float(rng.uniform(0.0, 0.01)))
    if family == "huber":
        A = rng.standard_normal((2 * dim, dim)) / np.sqrt(dim)
        return huber_fn(A, 3 * rng.standard_normal(2 * dim), float(rng.uniform(0.1, 1.0)))
    raise ValueError(f"unknown family: {family}")


@dataclass
class GDRun:
    eta: float
    iterates: np.ndarray
    values: np.ndarray
    gradients: np.ndarray
    stopped_at: int | None = None

    @property
    def decreases(self) -> np.ndarray:
        return self.values[:-1] - self.values[1:]

    @property
    def increasing(self) -> bool:
        """True if some step increased the value (step too large)."""
        return bool(np.any(self.decreases < 0))


def run_gd(f: SmoothConvexFn, x0, eta: float, steps: int, grad_floor: float = 1e-14) -> GDRun:
    if eta <= 0 or steps < 1:
        raise ValueError("need eta > 0 and steps >= 1")
    x = np.array(x0, dtype=float).reshape(f.dimension)
    xs = np.empty((steps + 1, f.dimension))
    gs = np.empty((steps + 1, f.dimension))
    vals = np.empty(steps + 1)
    stopped = None
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps + 1):
            v = f.value(x)
            g = f.gradient(x)
            if not (np.isfinite(v) and np.all(np.isfinite(g)) and np.all(np.isfinite(x))):
                raise NumericOverflowError(k)
            xs[k], gs[k], vals[k] = x, g, v
            if k == steps:
                break
            if np.linalg.norm(g) < grad_floor:
                # stationary to working precision: the tail stays put, D = 0
                xs[k + 1 :] = x
                gs[k + 1 :] = g
                vals[k + 1 :] = v
                stopped = k
                break
            x = x - eta * g
    return GDRun(eta, xs, vals, gs, stopped)


def curve_is_convex(values_or_run, rel_tol: float = 1e-10) -> tuple[bool, int | None]:
    """Whether D_{k+1} <= D_k + rel_tol * max(1, |D_k|) for all k, and the first
    k where it fails."""
    vals = values_or_run.values if isinstance(values_or_run, GDRun) else np.asarray(values_or_run, dtype=float)
    D = vals[:-1] - vals[1:]
    if D.size < 2:
        return True, None
    bad = D[1:] > D[:-1] + rel_tol * np.maximum(1.0, np.abs(D[:-1]))
    hits = np.flatnonzero(bad)
    if hits.size:
        return False, int(hits[0])
    return True, None


@dataclass
class StepAudit:
    k: int
    ineq_A: bool
    ineq_B: bool
    cocoercive: bool
    final_bound: bool | None  # None when eta > 1.5/L (bound not claimed)
    slack_final: float


def proof_step_audit(f: SmoothConvexFn, run: GDRun, tol: float = 1e-9) -> list[StepAudit]:
    L = f.L
    eta = run.eta
    D = run.decreases
    g = run.gradients
    K = len(D) - 1
    if K <= 0:
        return []
    gk, g1 = g[:K], g[1 : K + 1]
    delta = g1 - gk
    dd = np.einsum("ij,ij->i", delta, delta)
    scale = tol * np.maximum.reduce([np.ones(K), np.abs(D[:K]), eta * np.einsum("ij,ij->i", gk, gk)])
    a_ok = D[:K] >= eta * np.einsum("ij,ij->i", g1, gk) + dd / (2 * L) - scale
    b_ok = D[1 : K + 1] <= eta * np.einsum("ij,ij->i", g1, g1) + scale
    c_ok = dd / L <= -eta * np.einsum("ij,ij->i", gk, delta) + scale
    slack = (D[:K] - D[1 : K + 1]) - (1.5 / L - eta) * dd
    check_final = eta <= 1.5 / L * (1 + 1e-12)
    return [
        StepAudit(k, bool(a_ok[k]), bool(b_ok[k]), bool(c_ok[k]), bool(slack[k] >= -scale[k]) if check_final else None, float(slack[k]))
        for k in range(K)
    ]


def audit_ok(audits: Sequence[StepAudit]) -> bool:
    return all(a.ineq_A and a.ineq_B and a.cocoercive and a.final_bound is not False for a in audits)


@dataclass
class ScanRecord:
    family: str
    instance: int
    eta_over_L: float
    convex: bool
    first_violation_k: int | None
    audit_ok: bool


def scan_instance(family: str, dim: int, etas: Sequence[float], steps: int, rng: np.random.Generator, instance: int = 0) -> list[ScanRecord]:
    f = random_instance(family, dim, rng)
    x0 = 3.0 * rng.standard_normal(dim)
    records = []
    for c in etas:
        run = run_gd(f, x0, c / f.L, steps)
        convex, first = curve_is_convex(run, 1e-10)
        records.append(ScanRecord(family, instance, float(c), convex, first, audit_ok(proof_step_audit(f, run))))
    return records


@dataclass
class ScanTable:
    records: list[ScanRecord]

    def violation_fraction(self) -> dict[float, float]:
        out: dict[float, list[bool]] = {}
        for r in self.records:
            out.setdefault(r.eta_over_L, []).append(not r.convex)
        return {k: float(np.mean(v)) for k, v in sorted(out.items())}

    def largest_clean_eta(self) -> float | None:
        clean = [k for k, v in self.violation_fraction().items() if v == 0.0]
        return max(clean) if clean else None


def threshold_scan(
    family: str,
    eta_grid: Sequence[float],
    instances: int,
    seed: int = 0,
    dim: int = 10,
    steps: int = 200,
    mapper: Callable | None = None,
) -> ScanTable:
    """Run ``instances`` random members of ``family`` at each eta (in units of 1/L)."""
    from .rng import stream

    if family not in FAMILIES:
        raise ValueError(f"unknown family: {family}")
    mapper = mapper or (lambda fn, xs: [fn(x) for x in xs])
    per = mapper(lambda i: scan_instance(family, dim, eta_grid, steps, stream(seed, i), i), range(instances))
    return ScanTable([r for block in per for r in block])
