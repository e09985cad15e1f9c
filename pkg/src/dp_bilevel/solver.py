"""Dense primal-dual interior-point solver for small convex programs.

Normal form::

    minimize / maximize   1/2 x'Qx + c'x + offset
    subject to            A_eq x  = b_eq
                          A_in x <= b_in
                          lb <= x <= ub
                          ||x[S] - center||^2 <= radius_sq      (optional, at most one)

The ball is handled as a second-order cone ``||x[S] - center|| <= sqrt(r)``
and the program is solved by a Mehrotra predictor-corrector primal-dual
method with Nesterov-Todd scaling over the nonnegative orthant times that
cone.  Infeasibility is decided by a phase-1 program that minimises the
largest constraint violation.
"""

from __future__ import annotations

import enum
import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import scipy.linalg as sla

log = logging.getLogger(__name__)

DEFAULT_MAX_ITER = 200
OPTIMAL_TOL = 1e-8
INFEASIBLE_SLACK = 1e-7
_TARGET_TOL = 1e-10
_REGULARIZATION = (1e-9, 1e-7)
_DIVERGENCE = 1e12
_X_DIVERGENCE = 1e9
_REFINE_STEPS = 2


class Sense(enum.Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITER_LIMIT = "iter_limit"
    NUMERIC_FAILURE = "numeric_failure"


class Feasibility(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    NUMERIC_FAILURE = "numeric_failure"


@dataclass(frozen=True)
class Ball:
    """``||x[indices] - center||^2 <= radius_sq``."""

    indices: np.ndarray
    center: np.ndarray
    radius_sq: float

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int).reshape(-1)
        center = np.asarray(self.center, dtype=float).reshape(-1)
        if idx.size != center.size:
            raise ValueError("ball center and index set differ in length")
        if not self.radius_sq > 0:
            raise ValueError("ball radius_sq must be positive")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius_sq", float(self.radius_sq))


def _matrix(a, cols):
    if a is None:
        return np.zeros((0, cols))
    a = np.asarray(a, dtype=float)
    return a.reshape(-1, cols) if a.size else np.zeros((0, cols))


def _vector(v, size, fill=0.0):
    if v is None:
        return np.full(size, fill)
    return np.asarray(v, dtype=float).reshape(-1)


@dataclass
class ConvexProgram:
    c: np.ndarray
    Q: Optional[np.ndarray] = None
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    A_in: Optional[np.ndarray] = None
    b_in: Optional[np.ndarray] = None
    lb: Optional[np.ndarray] = None
    ub: Optional[np.ndarray] = None
    ball: Optional[Ball] = None
    sense: Sense = Sense.MINIMIZE
    offset: float = 0.0
    name: str = "program"

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        n = self.c.size
        self.Q = np.zeros((n, n)) if self.Q is None else np.asarray(self.Q, dtype=float)
        self.A_eq = _matrix(self.A_eq, n)
        self.b_eq = _vector(self.b_eq, 0)
        self.A_in = _matrix(self.A_in, n)
        self.b_in = _vector(self.b_in, 0)
        self.lb = _vector(self.lb, n, -np.inf)
        self.ub = _vector(self.ub, n, np.inf)
        if self.Q.shape != (n, n):
            raise ValueError(f"Q has shape {self.Q.shape}, expected {(n, n)}")
        if self.A_eq.shape[0] != self.b_eq.size or self.A_in.shape[0] != self.b_in.size:
            raise ValueError("constraint matrix and right-hand side disagree in rows")
        if self.lb.size != n or self.ub.size != n:
            raise ValueError("bounds must have one entry per variable")
        if np.any(self.lb > self.ub):
            raise ValueError("lb exceeds ub")
        if self.ball is not None and np.any((self.ball.indices < 0) | (self.ball.indices >= n)):
            raise ValueError("ball indices out of range")
        if not np.allclose(self.Q, self.Q.T, atol=1e-12):
            raise ValueError("Q must be symmetric")
        Qmin = self.Q if self.sense is Sense.MINIMIZE else -self.Q
        if np.any(Qmin):
            shift = 1e-10 * (1.0 + np.abs(Qmin).max())
            try:
                np.linalg.cholesky(Qmin + shift * np.eye(n))
            except np.linalg.LinAlgError:
                raise ValueError("objective is not convex in the requested sense") from None

    @property
    def n(self) -> int:
        return self.c.size

    def objective(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(0.5 * x @ self.Q @ x + self.c @ x + self.offset)

    def violation(self, x) -> float:
        """Largest absolute constraint violation at ``x``."""
        x = np.asarray(x, dtype=float)
        parts = [0.0]
        if self.b_eq.size:
            parts.append(np.abs(self.A_eq @ x - self.b_eq).max())
        if self.b_in.size:
            parts.append(np.max(self.A_in @ x - self.b_in))
        parts.append(np.max(self.lb - x, initial=0.0))
        parts.append(np.max(x - self.ub, initial=0.0))
        if self.ball is not None:
            r = x[self.ball.indices] - self.ball.center
            parts.append(r @ r - self.ball.radius_sq)
        return float(max(parts))


@dataclass
class ProgramSolution:
    status: Status
    x: np.ndarray
    objective: float
    eq_duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    in_duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lb_duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    ub_duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    ball_dual: float = 0.0
    iterations: int = 0
    kkt_residual: float = np.inf

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


# --- second-order cone helpers: u = (u0, u1), cone u0 >= ||u1|| ------------------


def _soc_det(u):
    r = np.linalg.norm(u[1:])
    return (u[0] - r) * (u[0] + r)


def _soc_prod(u, v):
    return np.concatenate([[u @ v], u[0] * v[1:] + v[0] * u[1:]])


def _soc_div(u, v):
    """w with u o w = v."""
    w0 = (u[0] * v[0] - u[1:] @ v[1:]) / _soc_det(u)
    return np.concatenate([[w0], (v[1:] - w0 * u[1:]) / u[0]])


def _soc_max_step(u, du):
    """Largest a >= 0 with u + a*du in the cone (u interior)."""
    A = du[0] * du[0] - du[1:] @ du[1:]
    B = 2.0 * (u[0] * du[0] - u[1:] @ du[1:])
    C = _soc_det(u)
    disc = B * B - 4.0 * A * C
    if disc < 0:
        # det(u + a du) keeps its sign; the only exit is through the apex side u0 < 0
        return -u[0] / du[0] if du[0] < 0 else np.inf
    q = -0.5 * (B + np.copysign(np.sqrt(disc), B))
    roots = [r for r in (q / A if A else np.inf, C / q if q else np.inf) if r > 0]
    cand = min(roots) if roots else np.inf
    if du[0] < 0:
        cand = min(cand, -u[0] / du[0])
    return cand


def _soc_nt(s, z):
    """Nesterov-Todd scaling W (symmetric), its inverse, and lambda = W z."""
    rs, rz = np.sqrt(_soc_det(s)), np.sqrt(_soc_det(z))
    sb, zb = s / rs, z / rz
    gamma = np.sqrt((1.0 + sb @ zb) / 2.0)
    Jzb = np.concatenate([[zb[0]], -zb[1:]])
    wb = (sb + Jzb) / (2.0 * gamma)
    beta = np.sqrt(rs / rz)
    v = np.concatenate([[wb[0] + 1.0], wb[1:]]) / np.sqrt(2.0 * (wb[0] + 1.0))
    Jv = np.concatenate([[v[0]], -v[1:]])
    J = -np.eye(s.size)
    J[0, 0] = 1.0
    W = beta * (2.0 * np.outer(v, v) - J)
    Winv = (2.0 * np.outer(Jv, Jv) - J) / beta
    return W, Winv, W @ z


@dataclass
class _Cone:
    """Orthant of size ``m`` followed by an optional second-order cone of size ``p``."""

    m: int
    p: int

    @property
    def degree(self):
        return self.m + (1 if self.p else 0)

    def unit(self):
        e = np.ones(self.m + self.p)
        e[self.m + 1:] = 0.0
        return e

    def interior(self, u):
        if np.any(u[:self.m] <= 0):
            return False
        return not self.p or (u[self.m] > 0 and _soc_det(u[self.m:]) > 0)

    def shift_inside(self, u):
        u = u.copy()
        u[:self.m] = np.maximum(u[:self.m], 1.0)
        if self.p:
            k = self.m
            u[k] = max(u[k], np.linalg.norm(u[k + 1:]) + 1.0)
        return u

    def max_step(self, u, du):
        a = np.inf
        neg = du[:self.m] < 0
        if np.any(neg):
            a = np.min(-u[:self.m][neg] / du[:self.m][neg])
        if self.p:
            a = min(a, _soc_max_step(u[self.m:], du[self.m:]))
        return a

    def prod(self, u, v):
        out = u * v
        if self.p:
            out[self.m:] = _soc_prod(u[self.m:], v[self.m:])
        return out

    def div(self, u, v):
        out = v / u
        if self.p:
            out[self.m:] = _soc_div(u[self.m:], v[self.m:])
        return out


@dataclass
class _Scaled:
    """Minimisation form with fixed variables moved to equalities and rows normalised."""

    Q: np.ndarray
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    G: np.ndarray
    h: np.ndarray
    cone: _Cone
    obj_scale: float
    eq_scale: np.ndarray
    in_scale: np.ndarray
    soc_scale: float
    n_eq_user: int
    n_in_user: int
    lb_rows: np.ndarray
    ub_rows: np.ndarray
    x0: np.ndarray


def _row_scale(M):
    norms = np.abs(M).max(axis=1, initial=0.0) if M.size else np.zeros(M.shape[0])
    return 1.0 / np.maximum(norms, 1.0)


def _standardize(p: ConvexProgram) -> _Scaled:
    n = p.n
    sign = 1.0 if p.sense is Sense.MINIMIZE else -1.0
    Q, c = sign * p.Q, sign * p.c
    fixed = np.flatnonzero(p.lb == p.ub)
    eye = np.eye(n)
    A = np.vstack([p.A_eq, eye[fixed]])
    b = np.concatenate([p.b_eq, p.lb[fixed]])
    free = p.lb < p.ub
    lb_rows = np.flatnonzero(np.isfinite(p.lb) & free)
    ub_rows = np.flatnonzero(np.isfinite(p.ub) & free)
    G = np.vstack([p.A_in, -eye[lb_rows], eye[ub_rows]])
    h = np.concatenate([p.b_in, -p.lb[lb_rows], p.ub[ub_rows]])

    obj_scale = 1.0 / max(1.0, np.abs(c).max(initial=0.0), np.abs(Q).max(initial=0.0))
    eq_scale = _row_scale(A)
    in_scale = _row_scale(G)
    G, h = G * in_scale[:, None], h * in_scale
    cone = _Cone(G.shape[0], 0)
    soc_scale = 1.0
    if p.ball is not None:
        # ||x[S] - center|| <= sqrt(radius_sq) as the slack (sqrt(r), x[S] - center) in the cone
        k = p.ball.indices.size
        radius = np.sqrt(p.ball.radius_sq)
        soc_scale = 1.0 / max(1.0, radius, np.abs(p.ball.center).max(initial=0.0))
        Gs = np.zeros((k + 1, n))
        Gs[np.arange(1, k + 1), p.ball.indices] = -1.0
        hs = np.concatenate([[radius], -p.ball.center])
        G = np.vstack([G, soc_scale * Gs])
        h = np.concatenate([h, soc_scale * hs])
        cone = _Cone(cone.m, k + 1)

    x0 = np.zeros(n)
    both = np.isfinite(p.lb) & np.isfinite(p.ub)
    x0[both] = 0.5 * (p.lb[both] + p.ub[both])
    lo = np.isfinite(p.lb) & ~both
    x0[lo] = p.lb[lo] + 1.0
    hi = np.isfinite(p.ub) & ~both
    x0[hi] = p.ub[hi] - 1.0
    if p.ball is not None:
        x0[p.ball.indices] = p.ball.center

    return _Scaled(Q * obj_scale, c * obj_scale, A * eq_scale[:, None], b * eq_scale, G, h, cone,
                   obj_scale, eq_scale, in_scale, soc_scale, p.A_eq.shape[0], p.A_in.shape[0],
                   lb_rows, ub_rows, x0)


@dataclass
class _IpmResult:
    status: Status
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    iterations: int
    residual: float
    diverged: bool = False


class _Breakdown(Exception):
    pass


def _factor(Q, A, G, W2, reg):
    """LU of the unreduced KKT matrix [[Q, A', G'], [A, 0, 0], [G, 0, -W^2]], regularised."""
    n, me, mi = Q.shape[0], A.shape[0], G.shape[0]
    K = np.zeros((n + me + mi, n + me + mi))
    K[:n, :n] = Q + reg * np.eye(n)
    K[:n, n:n + me] = A.T
    K[n:n + me, :n] = A
    K[n:n + me, n:n + me] = -reg * np.eye(me)
    K[:n, n + me:] = G.T
    K[n + me:, :n] = G
    K[n + me:, n + me:] = -W2 - reg * np.eye(mi)
    if not np.all(np.isfinite(K)):
        raise _Breakdown("non-finite KKT matrix")
    with warnings.catch_warnings():
        warnings.simplefilter("error", sla.LinAlgWarning)
        try:
            lu = sla.lu_factor(K, check_finite=False)
        except (sla.LinAlgWarning, np.linalg.LinAlgError):
            return None
    return lu if np.all(np.isfinite(lu[0])) else None


def _ipm(Q, c, A, b, G, h, cone, x0, max_iter, tol=_TARGET_TOL) -> _IpmResult:
    with np.errstate(all="ignore"):
        return _ipm_loop(Q, c, A, b, G, h, cone, x0, max_iter, tol)


def _ipm_loop(Q, c, A, b, G, h, cone, x0, max_iter, tol):
    n, me, mi = c.size, A.shape[0], G.shape[0]
    m, p = cone.m, cone.p
    x = x0.astype(float).copy()
    y = np.zeros(me)
    s = cone.shift_inside(h - G @ x)
    z = cone.unit()
    e = cone.unit()
    nu = cone.degree
    b_norm = 1.0 + np.abs(b).max(initial=0.0)
    h_norm = 1.0 + np.abs(h).max(initial=0.0)
    c_norm = 1.0 + max(np.abs(c).max(initial=0.0), np.abs(Q).max(initial=0.0))
    best = None
    stalls = 0

    def result(status, it, resid, diverged=False):
        if best is not None and best[0] <= OPTIMAL_TOL:
            # an early exit after the iterate was already acceptable keeps that iterate
            return _IpmResult(Status.OPTIMAL, best[1], best[2], best[3], best[4], best[0])
        return _IpmResult(status, x, y, z, it, resid, diverged)

    for it in range(max_iter + 1):
        rx = Q @ x + c + A.T @ y + G.T @ z
        ry = A @ x - b
        rz = G @ x + s - h
        gap = float(s @ z)
        fval = 0.5 * x @ Q @ x + c @ x
        pres = max(np.abs(ry).max(initial=0.0) / b_norm, np.abs(rz).max(initial=0.0) / h_norm)
        dres = np.abs(rx).max(initial=0.0) / c_norm
        resid = max(pres, dres, gap / (1.0 + abs(fval)))
        if not np.isfinite(resid):
            break
        if best is None or resid < best[0]:
            best = (resid, x.copy(), y.copy(), z.copy(), it)
        if resid <= tol:
            return _IpmResult(Status.OPTIMAL, x, y, z, it, resid)
        if best[0] <= OPTIMAL_TOL and resid > 10.0 * best[0]:
            # accurate enough already and the directions have lost precision
            break
        if it == max_iter:
            break
        if np.abs(x).max(initial=0.0) > _X_DIVERGENCE or np.abs(z).max(initial=0.0) > _DIVERGENCE:
            return result(Status.ITER_LIMIT, it, resid, diverged=True)

        # scaling: W (block diagonal), lam = W z = W^-T s
        w_lp = np.sqrt(s[:m] / z[:m])
        lam = np.empty(mi)
        lam[:m] = np.sqrt(s[:m] * z[:m])
        W2 = np.zeros((mi, mi))
        W2[np.arange(m), np.arange(m)] = s[:m] / z[:m]
        if p:
            W_soc, Winv_soc, lam[m:] = _soc_nt(s[m:], z[m:])
            W2[m:, m:] = W_soc @ W_soc
        else:
            W_soc = np.zeros((0, 0))

        def W_apply(u):
            out = np.empty_like(u)
            out[:m] = w_lp * u[:m]
            out[m:] = W_soc @ u[m:]
            return out

        def Winv_apply(u):
            out = np.empty_like(u)
            out[:m] = u[:m] / w_lp
            if p:
                out[m:] = Winv_soc @ u[m:]
            return out

        try:
            lu = None
            for reg in _REGULARIZATION:
                lu = _factor(Q, A, G, W2, reg)
                if lu is not None:
                    break
        except _Breakdown:
            return result(Status.ITER_LIMIT, it, resid, diverged=True)
        if lu is None:
            return result(Status.NUMERIC_FAILURE, it, resid)

        def kkt_solve(bx, by, bz, bs):
            """Q dx + A'dy + G'dz = bx, A dx = by, G dx + ds = bz, W^-1 ds + W dz = bs."""
            rhs = np.concatenate([bx, by, bz - W_apply(bs)])
            if not np.all(np.isfinite(rhs)):
                raise _Breakdown("non-finite Newton right-hand side")
            sol = sla.lu_solve(lu, rhs, check_finite=False)
            dx, dy, dz = sol[:n], sol[n:n + me], sol[n + me:]
            ds = bz - G @ dx
            return dx, dy, ds, dz

        def newton(rc):
            """Step with lam o (W^-1 ds + W dz) = rc, refined against the unreduced system."""
            bx, by, bz, bs = -rx, -ry, -rz, cone.div(lam, rc)
            dx, dy, ds, dz = kkt_solve(bx, by, bz, bs)
            for _ in range(_REFINE_STEPS):
                ex = bx - (Q @ dx + A.T @ dy + G.T @ dz)
                ey = by - A @ dx
                ez = bz - (G @ dx + ds)
                es = bs - (Winv_apply(ds) + W_apply(dz))
                cx, cy, cs, cz = kkt_solve(ex, ey, ez, es)
                dx, dy, ds, dz = dx + cx, dy + cy, ds + cs, dz + cz
            return dx, dy, ds, dz

        try:
            mu = gap / nu if nu else 0.0
            lam_sq = cone.prod(lam, lam)
            dx, dy, ds, dz = newton(-lam_sq)
            a_aff = min(1.0, cone.max_step(s, ds), cone.max_step(z, dz))
            sigma = (1.0 - a_aff) ** 3
            corr = cone.prod(Winv_apply(ds), W_apply(dz))
            dx, dy, ds, dz = newton(-lam_sq - corr + sigma * mu * e)
        except _Breakdown:
            return result(Status.ITER_LIMIT, it, resid, diverged=True)
        if not np.all(np.isfinite(dx)):
            return result(Status.ITER_LIMIT, it, resid, diverged=True)
        step = min(1.0, 0.99 * min(cone.max_step(s, ds), cone.max_step(z, dz)))
        if step < 1e-12:
            stalls += 1
            if stalls > 3:
                break
        x = x + step * dx
        y = y + step * dy
        s = s + step * ds
        z = z + step * dz
        if not (cone.interior(s) and cone.interior(z)):
            break

    if best is None:
        return result(Status.NUMERIC_FAILURE, 0, np.inf)
    resid, x, y, z, it = best
    return result(Status.ITER_LIMIT, it, resid)


def _phase1(sc: _Scaled, max_iter: int):
    """Minimise the largest inequality violation plus total equality violation.

    Every orthant row and the cone's radius are relaxed by the same t >= 0;
    equality rows get elastic variables.  Returns (optimal value, result).
    """
    n, me, mi = sc.c.size, sc.A.shape[0], sc.G.shape[0]
    m = sc.cone.m
    nv = n + 1 + 2 * me
    t = n
    c = np.zeros(nv)
    c[t:] = 1.0
    A = np.hstack([sc.A, np.zeros((me, 1)), np.eye(me), -np.eye(me)])
    relax = np.zeros((mi, 1))
    relax[:m] = -1.0
    if sc.cone.p:
        relax[m] = -1.0
    G_rows = np.hstack([sc.G, relax, np.zeros((mi, 2 * me))])
    nonneg = -np.eye(nv)[n:]
    G = np.vstack([G_rows[:m], nonneg, G_rows[m:]])
    h = np.concatenate([sc.h[:m], np.zeros(nv - n), sc.h[m:]])
    cone = _Cone(m + nv - n, sc.cone.p)
    x0 = np.zeros(nv)
    x0[:n] = sc.x0
    viol = [0.0]
    if m:
        viol.append(np.max(sc.G[:m] @ sc.x0 - sc.h[:m]))
    x0[t] = max(viol) + 1.0
    r = sc.b - sc.A @ sc.x0
    x0[n + 1:n + 1 + me] = np.maximum(r, 0.0) + 1.0
    x0[n + 1 + me:] = np.maximum(-r, 0.0) + 1.0
    res = _ipm(np.zeros((nv, nv)), c, A, sc.b, G, h, cone, x0, max_iter)
    return float(c @ res.x), res


def check_feasible(p: ConvexProgram, max_iter: int = DEFAULT_MAX_ITER) -> Feasibility:
    """Phase-1 feasibility verdict; makes no optimality claim."""
    sc = _standardize(p)
    if sc.A.shape[0] == 0 and sc.G.shape[0] == 0:
        return Feasibility.FEASIBLE
    slack, res = _phase1(sc, max_iter)
    if not np.isfinite(slack):
        return Feasibility.NUMERIC_FAILURE
    if slack > INFEASIBLE_SLACK:
        if res.status is Status.OPTIMAL or res.residual < 1e-6:
            return Feasibility.INFEASIBLE
        return Feasibility.NUMERIC_FAILURE
    return Feasibility.FEASIBLE


def solve(p: ConvexProgram, max_iter: int = DEFAULT_MAX_ITER) -> ProgramSolution:
    sc = _standardize(p)
    res = _ipm(sc.Q, sc.c, sc.A, sc.b, sc.G, sc.h, sc.cone, sc.x0, max_iter)
    log.debug("%s: %s after %d iterations (residual %.2e)", p.name, res.status.value,
              res.iterations, res.residual)
    if res.status is Status.OPTIMAL:
        m, k = sc.cone.m, sc.n_in_user
        y = res.y * sc.eq_scale / sc.obj_scale
        lam = res.z[:m] * sc.in_scale / sc.obj_scale
        lb_d = np.zeros(p.n)
        ub_d = np.zeros(p.n)
        lb_d[sc.lb_rows] = lam[k:k + sc.lb_rows.size]
        ub_d[sc.ub_rows] = lam[k + sc.lb_rows.size:]
        ball_dual = 0.0
        if sc.cone.p:
            # multiplier of the squared form ||x[S] - center||^2 <= radius_sq
            ball_dual = res.z[m] * sc.soc_scale / sc.obj_scale / (2.0 * np.sqrt(p.ball.radius_sq))
        return ProgramSolution(Status.OPTIMAL, res.x, p.objective(res.x),
                               eq_duals=y[:sc.n_eq_user], in_duals=lam[:k], lb_duals=lb_d,
                               ub_duals=ub_d, ball_dual=float(ball_dual),
                               iterations=res.iterations, kkt_residual=res.residual)

    verdict = check_feasible(p, max_iter)
    if verdict is Feasibility.INFEASIBLE:
        status = Status.INFEASIBLE
    elif verdict is Feasibility.NUMERIC_FAILURE:
        status = Status.NUMERIC_FAILURE
    elif res.diverged and np.abs(res.x).max(initial=0.0) > _X_DIVERGENCE:
        status = Status.UNBOUNDED
    elif res.status is Status.NUMERIC_FAILURE:
        status = Status.NUMERIC_FAILURE
    else:
        status = Status.ITER_LIMIT
    return ProgramSolution(status, res.x, np.nan, iterations=res.iterations,
                           kkt_residual=res.residual)


def dump_program(p: ConvexProgram, path) -> Path:
    """Write ``p`` as plain text: one section per block, one row per line."""
    path = Path(path)
    fmt = lambda row: " ".join(repr(float(v)) for v in row)  # noqa: E731
    lines = [f"# {p.name} n={p.n} sense={p.sense.value}", f"offset {p.offset!r}", "c " + fmt(p.c)]
    lines += ["Q " + fmt(row) for row in p.Q]
    lines += ["eq " + fmt(row) + " = " + repr(float(rhs)) for row, rhs in zip(p.A_eq, p.b_eq)]
    lines += ["in " + fmt(row) + " <= " + repr(float(rhs)) for row, rhs in zip(p.A_in, p.b_in)]
    lines += ["lb " + fmt(p.lb), "ub " + fmt(p.ub)]
    if p.ball is not None:
        lines.append("ball " + " ".join(str(i) for i in p.ball.indices) + " | "
                     + fmt(p.ball.center) + " <= " + repr(p.ball.radius_sq))
    path.write_text("\n".join(lines) + "\n")
    return path
