"""Brute-force reference solvers used only by the tests.

Nothing here imports the package's solver or model builders, so agreement
between the two is meaningful.
"""

from itertools import combinations

import numpy as np


def lp_by_vertices(c, G, h, A=None, b=None, tol=1e-9):
    """min c'x s.t. Gx <= h, Ax = b by enumerating every basic feasible point.

    Assumes the feasible set is a polytope (bounded).  Returns ``(value, x)``,
    or ``(inf, None)`` when no vertex is feasible.
    """
    c = np.asarray(c, float)
    G = np.asarray(G, float)
    h = np.asarray(h, float)
    n = c.size
    A = np.zeros((0, n)) if A is None else np.asarray(A, float).reshape(-1, n)
    b = np.zeros(0) if b is None else np.asarray(b, float)
    k = n - A.shape[0]
    best = (np.inf, None)
    for rows in combinations(range(G.shape[0]), k):
        M = np.vstack([A, G[list(rows)]])
        rhs = np.concatenate([b, h[list(rows)]])
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, rhs)
        if np.all(G @ x <= h + tol) and np.allclose(A @ x, b, atol=tol):
            val = float(c @ x)
            if val < best[0]:
                best = (val, x)
    return best


def qp_by_active_sets(Q, c, G, h, tol=1e-9):
    """min 1/2 x'Qx + c'x s.t. Gx <= h, Q positive definite, by trying every active set."""
    Q = np.asarray(Q, float)
    c = np.asarray(c, float)
    G = np.asarray(G, float)
    h = np.asarray(h, float)
    n, m = c.size, G.shape[0]
    for size in range(min(n, m) + 1):
        for rows in combinations(range(m), size):
            Ga = G[list(rows)]
            K = np.block([[Q, Ga.T], [Ga, np.zeros((size, size))]])
            rhs = np.concatenate([-c, h[list(rows)]])
            try:
                sol = np.linalg.solve(K, rhs)
            except np.linalg.LinAlgError:
                continue
            x, lam = sol[:n], sol[n:]
            if np.all(G @ x <= h + tol) and np.all(lam >= -tol):
                return float(0.5 * x @ Q @ x + c @ x), x
    return np.inf, None


def ball_argmax(c, center, radius_sq):
    """argmax c'x over ||x - center||^2 <= radius_sq."""
    c = np.asarray(c, float)
    return np.asarray(center, float) + np.sqrt(radius_sq) * c / np.linalg.norm(c)


# --- DC-OPF follower values, formulated independently of the package ----------------


def onebus_cost(d):
    """Merit-order cost of the one-bus, two-generator fixture (inf when infeasible)."""
    d = np.asarray(d, float)
    cost = np.where(d <= 1.0, d, 1.0 + 2.0 * (d - 1.0))
    return np.where((d < 0.0) | (d > 2.0), np.inf, cost)


def onebus_cost_range(d):
    """(cheapest, dearest) dispatch cost serving demand d on the one-bus fixture."""
    d = np.asarray(d, float)
    lo = onebus_cost(d)
    hi = np.where(d <= 1.0, 2.0 * d, 2.0 + (d - 1.0))
    hi = np.where((d < 0.0) | (d > 2.0), -np.inf, hi)
    return lo, hi


class TriBusOracle:
    """Vertex enumeration of the 3-bus triangle DC-OPF, vectorised over demand points.

    Buses 1..3 in a triangle with equal susceptance, one generator per bus with
    costs (1, 2, 3), capacity 1, line limits 0.4, demands at buses 2 and 3.
    Flows follow from injections through the PTDF of the triangle: injecting at
    bus i and withdrawing at bus j sends 2/3 on the direct line and 1/3 around.
    Variables are (p1, p2, p3); the balance p1 + p2 + p3 = d2 + d3 fixes one
    degree of freedom, so vertices are the intersections of two active
    inequalities.  Each vertex is affine in the demand vector.
    """

    costs = np.array([1.0, 2.0, 3.0])
    pmax = 1.0
    limit = 0.4

    def __init__(self):
        # Flows on lines (1-2, 1-3, 2-3) for injections at buses 2, 3 with bus 1 as slack:
        # unit injection at bus 2 withdrawn at bus 1 -> f12 = -2/3, f13 = -1/3, f23 = 1/3.
        ptdf = np.array([
            [-2 / 3, -1 / 3],
            [-1 / 3, -2 / 3],
            [1 / 3, -1 / 3],
        ])
        # inequalities in (p, d): rows of  Gp p + Gd d <= h
        Gp, Gd, h = [], [], []
        for i in range(3):
            e = np.zeros(3)
            e[i] = 1.0
            Gp.append(e)
            Gd.append(np.zeros(2))
            h.append(self.pmax)
            Gp.append(-e)
            Gd.append(np.zeros(2))
            h.append(0.0)
        # net injection at buses 2,3 = p[1:] - d
        inj_p = np.array([[0, 1, 0], [0, 0, 1]], float)
        for line in range(3):
            row_p = ptdf[line] @ inj_p
            row_d = -ptdf[line]
            for sgn in (1.0, -1.0):
                Gp.append(sgn * row_p)
                Gd.append(sgn * row_d)
                h.append(self.limit)
        self.Gp, self.Gd, self.h = np.array(Gp), np.array(Gd), np.array(h)

    def cost(self, D):
        """Optimal cost at each row of ``D`` (shape (N, 2)); inf where infeasible."""
        D = np.atleast_2d(np.asarray(D, float))
        best = np.full(D.shape[0], np.inf)
        m = self.h.size
        ones = np.ones(3)
        for i, j in combinations(range(m), 2):
            M = np.vstack([ones, self.Gp[i], self.Gp[j]])
            if abs(np.linalg.det(M)) < 1e-12:
                continue
            Minv = np.linalg.inv(M)
            rhs = np.stack([
                D.sum(axis=1),
                self.h[i] - D @ self.Gd[i],
                self.h[j] - D @ self.Gd[j],
            ], axis=1)
            P = rhs @ Minv.T
            ok = np.all(P @ self.Gp.T + D @ self.Gd.T <= self.h + 1e-9, axis=1)
            val = np.where(ok, P @ self.costs, np.inf)
            best = np.minimum(best, val)
        return best

    def _dual_pieces(self):
        """Dual vertices and extreme rays of the follower LP, by brute-force basis enumeration.

        Dual of  min c'p  s.t.  1'p = sum(D),  Gp p <= h - Gd D  is
        max y sum(D) - lam'(h - Gd D)  s.t.  y 1 - Gp' lam = c,  lam >= 0.
        Each vertex and ray gives a function affine in D.
        """
        if hasattr(self, "_pieces"):
            return self._pieces
        m = self.h.size
        M = np.hstack([np.ones((3, 1)), -self.Gp.T])  # columns: y, lam_1..lam_m
        verts, rays = [], []
        for cols in combinations(range(m + 1), 3):
            B = M[:, list(cols)]
            if abs(np.linalg.det(B)) < 1e-12:
                continue
            v = np.zeros(m + 1)
            v[list(cols)] = np.linalg.solve(B, self.costs)
            if np.all(v[1:] >= -1e-12):
                verts.append(v)
        # rays: M r = 0, lam >= 0, sum(lam) = 1
        N = np.vstack([M, np.concatenate([[0.0], np.ones(m)])])
        rhs = np.array([0.0, 0.0, 0.0, 1.0])
        for cols in combinations(range(m + 1), 4):
            B = N[:, list(cols)]
            if abs(np.linalg.det(B)) < 1e-12:
                continue
            r = np.zeros(m + 1)
            r[list(cols)] = np.linalg.solve(B, rhs)
            if np.all(r[1:] >= -1e-12):
                rays.append(r)

        def affine(v):
            # y*sum(D) - lam'(h - Gd D) = (y*1 + Gd' lam) . D - lam'h
            return np.concatenate([v[0] * np.ones(2) + self.Gd.T @ v[1:], [-v[1:] @ self.h]])

        def unique(rows):
            rows = np.array(rows).reshape(-1, 3)
            return np.unique(np.round(rows, 12), axis=0)

        self._pieces = (unique([affine(v) for v in verts]), unique([affine(r) for r in rays]))
        return self._pieces

    def cost_dual(self, D):
        """Same values as ``cost`` via LP duality: max over dual vertices, inf when a ray is improving."""
        D = np.atleast_2d(np.asarray(D, float))
        V, R = self._dual_pieces()
        val = D @ V[:, :2].T + V[:, 2]
        out = val.max(axis=1)
        if R.size:
            bad = (D @ R[:, :2].T + R[:, 2]).max(axis=1) > 1e-9
            out[bad] = np.inf
        return out

    def max_cost(self, D):
        """Most expensive feasible dispatch at each demand point (-inf where infeasible)."""
        D = np.atleast_2d(np.asarray(D, float))
        worst = np.full(D.shape[0], -np.inf)
        m = self.h.size
        ones = np.ones(3)
        for i, j in combinations(range(m), 2):
            M = np.vstack([ones, self.Gp[i], self.Gp[j]])
            if abs(np.linalg.det(M)) < 1e-12:
                continue
            Minv = np.linalg.inv(M)
            rhs = np.stack([
                D.sum(axis=1),
                self.h[i] - D @ self.Gd[i],
                self.h[j] - D @ self.Gd[j],
            ], axis=1)
            P = rhs @ Minv.T
            ok = np.all(P @ self.Gp.T + D @ self.Gd.T <= self.h + 1e-9, axis=1)
            val = np.where(ok, P @ self.costs, -np.inf)
            worst = np.maximum(worst, val)
        return worst


def grid_bl_optimum_1d(d_tilde, f_tilde, beta, lo, hi, step=1e-4):
    """Closest grid demand to d_tilde whose optimal one-bus cost lies in the band."""
    n = int(round((hi - lo) / step))
    grid = lo + step * np.arange(n + 1)
    cost = onebus_cost(grid)
    ok = np.abs(cost - f_tilde) <= beta + 1e-12
    if not np.any(ok):
        return np.inf, None
    dist = (grid - d_tilde) ** 2
    dist[~ok] = np.inf
    k = int(np.argmin(dist))
    return float(dist[k]), grid[k]


def grid_bl_optimum_2d(oracle, d_tilde, f_tilde, beta, radius, step=1e-3, bounds=None):
    """Closest grid demand (within ``radius`` of d_tilde) whose optimal cost lies in the band.

    The grid is d_tilde + step * (i, j).  ``bounds`` optionally restricts both
    coordinates to ``[lo, hi]``.  Returns ``(squared distance, point)`` or
    ``(inf, None)``.
    """
    d_tilde = np.asarray(d_tilde, float)
    k = int(np.ceil(radius / step))
    offsets = step * np.arange(-k, k + 1)
    best = (np.inf, None)
    for dx in offsets:
        dys = offsets[dx * dx + offsets ** 2 <= radius ** 2 + 1e-15]
        if dys.size == 0:
            continue
        pts = np.column_stack([np.full(dys.size, d_tilde[0] + dx), d_tilde[1] + dys])
        keep = np.ones(dys.size, bool)
        if bounds is not None:
            keep = np.all((pts >= bounds[0]) & (pts <= bounds[1]), axis=1)
        cost = np.full(dys.size, np.inf)
        if keep.any():
            cost[keep] = oracle.cost_dual(pts[keep])
        ok = np.abs(cost - f_tilde) <= beta + 1e-12
        if np.any(ok):
            dist = dx * dx + dys[ok] ** 2
            j = int(np.argmin(dist))
            if dist[j] < best[0]:
                best = (float(dist[j]), pts[ok][j])
    return best
