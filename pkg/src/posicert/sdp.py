"""Dense primal-dual interior-point solver for block-diagonal SDPs with
free scalar variables.

Solves
    maximize    u[objective_index]
    subject to  sum_b <A_k^b, X^b>  +  c_k . u  =  b_k,   k = 1..m
                X^b PSD,  u free,

by a Nesterov-Todd scaled Mehrotra predictor-corrector iteration from the
infeasible start X = S = I, u = 0, y = 0.  Free variables are carried through
the Schur complement as an augmented system rather than split into 1x1 PSD
blocks.  A solve is single threaded and bitwise deterministic for identical
inputs.

In the margin encoding used by the certificate search the solved X equals
Q - t*I blockwise, where t is the designated free scalar being maximized, so
t* > 0 certifies an interior Gram point and t* < 0 numerical infeasibility.
The solver never classifies the band |t*| <= 10*gap_tolerance; it reports
BORDERLINE and the caller decides.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

MARGIN_FEASIBLE = "margin_feasible"
MARGIN_NEGATIVE = "margin_negative"
BORDERLINE = "borderline"
MAX_ITERATIONS = "max_iterations"
NUMERICAL_FAILURE = "numerical_failure"

STEP_TO_BOUNDARY = 0.98
SCHUR_REGULARIZATION = 1e-12


@dataclass
class SdpProblem:
    block_dims: tuple
    a_blocks: list  # per block: (m, d, d) float array, symmetric slices
    c_free: np.ndarray  # (m, n_free)
    b: np.ndarray  # (m,)
    objective_index: int = 0

    @property
    def n_constraints(self) -> int:
        return int(self.b.shape[0])

    @property
    def n_free(self) -> int:
        return int(self.c_free.shape[1])

    def validate(self) -> None:
        m = self.n_constraints
        if self.c_free.shape[0] != m:
            raise ValueError("c_free row count must match constraint count")
        if len(self.a_blocks) != len(self.block_dims):
            raise ValueError("one constraint tensor per block required")
        for d, tensor in zip(self.block_dims, self.a_blocks):
            if tensor.shape != (m, d, d):
                raise ValueError(f"constraint tensor shape {tensor.shape} != {(m, d, d)}")
            if not np.allclose(tensor, np.transpose(tensor, (0, 2, 1)), atol=1e-12):
                raise ValueError("constraint matrices must be symmetric")
        if self.n_free and not 0 <= self.objective_index < self.n_free:
            raise ValueError("objective index out of range")


@dataclass
class SdpSolution:
    status: str
    t_star: float
    x_blocks: list
    free_values: np.ndarray
    y: np.ndarray
    s_blocks: list
    gap: float
    iterations: int
    # per-iterate (primal obj, dual obj, complementarity, infeasibility slack)
    trace: list = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status in (MARGIN_FEASIBLE, MARGIN_NEGATIVE, BORDERLINE)


def min_eigenvalue(matrix: np.ndarray) -> float:
    """Smallest eigenvalue of a symmetric matrix (LAPACK symmetric solver)."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    if m.shape[0] and np.max(np.abs(m - m.T)) > 1e-12:
        raise ValueError("matrix is not symmetric within 1e-12")
    return float(np.linalg.eigvalsh((m + m.T) / 2.0)[0])


def _boundary_step(blocks: Sequence[np.ndarray], directions: Sequence[np.ndarray]) -> float:
    """Largest alpha with every block + alpha*direction still PSD."""
    alpha = np.inf
    for mat, d in zip(blocks, directions):
        chol = np.linalg.cholesky(mat)
        inv_chol = np.linalg.solve(chol, np.eye(mat.shape[0]))
        scaled = inv_chol @ d @ inv_chol.T
        w = np.linalg.eigvalsh((scaled + scaled.T) / 2.0)[0]
        if w < -1e-14:
            alpha = min(alpha, -1.0 / w)
    return alpha


class _Failure(Exception):
    pass


def solve(problem: SdpProblem, gap_tolerance: float = 1e-8, max_iterations: int = 100) -> SdpSolution:
    """Run the interior-point iteration until the relative duality gap and
    the primal/dual residuals all drop below gap_tolerance."""
    problem.validate()
    dims = problem.block_dims
    m = problem.n_constraints
    p = problem.n_free
    n_total = int(sum(dims))
    at = [np.asarray(t, dtype=float) for t in problem.a_blocks]
    cf = np.asarray(problem.c_free, dtype=float).reshape(m, p)
    b = np.asarray(problem.b, dtype=float)
    # max d.u posed internally as min c_u.u
    c_u = np.zeros(p)
    if p:
        c_u[problem.objective_index] = -1.0

    x = [np.eye(d) for d in dims]
    s = [np.eye(d) for d in dims]
    u = np.zeros(p)
    y = np.zeros(m)
    trace: list = []

    def apply_a(mats) -> np.ndarray:
        out = np.zeros(m)
        for tensor, mat in zip(at, mats):
            out += np.einsum("kij,ij->k", tensor, mat)
        return out

    def apply_a_adjoint(vec) -> list:
        return [np.einsum("k,kij->ij", vec, tensor) for tensor in at]

    status = MAX_ITERATIONS
    iterations = 0
    rel_gap = np.inf
    metrics = None  # (rel_gap, rp_rel, rd_rel, ru_rel) of the latest iterate
    best = None  # (max metric, state) of the best iterate seen
    since_best = 0

    def classify(pobj: float, achieved: float) -> str:
        band = 10.0 * max(gap_tolerance, achieved)
        if pobj > band:
            return MARGIN_FEASIBLE
        if pobj < -band:
            return MARGIN_NEGATIVE
        return BORDERLINE

    try:
        for iteration in range(max_iterations):
            iterations = iteration
            ax = apply_a(x)
            r_p = b - ax - (cf @ u if p else 0.0)
            asty = apply_a_adjoint(y)
            r_d = [-asty[bi] - s[bi] for bi in range(len(dims))]
            r_u = c_u - (cf.T @ y if p else np.zeros(0))

            compl = float(sum(np.vdot(xb, sb) for xb, sb in zip(x, s)))
            pobj = float(u[problem.objective_index]) if p else 0.0
            dobj = float(-(b @ y))
            slack = float(abs(r_u @ u) + abs(y @ r_p)) if p else float(abs(y @ r_p))
            slack += float(sum(abs(np.vdot(xb, rd)) for xb, rd in zip(x, r_d)))
            trace.append((pobj, dobj, compl, slack))

            rel_gap = compl / (1.0 + abs(pobj) + abs(dobj))
            b_scale = 1.0 + (float(np.max(np.abs(b))) if m else 0.0)
            rp_rel = (float(np.max(np.abs(r_p))) if m else 0.0) / b_scale
            rd_rel = float(np.sqrt(sum(np.sum(rd * rd) for rd in r_d)))
            rd_rel /= 1.0 + float(np.sqrt(sum(np.sum(sb * sb) for sb in s)))
            ru_rel = float(np.max(np.abs(r_u))) / 2.0 if p else 0.0

            metrics = (rel_gap, rp_rel, rd_rel, ru_rel)
            if max(metrics) <= gap_tolerance:
                status = classify(pobj, max(metrics))
                break
            if best is None or max(metrics) < 0.5 * best[0]:
                best = (max(metrics), ([xb.copy() for xb in x], u.copy(), y.copy(),
                                       [sb.copy() for sb in s], rel_gap))
                since_best = 0
            else:
                since_best += 1
                if since_best >= 10:
                    raise _Failure("stalled")
            if not np.isfinite(compl) or compl > 1e16 or (p and np.max(np.abs(u)) > 1e14):
                raise _Failure("iterates diverged")

            # Nesterov-Todd scaling per block: W S W = X with W = G G'
            g_mats, g_invs, lams = [], [], []
            for xb, sb in zip(x, s):
                lx = np.linalg.cholesky(xb)
                ls = np.linalg.cholesky(sb)
                _, sig, vt = np.linalg.svd(ls.T @ lx)
                if np.min(sig) <= 0:
                    raise _Failure("scaling point collapsed")
                g_b = lx @ vt.T / np.sqrt(sig)
                g_inv = (np.sqrt(sig)[:, None] * vt) @ np.linalg.solve(lx, np.eye(lx.shape[0]))
                g_mats.append(g_b)
                g_invs.append(g_inv)
                lams.append(sig)

            # Schur complement in Gram form: M = P P' with row k the stacked
            # svec(G' A_k G).  Solving through a QR of P' works at the square
            # root of M's condition number, which is what limits accuracy
            # near the central path's end.
            p_slices = []
            for tensor, g_b in zip(at, g_mats):
                scaled = np.einsum("ji,kjl,lm->kim", g_b, tensor, g_b)
                d = scaled.shape[1]
                iu = np.triu_indices(d)
                weights = np.where(iu[0] == iu[1], 1.0, np.sqrt(2.0))
                p_slices.append(scaled[:, iu[0], iu[1]] * weights)
            p_mat = np.concatenate(p_slices, axis=1) if p_slices else np.zeros((m, 0))

            def schur_matvec(z):
                return p_mat @ (p_mat.T @ z)

            r_factor = np.linalg.qr(p_mat.T, mode="r")
            diag_r = np.abs(np.diag(r_factor))
            if not np.all(np.isfinite(r_factor)):
                raise _Failure("Schur factorization failed")
            if diag_r.size and np.min(diag_r) > 1e-13 * max(1.0, float(np.max(diag_r))):
                def schur_base(rhs):
                    z = np.linalg.solve(r_factor.T, rhs)
                    return np.linalg.solve(r_factor, z)
            else:
                # rank trouble: fall back to a regularized Cholesky, one retry
                schur = schur_matvec(np.eye(m))
                schur = (schur + schur.T) / 2.0
                shift = SCHUR_REGULARIZATION * max(1.0, float(np.max(np.abs(np.diag(schur)))))
                try:
                    chol_l = np.linalg.cholesky(schur + shift * np.eye(m))
                except np.linalg.LinAlgError:
                    raise _Failure("Schur complement factorization failed") from None

                def schur_base(rhs):
                    z = np.linalg.solve(chol_l, rhs)
                    return np.linalg.solve(chol_l.T, z)

            a_w_rd_w = np.zeros(m)
            for p_slice, g_b, rd in zip(p_slices, g_mats, r_d):
                inner = g_b.T @ rd @ g_b
                d = inner.shape[0]
                iu = np.triu_indices(d)
                weights = np.where(iu[0] == iu[1], 1.0, np.sqrt(2.0))
                a_w_rd_w += p_slice @ (inner[iu[0], iu[1]] * weights)

            minv_c = None
            if p:
                minv_c = np.column_stack([schur_base(cf[:, i]) for i in range(p)])

            def aug_solve(rhs_y, rhs_u):
                # [M C; C' 0] [dy; du] = [rhs_y; rhs_u] by block elimination,
                # with refinement against the exact augmented residuals
                def base(ry, ru):
                    minv_h = schur_base(ry)
                    if p:
                        small = cf.T @ minv_c
                        du = np.linalg.solve(small, cf.T @ minv_h - ru)
                        return minv_h - minv_c @ du, du
                    return minv_h, np.zeros(0)

                dy, du = base(rhs_y, rhs_u)
                for _ in range(2):
                    res_y = rhs_y - schur_matvec(dy) - (cf @ du if p else 0.0)
                    res_u = rhs_u - cf.T @ dy if p else np.zeros(0)
                    corr_y, corr_u = base(res_y, res_u)
                    dy = dy + corr_y
                    du = du + corr_u
                return dy, du

            def newton(rc_blocks):
                rhs_y = r_p.copy()
                for tensor, rc in zip(at, rc_blocks):
                    rhs_y -= np.einsum("kij,ij->k", tensor, rc)
                rhs_y += a_w_rd_w
                dy, du = aug_solve(rhs_y, r_u)
                adj = apply_a_adjoint(dy)
                ds = [r_d[bi] - adj[bi] for bi in range(len(dims))]
                dx = []
                for rc, g_b, dsb in zip(rc_blocks, g_mats, ds):
                    cand = rc - g_b @ (g_b.T @ dsb @ g_b) @ g_b.T
                    dx.append((cand + cand.T) / 2.0)
                return dx, du, dy, ds

            # predictor (affine scaling); equal primal/dual steps keep the
            # feasibility residuals and the gap shrinking at the same rate
            rc_aff = [-xb for xb in x]
            dx_a, du_a, dy_a, ds_a = newton(rc_aff)
            alpha_aff = min(1.0, _boundary_step(x, dx_a), _boundary_step(s, ds_a))
            mu = compl / n_total
            mu_aff = sum(
                np.vdot(xb + alpha_aff * dxb, sb + alpha_aff * dsb)
                for xb, dxb, sb, dsb in zip(x, dx_a, s, ds_a)
            ) / n_total
            sigma = float(np.clip((max(mu_aff, 0.0) / mu) ** 3, 0.0, 1.0))

            # corrector in the scaled space, where both variables equal diag(lam)
            rc = []
            for g_b, g_inv, lam, dxb, dsb in zip(g_mats, g_invs, lams, dx_a, ds_a):
                dxh = g_inv @ dxb @ g_inv.T
                dsh = g_b.T @ dsb @ g_b
                rhs = sigma * mu * np.eye(len(lam)) - np.diag(lam * lam)
                rhs -= (dxh @ dsh + dsh @ dxh) / 2.0
                e_mat = 2.0 * rhs / (lam[:, None] + lam[None, :])
                cand = g_b @ e_mat @ g_b.T
                rc.append((cand + cand.T) / 2.0)

            dx, du, dy, ds = newton(rc)
            alpha = min(
                1.0,
                STEP_TO_BOUNDARY * _boundary_step(x, dx),
                STEP_TO_BOUNDARY * _boundary_step(s, ds),
            )

            # validate the step; floating error can push a near-boundary
            # iterate out of the cone, so halve until both factors exist
            for _ in range(30):
                x_new = [xb + alpha * dxb for xb, dxb in zip(x, dx)]
                s_new = [sb + alpha * dsb for sb, dsb in zip(s, ds)]
                try:
                    for mat in x_new + s_new:
                        if not np.all(np.isfinite(mat)):
                            raise np.linalg.LinAlgError("non-finite iterate")
                        np.linalg.cholesky(mat)
                    break
                except np.linalg.LinAlgError:
                    alpha *= 0.5
            else:
                raise _Failure("no admissible step length")
            if alpha < 1e-10:
                raise _Failure("step length collapsed")
            x = x_new
            u = u + alpha * du
            y = y + alpha * dy
            s = s_new
            iterations = iteration + 1
    except (np.linalg.LinAlgError, _Failure):
        # Degenerate optima (zero-margin faces) can break the scaling after
        # the iterates are already essentially converged; classify those
        # rather than failing, the exact layer re-checks everything anyway.
        # A stall with a still-interior iterate is reported as MAX_ITERATIONS
        # so the caller may round from it; only a useless iterate is a failure.
        achieved = max(metrics) if metrics is not None else np.inf
        if best is not None and best[0] < achieved:
            x, u, y, s, rel_gap = best[1]
            achieved = best[0]
        if achieved <= max(1e-6, 100.0 * gap_tolerance):
            pobj = float(u[problem.objective_index]) if p else 0.0
            status = classify(pobj, achieved)
        elif achieved <= 1e-3:
            status = MAX_ITERATIONS
        else:
            status = NUMERICAL_FAILURE

    t_star = float(u[problem.objective_index]) if p else 0.0
    return SdpSolution(
        status=status,
        t_star=t_star,
        x_blocks=x,
        free_values=u,
        y=y,
        s_blocks=s,
        gap=float(rel_gap),
        iterations=iterations,
        trace=trace,
    )


# ---------------------------------------------------------------------------
# debug dump
# ---------------------------------------------------------------------------


def format_debug_dump(problem: SdpProblem) -> str:
    """Plain-text dump of (A_k, b, c), one constraint per record.

    Layout:
        sdp-dump 1
        blocks <d1> <d2> ...
        nfree <p>
        objective <free index>
        constraint <k>
        b <value>
        c <v1> ... <vp>
        A <block> <row> <col> <value>     # upper-triangle nonzeros
        end
    Floats are written with repr so an independent reader recovers them
    bit-exactly.
    """
    lines = ["sdp-dump 1"]
    lines.append("blocks " + " ".join(str(d) for d in problem.block_dims))
    lines.append(f"nfree {problem.n_free}")
    lines.append(f"objective {problem.objective_index}")
    for k in range(problem.n_constraints):
        lines.append(f"constraint {k}")
        lines.append(f"b {float(problem.b[k])!r}")
        if problem.n_free:
            lines.append("c " + " ".join(repr(float(v)) for v in problem.c_free[k]))
        for b_idx, tensor in enumerate(problem.a_blocks):
            mat = tensor[k]
            d = mat.shape[0]
            for i in range(d):
                for j in range(i, d):
                    if mat[i, j] != 0.0:
                        lines.append(f"A {b_idx} {i} {j} {float(mat[i, j])!r}")
        lines.append("end")
    return "\n".join(lines) + "\n"
