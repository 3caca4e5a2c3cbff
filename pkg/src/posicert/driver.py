"""Search orchestration: scan the multiplier exponent, run prechecks, and
drive the numeric-then-exact certification pipeline.

For each candidate exponent the driver builds the coefficient-matching
system, solves the margin SDP, and on numerical feasibility rounds the
interior point to an exactly verified rational certificate.  Exact parity or
support obstructions skip the solve.  Numerical verdicts are reported as
evidence only; the only claims made are exactly verified certificates and
exact infeasibility flags.

Targets whose optimal margin is zero (the target has real zeros) cannot be
rounded from the interior.  For those the driver restricts the Gram unknowns
to the orthogonal complement of a rationalized numerical kernel and retries;
the end result is still checked by exact verification, so a wrong kernel
guess can only lead to "not certified", never to a wrong certificate.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import ratlin, sdp
from .exact import (
    Certificate,
    InconsistentSystemError,
    certificate_from_gram,
    correction_norm,
    project_to_constraints,
    round_to_rational,
    verify_certificate,
)
from .gram import (
    GramSystem,
    ParityInfeasible,
    SupportInfeasible,
    build_gram_system,
    build_reduced_system,
)
from .parsing import ProblemSpec
from .poly import Grading, Polynomial

DEFAULT_DENOMINATOR_BOUNDS = (10**2, 10**4, 10**8, 10**12)
TIGHT_GAP_TOLERANCE = 1e-10
KERNEL_EIGENVALUE_CUT = 1e-5
KERNEL_ROUNDING_DENOMINATORS = (8, 64, 1024)

# scan record statuses
PARITY_INFEASIBLE = "parity_infeasible"
SUPPORT_INFEASIBLE = "support_infeasible"
MARGIN_NEGATIVE = "margin_negative"
CERTIFIED = "certified"
ROUNDING_FAILED = "rounding_failed"
BORDERLINE = "borderline"
MAX_ITERATIONS = "max_iterations"

OUTCOME_CERTIFICATE = "certificate"
OUTCOME_NOT_FOUND = "not_found"
OUTCOME_UNKNOWN = "unknown"
OUTCOME_REJECTED = "rejected"


class NumericalFailureError(RuntimeError):
    """The SDP solver broke down; the scan cannot honestly continue."""


@dataclass
class SearchOptions:
    gap_tolerance: float = 1e-8
    denominator_bounds: tuple = DEFAULT_DENOMINATOR_BOUNDS
    max_iterations: int = 100
    threads: int = 1


@dataclass(frozen=True)
class ScanRecord:
    exponent: int  # the multiplier power n, or the odd power m
    status: str
    t_star: Optional[float] = None
    rounding_attempts: int = 0
    note: str = ""


@dataclass
class SearchReport:
    mode: str
    records: list
    outcome: str
    certificate: Optional[Certificate]
    bound: int
    unresolved: list = field(default_factory=list)  # exponents left undecided
    epsilon: Optional[Fraction] = None
    epsilon_exponent: Optional[int] = None
    warnings: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# SDP assembly
# ---------------------------------------------------------------------------


def system_to_sdp(
    system: GramSystem,
    *,
    margin: bool = True,
    extra_columns: Sequence = (),
    row_indices: Optional[Sequence[int]] = None,
) -> sdp.SdpProblem:
    """Pose the matching system as a block SDP.

    With margin=True a free scalar t is added with Q = X + t*I, i.e. the
    constraint coefficient of t is <A_k, I>, and t is the objective.  Extra
    free columns (e.g. a linear margin parameter) follow t; without the
    margin the first extra column is the objective.
    """
    active = system.active_indices
    dims = tuple(system.block_dim(b) for b in active)
    position = {b: i for i, b in enumerate(active)}
    rows = list(row_indices) if row_indices is not None else list(system.independent)
    m = len(rows)
    a_blocks = [np.zeros((m, d, d)) for d in dims]
    b_vec = np.zeros(m)
    p = (1 if margin else 0) + len(extra_columns)
    c_free = np.zeros((m, p))
    for k, row_idx in enumerate(rows):
        con = system.constraints[row_idx]
        b_vec[k] = float(con.rhs)
        for (b, i, j), c in con.coefficients.items():
            tensor = a_blocks[position[b]]
            tensor[k, i, j] += float(c)
            if i != j:
                tensor[k, j, i] += float(c)
        if margin:
            c_free[k, 0] = sum(float(np.trace(a_blocks[t][k])) for t in range(len(dims)))
        for col_idx, column in enumerate(extra_columns):
            c_free[k, (1 if margin else 0) + col_idx] = float(column.get(row_idx, 0.0))
    # row scaling: rescaling each equation leaves the feasible set and the
    # objective untouched but keeps the Schur complement well conditioned
    for k in range(m):
        scale = max(
            [abs(b_vec[k])]
            + [float(np.max(np.abs(t[k]))) for t in a_blocks if t.size]
            + ([float(np.max(np.abs(c_free[k])))] if p else [])
        )
        if scale > 1.0:
            b_vec[k] /= scale
            for t in a_blocks:
                t[k] /= scale
            if p:
                c_free[k] /= scale
    return sdp.SdpProblem(
        block_dims=dims,
        a_blocks=a_blocks,
        c_free=c_free,
        b=b_vec,
        objective_index=0,
    )


def _independent_with_columns(system: GramSystem, columns: Sequence[dict]):
    """Independent consistent rows when extra free columns join the system."""
    nq = len(system.unknown_layout)
    rows = []
    for k in range(len(system.constraints)):
        row = system.row_sparse(k)
        for ci, col in enumerate(columns):
            v = col.get(k, Fraction(0))
            if v:
                row[nq + ci] = v
        rows.append(row)
    rhs = [c.rhs for c in system.constraints]
    return ratlin.row_reduce(rows, rhs)


def _gram_float(system: GramSystem, solution: sdp.SdpSolution, shift: float) -> dict:
    """Q = X + shift*I per active block, as float matrices."""
    out = {}
    for pos, b in enumerate(system.active_indices):
        out[b] = solution.x_blocks[pos] + shift * np.eye(system.block_dim(b))
    return out


# ---------------------------------------------------------------------------
# exact phase: rounding ladder, kernel restriction fallback
# ---------------------------------------------------------------------------


def _rationalize_rows(matrix: np.ndarray):
    """Canonical rational form of a numerical row space.

    Numerical RREF removes the basis ambiguity of the subspace; the reduced
    entries are then rounded with escalating denominators and accepted only
    if the rounding error stays small.
    """
    a = np.array(matrix, dtype=float)
    n_rows, n_cols = a.shape
    r = 0
    for c in range(n_cols):
        if r >= n_rows:
            break
        pivot = r + int(np.argmax(np.abs(a[r:, c])))
        if abs(a[pivot, c]) < 1e-7:
            continue
        a[[r, pivot]] = a[[pivot, r]]
        a[r] = a[r] / a[r, c]
        for other in range(n_rows):
            if other != r:
                a[other] = a[other] - a[other, c] * a[r]
        r += 1
    a = a[:r]
    # the subspace itself carries the solver's convergence noise, so accept a
    # loose match: a wrong guess only wastes an attempt, the reduced system
    # and the final verification are exact
    for bound in KERNEL_ROUNDING_DENOMINATORS:
        rat = [[Fraction(float(x)).limit_denominator(bound) for x in row] for row in a]
        err = max(
            (abs(float(rat[i][j]) - a[i, j]) for i in range(len(rat)) for j in range(n_cols)),
            default=0.0,
        )
        if err < 1e-3:
            return rat
    return None


def _kernel_generators(system: GramSystem, q_float: dict) -> Optional[dict]:
    """Per-block generators spanning the complement of the numerical kernel.

    Returns None when no block has a detectable kernel or when the kernel
    does not rationalize cleanly.
    """
    reduced = {}
    found = False
    for b in system.active_indices:
        q = np.asarray(q_float[b], dtype=float)
        w, v = np.linalg.eigh((q + q.T) / 2.0)
        scale = max(1.0, float(w[-1]) if len(w) else 1.0)
        cut = KERNEL_EIGENVALUE_CUT * scale
        small = [i for i, val in enumerate(w) if val < cut]
        if not small:
            continue
        if len(small) == len(w):
            return None
        kernel_rows = _rationalize_rows(v[:, small].T)
        if kernel_rows is None:
            return None
        sparse = [
            {i: val for i, val in enumerate(row) if val} for row in kernel_rows
        ]
        complement = ratlin.nullspace(sparse, q.shape[0])
        if len(complement) != len(w) - len(kernel_rows):
            return None
        gens_old = system.generators[b]
        new_gens = []
        for vec in complement:
            p = Polynomial.zero(system.n_vars)
            for coeff, gen in zip(vec, gens_old):
                if coeff:
                    p = p + coeff * gen
            new_gens.append(p)
        reduced[b] = tuple(new_gens)
        found = True
    return reduced if found else None


def _round_and_certify(system, q_float, bounds, meta, margin_value):
    """The rounding ladder: round, project, LDL', verify; escalate bounds."""
    attempts = 0
    for bound in bounds:
        attempts += 1
        q_rat = {b: round_to_rational(q_float[b], bound) for b in system.active_indices}
        try:
            q_proj = project_to_constraints(q_rat, system)
        except InconsistentSystemError as exc:
            return None, attempts, f"projection failed: {exc}"
        cert = certificate_from_gram(
            system,
            q_proj,
            margin=margin_value,
            denominator_bound=bound,
            **meta,
        )
        if cert is not None:
            result = verify_certificate(cert)
            if not result.valid:  # construction bug, not an input condition
                raise AssertionError(f"assembled certificate failed verification: {result.reason}")
            return cert, attempts, ""
        # When the correction exceeds half the margin the rounding was too
        # coarse for the interior argument; finer bounds shrink it.
        if margin_value and margin_value > 0:
            if correction_norm(q_rat, q_proj, system) > margin_value / 2:
                continue
    return None, attempts, "not PSD at any denominator bound"


def _exact_phase(system: GramSystem, q_float: dict, t_star: float, options: SearchOptions, meta: dict):
    cert, attempts, note = _round_and_certify(
        system, q_float, options.denominator_bounds, meta, t_star
    )
    if cert is not None:
        return cert, attempts, note

    reduced_gens = _kernel_generators(system, q_float)
    if reduced_gens is None:
        return None, attempts, note
    reduced = build_reduced_system(system, reduced_gens)
    if not isinstance(reduced, GramSystem):
        return None, attempts, f"{note}; kernel restriction infeasible"
    problem = system_to_sdp(reduced, margin=True)
    solution = sdp.solve(problem, options.gap_tolerance, options.max_iterations)
    if solution.status != sdp.MARGIN_FEASIBLE:
        return None, attempts, f"{note}; kernel-restricted margin {solution.t_star:.2e}"
    rq_float = _gram_float(reduced, solution, solution.t_star)
    cert, more, note2 = _round_and_certify(
        reduced, rq_float, options.denominator_bounds, meta, solution.t_star
    )
    attempts += more
    if cert is not None:
        return cert, attempts, "kernel-restricted"
    return None, attempts, f"{note}; kernel-restricted rounding failed: {note2}"


# ---------------------------------------------------------------------------
# one exponent attempt
# ---------------------------------------------------------------------------


def _attempt(
    f: Polynomial,
    g: Polynomial,
    constraints,
    grading: Grading,
    variables,
    exponent: int,
    options: SearchOptions,
):
    """Build, solve, and (when numerically feasible) exactly certify one n."""
    meta = dict(variables=variables, f=f, g=g, constraints=constraints, n=exponent)
    system = build_gram_system(f, g, exponent, constraints, grading)
    if isinstance(system, ParityInfeasible):
        return ScanRecord(exponent, PARITY_INFEASIBLE, note=system.reason), None
    if isinstance(system, SupportInfeasible):
        return ScanRecord(exponent, SUPPORT_INFEASIBLE, note=system.reason), None

    problem = system_to_sdp(system)
    solution = sdp.solve(problem, options.gap_tolerance, options.max_iterations)
    if solution.status == sdp.NUMERICAL_FAILURE:
        raise NumericalFailureError(f"SDP solver failed at exponent {exponent}")
    if solution.status == sdp.BORDERLINE:
        tightened = sdp.solve(problem, TIGHT_GAP_TOLERANCE, options.max_iterations)
        if tightened.converged:
            solution = tightened

    if solution.status == sdp.MARGIN_NEGATIVE:
        return ScanRecord(exponent, MARGIN_NEGATIVE, t_star=solution.t_star), None

    note_prefix = ""
    if solution.status == sdp.MAX_ITERATIONS:
        if solution.gap > 1e-4:
            return ScanRecord(
                exponent, MAX_ITERATIONS, t_star=solution.t_star, note="no usable iterate"
            ), None
        note_prefix = "weakly converged; "

    # margin_feasible, borderline, or a usable max_iterations iterate: round.
    shift = solution.t_star if solution.status == sdp.MARGIN_FEASIBLE else max(solution.t_star, 0.0)
    q_float = _gram_float(system, solution, shift)
    cert, attempts, note = _exact_phase(system, q_float, solution.t_star, options, meta)
    if cert is not None:
        return (
            ScanRecord(
                exponent,
                CERTIFIED,
                t_star=solution.t_star,
                rounding_attempts=attempts,
                note=note_prefix + note,
            ),
            cert,
        )
    failed_status = BORDERLINE if solution.status == sdp.BORDERLINE else ROUNDING_FAILED
    return (
        ScanRecord(
            exponent,
            failed_status,
            t_star=solution.t_star,
            rounding_attempts=attempts,
            note=note_prefix + note,
        ),
        None,
    )


def _finish_report(mode, results, bound, warnings):
    """Join-then-select: the outcome is the smallest certified exponent."""
    certified_at = next((i for i, (_, cert) in enumerate(results) if cert is not None), None)
    if certified_at is not None:
        results = results[: certified_at + 1]
    records = [rec for rec, _ in results]
    certificate = results[certified_at][1] if certified_at is not None else None
    unresolved = [
        rec.exponent
        for rec in records
        if rec.status in (BORDERLINE, ROUNDING_FAILED, MAX_ITERATIONS)
    ]
    if certificate is not None:
        outcome = OUTCOME_CERTIFICATE
    elif unresolved:
        outcome = OUTCOME_UNKNOWN
    else:
        outcome = OUTCOME_NOT_FOUND
    return SearchReport(
        mode=mode,
        records=records,
        outcome=outcome,
        certificate=certificate,
        bound=bound,
        unresolved=unresolved,
        warnings=warnings,
    )


# ---------------------------------------------------------------------------
# public search operations
# ---------------------------------------------------------------------------


def certify(spec: ProblemSpec, options: Optional[SearchOptions] = None) -> SearchReport:
    """Scan n = 0, 1, ..., n_max for an exactly certified f*g^n identity.

    check-sos mode is the same scan pinned to n = 0 with no constraints.
    Both parities are scanned; parity-infeasible n are skipped by the exact
    degree bookkeeping, not by assumption.
    """
    options = options or SearchOptions()
    if spec.mode == "check-sos":
        constraints, ns, mode = (), [0], "check-sos"
    else:
        constraints, ns, mode = spec.constraints, list(range(spec.n_max + 1)), "certify"
    warnings = []
    if spec.f.is_zero():
        empty = Certificate(
            variables=spec.variables,
            grading=spec.grading,
            f=spec.f,
            g=spec.g,
            constraints=constraints,
            n=0,
            blocks=(),
        )
        return SearchReport(mode, [ScanRecord(0, CERTIFIED, note="zero target")],
                            OUTCOME_CERTIFICATE, empty, bound=ns[-1], warnings=warnings)
    if not spec.g.is_zero() and spec.g.total_degree() == 0 and len(ns) > 1:
        warnings.append("g is constant: higher powers only rescale the target, scanning n = 0 only")
        ns = [0]

    def attempt(n):
        return _attempt(spec.f, spec.g, constraints, spec.grading, spec.variables, n, options)

    if options.threads > 1 and len(ns) > 1:
        with ThreadPoolExecutor(max_workers=options.threads) as pool:
            results = list(pool.map(attempt, ns))
    else:
        results = []
        for n in ns:
            rec, cert = attempt(n)
            results.append((rec, cert))
            if cert is not None:
                break
    return _finish_report(mode, results, ns[-1], warnings)


def odd_power(spec: ProblemSpec, options: Optional[SearchOptions] = None) -> SearchReport:
    """Scan odd powers m = 1, 3, ... of f for a plain sum-of-squares identity."""
    options = options or SearchOptions()
    if spec.m_max < 1 or spec.m_max % 2 == 0:
        raise ValueError("m_max must be an odd positive integer")
    one = Polynomial.one(len(spec.variables))
    results = []
    for m in range(1, spec.m_max + 1, 2):
        rec, cert = _attempt(
            spec.f**m, one, (), spec.grading, spec.variables, 0, options
        )
        rec = replace(rec, exponent=m)
        if cert is not None:
            cert = replace(cert, f=spec.f, g=spec.f, n=m - 1)
            check = verify_certificate(cert)
            if not check.valid:
                raise AssertionError(f"odd-power certificate failed re-verification: {check.reason}")
        results.append((rec, cert))
        if cert is not None:
            break
    return _finish_report("odd-power", results, spec.m_max, [])


def epsilon_margin(spec: ProblemSpec, options: Optional[SearchOptions] = None) -> SearchReport:
    """Maximize e with g^n*(g*f - e*h^2) certifiable; certify a shrunk value.

    The optimal e of the numeric stage is shrunk by 3/4, rationalized, and
    then pushed through the ordinary exact pipeline; the best exactly
    certified (e, n) wins.  Smaller e stays representable because the freed
    term e*g^n*h^2 is itself a sum of squares.
    """
    options = options or SearchOptions()
    if spec.h_margin is None:
        raise ValueError("epsilon-margin mode requires h_margin")
    if spec.h_margin.is_zero():
        return SearchReport(
            mode="epsilon-margin",
            records=[],
            outcome=OUTCOME_REJECTED,
            certificate=None,
            bound=spec.n_max,
            warnings=["h_margin is zero: the margin constraint is vacuous and epsilon unbounded"],
        )
    one = Polynomial.one(len(spec.variables))
    h_sq = spec.h_margin * spec.h_margin
    records = []
    best = None
    for n in range(spec.n_max + 1):
        target = spec.f * spec.g ** (n + 1)
        system = build_gram_system(target, one, 0, (), spec.grading)
        if isinstance(system, ParityInfeasible):
            records.append(ScanRecord(n, PARITY_INFEASIBLE, note=system.reason))
            continue
        if isinstance(system, SupportInfeasible):
            records.append(ScanRecord(n, SUPPORT_INFEASIBLE, note=system.reason))
            continue
        eps_poly = spec.g**n * h_sq
        achievable = {c.monomial for c in system.constraints}
        if not set(eps_poly.terms) <= achievable:
            records.append(
                ScanRecord(n, SUPPORT_INFEASIBLE, note="h^2 support not reachable at this degree")
            )
            continue
        column = {
            k: eps_poly.coefficient(con.monomial)
            for k, con in enumerate(system.constraints)
            if eps_poly.coefficient(con.monomial)
        }
        indep, inconsistent = _independent_with_columns(system, [column])
        if inconsistent is not None:
            records.append(ScanRecord(n, SUPPORT_INFEASIBLE, note="system inconsistent with margin column"))
            continue
        problem = system_to_sdp(system, margin=False, extra_columns=[column], row_indices=indep)
        solution = sdp.solve(problem, options.gap_tolerance, options.max_iterations)
        if solution.status == sdp.NUMERICAL_FAILURE:
            raise NumericalFailureError(f"SDP solver failed in epsilon stage at n={n}")
        if not solution.converged:
            records.append(ScanRecord(n, MAX_ITERATIONS, t_star=solution.t_star))
            continue
        eps_star = solution.t_star
        if eps_star <= 10 * options.gap_tolerance:
            records.append(
                ScanRecord(n, MARGIN_NEGATIVE, t_star=eps_star, note="epsilon shrinks to zero")
            )
            continue
        eps_cert = _shrink_rationalize(eps_star)
        if eps_cert <= 0:
            records.append(ScanRecord(n, ROUNDING_FAILED, t_star=eps_star, note="epsilon rationalized to zero"))
            continue
        rec, cert = _attempt(
            spec.g * spec.f - eps_cert * h_sq,
            spec.g,
            (),
            spec.grading,
            spec.variables,
            n,
            options,
        )
        note = f"epsilon* = {eps_star:.3e}, certified epsilon = {eps_cert}"
        rec = replace(rec, note=(rec.note + "; " if rec.note else "") + note)
        records.append(rec)
        if cert is not None and (best is None or eps_cert > best[0]):
            best = (eps_cert, n, cert)
    if best is not None:
        eps_cert, n, cert = best
        return SearchReport(
            mode="epsilon-margin",
            records=records,
            outcome=OUTCOME_CERTIFICATE,
            certificate=cert,
            bound=spec.n_max,
            epsilon=eps_cert,
            epsilon_exponent=n,
        )
    unresolved = [r.exponent for r in records if r.status in (BORDERLINE, ROUNDING_FAILED, MAX_ITERATIONS)]
    return SearchReport(
        mode="epsilon-margin",
        records=records,
        outcome=OUTCOME_UNKNOWN if unresolved else OUTCOME_NOT_FOUND,
        certificate=None,
        bound=spec.n_max,
        unresolved=unresolved,
    )


def _shrink_rationalize(value: float) -> Fraction:
    """3/4 of the value as a rational, preferring small denominators.

    The shrink leaves a quarter of the value as slack, so any rationalization
    inside (0, 0.8*value] is safe; the smallest denominator that stays there
    keeps certificates readable.
    """
    target = 0.75 * value
    for bound in (16, 1024, 10**6, 10**9):
        candidate = Fraction(target).limit_denominator(bound)
        if 0 < candidate <= Fraction(0.8 * value):
            return candidate
    return Fraction(target)


# ---------------------------------------------------------------------------
# positivity precheck
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrecheckResult:
    negative: Optional[tuple]  # (point, which, value) with value < 0
    zero: Optional[tuple]  # (point, which)
    kept: int
    total: int
    warnings: tuple = ()

    @property
    def clean(self) -> bool:
        return self.negative is None and self.zero is None


_GRID_RESOLUTION = {1: 21, 2: 21, 3: 21, 4: 9, 5: 5, 6: 5}


def _grid_points(n_vars: int):
    res = _GRID_RESOLUTION.get(n_vars)
    if res is None:
        return
    from itertools import product as iter_product

    half = (res - 1) // 2
    axis = [Fraction(i - half, half) for i in range(res)]
    for combo in iter_product(axis, repeat=n_vars):
        yield combo


def positivity_precheck(spec: ProblemSpec, samples: int = 1000, seed: int = 0) -> PrecheckResult:
    """Sample for sign violations of f and g on the constraint set.

    Homogeneous inputs are sampled by normalized Gaussian draws (sign on the
    sphere equals sign on rays) plus a deterministic grid on the parameter
    cube; points violating some h_i >= 0 are discarded.  A strictly negative
    value is a genuine counterexample to the search hypothesis; an exact zero
    only violates strictness and the search may still be forced.
    """
    rng = random.Random(seed)
    n = len(spec.variables)
    try:
        graded = spec.f.multidegree(spec.grading) is not None
    except ValueError:
        graded = False

    points = []
    for _ in range(samples):
        vec = [Fraction(rng.gauss(0.0, 1.0)).limit_denominator(10**4) for _ in range(n)]
        if all(v == 0 for v in vec):
            continue
        points.append(tuple(vec))
        if not graded:
            points.append(tuple(v / 4 for v in vec))
            points.append(tuple(4 * v for v in vec))
    points.extend(_grid_points(n))

    negative = None
    zero = None
    kept = 0
    total = 0
    for point in points:
        total += 1
        if all(v == 0 for v in point):
            continue
        if any(h.evaluate(point) < 0 for h in spec.constraints):
            continue
        kept += 1
        for which, poly in (("f", spec.f), ("g", spec.g)):
            value = poly.evaluate(point)
            if value < 0:
                if negative is None:
                    negative = (point, which, value)
            elif value == 0 and zero is None:
                zero = (point, which)
        if negative is not None:
            break
    warnings = ()
    if kept == 0:
        warnings = ("no sample point satisfies every constraint: the feasible set may be thin",)
    return PrecheckResult(negative=negative, zero=zero, kept=kept, total=total, warnings=warnings)


# ---------------------------------------------------------------------------
# reporting
# ---------------------------------------------------------------------------


def render_report(report: SearchReport, exponent_name: str = "n") -> str:
    lines = [f"mode: {report.mode}"]
    for w in report.warnings:
        lines.append(f"warning: {w}")
    for rec in report.records:
        bits = [f"{exponent_name}={rec.exponent}: {rec.status.replace('_', ' ')}"]
        if rec.t_star is not None:
            bits.append(f"t*={rec.t_star:.6e}")
        if rec.rounding_attempts:
            bits.append(f"rounding attempts={rec.rounding_attempts}")
        if rec.note:
            bits.append(rec.note)
        lines.append("  " + ", ".join(bits))
    if report.outcome == OUTCOME_CERTIFICATE:
        cert = report.certificate
        if report.epsilon is not None:
            lines.append(
                f"outcome: certified epsilon = {report.epsilon} at {exponent_name} = {report.epsilon_exponent}"
            )
        else:
            lines.append(f"outcome: exact certificate at {exponent_name} = {cert.n}")
    elif report.outcome == OUTCOME_NOT_FOUND:
        lines.append(
            f"outcome: not found up to {exponent_name} = {report.bound} (numerical evidence only, not a nonexistence proof)"
        )
    elif report.outcome == OUTCOME_REJECTED:
        lines.append("outcome: rejected")
    else:
        lines.append(f"outcome: unknown (undecided at {exponent_name} in {report.unresolved})")
    return "\n".join(lines)
