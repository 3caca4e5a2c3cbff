"""Monomial bases and coefficient-matching systems.

A target polynomial t and the constraint products m_e = h_1^{e_1}...h_r^{e_r}
(e ranging over {0,1}^r) define one symmetric unknown Q^(e) per product via

    t  =  sum_e  (b_e' Q^(e) b_e) * m_e,

where b_e is a column of basis monomials.  Matching the coefficient of every
achievable monomial gives an exact linear system; the numeric layer solves it
under a PSD constraint and the exact layer re-solves it over the rationals.

Blocks whose required basis degree is odd or negative in some grading block
are inactive.  All blocks inactive is a parity obstruction; a target monomial
no product can reach is a support obstruction.  Both are exact infeasibility
certificates and are flagged before any numeric work.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from typing import Mapping, Optional, Sequence

from .poly import Grading, Polynomial, grlex_key
from . import ratlin

MAX_CONSTRAINTS = 16


@dataclass(frozen=True)
class ParityInfeasible:
    """No product block admits a basis of the required (multi)degree."""

    reason: str


@dataclass(frozen=True)
class SupportInfeasible:
    """The target has a monomial no basis product can reach, or the exact
    constraint system is inconsistent."""

    reason: str
    monomial: Optional[tuple] = None


@dataclass(frozen=True)
class GramBlock:
    product_index: tuple  # e in {0,1}^r
    multiplier: Polynomial  # h_1^{e_1} ... h_r^{e_r}
    basis: tuple  # exponent vectors, grlex sorted
    active: bool


@dataclass(frozen=True)
class LinearConstraint:
    monomial: tuple
    coefficients: Mapping  # (block_index, i, j) with i <= j -> Fraction
    rhs: Fraction


class GramSystem:
    """Assembled coefficient-matching system for one target."""

    def __init__(self, target, grading, blocks, generators, constraints, independent):
        self.target: Polynomial = target
        self.grading: Grading = grading
        self.blocks: tuple = blocks  # GramBlock per product index
        self.generators: tuple = generators  # per block: tuple of Polynomial
        self.constraints: tuple = constraints  # LinearConstraint, grlex-descending
        self.independent: tuple = independent  # indices of an independent consistent subset
        self._layout = None

    @property
    def n_vars(self) -> int:
        return self.target.n_vars

    @property
    def active_indices(self) -> list:
        return [i for i, b in enumerate(self.blocks) if b.active]

    def block_dim(self, block_index: int) -> int:
        return len(self.generators[block_index])

    @property
    def unknown_layout(self) -> list:
        """Flattened symmetric unknowns: (block_index, i, j) with i <= j."""
        if self._layout is None:
            layout = []
            for b in self.active_indices:
                d = self.block_dim(b)
                for i in range(d):
                    for j in range(i, d):
                        layout.append((b, i, j))
            self._layout = layout
        return self._layout

    @property
    def unknown_index(self) -> dict:
        return {key: k for k, key in enumerate(self.unknown_layout)}

    def frobenius_weights(self) -> list:
        """Weight of each unknown in the Frobenius norm (off-diagonal twice)."""
        return [Fraction(1) if i == j else Fraction(2) for (_, i, j) in self.unknown_layout]

    def row_sparse(self, k: int) -> dict:
        """Constraint k as a sparse row over the unknown layout.

        Off-diagonal coefficients are doubled: the row encodes
        sum_i c_ii q_ii + 2 sum_{i<j} c_ij q_ij = rhs.
        """
        index = self.unknown_index
        row = {}
        for (b, i, j), c in self.constraints[k].coefficients.items():
            row[index[(b, i, j)]] = c if i == j else 2 * c
        return row

    def flatten(self, matrices: Mapping) -> list:
        """Upper triangles of per-active-block matrices as one vector."""
        vec = []
        for (b, i, j) in self.unknown_layout:
            vec.append(Fraction(matrices[b][i][j]))
        return vec

    def unflatten(self, vector: Sequence) -> dict:
        """Inverse of flatten; returns full symmetric matrices."""
        out = {}
        for b in self.active_indices:
            d = self.block_dim(b)
            out[b] = [[Fraction(0)] * d for _ in range(d)]
        for (b, i, j), v in zip(self.unknown_layout, vector):
            out[b][i][j] = Fraction(v)
            out[b][j][i] = Fraction(v)
        return out


# ---------------------------------------------------------------------------
# bases
# ---------------------------------------------------------------------------


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def _cross_block_monomials(grading: Grading, per_block) -> list:
    n = grading.n_vars
    out = []
    for combo in iter_product(*per_block):
        ev = [0] * n
        for block, exps in zip(grading.blocks, combo):
            for idx, e in zip(block, exps):
                ev[idx] = e
        out.append(tuple(ev))
    return sorted(out, key=grlex_key)


def exact_degree_monomials(grading: Grading, block_degrees: Sequence[int]) -> list:
    """All monomials with the given per-block total degrees, grlex sorted."""
    per_block = [
        list(_compositions(deg, len(block)))
        for block, deg in zip(grading.blocks, block_degrees)
    ]
    return _cross_block_monomials(grading, per_block)


def bounded_degree_monomials(grading: Grading, block_bounds: Sequence[int]) -> list:
    """All monomials with per-block total degree <= the bounds, grlex sorted."""
    per_block = []
    for block, bound in zip(grading.blocks, block_bounds):
        collected = []
        for d in range(bound + 1):
            collected.extend(_compositions(d, len(block)))
        per_block.append(collected)
    return _cross_block_monomials(grading, per_block)


def monomials_up_to(n_vars: int, max_total: int) -> list:
    """All monomials of total degree <= max_total, grlex sorted."""
    out = []
    for d in range(max_total + 1):
        out.extend(_compositions(d, n_vars))
    return sorted(out, key=grlex_key)


def prune_basis(candidates: Sequence[tuple], support) -> tuple:
    """Diagonal-consistency pruning fixpoint.

    Remove b whenever the monomial 2b is absent from the target support and
    is not b_i + b_j for any surviving pair other than (b, b).  Sound because
    a PSD matrix with a forced zero diagonal entry has a zero row.  With
    support=None nothing is pruned.
    """
    basis = list(candidates)
    if support is None:
        return tuple(basis)
    support = frozenset(support)
    while True:
        current = set(basis)
        removable = []
        for b in basis:
            double = tuple(2 * e for e in b)
            if double in support:
                continue
            expressible = False
            for other in basis:
                partner = tuple(d - o for d, o in zip(double, other))
                if any(e < 0 for e in partner):
                    continue
                if partner in current and not (partner == b and other == b):
                    expressible = True
                    break
            if not expressible:
                removable.append(b)
        if not removable:
            return tuple(basis)
        gone = set(removable)
        basis = [b for b in basis if b not in gone]


def monomial_basis(
    n_vars: int,
    grading: Grading,
    target_multidegree: Sequence[int],
    support_hint,
    prune: bool = True,
) -> tuple:
    """Basis of a block whose squares must reach the given even multidegree.

    Candidates are all monomials of per-block degree up to half the target;
    for a homogeneous support the pruning fixpoint cuts them back down to the
    exact-degree slice.
    """
    if any(d < 0 or d % 2 for d in target_multidegree):
        raise ValueError(f"target multidegree {tuple(target_multidegree)} must be even and nonnegative")
    candidates = bounded_degree_monomials(grading, [d // 2 for d in target_multidegree])
    return prune_basis(candidates, support_hint if prune else None)


# ---------------------------------------------------------------------------
# system assembly
# ---------------------------------------------------------------------------


def _assemble(target: Polynomial, grading: Grading, blocks, generators):
    """Shared core: accumulate achievable monomials, check support, reduce."""
    rows = {}
    for b_idx, block in enumerate(blocks):
        if not block.active:
            continue
        gens = generators[b_idx]
        for i in range(len(gens)):
            for j in range(i, len(gens)):
                prod = gens[i] * gens[j] * block.multiplier
                for ev, c in prod.terms.items():
                    bucket = rows.setdefault(ev, {})
                    s = bucket.get((b_idx, i, j), Fraction(0)) + c
                    if s:
                        bucket[(b_idx, i, j)] = s
                    elif (b_idx, i, j) in bucket:
                        del bucket[(b_idx, i, j)]

    for ev in target.terms:
        if ev not in rows or not rows[ev]:
            return SupportInfeasible(
                reason=f"target monomial with exponents {ev} is not achievable by any basis product",
                monomial=ev,
            )

    order = sorted((ev for ev, bucket in rows.items() if bucket), key=grlex_key, reverse=True)
    constraints = tuple(
        LinearConstraint(monomial=ev, coefficients=dict(rows[ev]), rhs=target.coefficient(ev))
        for ev in order
    )
    system = GramSystem(target, grading, tuple(blocks), tuple(generators), constraints, ())

    active = system.active_indices
    monomial_generators = all(
        len(g) == 1 for b in active for g in generators[b]
    )
    if len(active) == 1 and blocks[active[0]].multiplier == Polynomial.one(target.n_vars) and monomial_generators:
        # each unknown appears in exactly one row: rows are independent
        independent = tuple(range(len(constraints)))
    else:
        sparse = [system.row_sparse(k) for k in range(len(constraints))]
        rhs = [c.rhs for c in constraints]
        indep, inconsistent = ratlin.row_reduce(sparse, rhs)
        if inconsistent is not None:
            ev = constraints[inconsistent].monomial
            return SupportInfeasible(
                reason=f"exact constraint system is inconsistent (first at monomial {ev})",
                monomial=ev,
            )
        independent = tuple(indep)
    system.independent = independent
    return system


def build_gram_system(
    f: Polynomial,
    g: Polynomial,
    n: int,
    constraints: Sequence[Polynomial],
    grading: Grading,
    prune: bool = True,
):
    """Build the matching system for f*g^n against the given constraints.

    Returns a GramSystem, or ParityInfeasible / SupportInfeasible.
    """
    r = len(constraints)
    if r > MAX_CONSTRAINTS:
        raise ValueError(f"at most {MAX_CONSTRAINTS} constraints supported, got {r}")
    target = f * g**n
    if target.is_zero():
        raise ValueError("target polynomial is zero")
    n_vars = target.n_vars

    graded = target.multidegree(grading) is not None and all(
        not h.is_zero() and h.multidegree(grading) is not None for h in constraints
    )

    blocks = []
    for e in iter_product((0, 1), repeat=r):
        multiplier = Polynomial.one(n_vars)
        for h, e_i in zip(constraints, e):
            if e_i:
                multiplier = multiplier * h
        if graded:
            need = tuple(
                dt - dm
                for dt, dm in zip(target.multidegree(grading), multiplier.multidegree(grading))
            )
            active = all(d >= 0 and d % 2 == 0 for d in need)
            candidates = (
                exact_degree_monomials(grading, [d // 2 for d in need]) if active else []
            )
        else:
            slack = target.total_degree() - multiplier.total_degree()
            active = slack >= 0
            candidates = monomials_up_to(n_vars, (slack + 1) // 2) if active else []
        blocks.append(
            GramBlock(product_index=e, multiplier=multiplier, basis=tuple(candidates), active=active)
        )

    active_idx = [i for i, b in enumerate(blocks) if b.active]
    if not active_idx:
        kind = "per-block degrees" if graded else "total degrees"
        return ParityInfeasible(
            reason=f"every product block has an odd or negative required basis degree ({kind})"
        )

    # Diagonal pruning is sound only when a single multiplier-one block
    # contributes, so each diagonal entry owns its squared monomial's row.
    only = active_idx[0]
    if (
        prune
        and len(active_idx) == 1
        and blocks[only].multiplier == Polynomial.one(n_vars)
    ):
        pruned = prune_basis(blocks[only].basis, target.support())
        blocks[only] = GramBlock(
            product_index=blocks[only].product_index,
            multiplier=blocks[only].multiplier,
            basis=pruned,
            active=True,
        )

    generators = tuple(
        tuple(Polynomial.monomial(n_vars, ev) for ev in b.basis) for b in blocks
    )
    return _assemble(target, grading, blocks, generators)


def build_reduced_system(system: GramSystem, block_generators: Mapping):
    """Re-pose a system over new per-block generator polynomials.

    Used after a kernel restriction: the generators are rational combinations
    of the original basis monomials.  Blocks absent from the mapping keep
    their monomial generators.
    """
    target = system.target
    n_vars = target.n_vars
    blocks = []
    generators = []
    for b_idx, block in enumerate(system.blocks):
        if not block.active:
            blocks.append(block)
            generators.append(())
            continue
        gens = block_generators.get(b_idx)
        if gens is None:
            gens = system.generators[b_idx]
        gens = tuple(g for g in gens if not g.is_zero())
        support = sorted({ev for g in gens for ev in g.terms}, key=grlex_key)
        blocks.append(
            GramBlock(
                product_index=block.product_index,
                multiplier=block.multiplier,
                basis=tuple(support),
                active=bool(gens),
            )
        )
        generators.append(gens)
    if not any(b.active for b in blocks):
        return ParityInfeasible(reason="kernel restriction removed every generator")
    return _assemble(target, system.grading, blocks, generators)


def reconstruct(system: GramSystem, matrices: Mapping) -> Polynomial:
    """Expand sum_e (b_e' Q^(e) b_e) * m_e exactly for the given matrices."""
    total = Polynomial.zero(system.n_vars)
    for b_idx in system.active_indices:
        gens = system.generators[b_idx]
        d = len(gens)
        q = matrices[b_idx]
        if len(q) != d or any(len(row) != d for row in q):
            raise ValueError(f"matrix for block {b_idx} must be {d}x{d}")
        s = Polynomial.zero(system.n_vars)
        for i in range(d):
            for j in range(d):
                c = Fraction(q[i][j])
                if c:
                    s = s + c * (gens[i] * gens[j])
        total = total + s * system.blocks[b_idx].multiplier
    return total
