"""Exact rational certification: rounding, projection, LDL', verification.

The numeric layer hands over an interior Gram point; this layer rounds it to
rationals, projects back onto the exact affine constraint set, proves
positive semidefiniteness by a rational LDL' factorization, extracts weighted
squares, and re-proves the final polynomial identity from scratch with pure
polynomial arithmetic.  Nothing double-precision survives into a Certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .gram import GramSystem
from .parsing import (
    ParseError,
    format_monomial,
    format_polynomial,
    parse_polynomial,
    read_key_values,
    split_top_level,
    _unquote,
)
from .poly import Grading, Polynomial, grlex_key
from . import ratlin


class InconsistentSystemError(Exception):
    """The affine constraint system admits no solution (defensive check)."""


# ---------------------------------------------------------------------------
# rounding and projection
# ---------------------------------------------------------------------------


def round_to_rational(matrix, denominator_bound: int):
    """Entrywise best rational approximation with bounded denominator.

    The input is symmetrized first; continued-fraction convergents via
    Fraction.limit_denominator give the optimal approximation.
    """
    if denominator_bound < 1:
        raise ValueError("denominator bound must be positive")
    n = len(matrix)
    sym = [[(Fraction(float(matrix[i][j])) + Fraction(float(matrix[j][i]))) / 2 for j in range(n)] for i in range(n)]
    out = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            v = sym[i][j].limit_denominator(denominator_bound)
            out[i][j] = v
            out[j][i] = v
    return out


def project_to_constraints(q_matrices: Mapping, system: GramSystem):
    """Exact Frobenius-orthogonal projection onto the affine solution set.

    q_matrices maps active block index -> symmetric rational matrix.  The
    normal equations of the independent constraint rows are solved exactly;
    the output satisfies every constraint of the system exactly.
    """
    q0 = system.flatten(q_matrices)
    weights = system.frobenius_weights()
    rows = [system.row_sparse(k) for k in system.independent]
    rhs = [system.constraints[k].rhs for k in system.independent]
    m = len(rows)
    if m:
        gram = [[Fraction(0)] * m for _ in range(m)]
        for a in range(m):
            for bb in range(a, m):
                acc = Fraction(0)
                small, large = (rows[a], rows[bb]) if len(rows[a]) <= len(rows[bb]) else (rows[bb], rows[a])
                for col, va in small.items():
                    vb = large.get(col)
                    if vb is not None:
                        acc += va * vb / weights[col]
                gram[a][bb] = acc
                gram[bb][a] = acc
        residual = []
        for row, b in zip(rows, rhs):
            residual.append(b - sum(v * q0[col] for col, v in row.items()))
        try:
            lam = ratlin.solve_dense(gram, residual)
        except ValueError:
            raise InconsistentSystemError("independent constraint rows are degenerate") from None
        q = list(q0)
        for row, l in zip(rows, lam):
            if l:
                for col, v in row.items():
                    q[col] += v * l / weights[col]
    else:
        q = list(q0)

    for k, constraint in enumerate(system.constraints):
        row = system.row_sparse(k)
        if sum(v * q[col] for col, v in row.items()) != constraint.rhs:
            raise InconsistentSystemError(
                f"constraint at monomial {constraint.monomial} cannot be satisfied"
            )
    return system.unflatten(q)


def correction_norm(before: Mapping, after: Mapping, system: GramSystem) -> float:
    """Frobenius norm of the projection correction, as a float."""
    total = Fraction(0)
    for (b, i, j) in system.unknown_layout:
        d = Fraction(after[b][i][j]) - Fraction(before[b][i][j])
        total += (d * d) * (1 if i == j else 2)
    return float(total) ** 0.5


# ---------------------------------------------------------------------------
# rational LDL' and square extraction
# ---------------------------------------------------------------------------


def exact_ldlt(matrix: Sequence[Sequence[Fraction]]):
    """Q = L D L' with unit lower L and D >= 0, or None when Q is not PSD.

    A zero pivot requires its whole remaining column to vanish; a negative
    pivot or a violated zero-pivot column proves indefiniteness.
    """
    n = len(matrix)
    q = [[Fraction(v) for v in row] for row in matrix]
    lower = [[Fraction(0)] * n for _ in range(n)]
    diag = [Fraction(0)] * n
    for j in range(n):
        pivot = q[j][j] - sum(lower[j][k] * lower[j][k] * diag[k] for k in range(j))
        if pivot < 0:
            return None
        lower[j][j] = Fraction(1)
        diag[j] = pivot
        for i in range(j + 1, n):
            off = q[i][j] - sum(lower[i][k] * lower[j][k] * diag[k] for k in range(j))
            if pivot == 0:
                if off != 0:
                    return None
                lower[i][j] = Fraction(0)
            else:
                lower[i][j] = off / pivot
    return lower, diag


@dataclass(frozen=True)
class SquareTerm:
    weight: Fraction
    poly: Polynomial


def combine_squares(lower, diag, generators: Sequence[Polynomial]):
    """Weighted squares D_jj * (sum_i L_ij gen_i)^2 with zero weights dropped."""
    n = len(diag)
    out = []
    for j in range(n):
        if diag[j] == 0:
            continue
        p = Polynomial.zero(generators[0].n_vars)
        for i in range(j, n):
            if lower[i][j]:
                p = p + lower[i][j] * generators[i]
        if not p.is_zero():
            out.append(SquareTerm(weight=Fraction(diag[j]), poly=p))
    return tuple(out)


def extract_sos(lower, diag, basis, n_vars: int):
    """combine_squares over a monomial basis (exponent vectors)."""
    gens = [Polynomial.monomial(n_vars, ev) for ev in basis]
    return combine_squares(lower, diag, gens)


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CertificateBlock:
    product_index: tuple
    basis: tuple  # exponent vectors spanning the squares' support
    squares: tuple  # SquareTerm


@dataclass(frozen=True)
class Certificate:
    """Exact data of an identity  f * g^n = sum_e (sum_j w_j p_j^2) * h^e."""

    variables: tuple
    grading: Grading
    f: Polynomial
    g: Polynomial
    constraints: tuple
    n: int
    blocks: tuple  # CertificateBlock
    margin: Optional[float] = None
    denominator_bound: Optional[int] = None


@dataclass(frozen=True)
class VerifyResult:
    valid: bool
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.valid


def verify_certificate(cert: Certificate) -> VerifyResult:
    """Re-prove the identity from scratch in exact arithmetic.

    Recomputes f*g^n and the weighted-square side with pure polynomial
    operations, checks w_j > 0, and compares term maps.  No numerics.
    """
    n_vars = len(cert.variables)
    for block in cert.blocks:
        if len(block.product_index) != len(cert.constraints):
            return VerifyResult(False, f"product index {block.product_index} has wrong length")
        basis_set = set(block.basis)
        for k, square in enumerate(block.squares):
            if square.weight <= 0:
                return VerifyResult(
                    False,
                    f"nonpositive weight {square.weight} in block e={block.product_index}, square {k}",
                )
            if not set(square.poly.terms) <= basis_set:
                return VerifyResult(
                    False,
                    f"square {k} in block e={block.product_index} leaves the declared basis",
                )

    lhs = cert.f * cert.g**cert.n
    rhs = Polynomial.zero(n_vars)
    for block in cert.blocks:
        s = Polynomial.zero(n_vars)
        for square in block.squares:
            s = s + square.weight * (square.poly * square.poly)
        multiplier = Polynomial.one(n_vars)
        for h, e in zip(cert.constraints, block.product_index):
            if e:
                multiplier = multiplier * h
        rhs = rhs + s * multiplier
    if lhs != rhs:
        diff = lhs - rhs
        ev = sorted(diff.terms, key=grlex_key, reverse=True)[0]
        mono = format_monomial(ev, cert.variables)
        return VerifyResult(
            False,
            f"coefficient mismatch at monomial {mono}: "
            f"target has {lhs.coefficient(ev)}, squares give {rhs.coefficient(ev)}",
        )
    return VerifyResult(True)


def certificate_from_gram(
    system: GramSystem,
    q_matrices: Mapping,
    *,
    variables,
    f: Polynomial,
    g: Polynomial,
    constraints,
    n: int,
    margin: Optional[float] = None,
    denominator_bound: Optional[int] = None,
) -> Optional[Certificate]:
    """LDL' every active block and assemble a Certificate, or None if any
    block matrix is not PSD."""
    cert_blocks = []
    for b_idx in system.active_indices:
        factored = exact_ldlt(q_matrices[b_idx])
        if factored is None:
            return None
        lower, diag = factored
        squares = combine_squares(lower, diag, system.generators[b_idx])
        support = sorted({ev for sq in squares for ev in sq.poly.terms}, key=grlex_key)
        cert_blocks.append(
            CertificateBlock(
                product_index=system.blocks[b_idx].product_index,
                basis=tuple(support),
                squares=squares,
            )
        )
    return Certificate(
        variables=tuple(variables),
        grading=system.grading,
        f=f,
        g=g,
        constraints=tuple(constraints),
        n=n,
        blocks=tuple(cert_blocks),
        margin=margin,
        denominator_bound=denominator_bound,
    )


def lift_certificate(cert: Certificate) -> Certificate:
    """The certificate for f*g^(n+2) obtained by pushing g into every square.

    Multiplying each block sum s_e by the square g^2 distributes as
    (g*p_j)^2, so validity is preserved exactly two exponent steps up.
    """
    lifted_blocks = []
    for block in cert.blocks:
        squares = tuple(
            SquareTerm(weight=sq.weight, poly=sq.poly * cert.g) for sq in block.squares
        )
        support = sorted({ev for sq in squares for ev in sq.poly.terms}, key=grlex_key)
        lifted_blocks.append(
            CertificateBlock(product_index=block.product_index, basis=tuple(support), squares=squares)
        )
    return Certificate(
        variables=cert.variables,
        grading=cert.grading,
        f=cert.f,
        g=cert.g,
        constraints=cert.constraints,
        n=cert.n + 2,
        blocks=tuple(lifted_blocks),
        margin=cert.margin,
        denominator_bound=cert.denominator_bound,
    )


# ---------------------------------------------------------------------------
# certificate files (same key = value dialect as problem files)
# ---------------------------------------------------------------------------


def format_certificate(cert: Certificate) -> str:
    """Serialize with exact p/q coefficients, never decimals.

    Sections: a problem echo, then one block per `e = (...)` line with its
    `basis = [...]` and `squares = [(w, "poly"), ...]` entries.
    """
    names = cert.variables
    lines = ["# posicert certificate"]
    lines.append("vars = " + ", ".join(names))
    groups = " | ".join(", ".join(names[i] for i in block) for block in cert.grading.blocks)
    lines.append(f"blocks = ({groups})")
    lines.append(f'f = "{format_polynomial(cert.f, names)}"')
    lines.append(f'g = "{format_polynomial(cert.g, names)}"')
    lines.append(
        "h = [" + ", ".join(f'"{format_polynomial(h, names)}"' for h in cert.constraints) + "]"
    )
    lines.append(f"N = {cert.n}")
    if cert.margin is not None:
        lines.append(f"margin = {cert.margin!r}")
    if cert.denominator_bound is not None:
        lines.append(f"denominator_bound = {cert.denominator_bound}")
    for block in cert.blocks:
        e_txt = ", ".join(str(e) for e in block.product_index)
        lines.append(f"e = ({e_txt})")
        lines.append("basis = [" + ", ".join(format_monomial(ev, names) for ev in block.basis) + "]")
        squares = ", ".join(
            f'({sq.weight}, "{format_polynomial(sq.poly, names)}")' for sq in block.squares
        )
        lines.append(f"squares = [{squares}]")
    return "\n".join(lines) + "\n"


_CERT_KEYS = {"vars", "blocks", "f", "g", "h", "N", "margin", "denominator_bound", "e", "basis", "squares"}


def _parse_fraction(text: str, context: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{context}: invalid rational {text!r}") from None


def parse_certificate(document: str) -> Certificate:
    """Parse the output of format_certificate."""
    from .parsing import _parse_blocks, _parse_int

    header = {}
    raw_blocks = []  # list of dicts with e/basis/squares
    for key, value, line_no in read_key_values(document):
        if key not in _CERT_KEYS:
            raise ParseError(f"line {line_no}: unknown key {key!r}")
        if key == "e":
            raw_blocks.append({"e": value})
        elif key in ("basis", "squares"):
            if not raw_blocks:
                raise ParseError(f"line {line_no}: {key} before any 'e =' section")
            if key in raw_blocks[-1]:
                raise ParseError(f"line {line_no}: duplicate {key} in block section")
            raw_blocks[-1][key] = value
        else:
            if key in header:
                raise ParseError(f"line {line_no}: duplicate key {key!r}")
            header[key] = value

    for required in ("vars", "f", "g", "N"):
        if required not in header:
            raise ParseError(f"missing {required}")
    names = [n.strip() for n in header["vars"].split(",") if n.strip()]
    grading = (
        _parse_blocks(header["blocks"], names) if "blocks" in header else Grading.single(len(names))
    )
    f = parse_polynomial(_unquote(header["f"]), names)
    g = parse_polynomial(_unquote(header["g"]), names)
    constraints = []
    if "h" in header:
        inner = header["h"].strip()
        if not (inner.startswith("[") and inner.endswith("]")):
            raise ParseError("h: expected a bracketed list")
        body = inner[1:-1].strip()
        if body:
            constraints = [parse_polynomial(_unquote(s), names) for s in split_top_level(body)]
    n = _parse_int(header["N"], "N")
    margin = float(header["margin"]) if "margin" in header else None
    denominator_bound = (
        _parse_int(header["denominator_bound"], "denominator_bound")
        if "denominator_bound" in header
        else None
    )

    blocks = []
    for raw in raw_blocks:
        e_txt = raw["e"].strip()
        if not (e_txt.startswith("(") and e_txt.endswith(")")):
            raise ParseError(f"e: expected a parenthesized tuple, found {e_txt!r}")
        inner = e_txt[1:-1].strip()
        product_index = tuple(int(x) for x in inner.split(",") if x.strip()) if inner else ()
        if any(e not in (0, 1) for e in product_index):
            raise ParseError(f"e: entries must be 0 or 1, found {product_index}")
        basis = []
        basis_txt = raw.get("basis", "[]").strip()
        if not (basis_txt.startswith("[") and basis_txt.endswith("]")):
            raise ParseError("basis: expected a bracketed list")
        body = basis_txt[1:-1].strip()
        if body:
            for mono_txt in split_top_level(body):
                p = parse_polynomial(mono_txt, names)
                if len(p) != 1 or set(p.terms.values()) != {Fraction(1)}:
                    raise ParseError(f"basis: {mono_txt!r} is not a monomial")
                basis.append(next(iter(p.terms)))
        squares = []
        squares_txt = raw.get("squares", "[]").strip()
        if not (squares_txt.startswith("[") and squares_txt.endswith("]")):
            raise ParseError("squares: expected a bracketed list")
        body = squares_txt[1:-1].strip()
        if body:
            for pair_txt in split_top_level(body):
                pair_txt = pair_txt.strip()
                if not (pair_txt.startswith("(") and pair_txt.endswith(")")):
                    raise ParseError(f"squares: expected (weight, \"poly\") pairs, found {pair_txt!r}")
                parts = split_top_level(pair_txt[1:-1])
                if len(parts) != 2:
                    raise ParseError(f"squares: expected (weight, \"poly\") pairs, found {pair_txt!r}")
                weight = _parse_fraction(parts[0], "squares")
                poly = parse_polynomial(_unquote(parts[1]), names)
                squares.append(SquareTerm(weight=weight, poly=poly))
        blocks.append(
            CertificateBlock(product_index=product_index, basis=tuple(basis), squares=tuple(squares))
        )

    return Certificate(
        variables=tuple(names),
        grading=grading,
        f=f,
        g=g,
        constraints=tuple(constraints),
        n=n,
        blocks=tuple(blocks),
        margin=margin,
        denominator_bound=denominator_bound,
    )
