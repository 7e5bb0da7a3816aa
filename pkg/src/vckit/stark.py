"""Transparent STARK-style argument: trace arithmetisation, quotient
construction over vanishing polynomials, low-degree extension on a coset,
randomized composition, Merkle commitment and FRI.

The LDE coset offset is a generator of the full multiplicative group, so
no extended evaluation point ever lands in the trace subgroup; queries
therefore never touch the original trace domain, which is what the
zero-knowledge padding relies on.
"""

import hashlib
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import fri
from .encoding import Reader, bytes_lp, u8, u32, u64
from .errors import ConstraintViolation, UsageError, VerifyResult
from .field import (EvaluationDomain, Field, FieldElement, Polynomial,
                    interpolate, interpolate_on_domain)
from .merkle import AuthPath, MerkleTree, verify_path
from .transcript import HASH_ID, Transcript

PROOF_MAGIC = b"VCKS"


# ---------------------------------------------------------------------------
# constraint predicates

class MultivariatePoly:
    """Sparse multivariate polynomial {exponent tuple: coeff} used as a
    transition predicate over a window of trace cells."""

    def __init__(self, field: Field, num_vars: int, terms: Dict[tuple, int]):
        p = field.modulus
        clean = {}
        for exps, c in terms.items():
            if len(exps) != num_vars:
                raise UsageError("exponent tuple arity mismatch")
            v = (c.value if isinstance(c, FieldElement) else c) % p
            if v:
                clean[tuple(exps)] = v
        self.field = field
        self.num_vars = num_vars
        self.terms = clean

    @property
    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def evaluate(self, values) -> FieldElement:
        if len(values) != self.num_vars:
            raise UsageError("wrong number of predicate inputs")
        values = [self.field(v) for v in values]
        acc = self.field.zero
        for exps, c in self.terms.items():
            term = FieldElement(self.field, c)
            for v, e in zip(values, exps):
                if e:
                    term = term * v ** e
            acc = acc + term
        return acc

    def substitute(self, polys) -> Polynomial:
        """Compose with polynomial arguments (symbolic expansion)."""
        if len(polys) != self.num_vars:
            raise UsageError("wrong number of predicate inputs")
        acc = Polynomial.zero(self.field)
        for exps, c in self.terms.items():
            term = Polynomial.constant(self.field, c)
            for poly, e in zip(polys, exps):
                for _ in range(e):
                    term = term * poly
            acc = acc + term
        return acc

    def serialize(self) -> bytes:
        items = sorted(self.terms.items())
        out = [u32(self.num_vars), u32(len(items))]
        for exps, c in items:
            out += [u32(e) for e in exps]
            out.append(u64(c))
        return b"".join(out)


# ---------------------------------------------------------------------------
# domain types

@dataclass
class TraceTable:
    """Equal-length columns over the trace subgroup; row i sits at g^i.

    original_length is the pre-padding row count; constraints only ever
    reference rows below it.
    """

    columns: List[List[int]]
    original_length: int
    field: Field

    def __post_init__(self):
        n = len(self.columns[0])
        if any(len(c) != n for c in self.columns):
            raise UsageError("ragged trace columns")
        if n & (n - 1):
            raise UsageError("trace length must be a power of two")
        if not 2 <= self.original_length <= n:
            raise UsageError("bad original length")

    @property
    def length(self) -> int:
        return len(self.columns[0])

    @property
    def num_columns(self) -> int:
        return len(self.columns)

    def domain(self) -> EvaluationDomain:
        return EvaluationDomain.subgroup(self.field, self.length)


@dataclass(frozen=True)
class BoundaryConstraint:
    column: int
    row: int
    value: int


@dataclass(frozen=True)
class TransitionConstraint:
    """predicate over window*num_columns variables, var r*ncols+c = cell
    (row+r, column c)."""

    window: int
    predicate: MultivariatePoly

    def __post_init__(self):
        if self.window < 2:
            raise UsageError("transition window must span at least 2 rows")
        if self.predicate.total_degree > 8:
            raise UsageError("transition degree capped at 8")

    @property
    def degree(self) -> int:
        return self.predicate.total_degree


@dataclass
class ConstraintSystem:
    num_columns: int
    boundaries: List[BoundaryConstraint]
    transitions: List[TransitionConstraint]

    def __post_init__(self):
        if not self.boundaries and not self.transitions:
            raise UsageError("constraint system is empty")
        for bc in self.boundaries:
            if bc.column >= self.num_columns:
                raise UsageError("boundary references a missing column")

    def boundary_columns(self) -> List[int]:
        return sorted({bc.column for bc in self.boundaries})

    def max_window(self) -> int:
        return max((tc.window for tc in self.transitions), default=1)

    def digest(self) -> bytes:
        h = hashlib.sha256()
        h.update(u32(self.num_columns))
        for bc in sorted(self.boundaries,
                         key=lambda b: (b.column, b.row)):
            h.update(u32(bc.column) + u32(bc.row) + u64(bc.value))
        for tc in self.transitions:
            h.update(u32(tc.window) + tc.predicate.serialize())
        return h.digest()


@dataclass
class StarkParams:
    blowup: int
    num_queries: int
    zk: bool = False

    def __post_init__(self):
        if self.blowup < 4 or self.blowup & (self.blowup - 1):
            raise UsageError("blowup must be a power of two >= 4")

    def lde_domain(self, field: Field, trace_length: int) -> EvaluationDomain:
        # offset = full-group generator, never inside any 2^k subgroup
        return EvaluationDomain.coset(field, self.blowup * trace_length,
                                      field.generator())


@dataclass
class StarkProof:
    trace_length: int
    original_length: int
    num_columns: int
    blowup: int
    num_queries: int
    zk: bool
    cs_digest: bytes
    binding_digest: Optional[bytes]
    trace_root: bytes
    composition_root: bytes
    fri_proof: "fri.FriProof"
    # per query: list over window rows of (column values, path)
    trace_openings: List[List[Tuple[List[int], AuthPath]]]

    def serialize(self) -> bytes:
        out = [PROOF_MAGIC, u8(HASH_ID), u32(self.trace_length),
               u32(self.original_length), u32(self.num_columns),
               u32(self.blowup), u32(self.num_queries),
               u8(1 if self.zk else 0), self.cs_digest]
        if self.binding_digest is None:
            out.append(u8(0))
        else:
            out += [u8(1), self.binding_digest]
        out += [self.trace_root, self.composition_root,
                bytes_lp(self.fri_proof.serialize()),
                u32(len(self.trace_openings))]
        for bundle in self.trace_openings:
            out.append(u32(len(bundle)))
            for values, path in bundle:
                out.append(b"".join(u64(v) for v in values))
                out.append(bytes_lp(path.serialize()))
        return b"".join(out)

    @staticmethod
    def deserialize(data: bytes) -> "StarkProof":
        reader = Reader(data)
        if reader.take(4) != PROOF_MAGIC:
            raise UsageError("not a STARK proof")
        if reader.u8() != HASH_ID:
            raise UsageError("unsupported hash algorithm id")
        n = reader.u32()
        orig = reader.u32()
        ncols = reader.u32()
        blowup = reader.u32()
        queries = reader.u32()
        zk = bool(reader.u8())
        cs_digest = reader.take(32)
        binding = reader.take(32) if reader.u8() else None
        trace_root = reader.take(32)
        comp_root = reader.take(32)
        fri_proof = fri.FriProof.deserialize(Reader(reader.bytes_lp()))
        openings = []
        for _ in range(reader.u32()):
            bundle = []
            for _ in range(reader.u32()):
                values = [reader.u64() for _ in range(ncols)]
                path = AuthPath.deserialize(Reader(reader.bytes_lp()))
                bundle.append((values, path))
            openings.append(bundle)
        return StarkProof(n, orig, ncols, blowup, queries, zk, cs_digest,
                          binding, trace_root, comp_root, fri_proof, openings)


# ---------------------------------------------------------------------------
# reference trace and constraints

def trace_fibonacci(n: int, field: Field = None) -> TraceTable:
    """Single-column Fibonacci trace of n rows, zero-padded to a power of two."""
    if n < 2:
        raise UsageError("need at least the two seed rows")
    if field is None:
        from .field import DEFAULT_MODULUS
        field = Field(DEFAULT_MODULUS)
    p = field.modulus
    rows = [1, 1]
    while len(rows) < n:
        rows.append((rows[-1] + rows[-2]) % p)
    rows = rows[:n]
    padded = 1
    while padded < n:
        padded *= 2
    rows += [0] * (padded - n)
    return TraceTable([rows], n, field)


def fibonacci_constraint_system(n: int, field: Field = None) -> ConstraintSystem:
    """Seed rows pinned to 1, output row pinned to fib(n-1), and the
    window-3 recurrence on every interior row."""
    if field is None:
        from .field import DEFAULT_MODULUS
        field = Field(DEFAULT_MODULUS)
    p = field.modulus
    a, b = 1, 1
    for _ in range(n - 2):
        a, b = b, (a + b) % p
    pred = MultivariatePoly(field, 3, {(0, 0, 1): 1, (0, 1, 0): -1,
                                       (1, 0, 0): -1})
    return ConstraintSystem(
        num_columns=1,
        boundaries=[BoundaryConstraint(0, 0, 1), BoundaryConstraint(0, 1, 1),
                    BoundaryConstraint(0, n - 1, b)],
        transitions=[TransitionConstraint(3, pred)])


def membership_poly(field: Field, values) -> Polynomial:
    """C(y) = prod (y - c_i): zero exactly on the allowed value set."""
    acc = Polynomial(field, [1])
    for c in values:
        acc = acc * Polynomial(field, [-field(c).value, 1])
    return acc


# ---------------------------------------------------------------------------
# arithmetisation pipeline

def interpolate_trace(trace: TraceTable) -> List[Polynomial]:
    domain = trace.domain()
    return [interpolate_on_domain(col, domain) for col in trace.columns]


def low_degree_extend(polys, lde_domain: EvaluationDomain) -> List[np.ndarray]:
    pts = lde_domain.point_array()
    return [p.evaluate_array(pts) for p in polys]


def boundary_quotient(column_poly: Polynomial, bcs, trace_domain,
                      require_exact: bool = True) -> Polynomial:
    """(column - B) / Z_B where B interpolates the boundary points."""
    field = column_poly.field
    if not bcs:
        return column_poly
    pts = [(trace_domain.point(bc.row), field(bc.value)) for bc in bcs]
    b_poly = interpolate(pts)
    z_b = membership_poly(field, [x for x, _ in pts])
    quot, rem = divmod(column_poly - b_poly, z_b)
    if require_exact and not rem.is_zero():
        raise ConstraintViolation("trace breaks a boundary constraint")
    return quot


def _transition_rows(trace: TraceTable, tc: TransitionConstraint) -> int:
    return trace.original_length - (tc.window - 1)


def transition_vanishing(field: Field, trace_domain: EvaluationDomain,
                         num_rows: int) -> Polynomial:
    """Z over rows 0..num_rows-1: (x^n - 1) / prod over excluded rows."""
    n = trace_domain.size
    excluded = membership_poly(
        field, [trace_domain.point(i) for i in range(num_rows, n)])
    quot, rem = divmod(trace_domain.vanishing_poly(), excluded)
    assert rem.is_zero()
    return quot


def transition_vanishing_eval(field: Field, trace_domain: EvaluationDomain,
                              num_rows: int, x) -> FieldElement:
    """Z_{D_E}(x) in O(log n + excluded) multiplications."""
    x = field(x)
    num = trace_domain.vanishing_eval(x)
    den = field.one
    for i in range(num_rows, trace_domain.size):
        den = den * (x - trace_domain.point(i))
    return num / den


def transition_quotient(column_polys, tc: TransitionConstraint,
                        trace: TraceTable, require_exact: bool = True
                        ) -> Polynomial:
    """predicate(col(x), col(g x), ...) divided exactly by Z over the
    constrained rows."""
    field = trace.field
    domain = trace.domain()
    g = domain.generator
    shifted = []
    for r in range(tc.window):
        for poly in column_polys:
            shifted.append(poly.compose_scale(g ** r))
    # variable order is row-major: (row offset, column)
    composed = tc.predicate.substitute(shifted)
    num_rows = _transition_rows(trace, tc)
    if num_rows < 1:
        raise UsageError("window does not fit in the trace")
    z_e = transition_vanishing(field, domain, num_rows)
    quot, rem = divmod(composed, z_e)
    if require_exact and not rem.is_zero():
        row = _first_violation(trace, tc)
        raise ConstraintViolation(
            f"transition constraint violated at row {row}")
    return quot


def _first_violation(trace: TraceTable, tc: TransitionConstraint):
    for i in range(_transition_rows(trace, tc)):
        vals = [trace.columns[c][i + r]
                for r in range(tc.window) for c in range(trace.num_columns)]
        if not tc.predicate.evaluate(vals).is_zero():
            return i
    return None


def check_satisfaction(trace: TraceTable, cs: ConstraintSystem):
    """Evaluation-scan oracle: raise naming the first violated constraint."""
    for bc in cs.boundaries:
        if bc.row >= trace.original_length:
            raise UsageError("boundary row outside the original trace")
        if trace.columns[bc.column][bc.row] != bc.value % trace.field.modulus:
            raise ConstraintViolation(
                f"boundary (col {bc.column}, row {bc.row}) unsatisfied")
    for k, tc in enumerate(cs.transitions):
        row = _first_violation(trace, tc)
        if row is not None:
            raise ConstraintViolation(
                f"transition {k} violated at row {row}")


def compose(quotients, t: Transcript) -> Tuple[Polynomial, List[FieldElement]]:
    """Random linear combination; gammas drawn after the trace commitment."""
    if not quotients:
        raise UsageError("nothing to compose")
    field = quotients[0].field
    gammas = [t.challenge_field(field) for _ in quotients]
    acc = Polynomial.zero(field)
    for gamma, q in zip(gammas, quotients):
        acc = acc + q.scale(gamma)
    return acc, gammas


def composition_degree_bound(trace_length: int, orig_length: int,
                             cs: ConstraintSystem) -> int:
    """Max quotient degree, rounded up so the FRI bound deg < d holds."""
    degs = []
    per_col = {}
    for bc in cs.boundaries:
        per_col[bc.column] = per_col.get(bc.column, 0) + 1
    for cnt in per_col.values():
        degs.append(trace_length - 1 - cnt)
    for tc in cs.transitions:
        degs.append(tc.degree * (trace_length - 1)
                    - (orig_length - tc.window + 1))
    d = 1
    while d < max(degs) + 1:
        d *= 2
    return d


# ---------------------------------------------------------------------------
# zero-knowledge helpers

def zk_pad(trace: TraceTable, num_queries: int, rng_seed) -> TraceTable:
    """Append uniformly random noise rows (one per query), then re-pad."""
    rng = random.Random(rng_seed)
    p = trace.field.modulus
    cols = []
    for col in trace.columns:
        extended = list(col[:trace.original_length])
        extended += [rng.randrange(p) for _ in range(num_queries)]
        padded = 1
        while padded < len(extended):
            padded *= 2
        extended += [0] * (padded - len(extended))
        cols.append(extended)
    return TraceTable(cols, trace.original_length, trace.field)


def zk_statement_digest(secret_input: bytes) -> bytes:
    """Public digest h = H(x) bound into the transcript before commitment."""
    return hashlib.sha256(b"zk-statement" + secret_input).digest()


# ---------------------------------------------------------------------------
# prover / verifier

def _header_bytes(proof_fields) -> bytes:
    (n, orig, ncols, blowup, queries, zk, cs_digest, binding) = proof_fields
    out = (u32(n) + u32(orig) + u32(ncols) + u32(blowup) + u32(queries)
           + u8(1 if zk else 0) + cs_digest)
    if binding is not None:
        out += binding
    return out


def _row_leaf(values) -> bytes:
    return b"".join(u64(int(v)) for v in values)


def prove(trace: TraceTable, cs: ConstraintSystem, params: StarkParams,
          zk_seed=None, secret_binding: Optional[bytes] = None,
          skip_satisfaction_check: bool = False) -> StarkProof:
    """Commit, draw gammas, compose, run FRI, open trace windows.

    skip_satisfaction_check enables the cheating-prover variant used by
    soundness experiments: unsatisfied constraints yield floor quotients
    instead of a refusal.
    """
    field = trace.field
    if params.zk:
        trace = zk_pad(trace, params.num_queries, zk_seed)
    if not skip_satisfaction_check:
        check_satisfaction(trace, cs)
    if trace.num_columns != cs.num_columns:
        raise UsageError("column count mismatch")
    n = trace.length
    trace_domain = trace.domain()
    lde = params.lde_domain(field, n)
    binding = (zk_statement_digest(secret_binding)
               if secret_binding is not None else None)

    t = Transcript("stark")
    t.absorb(b"header", _header_bytes(
        (n, trace.original_length, cs.num_columns, params.blowup,
         params.num_queries, params.zk, cs.digest(), binding)))

    column_polys = interpolate_trace(trace)
    lde_columns = low_degree_extend(column_polys, lde)
    rows = [_row_leaf([col[i] for col in lde_columns])
            for i in range(lde.size)]
    trace_tree = MerkleTree(rows)
    t.absorb(b"trace-root", trace_tree.root)

    require = not skip_satisfaction_check
    quotients = []
    by_col = {c: [bc for bc in cs.boundaries if bc.column == c]
              for c in cs.boundary_columns()}
    for c in cs.boundary_columns():
        quotients.append(boundary_quotient(column_polys[c], by_col[c],
                                           trace_domain, require))
    for tc in cs.transitions:
        quotients.append(transition_quotient(column_polys, tc, trace,
                                             require))

    composition, _ = compose(quotients, t)
    d = composition_degree_bound(n, trace.original_length, cs)
    fri_params = fri.FriParams(lde, d, params.num_queries)
    comp_evals = composition.evaluate_array(lde.point_array())
    fri_proof = fri.prove(comp_evals, fri_params, t)
    composition_root = fri_proof.layer_roots[0]

    w = cs.max_window()
    openings = []
    for q in fri_proof.queries:
        bundle = []
        for r in range(w):
            idx = (q.index + r * params.blowup) % lde.size
            values = [int(col[idx]) for col in lde_columns]
            bundle.append((values, trace_tree.open(idx)))
        openings.append(bundle)

    return StarkProof(n, trace.original_length, cs.num_columns,
                      params.blowup, params.num_queries, params.zk,
                      cs.digest(), binding, trace_tree.root,
                      composition_root, fri_proof, openings)


def verify(proof: StarkProof, cs: ConstraintSystem, params: StarkParams,
           field: Field = None) -> VerifyResult:
    """Replay the transcript, check every opening, re-derive each query's
    constraint combination and compare with the FRI layer-0 value, then
    check the FRI low-degree proof."""
    if field is None:
        from .field import DEFAULT_MODULUS
        field = Field(DEFAULT_MODULUS)
    if proof.cs_digest != cs.digest():
        return VerifyResult.reject("constraint-system digest mismatch")
    if proof.blowup != params.blowup or proof.num_queries != params.num_queries:
        return VerifyResult.reject("parameter mismatch")
    n = proof.trace_length
    if n & (n - 1) or not 2 <= proof.original_length <= n:
        return VerifyResult.reject("malformed header")
    trace_domain = EvaluationDomain.subgroup(field, n)
    lde = params.lde_domain(field, n)

    t = Transcript("stark")
    t.absorb(b"header", _header_bytes(
        (n, proof.original_length, proof.num_columns, proof.blowup,
         proof.num_queries, proof.zk, proof.cs_digest,
         proof.binding_digest)))
    t.absorb(b"trace-root", proof.trace_root)

    num_quotients = len(cs.boundary_columns()) + len(cs.transitions)
    gammas = [t.challenge_field(field) for _ in range(num_quotients)]

    d = composition_degree_bound(n, proof.original_length, cs)
    fri_params = fri.FriParams(lde, d, params.num_queries)
    if proof.composition_root != proof.fri_proof.layer_roots[0]:
        return VerifyResult.reject("composition root mismatch")
    fri_verdict = fri.verify(proof.fri_proof, fri_params, t)
    if not fri_verdict:
        return VerifyResult.reject(f"fri: {fri_verdict.reason}")

    # boundary interpolants are query-independent
    by_col = {c: [bc for bc in cs.boundaries if bc.column == c]
              for c in cs.boundary_columns()}
    b_polys = {}
    b_points = {}
    for c, bcs in by_col.items():
        pts = [(trace_domain.point(bc.row), field(bc.value)) for bc in bcs]
        b_polys[c] = interpolate(pts)
        b_points[c] = [x for x, _ in pts]

    w = cs.max_window()
    if len(proof.trace_openings) != len(proof.fri_proof.queries):
        return VerifyResult.reject("query bundle count mismatch")
    for k, (q, bundle) in enumerate(zip(proof.fri_proof.queries,
                                        proof.trace_openings)):
        if len(bundle) != w:
            return VerifyResult.reject(f"query {k}: window truncated")
        row_values = []
        for r, (values, path) in enumerate(bundle):
            idx = (q.index + r * params.blowup) % lde.size
            if len(values) != proof.num_columns:
                return VerifyResult.reject(f"query {k}: bad row width")
            if not verify_path(proof.trace_root, idx, _row_leaf(values),
                               path):
                return VerifyResult.reject(f"query {k}: trace path failure")
            row_values.append([FieldElement(field, v) for v in values])
        x = lde.point(q.index)
        parts = []
        for c in cs.boundary_columns():
            z_b = field.one
            for pt in b_points[c]:
                z_b = z_b * (x - pt)
            parts.append((row_values[0][c] - b_polys[c].evaluate(x)) / z_b)
        for tc in cs.transitions:
            vals = [row_values[r][c] for r in range(tc.window)
                    for c in range(proof.num_columns)]
            num_rows = proof.original_length - (tc.window - 1)
            z_e = transition_vanishing_eval(field, trace_domain, num_rows, x)
            parts.append(tc.predicate.evaluate(vals) / z_e)
        comb = field.zero
        for gamma, part in zip(gammas, parts):
            comb = comb + gamma * part
        comp_value = (q.layers[0].value if q.layers
                      else proof.fri_proof.final_value)
        if comb.value != comp_value:
            return VerifyResult.reject(
                f"query {k}: constraint equation failure")
    return VerifyResult.accept()


# ---------------------------------------------------------------------------
# standalone 2POLY primitive

def probabilistic_poly_eq(f_evals, g_evals, degree_bound: int,
                          t: Transcript, num_queries: int) -> bool:
    """Accept iff the two evaluation tables agree at num_queries random
    indices; soundness error (d/|D|)^k for worst-case unequal pairs."""
    if len(f_evals) != len(g_evals):
        raise UsageError("evaluation tables differ in length")
    n = len(f_evals)
    for _ in range(num_queries):
        i = t.challenge_index(n)
        if int(f_evals[i]) != int(g_evals[i]):
            return False
    return True
