"""STARK pipeline tests: arithmetisation pieces, prover/verifier, zk."""

import random

import pytest

from vckit import stark
from vckit.errors import ConstraintViolation, UsageError
from vckit.field import DEFAULT_MODULUS, EvaluationDomain, Field, Polynomial
from vckit.transcript import Transcript

F = Field(DEFAULT_MODULUS)


def fib_ints(n, p=DEFAULT_MODULUS):
    rows = [1, 1]
    while len(rows) < n:
        rows.append((rows[-1] + rows[-2]) % p)
    return rows[:n]


def test_trace_fibonacci_values():
    tr = stark.trace_fibonacci(8, F)
    assert tr.columns[0] == fib_ints(8)
    assert tr.original_length == 8 and tr.length == 8
    tr10 = stark.trace_fibonacci(10, F)
    assert tr10.length == 16 and tr10.columns[0][:10] == fib_ints(10)
    assert tr10.columns[0][10:] == [0] * 6


def test_constraint_system_pins_output():
    cs = stark.fibonacci_constraint_system(8, F)
    assert any(bc.row == 7 and bc.value == fib_ints(8)[7]
               for bc in cs.boundaries)
    assert cs.max_window() == 3


def test_check_satisfaction_oracle():
    tr = stark.trace_fibonacci(8, F)
    cs = stark.fibonacci_constraint_system(8, F)
    stark.check_satisfaction(tr, cs)  # no raise
    bad = stark.TraceTable([list(tr.columns[0])], 8, F)
    bad.columns[0][4] += 1
    with pytest.raises(ConstraintViolation):
        stark.check_satisfaction(bad, cs)


def test_multivariate_predicate_eval_and_substitute():
    pred = stark.MultivariatePoly(F, 2, {(2, 0): 1, (0, 1): -1})  # x^2 - y
    assert pred.evaluate([F(5), F(25)]).is_zero()
    assert pred.total_degree == 2
    px = Polynomial(F, [1, 1])
    py = Polynomial(F, [0, 2])
    composed = pred.substitute([px, py])
    for x in (0, 3, 17):
        want = px.evaluate(x) ** 2 - py.evaluate(x)
        assert composed.evaluate(x) == want


def test_boundary_quotient_exactness():
    tr = stark.trace_fibonacci(8, F)
    cs = stark.fibonacci_constraint_system(8, F)
    dom = tr.domain()
    poly = stark.interpolate_trace(tr)[0]
    quot = stark.boundary_quotient(poly, cs.boundaries, dom)
    # recombining must reproduce the column polynomial off the boundary
    pts = [(dom.point(bc.row), F(bc.value)) for bc in cs.boundaries]
    from vckit.field import interpolate
    b_poly = interpolate(pts)
    z_b = stark.membership_poly(F, [x for x, _ in pts])
    assert quot * z_b + b_poly == poly
    bad = poly + Polynomial(F, [1])
    with pytest.raises(ConstraintViolation):
        stark.boundary_quotient(bad, cs.boundaries, dom)


def test_transition_vanishing_matches_eval():
    dom = EvaluationDomain.subgroup(F, 8)
    z = stark.transition_vanishing(F, dom, 6)
    for i in range(8):
        pt = dom.point(i)
        expect_zero = i < 6
        assert z.evaluate(pt).is_zero() == expect_zero
    for x in (5, 123, 99991):
        if not dom.contains(F(x)):
            assert z.evaluate(x) == stark.transition_vanishing_eval(F, dom, 6, x)


def test_transition_quotient_exact_for_honest_trace():
    tr = stark.trace_fibonacci(8, F)
    cs = stark.fibonacci_constraint_system(8, F)
    polys = stark.interpolate_trace(tr)
    quot = stark.transition_quotient(polys, cs.transitions[0], tr)
    assert quot.degree is None or quot.degree < tr.length
    bad = stark.TraceTable([list(tr.columns[0])], 8, F)
    bad.columns[0][3] += 1
    with pytest.raises(ConstraintViolation):
        stark.transition_quotient(stark.interpolate_trace(bad),
                                  cs.transitions[0], bad)


def test_prove_verify_roundtrip():
    tr = stark.trace_fibonacci(8, F)
    cs = stark.fibonacci_constraint_system(8, F)
    params = stark.StarkParams(8, 12)
    proof = stark.prove(tr, cs, params)
    v = stark.verify(proof, cs, params, F)
    assert v, v.reason


def test_prover_refuses_bad_trace():
    tr = stark.trace_fibonacci(8, F)
    tr.columns[0][5] += 1
    cs = stark.fibonacci_constraint_system(8, F)
    with pytest.raises(ConstraintViolation):
        stark.prove(tr, cs, stark.StarkParams(8, 8))


def test_cheating_prover_rejected():
    tr = stark.trace_fibonacci(8, F)
    tr.columns[0][5] = (tr.columns[0][5] + 17) % F.modulus
    cs = stark.fibonacci_constraint_system(8, F)
    params = stark.StarkParams(8, 20)
    proof = stark.prove(tr, cs, params, skip_satisfaction_check=True)
    assert not stark.verify(proof, cs, params, F)


def test_wrong_statement_rejected():
    """A valid proof for fib-8 must not verify against fib-8 with a
    different pinned output."""
    tr = stark.trace_fibonacci(8, F)
    cs = stark.fibonacci_constraint_system(8, F)
    params = stark.StarkParams(8, 12)
    proof = stark.prove(tr, cs, params)
    other = stark.ConstraintSystem(
        1, [stark.BoundaryConstraint(bc.column, bc.row,
                                     bc.value + (1 if bc.row == 7 else 0))
            for bc in cs.boundaries], cs.transitions)
    assert not stark.verify(proof, other, params, F)


def test_proof_serialize_roundtrip():
    tr = stark.trace_fibonacci(8, F)
    cs = stark.fibonacci_constraint_system(8, F)
    params = stark.StarkParams(8, 6)
    proof = stark.prove(tr, cs, params)
    blob = proof.serialize()
    back = stark.StarkProof.deserialize(blob)
    assert back.serialize() == blob
    assert stark.verify(back, cs, params, F)
    with pytest.raises(UsageError):
        stark.StarkProof.deserialize(b"NOPE" + blob[4:])


def test_byte_flip_fuzz_rejected():
    """Flipping any of a sample of proof bytes must not yield acceptance
    of a different proof (re-serialization equality guards no-ops)."""
    tr = stark.trace_fibonacci(8, F)
    cs = stark.fibonacci_constraint_system(8, F)
    params = stark.StarkParams(8, 6)
    blob = stark.prove(tr, cs, params).serialize()
    rng = random.Random(77)
    for _ in range(25):
        pos = rng.randrange(5, len(blob))
        mutated = bytearray(blob)
        mutated[pos] ^= 0xFF
        try:
            proof = stark.StarkProof.deserialize(bytes(mutated))
            if proof.serialize() == blob:
                continue
            accepted = bool(stark.verify(proof, cs, params, F))
        except (UsageError, OverflowError):
            accepted = False
        assert not accepted


def test_zk_padding_disjoint_openings():
    tr = stark.trace_fibonacci(8, F)
    cs = stark.fibonacci_constraint_system(8, F)
    params = stark.StarkParams(4, 4, zk=True)
    proof = stark.prove(tr, cs, params, zk_seed=1)
    assert stark.verify(proof, cs, params, F)
    sub = EvaluationDomain.subgroup(F, proof.trace_length)
    lde = params.lde_domain(F, proof.trace_length)
    for q in proof.fri_proof.queries:
        for r in range(cs.max_window()):
            idx = (q.index + r * params.blowup) % lde.size
            assert not sub.contains(lde.point(idx))


def test_zk_seeds_give_distinct_proofs():
    tr = stark.trace_fibonacci(8, F)
    cs = stark.fibonacci_constraint_system(8, F)
    params = stark.StarkParams(4, 4, zk=True)
    p1 = stark.prove(tr, cs, params, zk_seed=1)
    p2 = stark.prove(tr, cs, params, zk_seed=2)
    assert p1.serialize() != p2.serialize()
    assert stark.verify(p1, cs, params, F)
    assert stark.verify(p2, cs, params, F)


def test_secret_binding_digest_checked():
    tr = stark.trace_fibonacci(8, F)
    cs = stark.fibonacci_constraint_system(8, F)
    params = stark.StarkParams(8, 6)
    proof = stark.prove(tr, cs, params, secret_binding=b"witness")
    assert proof.binding_digest == stark.zk_statement_digest(b"witness")
    assert stark.verify(proof, cs, params, F)
    proof.binding_digest = stark.zk_statement_digest(b"other")
    assert not stark.verify(proof, cs, params, F)


def test_probabilistic_poly_eq():
    rng = random.Random(5)
    f = Polynomial(F, [rng.randrange(F.modulus) for _ in range(5)])
    pts = EvaluationDomain.subgroup(F, 64).point_array()
    fe = [int(v) for v in f.evaluate_array(pts)]
    assert stark.probabilistic_poly_eq(fe, list(fe), 4, Transcript("eq"), 10)
    ge = list(fe)
    for i in range(0, 64, 2):  # corrupt half the table
        ge[i] = (ge[i] + 1) % F.modulus
    hits = sum(
        not stark.probabilistic_poly_eq(fe, ge, 4, _seeded(i), 8)
        for i in range(20))
    assert hits >= 18  # per-trial miss probability is (1/2)^8


def _seeded(i):
    t = Transcript("eq-trial")
    t.absorb(b"i", i.to_bytes(4, "big"))
    return t


def test_custom_two_column_system():
    """A second program shape: columns (a, b) with a' = b, b' = a + b."""
    n = 8
    p = F.modulus
    a, b = [1], [1]
    for _ in range(n - 1):
        a.append(b[-1])
        b.append((a[-2] + b[-1]) % p)
    tr = stark.TraceTable([a, b], n, F)
    pred_a = stark.MultivariatePoly(F, 4, {(0, 0, 1, 0): 1, (0, 1, 0, 0): -1})
    pred_b = stark.MultivariatePoly(F, 4, {(0, 0, 0, 1): 1, (1, 0, 0, 0): -1,
                                           (0, 1, 0, 0): -1})
    cs = stark.ConstraintSystem(
        2,
        [stark.BoundaryConstraint(0, 0, 1), stark.BoundaryConstraint(1, 0, 1),
         stark.BoundaryConstraint(1, n - 1, b[-1])],
        [stark.TransitionConstraint(2, pred_a),
         stark.TransitionConstraint(2, pred_b)])
    params = stark.StarkParams(8, 10)
    proof = stark.prove(tr, cs, params)
    v = stark.verify(proof, cs, params, F)
    assert v, v.reason
    bad = stark.TraceTable([list(a), list(b)], n, F)
    bad.columns[1][3] += 5
    cheat = stark.prove(bad, cs, params, skip_satisfaction_check=True)
    assert not stark.verify(cheat, cs, params, F)
