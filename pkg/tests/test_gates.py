import math
import random

import numpy as np
import pytest

from sqlsim.circuit import GateKind
from sqlsim.gates import (
    FusionError,
    GateDefinitionError,
    GateRelation,
    _embed,
    fuse,
    relation_for,
)

SQRT1_2 = 1.0 / math.sqrt(2.0)

NAMED_KINDS = [k for k in GateKind if not k.takes_matrix]
PARAMETRIC = [GateKind.RX, GateKind.RY, GateKind.RZ]
DIAGONAL = [GateKind.Z, GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG,
            GateKind.CZ]


def _params_for(kind: GateKind, rng: random.Random) -> tuple:
    return tuple(rng.uniform(-2 * math.pi, 2 * math.pi)
                 for _ in range(kind.num_params))


def _unitarity_defect(rel: GateRelation) -> float:
    mat = rel.to_matrix()
    return float(np.max(np.abs(mat.conj().T @ mat - np.eye(rel.dim))))


def test_h_relation_rows():
    rel = relation_for(GateKind.H)
    assert rel.entries == (
        (0, 0, SQRT1_2, 0.0),
        (0, 1, SQRT1_2, 0.0),
        (1, 0, SQRT1_2, 0.0),
        (1, 1, -SQRT1_2, 0.0),
    )


def test_cx_relation_is_permutation():
    rel = relation_for(GateKind.CX)
    assert rel.entries == (
        (0, 0, 1.0, 0.0),
        (1, 1, 1.0, 0.0),
        (2, 3, 1.0, 0.0),
        (3, 2, 1.0, 0.0),
    )


def test_rz_zero_is_identity():
    rel = relation_for(GateKind.RZ, (0.0,))
    assert rel.entries == ((0, 0, 1.0, 0.0), (1, 1, 1.0, 0.0))


def test_row_counts():
    assert len(relation_for(GateKind.H).entries) == 4
    assert len(relation_for(GateKind.CX).entries) == 4
    rng = random.Random(7)
    for kind in DIAGONAL:
        rel = relation_for(kind, _params_for(kind, rng))
        assert len(rel.entries) == rel.dim
    rel = relation_for(GateKind.RZ, (0.37,))
    assert len(rel.entries) == 2


def test_all_named_kinds_unitary():
    rng = random.Random(11)
    for kind in NAMED_KINDS:
        for _ in range(20 if kind.num_params else 1):
            rel = relation_for(kind, _params_for(kind, rng))
            assert _unitarity_defect(rel) <= 1e-12, kind


def test_labels_deterministic_and_distinct():
    assert relation_for(GateKind.H).label == relation_for(GateKind.H).label
    a = relation_for(GateKind.RX, (0.5,))
    b = relation_for(GateKind.RX, (0.5,))
    c = relation_for(GateKind.RX, (0.25,))
    assert a.label == b.label
    assert a.label != c.label
    assert a.label != relation_for(GateKind.RY, (0.5,)).label


def test_param_count_enforced():
    with pytest.raises(GateDefinitionError):
        relation_for(GateKind.H, (0.1,))
    with pytest.raises(GateDefinitionError):
        relation_for(GateKind.RX)


def test_u1_explicit_matrix():
    matrix = (SQRT1_2, SQRT1_2, SQRT1_2, -SQRT1_2)
    rel = relation_for(GateKind.U1, matrix=matrix)
    assert _unitarity_defect(rel) <= 1e-12
    assert rel.label.startswith("u1_")


def test_u1_rejects_non_unitary():
    with pytest.raises(GateDefinitionError, match="not unitary"):
        relation_for(GateKind.U1, matrix=(1.0, 0.0, 0.0, 2.0))


def test_u1_accepts_within_tolerance():
    wobble = 1 + 1e-10
    rel = relation_for(GateKind.U1, matrix=(wobble, 0.0, 0.0, 1.0))
    assert rel.entries[0][2] == wobble


def test_tiny_entries_dropped():
    almost_identity = (1.0, 1e-16, 0.0, 1.0)
    rel = relation_for(GateKind.U1, matrix=almost_identity)
    assert rel.entries == ((0, 0, 1.0, 0.0), (1, 1, 1.0, 0.0))


def test_embed_matches_kron():
    h = relation_for(GateKind.H).to_matrix()
    eye = np.eye(2)
    # Combined position 0 is the most significant local bit.
    assert np.allclose(_embed(h, (0,), (0, 1)), np.kron(h, eye))
    assert np.allclose(_embed(h, (1,), (0, 1)), np.kron(eye, h))
    cx = relation_for(GateKind.CX).to_matrix()
    assert np.allclose(_embed(cx, (0, 1), (0, 1)), cx)
    assert np.allclose(_embed(cx, (0, 1), (0, 1, 2)), np.kron(cx, eye))


def test_fuse_h_h_is_identity():
    h = relation_for(GateKind.H)
    fused, combined = fuse(h, (0,), h, (0,))
    assert combined == (0,)
    assert [(e[0], e[1]) for e in fused.entries] == [(0, 0), (1, 1)]
    assert np.max(np.abs(fused.to_matrix() - np.eye(2))) <= 1e-12


def test_fuse_h_then_cx_matches_matrix_product():
    h = relation_for(GateKind.H)
    cx = relation_for(GateKind.CX)
    fused, combined = fuse(h, (0,), cx, (0, 1))
    assert combined == (0, 1)
    expected = cx.to_matrix() @ np.kron(h.to_matrix(), np.eye(2))
    assert np.max(np.abs(fused.to_matrix() - expected)) <= 1e-12


def test_fuse_commuting_bit_flips():
    x = relation_for(GateKind.X)
    fused, combined = fuse(x, (0,), x, (1,))
    assert combined == (0, 1)
    assert fused.entries == (
        (0, 3, 1.0, 0.0),
        (1, 2, 1.0, 0.0),
        (2, 1, 1.0, 0.0),
        (3, 0, 1.0, 0.0),
    )


def test_fuse_refuses_wide_support():
    cx = relation_for(GateKind.CX)
    with pytest.raises(FusionError):
        fuse(cx, (0, 1), cx, (2, 3))


def test_fuse_preserves_unitarity_and_label_dedup():
    rng = random.Random(23)
    h = relation_for(GateKind.H)
    cx = relation_for(GateKind.CX)
    first, _ = fuse(h, (0,), cx, (0, 1))
    second, _ = fuse(h, (0,), cx, (0, 1))
    assert first.label == second.label
    for _ in range(50):
        k1 = NAMED_KINDS[rng.randrange(len(NAMED_KINDS))]
        k2 = NAMED_KINDS[rng.randrange(len(NAMED_KINDS))]
        q1 = tuple(rng.sample(range(3), k1.arity))
        q2 = tuple(rng.sample(range(3), k2.arity))
        r1 = relation_for(k1, _params_for(k1, rng))
        r2 = relation_for(k2, _params_for(k2, rng))
        fused, _ = fuse(r1, q1, r2, q2)
        assert _unitarity_defect(fused) <= 1e-12


def test_fuse_associative_on_dense_matrices():
    rng = random.Random(37)
    one_qubit = [k for k in NAMED_KINDS if k.arity == 1]
    two_qubit = [k for k in NAMED_KINDS if k.arity == 2]
    for _ in range(50):
        kinds = [
            rng.choice(one_qubit + two_qubit) for _ in range(3)
        ]
        rels, quts = [], []
        for kind in kinds:
            rels.append(relation_for(kind, _params_for(kind, rng)))
            quts.append(tuple(rng.sample(range(3), kind.arity)))
        left_inner, left_q = fuse(rels[0], quts[0], rels[1], quts[1])
        left, left_qubits = fuse(left_inner, left_q, rels[2], quts[2])
        right_inner, right_q = fuse(rels[1], quts[1], rels[2], quts[2])
        right, right_qubits = fuse(rels[0], quts[0], right_inner, right_q)
        assert left_qubits == right_qubits
        diff = np.max(np.abs(left.to_matrix() - right.to_matrix()))
        assert diff <= 1e-12
