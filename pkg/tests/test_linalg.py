import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confbetti import linalg
from confbetti.complex import SparseRationalMatrix, differential_matrices, top_degree
from confbetti.linalg import rank, rank_rational, rank_via_modular_check
from confbetti.model import build_model, sphere_preset, torus_model

import _oracles


def M(rows):
    return SparseRationalMatrix.from_dense(rows)


@pytest.mark.parametrize("fn", [rank, rank_rational, rank_via_modular_check])
def test_small_examples(fn):
    assert fn(M([[1, 2], [2, 4]])).rank == 1
    assert fn(SparseRationalMatrix(3, 5)).rank == 0
    assert fn(SparseRationalMatrix(0, 0)).rank == 0


def test_torus_weight_two_degree_two():
    model = torus_model()
    _, mats = differential_matrices(model, 2, 4)
    report = rank(mats[2])
    assert report.rank == 2
    assert (report.rows, report.cols) == (3, 4)
    assert report.rank <= min(report.rows, report.cols)


@pytest.fixture(params=["dense", "sparse"])
def cutoff(request, monkeypatch):
    monkeypatch.setattr(linalg, "DENSE_CUTOFF", 10**9 if request.param == "dense" else 0)
    return request.param


def matrices(max_dim=7):
    entry = st.one_of(
        st.just(0), st.just(0), st.integers(-4, 4),
        st.fractions(min_value=-3, max_value=3, max_denominator=5),
    )
    return st.integers(0, max_dim).flatmap(
        lambda r: st.integers(0, max_dim).flatmap(
            lambda c: st.lists(st.lists(entry, min_size=c, max_size=c), min_size=r, max_size=r).map(
                lambda rows: SparseRationalMatrix(r, c, {(i, j): v for i, row in enumerate(rows) for j, v in enumerate(row)})
            )
        )
    )


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_rank_agrees_with_sympy(m):
    expected = _oracles.fraction_rank(m.to_dense())
    assert rank(m).rank == expected
    assert rank_rational(m).rank == expected
    assert rank_via_modular_check(m, seed=1).rank == expected


@settings(max_examples=150, deadline=None)
@given(matrices(9))
def test_sparse_path_agrees_with_rational(m):
    assert linalg._fraction_free_sparse(linalg._integer_rows(m)) == rank_rational(m).rank


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_transpose_invariance(m):
    assert rank(m).rank == rank(m.transpose()).rank


@settings(max_examples=150, deadline=None)
@given(matrices(), st.randoms(use_true_random=False))
def test_row_scaling_and_permutation(m, rnd):
    factors = [Fraction(rnd.choice([-3, -1, 1, 2, 5]), rnd.choice([1, 2, 7])) for _ in range(m.rows)]
    perm = list(range(m.rows))
    rnd.shuffle(perm)
    assert rank(m.scale_rows(factors).permute_rows(perm)).rank == rank(m).rank


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_modular_never_exceeds_rational(m):
    assert rank_via_modular_check(m, prime=7).rank <= rank_rational(m).rank


def test_modular_uses_a_large_prime():
    report = rank_via_modular_check(M([[1, 2], [3, 4]]), seed=3)
    p = int(report.backend.split("p=")[1].rstrip(")"))
    assert p > 2**59
    import sympy
    assert sympy.isprime(p)


def test_large_integer_growth_stays_exact():
    rnd = random.Random(0)
    n = 80
    rows = [[rnd.randint(-50, 50) for _ in range(n)] for _ in range(n - 5)]
    rows += [[sum(rows[k][j] * (k + 1) for k in range(3)) for j in range(n)] for _ in range(5)]
    m = M(rows)
    assert rank(m).rank == rank_rational(m).rank == n - 5


@pytest.mark.parametrize("model", [torus_model(), build_model(sphere_preset(1))], ids=lambda m: m.name)
@pytest.mark.parametrize("n", range(0, 9))
def test_backends_agree_on_differentials(model, n, cutoff):
    _, mats = differential_matrices(model, n, top_degree(model, n))
    for m in mats:
        r = rank(m).rank
        assert r == rank_rational(m).rank
        assert r == rank_via_modular_check(m, seed=n).rank
