import csv
import io
import json

import pytest
import sympy

from confbetti.betti import (
    BettiTable,
    betti,
    betti_graded_only,
    check_top_cocycles,
    poincare_series_coeffs,
    sphere_closed_form,
    stability_failures,
    torus_closed_form,
    verify_structure,
    verify_theorem,
)
from confbetti.errors import ConsistencyError, UsageError
from confbetti.model import build_model, sphere_model, theta0_model, theta_model, torus_model


def series_oracle(numerator, denominator, i_max):
    t = sympy.symbols("t")
    expr = sympy.series(numerator(t) / denominator(t), t, 0, i_max + 1).removeO()
    return [int(expr.coeff(t, i)) for i in range(i_max + 1)]


@pytest.mark.parametrize("n, expected", [
    (2, [1, 2, 1, 0, 0]),
    (3, [1, 2, 3, 4, 2, 0, 0]),
    (4, [1, 2, 3, 5, 4, 1, 0, 0, 0]),
])
def test_torus_small_tables(n, expected):
    assert betti(torus_model(), n).dims == expected


def test_sphere_d1_n5():
    dims = betti(sphere_model(1), 5).dims
    assert [i for i, d in enumerate(dims) if d] == [0, 3]
    assert dims[0] == dims[3] == 1


@pytest.mark.parametrize("model", [theta0_model(), theta_model()], ids=["d0", "d"])
def test_theta_betti(model):
    assert betti_graded_only(model, 6) == [1, 2, 3, 5, 7, 9, 11]
    assert betti_graded_only(model, 0) == [1]


def test_theta_complexes_agree_through_degree_ten():
    assert betti_graded_only(theta_model(), 10) == betti_graded_only(theta0_model(), 10)


def test_graded_only_rejects_degree_zero_generators():
    with pytest.raises(UsageError):
        betti_graded_only(torus_model(), 4)


def test_closed_form_values():
    assert torus_closed_form(10, 7) == 13
    assert torus_closed_form(10, 10) == 13
    assert torus_closed_form(10, 11) == 4
    assert torus_closed_form(7, 8) == 4
    assert torus_closed_form(7, 9) == 0
    with pytest.raises(UsageError):
        torus_closed_form(1, 0)


def test_sphere_closed_form():
    assert [sphere_closed_form(2, 4, i) for i in range(9)] == [1, 0, 0, 0, 0, 0, 0, 1, 0]
    with pytest.raises(UsageError):
        sphere_closed_form(1, 2, 0)


def test_poincare_series_of_quotient():
    got = poincare_series_coeffs([1, 1, 3, 2, 2], 12)
    assert got[:6] == [1, 2, 3, 5, 7, 9]
    assert got == series_oracle(lambda t: 1 + t**3, lambda t: (1 - t) ** 2, 12)
    assert got == series_oracle(lambda t: (1 + t) ** 2 * (1 + t**3), lambda t: (1 - t**2) ** 2, 12)


def test_poincare_series_edge_cases():
    assert poincare_series_coeffs([], 3) == [1, 0, 0, 0]
    assert poincare_series_coeffs([1], 3) == [1, 1, 0, 0]
    with pytest.raises(UsageError):
        poincare_series_coeffs([0], 3)


def test_theta0_cohomology_matches_series():
    assert betti_graded_only(theta0_model(), 10) == poincare_series_coeffs([1, 1, 3, 2, 2], 10)


@pytest.mark.parametrize("n", range(2, 13))
def test_table_matches_closed_form(n):
    table = betti(torus_model(), n)
    assert table.dims == [torus_closed_form(n, i) for i in range(len(table.dims))]
    assert table.euler == 0 == table.euler_slices


def test_table_bookkeeping():
    table = betti(torus_model(), 6)
    assert len(table.dims) == len(table.slice_dims) == len(table.ranks) == 13
    with pytest.raises(ConsistencyError):
        BettiTable("x", 1, [2], [1], [0])


def test_small_n_notes():
    t0 = betti(torus_model(), 0)
    assert t0.dims == [1]
    assert any("Omega_0" in note for note in t0.notes)
    t1 = betti(torus_model(), 1)
    assert t1.trimmed() == [1, 2, 1]  # the torus itself
    assert any("C_1(X)" in note for note in t1.notes)


def test_sphere_n2_is_labelled():
    table = betti(sphere_model(1), 2)
    assert any("outside stated range" in note for note in table.notes)


def test_jobs_do_not_change_results():
    assert betti(torus_model(), 5, jobs=2).dims == betti(torus_model(), 5, jobs=1).dims


@pytest.mark.parametrize("backend", ["rational", "modular"])
def test_alternative_backends(backend):
    assert betti(torus_model(), 6, backend=backend).dims == betti(torus_model(), 6).dims


def test_stability_helper():
    checked, failures = stability_failures({2: [1, 2, 9], 3: [1, 2, 3, 4]})
    assert checked == 2 and failures == []
    _, failures = stability_failures({3: [1, 2, 3, 4], 4: [1, 2, 4, 5, 4]})
    assert failures == [{"n": 3, "i": 2, "dims_n": 3, "dims_n_plus_1": 4}]


def test_verify_theorem_report():
    report = verify_theorem(6)
    assert report.passed
    doc = json.loads(report.to_json())
    assert [e["n"] for e in doc["entries"]] == [2, 3, 4, 5, 6]
    assert set(doc["entries"][0]) == {"n", "slice_dims", "ranks", "betti", "closed_form", "match", "euler"}
    assert all(e["euler"] == 0 for e in doc["entries"])
    rows = list(csv.DictReader(io.StringIO(report.to_csv())))
    assert len(rows) == sum(2 * n + 1 for n in range(2, 7))
    assert all(r["match"] == "true" for r in rows)
    assert report.to_json() == verify_theorem(6).to_json()


def test_verify_structure_small():
    report = verify_structure(4, phi_degree=6)
    assert report.passed, [c for c in report.checks if not c.passed]
    names = {c.name for c in report.checks}
    assert "p∘D = 0" in names and "π∘D = d∘π" in names


def test_top_cocycle_check_detects_a_wrong_count():
    table = betti(torus_model(), 5)
    bad = BettiTable(table.manifold, 5, list(table.dims), list(table.slice_dims), list(table.ranks))
    bad.dims[6] += 1
    bad.slice_dims[6] += 1
    assert not check_top_cocycles(5, bad)[0].passed


def test_non_torus_file_model():
    # CP^2: classes 1, h, h^2 with h*h = h^2
    from confbetti.model import ManifoldCohomology

    mc = ManifoldCohomology.from_products("CP2", 4, [("1", 0), ("h", 2), ("hh", 4)], {("h", "h"): {"hh": 1}})
    model = build_model(mc)
    for n in range(0, 6):
        table = betti(model, n)
        assert table.euler == table.euler_slices
        assert all(d >= 0 for d in table.dims)
    assert betti(model, 1).trimmed() == [1, 0, 1, 0, 1]  # C_1(CP^2) = CP^2
