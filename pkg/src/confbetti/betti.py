"""Betti tables of Félix–Thomas models, closed forms, and verification drivers."""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

from .complex import (
    SparseRationalMatrix,
    assemble_differential,
    assemble_map,
    differential_matrices,
    enumerate_basis,
    top_degree,
)
from .errors import ConsistencyError, UsageError
from .linalg import rank, rank_of_vectors, rank_rational, rank_via_modular_check
from .model import (
    ModelDGA,
    p_map,
    p_target_algebra,
    phi_map,
    pi_map,
    theta0_model,
    theta_algebra,
    theta_model,
    top_cocycle_basis,
    torus_model,
)

JOBS_ENV = "CONFBETTI_JOBS"

BACKENDS = {
    "fraction-free": rank,
    "rational": rank_rational,
    "modular": rank_via_modular_check,
}


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class BettiTable:
    manifold: str
    n: Optional[int]
    dims: list
    slice_dims: list
    ranks: list
    notes: list = field(default_factory=list)

    def __post_init__(self):
        self.check()

    def check(self):
        for i, dim in enumerate(self.dims):
            lower = self.ranks[i - 1] if i > 0 else 0
            if dim != self.slice_dims[i] - self.ranks[i] - lower:
                raise ConsistencyError(f"rank-nullity bookkeeping broken at i={i}")
            if dim < 0:
                raise ConsistencyError(f"negative Betti number at i={i}")

    @property
    def euler(self) -> int:
        return sum((-1) ** i * d for i, d in enumerate(self.dims))

    @property
    def euler_slices(self) -> int:
        return sum((-1) ** i * d for i, d in enumerate(self.slice_dims[: len(self.dims)]))

    def trimmed(self) -> list:
        dims = list(self.dims)
        while len(dims) > 1 and dims[-1] == 0:
            dims.pop()
        return dims

    def __getitem__(self, i):
        return self.dims[i] if 0 <= i < len(self.dims) else 0


def _ranks(mats, jobs: int, backend: str) -> list:
    fn = BACKENDS[backend]
    if jobs > 1 and len(mats) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(fn, mats))
    else:
        reports = [fn(m) for m in mats]
    return [r.rank for r in reports]


def _table(name, n, slices, mats, jobs, backend, notes):
    ranks = _ranks(mats, jobs, backend)
    i_max = len(mats) - 1
    slice_dims = [len(s) for s in slices[: i_max + 1]]
    dims = [slice_dims[i] - ranks[i] - (ranks[i - 1] if i else 0) for i in range(i_max + 1)]
    return BettiTable(name, n, dims, slice_dims, ranks, notes)


def betti(model: ModelDGA, n: int, jobs: Optional[int] = None, backend: str = "fraction-free") -> BettiTable:
    """dim H^i(Ω_n, D) for 0 <= i <= top degree in weight n."""
    if not model.weighted:
        raise UsageError("betti() needs a weight-graded model; use betti_graded_only for Θ-type complexes")
    if n < 0:
        raise UsageError(f"n must be non-negative, got {n}")
    jobs = default_jobs() if jobs is None else jobs
    slices, mats = differential_matrices(model, n, top_degree(model, n))
    notes = list(model.notes)
    if n in (0, 1):
        notes.append("n <= 1: C_1(X) ≃ X" if n == 1 else "n = 0: Omega_0 = Q")
    elif model.name.startswith("sphere") and n == 2:
        notes.append("outside stated range: the sphere formula is claimed for n >= 3")
    return _table(model.name, n, slices, mats, jobs, backend, notes)


def betti_graded_only(model: ModelDGA, i_max: int, jobs: Optional[int] = None,
                      backend: str = "fraction-free") -> list:
    """dim H^i for 0 <= i <= i_max of a complex graded by degree alone."""
    if any(g.degree <= 0 for g in model.algebra.generators):
        raise UsageError(f"{model.name}: degree-0 generators make the degree slices infinite")
    if model.weighted:
        raise UsageError(f"{model.name} is weight graded; use betti()")
    jobs = default_jobs() if jobs is None else jobs
    slices, mats = differential_matrices(model, None, i_max)
    return _table(model.name, None, slices, mats, jobs, backend, []).dims


# -- closed forms -------------------------------------------------------------

def torus_closed_form(n: int, i: int) -> int:
    if n < 2:
        raise UsageError(f"the closed form holds for n >= 2, got n={n}")
    if i < 0:
        raise UsageError(f"degree must be non-negative, got {i}")
    if i == 0:
        return 1
    if i == 1:
        return 2
    if i < n:
        return 2 * i - 1
    if i == n:
        return (3 * n - 4) // 2 if n % 2 == 0 else (3 * n - 1) // 2
    if i == n + 1:
        return (n - 2) // 2 if n % 2 == 0 else (n + 1) // 2
    return 0


def sphere_closed_form(d: int, n: int, i: int) -> int:
    if n < 3:
        raise UsageError(f"the sphere formula holds for n >= 3, got n={n}")
    return 1 if i in (0, 4 * d - 1) else 0


def poincare_series_coeffs(degrees, i_max: int) -> list:
    """Coefficients of prod(1 + t^odd) / prod(1 - t^even) up to t^i_max."""
    coeffs = [1] + [0] * i_max
    for deg in degrees:
        if deg <= 0:
            raise UsageError(f"generator degrees must be positive, got {deg}")
        if deg % 2:
            for i in range(i_max, deg - 1, -1):
                coeffs[i] += coeffs[i - deg]
        else:
            for i in range(deg, i_max + 1):
                coeffs[i] += coeffs[i - deg]
    return coeffs


# -- verification drivers --------------------------------------------------------

@dataclass
class TheoremEntry:
    n: int
    slice_dims: list
    ranks: list
    betti: list
    closed_form: list
    match: bool
    euler: int


@dataclass
class TheoremReport:
    n_max: int
    entries: list
    stability_checked: int = 0
    stability_failures: list = field(default_factory=list)
    manifold: str = "torus"

    @property
    def passed(self) -> bool:
        return all(e.match and e.euler == 0 for e in self.entries) and not self.stability_failures

    def to_dict(self) -> dict:
        return {
            "manifold": self.manifold,
            "n_max": self.n_max,
            "entries": [asdict(e) for e in self.entries],
            "stability": {"checked": self.stability_checked, "failures": self.stability_failures},
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        return entries_csv(self.entries)


def entries_csv(entries) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "i", "slice_dim", "rank", "betti", "closed_form", "match"])
    for e in entries:
        for i, dim in enumerate(e.betti):
            cf = e.closed_form[i] if e.closed_form is not None else ""
            match = "" if e.closed_form is None else str(dim == cf).lower()
            writer.writerow([e.n, i, e.slice_dims[i], e.ranks[i], dim, cf, match])
    return buf.getvalue()


def torus_closed_form_list(n: int, length: int) -> list:
    return [torus_closed_form(n, i) for i in range(length)]


def stability_failures(tables: dict) -> tuple:
    """Compare dims(n+1)[i] with dims(n)[i] for i < n; returns (checked, failures)."""
    checked = 0
    failures = []
    for n in sorted(tables):
        if n + 1 not in tables:
            continue
        for i in range(n):
            checked += 1
            a, b = tables[n][i], tables[n + 1][i]
            if a != b:
                failures.append({"n": n, "i": i, "dims_n": a, "dims_n_plus_1": b})
    return checked, failures


def verify_theorem(n_max: int, jobs: Optional[int] = None, n_min: int = 2) -> TheoremReport:
    if n_max < 2:
        raise UsageError(f"n_max must be at least 2, got {n_max}")
    model = torus_model()
    entries = []
    tables = {}
    for n in range(n_min, n_max + 1):
        table = betti(model, n, jobs=jobs)
        tables[n] = table
        cf = torus_closed_form_list(n, len(table.dims))
        entries.append(TheoremEntry(
            n, table.slice_dims, table.ranks, table.dims, cf, table.dims == cf, table.euler
        ))
    checked, failures = stability_failures(tables)
    return TheoremReport(n_max, entries, checked, failures)


# -- structural checks ----------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    n: Optional[int] = None
    detail: str = ""


def check_dd(model: ModelDGA, n: int) -> Check:
    """d_{i+1} d_i = 0 on every slice of weight n."""
    slices, mats = differential_matrices(model, n, top_degree(model, n))
    bad = [i for i in range(len(mats) - 1) if not (mats[i + 1] @ mats[i]).is_zero()]
    return Check("D∘D = 0", not bad, n, f"nonzero composites at i={bad}" if bad else "")


def check_euler(model: ModelDGA, n: int) -> Check:
    slices = [enumerate_basis(model, n, i) for i in range(top_degree(model, n) + 1)]
    chi = sum((-1) ** i * len(s) for i, s in enumerate(slices))
    return Check("χ(Ω_n) = 0", chi == 0, n, f"chi={chi}")


def check_pi(n: int) -> list:
    """π commutes with the differentials on Ω_n and is onto Θ^i for i < n."""
    omega = torus_model()
    theta = theta_model()
    pi = pi_map(n)
    bad = []
    for i in range(top_degree(omega, n) + 1):
        for x in enumerate_basis(omega, n, i).elements():
            if pi(omega.d(x)) != theta.d(pi(x)):
                bad.append(str(x))
    checks = [Check("π∘D = d∘π", not bad, n, f"fails on {bad[:5]}" if bad else "")]
    short = []
    for i in range(n):
        dom = enumerate_basis(omega, n, i)
        cod = enumerate_basis(theta_algebra(), None, i)
        if rank(assemble_map(pi, dom, cod)).rank != len(cod):
            short.append(i)
    checks.append(Check("π onto Θ^i for i < n", not short, n, f"not onto at i={short}" if short else ""))
    omega_dims = betti(omega, n)
    theta_dims = betti_graded_only(theta, max(n - 1, 0))
    diff = [i for i in range(n) if omega_dims[i] != theta_dims[i]]
    checks.append(Check("H^i(Ω_n) = H^i(Θ, d) for i < n", not diff, n, f"differ at i={diff}" if diff else ""))
    return checks


def check_phi(max_degree: int) -> list:
    """φ is a chain map (Θ, d₀) → (Θ, d) and bijective in each degree <= max_degree."""
    phi = phi_map()
    d = theta_model()
    d0 = theta0_model()
    alg = theta_algebra()
    gens_bad = [g.name for g in alg.generators
                if d.d(phi(alg.gen(g.name))) != phi(d0.d(alg.gen(g.name)))]
    mono_bad = []
    not_bijective = []
    for i in range(max_degree + 1):
        sl = enumerate_basis(alg, None, i)
        for x in sl.elements():
            if d.d(phi(x)) != phi(d0.d(x)):
                mono_bad.append(str(x))
        if rank(assemble_map(phi, sl, sl)).rank != len(sl):
            not_bijective.append(i)
    return [
        Check("φ chain map on generators", not gens_bad, None, f"fails on {gens_bad}" if gens_bad else ""),
        Check(f"φ chain map on monomials of degree <= {max_degree}", not mono_bad, None,
              f"fails on {mono_bad[:5]}" if mono_bad else ""),
        Check(f"φ bijective in degrees <= {max_degree}", not not_bijective, None,
              f"singular at i={not_bijective}" if not_bijective else ""),
    ]


def check_p(n: int) -> Check:
    """p∘D = 0 on every monomial of Ω_n."""
    omega = torus_model()
    p = p_map(n)
    bad = []
    for i in range(top_degree(omega, n) + 1):
        for x in enumerate_basis(omega, n, i).elements():
            if p(omega.d(x)):
                bad.append(str(x))
    return Check("p∘D = 0", not bad, n, f"fails on {bad[:5]}" if bad else "")


def check_top_cocycles(n: int, table: Optional[BettiTable] = None) -> list:
    """The explicit cocycles span H^{n+1}(Ω_n) and stay independent modulo boundaries."""
    omega = torus_model()
    table = table or betti(omega, n)
    basis = top_cocycle_basis(n)
    count_ok = len(basis) == table[n + 1]
    shape_bad = [str(x) for x in basis
                 if omega.d(x) or x.weight() != n or x.degree() != n + 1]
    p = p_map(n)
    target = enumerate_basis(p_target_algebra(), None, n + 1)
    images = [target.coordinates(p(x)) for x in basis]
    p_rank = rank_of_vectors(images, len(target)) if images else 0
    nonzero = all(images)
    # independence in cohomology: adding the cocycles to im(d_n) raises the rank by their count
    dom = enumerate_basis(omega, n, n)
    cod = enumerate_basis(omega, n, n + 1)
    boundary = assemble_differential(omega, dom, cod)
    cocycles = SparseRationalMatrix.from_columns(len(cod), [cod.coordinates(x) for x in basis])
    gain = rank(boundary.hstack(cocycles)).rank - rank(boundary).rank
    return [
        Check("|top cocycles| = dim H^{n+1}", count_ok, n, f"{len(basis)} vs {table[n + 1]}"),
        Check("top cocycles closed, weight n, degree n+1", not shape_bad, n,
              f"bad: {shape_bad[:3]}" if shape_bad else ""),
        Check("p-images nonzero and independent", nonzero and p_rank == len(basis), n,
              f"rank {p_rank} of {len(basis)}"),
        Check("top cocycles independent modulo boundaries", gain == len(basis), n,
              f"rank gain {gain} of {len(basis)}"),
    ]


def check_stable_range(table: BettiTable) -> Check:
    n = table.n
    want = [1, 2] + [2 * i - 1 for i in range(2, n)]
    got = [table[i] for i in range(n)]
    return Check("H^i = 2i-1 for 2 <= i < n", got == want[:n], n, "" if got == want[:n] else f"{got} vs {want[:n]}")


def check_backends(model: ModelDGA, n: int, seed: Optional[int] = None) -> Check:
    """Fraction-free and modular ranks agree on every differential of weight n."""
    _, mats = differential_matrices(model, n, top_degree(model, n))
    bad = []
    for i, m in enumerate(mats):
        if rank(m).rank != rank_via_modular_check(m, seed=seed).rank:
            bad.append(i)
    return Check("fraction-free rank = modular rank", not bad, n, f"disagree at i={bad}" if bad else "")


@dataclass
class StructureReport:
    n_max: int
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"n_max": self.n_max, "checks": [asdict(c) for c in self.checks], "passed": self.passed}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["check", "n", "passed", "detail"])
        for c in self.checks:
            writer.writerow([c.name, "" if c.n is None else c.n, str(c.passed).lower(), c.detail])
        return buf.getvalue()


def verify_structure(n_max: int, phi_degree: int = 10) -> StructureReport:
    if n_max < 2:
        raise UsageError(f"n_max must be at least 2, got {n_max}")
    omega = torus_model()
    checks = []
    checks.extend(check_phi(phi_degree))
    for n in range(2, n_max + 1):
        table = betti(omega, n)
        checks.append(check_dd(omega, n))
        checks.append(check_euler(omega, n))
        checks.extend(check_pi(n))
        checks.append(check_p(n))
        checks.extend(check_top_cocycles(n, table))
        checks.append(check_stable_range(table))
    return StructureReport(n_max, checks)
