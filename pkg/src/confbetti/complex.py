"""Monomial bases of graded slices and the matrices of maps between them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional

from .algebra import GradedAlgebra, Morphism
from .errors import ConsistencyError, UsageError, ValidationError


@dataclass(frozen=True, eq=False)
class BasisSlice:
    """Monomials of weight ``n`` (``None`` for unweighted algebras) and degree ``i``."""

    algebra: GradedAlgebra
    n: Optional[int]
    i: int
    monomials: tuple
    position: dict = field(repr=False)

    def __len__(self):
        return len(self.monomials)

    def __iter__(self):
        return iter(self.monomials)

    def names(self) -> list:
        return [self.algebra.mono_str(m) for m in self.monomials]

    def elements(self) -> list:
        return [self.algebra.monomial(m) for m in self.monomials]

    def coordinates(self, x) -> dict:
        """Sparse coordinate vector ``{position: coeff}`` of an element in this slice."""
        out = {}
        for m, c in x.terms.items():
            pos = self.position.get(m)
            if pos is None:
                raise ConsistencyError(
                    f"monomial {self.algebra.mono_str(m)} is not in slice (n={self.n}, i={self.i})"
                )
            out[pos] = c
        return out


def _algebra(obj) -> GradedAlgebra:
    return obj if isinstance(obj, GradedAlgebra) else obj.algebra


def enumerate_basis(model, n: Optional[int], i: int) -> BasisSlice:
    """All monomials of weight ``n`` and degree ``i``, in ascending exponent-vector order.

    ``model`` may be a model or a bare algebra.  Unweighted algebras are
    enumerated by degree alone and require ``n=None``.
    """
    return _enumerate(_algebra(model), n, i)


@lru_cache(maxsize=4096)
def _enumerate(alg: GradedAlgebra, n, i) -> BasisSlice:
    if i < 0 or (n is not None and n < 0):
        raise UsageError(f"slice indices must be non-negative, got n={n}, i={i}")
    if alg.weighted and n is None:
        if any(g.degree == 0 for g in alg.generators):
            raise UsageError(f"{alg!r}: a degree-only slice is infinite (degree-0 generator present)")
    if not alg.weighted and n is not None:
        raise UsageError(f"{alg!r} carries no weight grading; call with n=None")
    use_weight = n is not None
    gens = alg.generators
    out = []
    acc = []

    def rec(k, rw, rd):
        if k == len(gens):
            if rd == 0 and (not use_weight or rw == 0):
                out.append(tuple(acc))
            return
        g = gens[k]
        bounds = []
        if g.degree > 0:
            bounds.append(rd // g.degree)
        if use_weight and g.weight > 0:
            bounds.append(rw // g.weight)
        if not bounds:
            raise UsageError(f"{alg!r}: generator {g.name} makes slice (n={n}, i={i}) infinite")
        top = min(bounds)
        if g.is_odd:
            top = min(top, 1)
        for e in range(top + 1):
            acc.append(e)
            rec(k + 1, rw - e * g.weight, rd - e * g.degree)
            acc.pop()

    rec(0, n if use_weight else 0, i)
    monomials = tuple(sorted(out))
    return BasisSlice(alg, n, i, monomials, {m: k for k, m in enumerate(monomials)})


def top_degree(model, n: int) -> int:
    """Largest degree that can occur in weight ``n``."""
    alg = _algebra(model)
    if not alg.weighted:
        raise UsageError("top_degree needs a weight-graded algebra")
    best = Fraction(0)
    for g in alg.generators:
        if g.weight == 0:
            if g.degree > 0:
                raise UsageError(f"generator {g.name} has weight 0 and positive degree")
            continue
        best = max(best, Fraction(g.degree, g.weight))
    return int(best * n)


class SparseRationalMatrix:
    """Immutable sparse matrix over Q; entries are stored row-major with no zeros."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable | Mapping = ()):
        if isinstance(entries, Mapping):
            items = entries.items()
        else:
            items = (((r, c), v) for r, c, v in entries)
        data = {}
        for (r, c), v in items:
            if not (0 <= r < rows and 0 <= c < cols):
                raise UsageError(f"entry ({r}, {c}) outside a {rows}x{cols} matrix")
            if (r, c) in data:
                raise UsageError(f"duplicate entry at ({r}, {c})")
            v = Fraction(v)
            if v:
                data[(r, c)] = v
        self.rows = rows
        self.cols = cols
        self.entries = tuple((r, c, data[(r, c)]) for r, c in sorted(data))

    @classmethod
    def from_dense(cls, rows) -> "SparseRationalMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise UsageError("ragged dense matrix")
        return cls(len(rows), ncols, {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r) if v})

    @classmethod
    def from_columns(cls, rows: int, columns) -> "SparseRationalMatrix":
        """Build from a list of ``{row: value}`` column vectors."""
        columns = list(columns)
        return cls(rows, len(columns), {(r, j): v for j, col in enumerate(columns) for r, v in col.items()})

    @property
    def nnz(self) -> int:
        return len(self.entries)

    @property
    def shape(self) -> tuple:
        return self.rows, self.cols

    def to_dense(self) -> list:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for r, c, v in self.entries:
            out[r][c] = v
        return out

    def row_dicts(self) -> list:
        out = [dict() for _ in range(self.rows)]
        for r, c, v in self.entries:
            out[r][c] = v
        return out

    def column(self, j: int) -> dict:
        return {r: v for r, c, v in self.entries if c == j}

    def transpose(self) -> "SparseRationalMatrix":
        return SparseRationalMatrix(self.cols, self.rows, {(c, r): v for r, c, v in self.entries})

    def scale_rows(self, factors) -> "SparseRationalMatrix":
        return SparseRationalMatrix(
            self.rows, self.cols, {(r, c): v * factors[r] for r, c, v in self.entries}
        )

    def permute_rows(self, perm) -> "SparseRationalMatrix":
        """Row ``r`` moves to position ``perm[r]``."""
        return SparseRationalMatrix(self.rows, self.cols, {(perm[r], c): v for r, c, v in self.entries})

    def hstack(self, other: "SparseRationalMatrix") -> "SparseRationalMatrix":
        if other.rows != self.rows:
            raise UsageError("hstack needs equal row counts")
        data = {(r, c): v for r, c, v in self.entries}
        data.update({(r, c + self.cols): v for r, c, v in other.entries})
        return SparseRationalMatrix(self.rows, self.cols + other.cols, data)

    def __matmul__(self, other: "SparseRationalMatrix") -> "SparseRationalMatrix":
        if self.cols != other.rows:
            raise UsageError(f"shape mismatch {self.shape} @ {other.shape}")
        right = other.row_dicts()
        acc: dict = {}
        for r, k, v in self.entries:
            for c, w in right[k].items():
                acc[(r, c)] = acc.get((r, c), 0) + v * w
        return SparseRationalMatrix(self.rows, other.cols, acc)

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, SparseRationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"SparseRationalMatrix({self.rows}x{self.cols}, nnz={self.nnz})"

    def __getstate__(self):
        return (self.rows, self.cols, self.entries)

    def __setstate__(self, state):
        self.rows, self.cols, self.entries = state

    # -- text dump -------------------------------------------------------------

    def dumps(self) -> str:
        """Coordinate text: ``%%dims rows cols nnz`` then ``row col p/q`` (1-based)."""
        lines = [f"%%dims {self.rows} {self.cols} {self.nnz}"]
        for r, c, v in self.entries:
            lines.append(f"{r + 1} {c + 1} {_fmt(v)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "SparseRationalMatrix":
        header, *body = [ln for ln in text.splitlines() if ln.strip()]
        parts = header.split()
        if len(parts) != 4 or parts[0] != "%%dims":
            raise ValidationError(f"bad matrix header {header!r}")
        rows, cols, nnz = (int(p) for p in parts[1:])
        if len(body) != nnz:
            raise ValidationError(f"header announces {nnz} entries, found {len(body)}")
        entries = {}
        for line in body:
            r, c, v = line.split()
            entries[(int(r) - 1, int(c) - 1)] = Fraction(v)
        return cls(rows, cols, entries)


def _fmt(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def assemble_differential(model, domain: BasisSlice, codomain: BasisSlice) -> SparseRationalMatrix:
    """Matrix of the differential from ``domain`` to ``codomain`` (columns = domain monomials)."""
    if domain.algebra is not model.algebra or codomain.algebra is not model.algebra:
        raise UsageError("slices do not belong to the model's algebra")
    if codomain.n != domain.n or codomain.i != domain.i + 1:
        raise UsageError(
            f"codomain (n={codomain.n}, i={codomain.i}) does not follow domain (n={domain.n}, i={domain.i})"
        )
    return _assemble(model.differential.on_monomial, domain, codomain)


def assemble_map(f: Morphism, domain: BasisSlice, codomain: BasisSlice) -> SparseRationalMatrix:
    """Matrix of an algebra morphism restricted to ``domain``."""
    if domain.algebra is not f.source or codomain.algebra is not f.target:
        raise UsageError("slices do not match the morphism's source/target")
    return _assemble(lambda m: f.on_monomial(m).terms, domain, codomain)


def _assemble(image_terms, domain: BasisSlice, codomain: BasisSlice) -> SparseRationalMatrix:
    entries = {}
    for j, m in enumerate(domain.monomials):
        for mo, c in image_terms(m).items():
            row = codomain.position.get(mo)
            if row is None:
                raise ConsistencyError(
                    f"image of {domain.algebra.mono_str(m)} contains "
                    f"{codomain.algebra.mono_str(mo)}, missing from slice (n={codomain.n}, i={codomain.i})"
                )
            entries[(row, j)] = c
    return SparseRationalMatrix(len(codomain), len(domain), entries)


def differential_matrices(model, n: Optional[int], i_max: int) -> tuple:
    """Slices for degrees ``0..i_max+1`` and the differentials ``d_i`` for ``0 <= i <= i_max``."""
    slices = [enumerate_basis(model, n, i) for i in range(i_max + 2)]
    mats = [assemble_differential(model, slices[i], slices[i + 1]) for i in range(i_max + 1)]
    return slices, mats


__all__ = [
    "BasisSlice", "SparseRationalMatrix", "enumerate_basis", "assemble_differential",
    "assemble_map", "differential_matrices", "top_degree",
]
