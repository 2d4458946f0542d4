"""Free graded-commutative algebras over Q.

An algebra is a fixed, ordered list of generators.  A monomial is the dense
exponent vector over that list (a tuple of ints); odd generators carry
exponent 0 or 1, even generators any non-negative exponent.  The stored
monomial ``(e_0, e_1, ...)`` stands for the ordered product
``g_0^e_0 g_1^e_1 ...``, so declaration order fixes every Koszul sign.

Elements are immutable maps ``monomial -> Fraction`` with zero coefficients
removed, which makes equality structural.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import UsageError

Monomial = tuple  # dense exponent vector, one entry per generator


class Degree(enum.Enum):
    """Non-integer answers of :func:`degree_of`."""

    ANY = "any"
    INHOMOGENEOUS = "inhomogeneous"

    def __repr__(self):
        return f"Degree.{self.name}"


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    weight: int = 0
    index: int = -1

    @property
    def parity(self) -> int:
        return self.degree % 2

    @property
    def is_odd(self) -> bool:
        return self.degree % 2 == 1


def _to_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str)):
        return Fraction(c)
    raise TypeError(f"coefficient must be int, str or Fraction, not {type(c).__name__}")


class GradedAlgebra:
    """The free graded-commutative algebra on an ordered generator list.

    ``generators`` is a sequence of ``(name, degree)`` or
    ``(name, degree, weight)`` tuples.  When ``weighted`` is false the lower
    grading is absent and asking for weights is an error.
    """

    def __init__(self, generators: Iterable, weighted: bool = True, name: str = ""):
        gens = []
        for k, spec in enumerate(generators):
            if isinstance(spec, Generator):
                spec = (spec.name, spec.degree, spec.weight)
            gname, deg, *rest = spec
            weight = rest[0] if rest else 0
            if deg < 0 or weight < 0:
                raise UsageError(f"generator {gname}: degree and weight must be non-negative")
            if not weighted:
                weight = 0
            gens.append(Generator(gname, int(deg), int(weight), k))
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise UsageError(f"duplicate generator names in {names}")
        self.name = name
        self.weighted = weighted
        self.generators = tuple(gens)
        self.ngens = len(gens)
        self._index = {g.name: g.index for g in gens}
        self._degrees = tuple(g.degree for g in gens)
        self._weights = tuple(g.weight for g in gens)
        self._odd = tuple(g.is_odd for g in gens)
        self.unit_monomial = (0,) * self.ngens

    def __repr__(self):
        names = ", ".join(self.names)
        return f"GradedAlgebra({self.name or '?'}: {names})"

    @property
    def names(self) -> tuple:
        return tuple(g.name for g in self.generators)

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UsageError(f"no generator named {name!r} in {self!r}") from None

    def generator(self, name: str) -> Generator:
        return self.generators[self.index_of(name)]

    # -- element constructors ------------------------------------------------

    def zero(self) -> "Element":
        return Element(self, {})

    def one(self) -> "Element":
        return Element(self, {self.unit_monomial: Fraction(1)})

    def scalar(self, c) -> "Element":
        return Element(self, {self.unit_monomial: _to_fraction(c)})

    def gen(self, name: str) -> "Element":
        k = self.index_of(name)
        m = [0] * self.ngens
        m[k] = 1
        return Element(self, {tuple(m): Fraction(1)})

    def gens(self) -> dict:
        """All generators as elements, keyed by name."""
        return {g.name: self.gen(g.name) for g in self.generators}

    def monomial(self, exponents, coeff=1) -> "Element":
        m = self.check_monomial(exponents)
        if m is None:
            return self.zero()
        return Element(self, {m: _to_fraction(coeff)})

    def check_monomial(self, exponents):
        """Normalize a dense or ``{name: exp}`` exponent spec; ``None`` means zero."""
        if isinstance(exponents, Mapping):
            m = [0] * self.ngens
            for key, e in exponents.items():
                k = key if isinstance(key, int) else self.index_of(key)
                m[k] = e
        else:
            m = list(exponents)
        if len(m) != self.ngens or any(e < 0 for e in m):
            raise UsageError(f"bad exponent vector {exponents!r} for {self!r}")
        if any(odd and e > 1 for odd, e in zip(self._odd, m)):
            return None
        return tuple(m)

    # -- monomial arithmetic -------------------------------------------------

    def mono_degree(self, m: Monomial) -> int:
        return sum(e * d for e, d in zip(m, self._degrees))

    def mono_weight(self, m: Monomial) -> int:
        if not self.weighted:
            raise UsageError(f"{self!r} carries no weight grading")
        return sum(e * w for e, w in zip(m, self._weights))

    def odd_mask(self, m: Monomial) -> int:
        mask = 0
        for k, e in enumerate(m):
            if e and self._odd[k]:
                mask |= 1 << k
        return mask

    def mono_mul(self, a: Monomial, b: Monomial):
        """Return ``(sign, a*b)`` in normal form, or ``None`` if the product vanishes.

        The sign is (-1)^k, k counting pairs (x in b, y in a) of odd
        occurrences with index(x) < index(y): each such x must move left past y.
        """
        amask = self.odd_mask(a)
        bmask = self.odd_mask(b)
        if amask & bmask:
            return None
        swaps = 0
        rest = bmask
        while rest:
            low = rest & -rest
            j = low.bit_length() - 1
            swaps += (amask >> (j + 1)).bit_count()
            rest ^= low
        m = tuple(x + y for x, y in zip(a, b))
        return (-1 if swaps & 1 else 1), m

    def mono_str(self, m: Monomial) -> str:
        parts = []
        for g, e in zip(self.generators, m):
            if e == 1:
                parts.append(g.name)
            elif e > 1:
                parts.append(f"{g.name}^{e}")
        return "*".join(parts) if parts else "1"

    # -- parsing -------------------------------------------------------------

    _TERM = re.compile(r"\s*([+-]?)\s*([^+-]+)")

    def parse(self, text: str) -> "Element":
        """Parse ``"2*v_1^2 - 1/2*v_a*v_b + w_1"``.

        Factors are multiplied left to right inside the algebra, so the
        written order matters for odd generators.
        """
        text = text.strip()
        if text in ("", "0"):
            return self.zero()
        pos = 0
        total = self.zero()
        while pos < len(text):
            match = self._TERM.match(text, pos)
            if not match or match.end() == pos:
                raise UsageError(f"cannot parse {text!r} at offset {pos}")
            sign, body = match.groups()
            term = self.one()
            for factor in body.split("*"):
                factor = factor.strip()
                if re.fullmatch(r"\d+(/\d+)?", factor):
                    term = term * Fraction(factor)
                    continue
                base, _, exp = factor.partition("^")
                power = int(exp) if exp else 1
                term = term * self.gen(base.strip()) ** power
            total = total - term if sign == "-" else total + term
            pos = match.end()
        return total


class Element:
    """Immutable finite Q-linear combination of normal-form monomials."""

    __slots__ = ("algebra", "terms", "_hash")

    def __init__(self, algebra: GradedAlgebra, terms: Mapping):
        self.algebra = algebra
        self.terms = {m: Fraction(c) for m, c in terms.items() if c != 0}
        self._hash = None

    @classmethod
    def _raw(cls, algebra, terms):
        # terms already normalized: Fraction values, no zeros
        obj = cls.__new__(cls)
        obj.algebra = algebra
        obj.terms = terms
        obj._hash = None
        return obj

    def _same(self, other: "Element"):
        if other.algebra is not self.algebra:
            raise UsageError(
                f"elements live in different algebras: {self.algebra!r} vs {other.algebra!r}"
            )

    def _coerce(self, other):
        if isinstance(other, Element):
            self._same(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.algebra.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return Element._raw(self.algebra, terms)

    __radd__ = __add__

    def __neg__(self):
        return Element._raw(self.algebra, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return self.algebra.zero()
            return Element._raw(self.algebra, {m: c * other for m, c in self.terms.items()})
        if not isinstance(other, Element):
            return NotImplemented
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise UsageError("negative powers are not defined")
        result = self.algebra.one()
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.algebra.scalar(other)
        if not isinstance(other, Element):
            return NotImplemented
        return self.algebra is other.algebra and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((id(self.algebra), frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, monomial) -> Fraction:
        return self.terms.get(tuple(monomial), Fraction(0))

    def monomials(self) -> list:
        return sorted(self.terms)

    def degree(self):
        return degree_of(self)

    def weight(self):
        weights = {self.algebra.mono_weight(m) for m in self.terms}
        if not weights:
            return Degree.ANY
        if len(weights) > 1:
            return Degree.INHOMOGENEOUS
        return weights.pop()

    def __repr__(self):
        return f"<{self}>"

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        # higher degree first, then by exponent vector, for readable output
        for m in sorted(self.terms, key=lambda m: (-self.algebra.mono_degree(m), m), reverse=False):
            c = self.terms[m]
            sign = "-" if c < 0 else "+"
            c = abs(c)
            body = self.algebra.mono_str(m)
            if body == "1":
                text = str(c)
            elif c == 1:
                text = body
            else:
                text = f"{c}*{body}"
            out.append((sign, text))
        first_sign, first = out[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, text in out[1:]:
            s += f" {sign} {text}"
        return s


def multiply(a: Element, b: Element) -> Element:
    """Bilinear Koszul-signed product."""
    a._same(b)
    alg = a.algebra
    terms: dict = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            prod = alg.mono_mul(ma, mb)
            if prod is None:
                continue
            sign, m = prod
            c = terms.get(m, 0) + sign * ca * cb
            if c:
                terms[m] = c
            else:
                terms.pop(m, None)
    return Element._raw(alg, terms)


def degree_of(x: Element):
    """Common degree of all terms, ``Degree.INHOMOGENEOUS``, or ``Degree.ANY`` for zero."""
    degrees = {x.algebra.mono_degree(m) for m in x.terms}
    if not degrees:
        return Degree.ANY
    if len(degrees) > 1:
        return Degree.INHOMOGENEOUS
    return degrees.pop()


def _accumulate(terms: dict, m, c):
    s = terms.get(m, 0) + c
    if s:
        terms[m] = s
    else:
        terms.pop(m, None)


class Derivation:
    """Degree +1 derivation determined by its values on generators.

    Images are given by generator name (or index); missing generators map to
    zero.  Evaluation on monomials is cached.
    """

    def __init__(self, algebra: GradedAlgebra, images: Mapping):
        self.algebra = algebra
        imgs = {}
        for key, img in images.items():
            k = key if isinstance(key, int) else algebra.index_of(key)
            if isinstance(img, str):
                img = algebra.parse(img)
            if img.algebra is not algebra:
                raise UsageError(f"image of {algebra.generators[k].name} lives in another algebra")
            if img:
                deg = degree_of(img)
                want = algebra.generators[k].degree + 1
                if deg != want:
                    raise UsageError(
                        f"image of {algebra.generators[k].name} has degree {deg}, expected {want}"
                    )
                imgs[k] = img
        self.images = imgs
        self._cache: dict = {}

    def image(self, name) -> Element:
        k = name if isinstance(name, int) else self.algebra.index_of(name)
        return self.images.get(k, self.algebra.zero())

    def on_monomial(self, m: Monomial) -> dict:
        """Leibniz expansion of one normal-form monomial, as a term dict (do not mutate)."""
        cached = self._cache.get(m)
        if cached is not None:
            return cached
        alg = self.algebra
        n = alg.ngens
        terms: dict = {}
        prefix_deg = 0
        for k, e in enumerate(m):
            if not e:
                continue
            img = self.images.get(k)
            if img is not None:
                left = m[:k] + (e - 1,) + (0,) * (n - k - 1)
                right = (0,) * (k + 1) + m[k + 1:]
                scale = -e if prefix_deg & 1 else e
                for mi, ci in img.terms.items():
                    p1 = alg.mono_mul(left, mi)
                    if p1 is None:
                        continue
                    p2 = alg.mono_mul(p1[1], right)
                    if p2 is None:
                        continue
                    _accumulate(terms, p2[1], p1[0] * p2[0] * scale * ci)
            prefix_deg += e * alg._degrees[k]
        self._cache[m] = terms
        return terms

    def __call__(self, x: Element) -> Element:
        return apply_derivation(self, x)

    def __getstate__(self):
        return {"algebra": self.algebra, "images": self.images}

    def __setstate__(self, state):
        self.algebra = state["algebra"]
        self.images = state["images"]
        self._cache = {}


def apply_derivation(d: Derivation, x: Element) -> Element:
    if x.algebra is not d.algebra:
        raise UsageError(f"derivation on {d.algebra!r} applied to element of {x.algebra!r}")
    terms: dict = {}
    for m, c in x.terms.items():
        for mo, co in d.on_monomial(m).items():
            _accumulate(terms, mo, c * co)
    return Element._raw(d.algebra, terms)


class Morphism:
    """Algebra homomorphism given by degree-preserving images of generators.

    Unlisted generators map to zero.  Images may be elements of the target
    algebra or strings parsed there.
    """

    def __init__(self, source: GradedAlgebra, target: GradedAlgebra, images: Mapping, name: str = ""):
        self.source = source
        self.target = target
        self.name = name
        imgs = {}
        for key, img in images.items():
            k = key if isinstance(key, int) else source.index_of(key)
            if isinstance(img, str):
                img = target.parse(img)
            elif isinstance(img, (int, Fraction)):
                img = target.scalar(img)
            if img.algebra is not target:
                raise UsageError(f"image of {source.generators[k].name} is not in the target algebra")
            deg = degree_of(img)
            if deg is not Degree.ANY and deg != source.generators[k].degree:
                raise UsageError(f"image of {source.generators[k].name} does not preserve degree")
            imgs[k] = img
        self.images = imgs
        self._cache: dict = {}

    def image(self, name) -> Element:
        k = name if isinstance(name, int) else self.source.index_of(name)
        return self.images.get(k, self.target.zero())

    def on_monomial(self, m: Monomial) -> Element:
        cached = self._cache.get(m)
        if cached is not None:
            return cached
        result = self.target.one()
        for k, e in enumerate(m):
            if e:
                result = result * (self.image(k) ** e)
        self._cache[m] = result
        return result

    def __call__(self, x: Element) -> Element:
        if x.algebra is not self.source:
            raise UsageError(f"{self.name or 'morphism'} applied outside its source algebra")
        terms: dict = {}
        for m, c in x.terms.items():
            for mo, co in self.on_monomial(m).terms.items():
                _accumulate(terms, mo, c * co)
        return Element._raw(self.target, terms)

    def __getstate__(self):
        return {k: v for k, v in self.__dict__.items() if k != "_cache"}

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._cache = {}


def divide_by_generator(x: Element, name: str) -> Element:
    """Exact quotient ``x / g`` for an even generator ``g`` dividing every term."""
    alg = x.algebra
    k = alg.index_of(name)
    if alg.generators[k].is_odd:
        raise UsageError("division is only defined for even generators")
    terms = {}
    for m, c in x.terms.items():
        if m[k] == 0:
            raise UsageError(f"{name} does not divide {x}")
        terms[m[:k] + (m[k] - 1,) + m[k + 1:]] = c
    return Element._raw(alg, terms)
