"""Félix–Thomas models built from the cohomology ring of a manifold.

For a closed even-dimensional manifold ``M`` of dimension ``m`` with graded
basis ``e_k`` of ``H*(M)``, the model is the free algebra on generators

* ``v_e`` of degree ``m - |e|`` and weight 1,
* ``w_e`` of degree ``2m - 1 - |e|`` and weight 2,

with ``D(v_e) = 0`` and ``D(w_k) = sum_{i,j} c^k_{ij} v_i v_j`` over all
ordered pairs, where ``e_i ∪ e_j = sum_k c^k_{ij} e_k``.  The weight-n part
of ``(Ω, D)`` computes ``H*(C_n(M); Q)``.  Nilpotency and orientability of
``M`` are hypotheses the caller is responsible for; they are not checked.

The torus-specific complexes (Θ, d), (Θ, d₀) and the maps π, φ, p used to
analyse them are provided here as well.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Mapping, Optional

from .algebra import (
    Derivation,
    Element,
    GradedAlgebra,
    Morphism,
    apply_derivation,
    divide_by_generator,
)
from .errors import UnsupportedInputError, UsageError, ValidationError


@dataclass(frozen=True)
class ManifoldCohomology:
    """Graded basis of ``H*(M; Q)`` with cup-product structure constants.

    ``cup`` maps an ordered pair of class indices ``(i, j)`` to
    ``{k: c^k_ij}``; only nonzero constants are stored, and products with the
    unit class are always present.
    """

    name: str
    dim: int
    classes: tuple  # ((name, degree), ...)
    cup: Mapping = field(compare=True)

    @property
    def class_names(self) -> tuple:
        return tuple(c for c, _ in self.classes)

    @property
    def degrees(self) -> tuple:
        return tuple(d for _, d in self.classes)

    @property
    def unit(self) -> int:
        zero = [k for k, (_, d) in enumerate(self.classes) if d == 0]
        if len(zero) != 1:
            raise ValidationError(f"{self.name}: expected exactly one degree-0 class, found {len(zero)}")
        return zero[0]

    def index(self, name: str) -> int:
        try:
            return self.class_names.index(name)
        except ValueError:
            raise ValidationError(f"{self.name}: unknown class {name!r}") from None

    def product(self, i: int, j: int) -> dict:
        return dict(self.cup.get((i, j), {}))

    def betti(self) -> list:
        out = [0] * (self.dim + 1)
        for _, d in self.classes:
            if 0 <= d <= self.dim:
                out[d] += 1
        return out

    @classmethod
    def from_products(cls, name: str, dim: int, classes, products: Mapping) -> "ManifoldCohomology":
        """Build from ``{(left_name, right_name): {result_name: coeff}}``.

        Unit products not listed are filled in; listed ones are kept as given
        and checked by :meth:`validate`.
        """
        classes = tuple((str(c), int(d)) for c, d in classes)
        names = [c for c, _ in classes]
        if len(set(names)) != len(names):
            raise ValidationError(f"{name}: duplicate class names {names}")
        index = {c: k for k, c in enumerate(names)}

        def idx(c):
            if c not in index:
                raise ValidationError(f"{name}: cup table mentions unknown class {c!r}")
            return index[c]

        cup: dict = {}
        for (left, right), result in products.items():
            key = (idx(left), idx(right))
            entry = cup.setdefault(key, {})
            for target, coeff in result.items():
                k = idx(target)
                entry[k] = entry.get(k, Fraction(0)) + Fraction(coeff)
        zero_degree = [k for k, (_, d) in enumerate(classes) if d == 0]
        if len(zero_degree) == 1:
            u = zero_degree[0]
            for k in range(len(classes)):
                cup.setdefault((u, k), {k: Fraction(1)})
                cup.setdefault((k, u), {k: Fraction(1)})
        cup = {
            key: {k: c for k, c in sorted(entry.items()) if c != 0}
            for key, entry in sorted(cup.items())
        }
        cup = {key: entry for key, entry in cup.items() if entry}
        mc = cls(name, int(dim), classes, cup)
        mc.validate()
        return mc

    def validate(self) -> None:
        """Raise :class:`ValidationError` naming the first failing identity."""
        if self.dim <= 0:
            raise ValidationError(f"{self.name}: dimension must be positive, got {self.dim}")
        for c, d in self.classes:
            if not 0 <= d <= self.dim:
                raise ValidationError(f"{self.name}: class {c} has degree {d} outside [0, {self.dim}]")
        u = self.unit
        names = self.class_names
        deg = self.degrees
        nc = len(self.classes)
        for (i, j), entry in self.cup.items():
            for k in entry:
                if deg[k] != deg[i] + deg[j]:
                    raise ValidationError(
                        f"{self.name}: degree rule fails: {names[i]} ∪ {names[j]} has a "
                        f"{names[k]} component (degrees {deg[i]}+{deg[j]} != {deg[k]})"
                    )
        for k in range(nc):
            for key in ((u, k), (k, u)):
                if self.product(*key) != {k: 1}:
                    a, b = names[key[0]], names[key[1]]
                    raise ValidationError(f"{self.name}: unit law fails: {a} ∪ {b} != {names[k]}")
        for i in range(nc):
            for j in range(nc):
                sign = -1 if (deg[i] * deg[j]) % 2 else 1
                lhs = self.product(i, j)
                rhs = {k: sign * c for k, c in self.product(j, i).items()}
                if lhs != rhs:
                    raise ValidationError(
                        f"{self.name}: graded commutativity fails: "
                        f"{names[i]} ∪ {names[j]} != (-1)^({deg[i]}·{deg[j]}) {names[j]} ∪ {names[i]}"
                    )
        for i in range(nc):
            for j in range(nc):
                for l in range(nc):
                    if self._triple(i, j, l, left=True) != self._triple(i, j, l, left=False):
                        raise ValidationError(
                            f"{self.name}: associativity fails: "
                            f"({names[i]} ∪ {names[j]}) ∪ {names[l]} != {names[i]} ∪ ({names[j]} ∪ {names[l]})"
                        )

    def _triple(self, i, j, l, left):
        out: dict = {}
        if left:
            for a, ca in self.product(i, j).items():
                for k, cb in self.product(a, l).items():
                    out[k] = out.get(k, 0) + ca * cb
        else:
            for a, ca in self.product(j, l).items():
                for k, cb in self.product(i, a).items():
                    out[k] = out.get(k, 0) + ca * cb
        return {k: c for k, c in out.items() if c != 0}


# -- manifold description files ---------------------------------------------

_COEFF = re.compile(r"-?\d+(/\d+)?")
# int <-> str conversion is capped (sys.int_info.str_digits_check_threshold);
# coefficients may be longer, so convert in chunks.
_CHUNK = 1000


def _int_from_digits(digits: str) -> int:
    value = 0
    for start in range(0, len(digits), _CHUNK):
        piece = digits[start:start + _CHUNK]
        value = value * 10 ** len(piece) + int(piece)
    return value


def _int_to_digits(value: int) -> str:
    if value < 0:
        return "-" + _int_to_digits(-value)
    if value < 10 ** _CHUNK:
        return str(value)
    high, low = divmod(value, 10 ** _CHUNK)
    return _int_to_digits(high) + str(low).zfill(_CHUNK)


def parse_coeff(text) -> Fraction:
    if not isinstance(text, str) or not _COEFF.fullmatch(text):
        raise ValidationError(f"coefficient {text!r} is not of the form 'p' or 'p/q'")
    num, _, den = text.partition("/")
    sign = -1 if num.startswith("-") else 1
    num = _int_from_digits(num.lstrip("-"))
    den = _int_from_digits(den) if den else 1
    if den == 0:
        raise ValidationError(f"coefficient {text!r} has zero denominator")
    return Fraction(sign * num, den)


def format_coeff(c) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return _int_to_digits(c.numerator)
    return f"{_int_to_digits(c.numerator)}/{_int_to_digits(c.denominator)}"


def manifold_from_json(data: Mapping) -> ManifoldCohomology:
    try:
        name = data["name"]
        dim = data["dim"]
        classes = [(c["name"], c["degree"]) for c in data["classes"]]
        cup_entries = data.get("cup", [])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"manifold description is missing field {exc}") from None
    if not isinstance(name, str):
        raise ValidationError("'name' must be a string")
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise ValidationError("'dim' must be an integer")
    for c, d in classes:
        if not isinstance(c, str) or not isinstance(d, int) or isinstance(d, bool):
            raise ValidationError(f"class entry ({c!r}, {d!r}) needs a string name and integer degree")
    products: dict = {}
    for entry in cup_entries:
        try:
            key = (entry["left"], entry["right"])
            result = entry["result"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"cup entry {entry!r} is missing field {exc}") from None
        if key in products:
            raise ValidationError(f"cup entry for {key[0]} ∪ {key[1]} given twice")
        products[key] = {}
        for term in result:
            products[key][term["class"]] = products[key].get(term["class"], 0) + parse_coeff(term["coeff"])
    return ManifoldCohomology.from_products(name, dim, classes, products)


def manifold_to_json(mc: ManifoldCohomology) -> dict:
    """Canonical description: unit products and zero products omitted."""
    u = mc.unit
    names = mc.class_names
    cup = []
    for (i, j), entry in sorted(mc.cup.items()):
        if u in (i, j):
            continue
        cup.append({
            "left": names[i],
            "right": names[j],
            "result": [{"class": names[k], "coeff": format_coeff(c)} for k, c in sorted(entry.items())],
        })
    return {
        "name": mc.name,
        "dim": mc.dim,
        "classes": [{"name": c, "degree": d} for c, d in mc.classes],
        "cup": cup,
    }


def load_manifold(path) -> ManifoldCohomology:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read manifold file {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    return manifold_from_json(data)


def dump_manifold(mc: ManifoldCohomology) -> str:
    return json.dumps(manifold_to_json(mc), indent=2, ensure_ascii=False) + "\n"


# -- presets -------------------------------------------------------------------

def torus_preset() -> ManifoldCohomology:
    return ManifoldCohomology.from_products(
        "torus", 2,
        [("1", 0), ("a", 1), ("b", 1), ("ab", 2)],
        {("a", "b"): {"ab": 1}, ("b", "a"): {"ab": -1}},
    )


def sphere_preset(d: int) -> ManifoldCohomology:
    if not isinstance(d, int) or d < 1:
        raise UsageError(f"sphere S^(2d) needs d >= 1, got {d!r}")
    return ManifoldCohomology.from_products(f"sphere:d={d}", 2 * d, [("1", 0), ("omega", 2 * d)], {})


def preset(spec: str) -> ManifoldCohomology:
    """Resolve ``torus`` or ``sphere:d=<k>``."""
    if spec == "torus":
        return torus_preset()
    match = re.fullmatch(r"sphere:d=(\d+)", spec)
    if match:
        return sphere_preset(int(match.group(1)))
    raise UsageError(f"unknown preset {spec!r} (expected 'torus' or 'sphere:d=<k>')")


def resolve_manifold(spec: str) -> ManifoldCohomology:
    """Preset name or path to a manifold description file."""
    if spec == "torus" or spec.startswith("sphere:"):
        return preset(spec)
    return load_manifold(spec)


# -- the model ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ModelDGA:
    """A free graded-commutative algebra with a differential.

    Used both for Félix–Thomas models (weighted algebra, ``manifold`` set)
    and for the auxiliary torus complexes Θ, which carry no weight grading.
    """

    name: str
    algebra: GradedAlgebra
    differential: Derivation
    manifold: Optional[ManifoldCohomology] = None
    notes: tuple = ()

    @property
    def weighted(self) -> bool:
        return self.algebra.weighted

    def d(self, x) -> Element:
        if isinstance(x, str):
            x = self.algebra.parse(x)
        return apply_derivation(self.differential, x)


def v_name(cls: str) -> str:
    return f"v_{cls}"


def w_name(cls: str) -> str:
    return f"w_{cls}"


def build_model(mc: ManifoldCohomology) -> ModelDGA:
    mc.validate()
    m = mc.dim
    if m % 2:
        raise UnsupportedInputError(f"{mc.name}: dimension {m} is odd; only even-dimensional manifolds are supported")
    gens = [(v_name(c), m - r, 1) for c, r in mc.classes]
    gens += [(w_name(c), 2 * m - 1 - r, 2) for c, r in mc.classes]
    alg = GradedAlgebra(gens, weighted=True, name=f"Omega({mc.name})")
    names = mc.class_names
    nc = len(names)
    v = [alg.gen(v_name(c)) for c in names]
    images = {}
    for k in range(nc):
        img = alg.zero()
        for i in range(nc):
            for j in range(nc):
                c = mc.product(i, j).get(k)
                if c:
                    img = img + c * (v[i] * v[j])
        images[w_name(names[k])] = img
    D = Derivation(alg, images)

    for g in alg.generators:
        img = D.image(g.name)
        if apply_derivation(D, img):
            raise ValidationError(f"{mc.name}: D∘D({g.name}) != 0")
        if img and img.weight() != g.weight:
            raise ValidationError(f"{mc.name}: D({g.name}) does not preserve weight")

    notes = []
    b1 = mc.betti()[1] if m >= 1 else 0
    if m == 2 and b1 > 2:
        notes.append(
            "outside the model hypotheses: a surface of genus >= 2 is not nilpotent; "
            "H*(Omega_n, D) is computed but not asserted to be configuration-space cohomology"
        )
    if any(r % 2 == 1 and r >= 3 for r in mc.degrees):
        msg = (
            f"{mc.name}: odd classes in degree >= 3; signs follow the ordered-pair "
            "comultiplication convention, validated only on the torus and even spheres"
        )
        notes.append(msg)
        warnings.warn(msg, stacklevel=2)
    return ModelDGA(mc.name, alg, D, mc, tuple(notes))


@lru_cache(maxsize=None)
def torus_model() -> ModelDGA:
    return build_model(torus_preset())


@lru_cache(maxsize=None)
def sphere_model(d: int) -> ModelDGA:
    return build_model(sphere_preset(d))


# -- torus auxiliaries ---------------------------------------------------------

THETA_GENERATORS = (
    ("v_1", 2), ("v_a", 1), ("v_b", 1),
    ("w_1", 3), ("w_a", 2), ("w_b", 2), ("w_ab", 1),
)


@lru_cache(maxsize=None)
def theta_algebra() -> GradedAlgebra:
    """Λ⟨v_1, v_a, v_b, w_1, w_a, w_b, w_ab⟩; no weight grading."""
    return GradedAlgebra(THETA_GENERATORS, weighted=False, name="Theta")


@lru_cache(maxsize=None)
def theta_model() -> ModelDGA:
    alg = theta_algebra()
    d = Derivation(alg, {
        "w_1": "v_1^2",
        "w_a": "2*v_1*v_a",
        "w_b": "2*v_1*v_b",
        "w_ab": "2*v_1 + 2*v_a*v_b",
    })
    return ModelDGA("Theta", alg, d)


@lru_cache(maxsize=None)
def theta0_model() -> ModelDGA:
    alg = theta_algebra()
    d0 = Derivation(alg, {"w_ab": "2*v_1 + 2*v_a*v_b"})
    return ModelDGA("Theta0", alg, d0)


@lru_cache(maxsize=None)
def theta_prime_algebra() -> GradedAlgebra:
    """Λ⟨v_1, v_a, v_b, v_ab, w_a, w_b, w_ab⟩, the torus model without w_1."""
    omega = torus_model().algebra
    return GradedAlgebra(
        [(g.name, g.degree, g.weight) for g in omega.generators if g.name != "w_1"],
        weighted=True, name="Theta'",
    )


@lru_cache(maxsize=None)
def theta_prime_inclusion() -> Morphism:
    src = theta_prime_algebra()
    omega = torus_model().algebra
    return Morphism(src, omega, {name: omega.gen(name) for name in src.names}, name="incl")


@lru_cache(maxsize=None)
def p_target_algebra() -> GradedAlgebra:
    """Λ⟨v_a, v_b, w_1, w_a, w_b, w_ab⟩."""
    return GradedAlgebra(
        [(name, deg) for name, deg in THETA_GENERATORS if name != "v_1"],
        weighted=False, name="P",
    )


@lru_cache(maxsize=None)
def _pi() -> Morphism:
    omega = torus_model().algebra
    theta = theta_algebra()
    images = {name: theta.gen(name) for name in theta.names}
    images["v_ab"] = theta.one()
    return Morphism(omega, theta, images, name="pi")


def pi_map(n: Optional[int] = None) -> Morphism:
    """π: Ω_n → Θ, substituting v_ab ↦ 1.  The same substitution serves every n."""
    if n is not None and n < 0:
        raise UsageError("n must be non-negative")
    return _pi()


@lru_cache(maxsize=None)
def _p() -> Morphism:
    omega = torus_model().algebra
    target = p_target_algebra()
    images = {name: target.gen(name) for name in target.names}
    images["v_ab"] = target.one()
    images["v_1"] = -target.parse("v_a*v_b")
    return Morphism(omega, target, images, name="p")


def p_map(n: Optional[int] = None) -> Morphism:
    """p: Ω_n → Λ⟨v_a, v_b, w_1, w_a, w_b, w_ab⟩ with v_ab ↦ 1, v_1 ↦ -v_a v_b."""
    if n is not None and n < 0:
        raise UsageError("n must be non-negative")
    return _p()


@lru_cache(maxsize=None)
def phi_map() -> Morphism:
    """φ: (Θ, d₀) → (Θ, d), the identity on v_1, v_a, v_b, w_ab."""
    theta = theta_algebra()
    images = {name: theta.gen(name) for name in theta.names}
    images["w_1"] = theta.parse("w_1 - 1/2*v_1*w_ab + 1/2*v_b*w_a")
    images["w_a"] = theta.parse("w_a + v_a*w_ab")
    images["w_b"] = theta.parse("w_b + v_b*w_ab")
    return Morphism(theta, theta, images, name="phi")


def top_cocycle_sources(n: int) -> list:
    """The polynomials f whose cocycles x(f) span H^{n+1}(Ω_n) of the torus.

    Odd n: w_a^i w_b^j with 2i + 2j + 1 = n.
    Even n: v_b w_a^(i+1) w_b^j with 2i + 2j + 4 = n.
    """
    if n < 2:
        raise UsageError(f"top cocycles are defined for n >= 2, got {n}")
    alg = torus_model().algebra
    out = []
    if n % 2:
        total = (n - 1) // 2
        for i in range(total + 1):
            out.append(alg.monomial({"w_a": i, "w_b": total - i}))
    else:
        total = (n - 4) // 2
        for i in range(total + 1):
            out.append(alg.monomial({"v_b": 1, "w_a": i + 1, "w_b": total - i}))
    return out


def cocycle_from(f: Element) -> Element:
    """x(f) = v_1 f - w_1 (D f / v_1); requires v_1 | D(f)."""
    model = torus_model()
    alg = model.algebra
    quotient = divide_by_generator(model.d(f), "v_1")
    return alg.gen("v_1") * f - alg.gen("w_1") * quotient


def top_cocycle_basis(n: int) -> list:
    """Cocycles of weight n and degree n + 1 representing a basis of H^{n+1}(Ω_n)."""
    return [cocycle_from(f) for f in top_cocycle_sources(n)]


__all__ = [
    "ManifoldCohomology", "ModelDGA", "build_model", "torus_preset", "sphere_preset",
    "preset", "resolve_manifold", "load_manifold", "dump_manifold", "manifold_from_json",
    "manifold_to_json", "parse_coeff", "format_coeff", "torus_model", "sphere_model",
    "theta_algebra", "theta_model", "theta0_model", "theta_prime_algebra",
    "theta_prime_inclusion", "p_target_algebra", "pi_map", "p_map", "phi_map",
    "top_cocycle_sources", "top_cocycle_basis", "cocycle_from",
]
