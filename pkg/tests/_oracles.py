"""Independent reference computations used by the tests.

Monomials are handled as explicit words of generator occurrences and
normalized by adjacent transpositions, which shares no code with the
exponent-vector arithmetic under test.
"""

from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product


def word(m):
    out = []
    for k, e in enumerate(m):
        out.extend([k] * e)
    return out


def normalize(w, alg):
    """Bubble-sort a word; returns (sign, exponent tuple) or None when it vanishes."""
    w = list(w)
    sign = 1
    for end in range(len(w) - 1, 0, -1):
        for j in range(end):
            if w[j] > w[j + 1]:
                if alg.generators[w[j]].is_odd and alg.generators[w[j + 1]].is_odd:
                    sign = -sign
                w[j], w[j + 1] = w[j + 1], w[j]
    exps = [0] * alg.ngens
    for k in w:
        exps[k] += 1
    if any(alg.generators[k].is_odd and e > 1 for k, e in enumerate(exps)):
        return None
    return sign, tuple(exps)


def _add(terms, m, c):
    terms[m] = terms.get(m, 0) + c
    if terms[m] == 0:
        del terms[m]


def mul(a, b):
    alg = a.algebra
    terms = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            res = normalize(word(ma) + word(mb), alg)
            if res:
                _add(terms, res[1], res[0] * ca * cb)
    return terms


def derive(images, x):
    """Leibniz rule applied occurrence by occurrence; images maps index -> term dict."""
    alg = x.algebra
    terms = {}
    for m, c in x.terms.items():
        w = word(m)
        prefix_deg = 0
        for pos, k in enumerate(w):
            sign = -1 if prefix_deg % 2 else 1
            for mi, ci in images.get(k, {}).items():
                res = normalize(w[:pos] + word(mi) + w[pos + 1:], alg)
                if res:
                    _add(terms, res[1], sign * res[0] * c * ci)
            prefix_deg += alg.generators[k].degree
    return terms


def brute_slice(alg, n, i, max_exp=12):
    """All exponent vectors with given weight (None: ignore) and degree, by exhaustive search."""
    ranges = [range(2) if g.is_odd else range(max_exp + 1) for g in alg.generators]
    out = []
    for exps in product(*ranges):
        if sum(e * g.degree for e, g in zip(exps, alg.generators)) != i:
            continue
        if n is not None and sum(e * g.weight for e, g in zip(exps, alg.generators)) != n:
            continue
        out.append(exps)
    return sorted(out)


def exterior_symmetric_dim(degrees_even, degrees_odd, r):
    """dim of the word-length-r part of Λ on the given even/odd generators (count only)."""
    total = 0
    for k in range(min(r, len(degrees_odd)) + 1):
        odd_choices = len(list(combinations(range(len(degrees_odd)), k)))
        even_choices = len(list(combinations_with_replacement(range(len(degrees_even)), r - k))) if degrees_even else int(r == k)
        total += odd_choices * even_choices
    return total


def fraction_rank(rows):
    """Rank by sympy, used as an outside oracle."""
    import sympy

    if not rows or not rows[0]:
        return 0
    return sympy.Matrix([[sympy.Rational(Fraction(v).numerator, Fraction(v).denominator) for v in r] for r in rows]).rank()


def brute_slice_upto(alg, max_degree, max_weight):
    """Every monomial with degree <= max_degree and weight <= max_weight."""
    ranges = []
    for g in alg.generators:
        bounds = [1] if g.is_odd else []
        if g.degree:
            bounds.append(max_degree // g.degree)
        if g.weight:
            bounds.append(max_weight // g.weight)
        ranges.append(range(min(bounds) + 1))
    out = []
    for exps in product(*ranges):
        deg = sum(e * g.degree for e, g in zip(exps, alg.generators))
        wt = sum(e * g.weight for e, g in zip(exps, alg.generators))
        if deg <= max_degree and wt <= max_weight:
            out.append(exps)
    return out
