"""Symmetric tensors, normal-ordered differential operators, and the
coalgebra structure shared by both.

Word convention.  A multi-index I over the chart's coordinates denotes
the *descending* word: the derivation of the last coordinate comes
first, that of the first coordinate last.  SymTensor stores the
coefficient of the descending symmetric word; DiffOp stores the
coefficient of the descending composition (so the lowest-index
derivative acts first on a function).  The two conventions match, which
makes the symbol map on a top-order multi-index the verbatim
reinterpretation, and makes the duality pairing with fiber monomials
come out as I! on the diagonal with no stray signs, odd sectors
included.

DiffOp normal form puts all coefficient functions left of all
derivations; composition rewrites via the graded Leibniz rule

    d_i o m_f  =  m_{d_i f} + (-1)^(|x_i||f|) m_f o d_i

and reorders derivation words by Koszul transpositions (coordinate
derivations commute exactly, so this is lossless).

Tensor squares over base functions are normalized with all coefficients
pushed into the left factor via the bimodule relation
u.f (x) v == u (x) f.v; the right slot is always a pure word.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .chart import Chart, koszul_sign, mi_factorial, mi_weight, same_chart
from .poly import GradedPoly

MultiIndex = Tuple[int, ...]


class TruncationOverflowError(ValueError):
    """An operator product left the allowed filtration range."""


def word_letters(index: MultiIndex) -> List[int]:
    """Coordinate slots of the descending word, highest index first."""
    out: List[int] = []
    for slot in range(len(index) - 1, -1, -1):
        out.extend([slot] * index[slot])
    return out


def word_degree(chart: Chart, index: MultiIndex) -> int:
    """Degree of the basis word (a coordinate derivation has degree -|x_i|)."""
    return -sum(e * chart.coordinate_degree(i) for i, e in enumerate(index))


def _check_index(chart: Chart, index: MultiIndex):
    if len(index) != chart.n:
        raise ValueError("multi-index length != number of coordinates")
    if any(e < 0 for e in index):
        raise ValueError("negative entry in multi-index")
    for i, e in enumerate(index):
        if e > 1 and chart.coordinate_parity(i):
            raise ValueError("odd coordinate derivation repeated in a word")


def merge_words(chart: Chart, a: MultiIndex, b: MultiIndex):
    """Koszul sign and multi-index for concatenating descending words a, b.

    Returns (0, None) when an odd derivation would repeat.  In a
    descending word the right block's letters cross exactly the left
    block's letters with *smaller* coordinate index on their way to
    canonical position.
    """
    inv = 0
    for v, bv in enumerate(b):
        if not bv or not chart.coordinate_parity(v):
            continue
        if a[v]:
            return 0, None
        inv += sum(a[u] for u in range(v)
                   if chart.coordinate_parity(u))
    return (-1 if inv & 1 else 1), tuple(x + y for x, y in zip(a, b))


def insert_letter(chart: Chart, slot: int, index: MultiIndex):
    """Sign and multi-index for prepending one derivation to a word: the
    new letter enters at the far left and commutes rightwards past every
    stored letter with a larger coordinate index."""
    if chart.coordinate_parity(slot):
        if index[slot]:
            return 0, None
        crossings = sum(index[u] for u in range(slot + 1, chart.n)
                        if chart.coordinate_parity(u))
        if crossings & 1:
            return -1, _bump(index, slot)
    return 1, _bump(index, slot)


def _bump(index: MultiIndex, slot: int) -> MultiIndex:
    return tuple(e + (1 if s == slot else 0) for s, e in enumerate(index))


class _IndexedSum:
    """Finite map multi-index -> base-function coefficient."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms: Dict[MultiIndex, GradedPoly] = None):
        self.chart = chart
        clean: Dict[MultiIndex, GradedPoly] = {}
        if terms:
            for index, coeff in terms.items():
                if not coeff:
                    continue
                index = tuple(index)
                _check_index(chart, index)
                if coeff.chart != chart:
                    raise ValueError("chart mismatch in coefficient")
                if not coeff.is_base_only():
                    raise ValueError("coefficients must be base functions")
                clean[index] = coeff
        self.terms = clean

    def _wrap(self, terms):
        out = type(self).__new__(type(self))
        out.chart = self.chart
        out.terms = {i: c for i, c in terms.items() if c}
        return out

    @classmethod
    def zero(cls, chart: Chart):
        return cls(chart)

    @classmethod
    def from_word(cls, chart: Chart, index: MultiIndex, coeff=None):
        if coeff is None:
            coeff = GradedPoly.constant(chart, 1)
        elif not isinstance(coeff, GradedPoly):
            coeff = GradedPoly.constant(chart, coeff)
        return cls(chart, {tuple(index): coeff})

    @classmethod
    def function(cls, chart: Chart, f: GradedPoly):
        return cls(chart, {(0,) * chart.n: f})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.chart == other.chart and self.terms == other.terms

    def __hash__(self):
        return hash((type(self).__name__, self.chart,
                     frozenset((i, hash(c)) for i, c in self.terms.items())))

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        same_chart(self, other)
        out = dict(self.terms)
        for i, c in other.terms.items():
            cur = out.get(i)
            out[i] = c if cur is None else cur + c
        return self._wrap(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self._wrap({i: -c for i, c in self.terms.items()})

    def scale(self, factor):
        """Left multiplication by a base function or scalar."""
        if isinstance(factor, GradedPoly):
            if not factor.is_base_only():
                raise ValueError("left factor must be a base function")
            return self._wrap({i: factor * c for i, c in self.terms.items()})
        return self._wrap({i: c * Fraction(factor)
                           for i, c in self.terms.items()})

    def max_word_weight(self) -> int:
        return max((mi_weight(i) for i in self.terms), default=0)

    def weight_part(self, w: int):
        return self._wrap({i: c for i, c in self.terms.items()
                           if mi_weight(i) == w})

    def weight_le(self, w: int):
        return self._wrap({i: c for i, c in self.terms.items()
                           if mi_weight(i) <= w})

    def homogeneous_components(self):
        """Split by total degree (coefficient degree plus word degree)."""
        buckets: Dict[int, Dict[MultiIndex, GradedPoly]] = {}
        for index, coeff in self.terms.items():
            wd = word_degree(self.chart, index)
            for d, part in coeff.homogeneous_components().items():
                dst = buckets.setdefault(d + wd, {})
                cur = dst.get(index)
                dst[index] = part if cur is None else cur + part
        return {d: self._wrap(t) for d, t in sorted(buckets.items())}

    def degree(self) -> int:
        comps = self.homogeneous_components()
        if not comps:
            from .poly import DegreeUndefinedError
            raise DegreeUndefinedError("zero element has no degree")
        if len(comps) > 1:
            from .poly import NotHomogeneousError
            raise NotHomogeneousError(set(comps))
        return next(iter(comps))

    def __repr__(self):
        from .grammar import format_indexed
        return "%s(%s)" % (type(self).__name__, format_indexed(self))


class SymTensor(_IndexedSum):
    """Polynomial-coefficient combination of graded-symmetric words in the
    coordinate derivations."""

    def weight(self) -> int:
        return self.max_word_weight()

    def mul_letter_left(self, slot: int) -> "SymTensor":
        """Symmetric product by one coordinate derivation from the left
        (the derivation still crosses each term's coefficient)."""
        par = self.chart.coordinate_parity(slot)
        out: Dict[MultiIndex, GradedPoly] = {}
        for index, coeff in self.terms.items():
            sign, idx = insert_letter(self.chart, slot, index)
            if not sign:
                continue
            for part in coeff.homogeneous_components().values():
                val = part if sign > 0 else -part
                if par and part.parity():
                    val = -val
                cur = out.get(idx)
                out[idx] = val if cur is None else cur + val
        return self._wrap(out)


class DiffOp(_IndexedSum):
    """Normal-ordered differential operator."""

    @classmethod
    def identity(cls, chart: Chart) -> "DiffOp":
        return cls.function(chart, GradedPoly.constant(chart, 1))

    @classmethod
    def from_vector_field(cls, field) -> "DiffOp":
        """Order-one operator of anything with ``chart`` and a
        per-coordinate ``components`` tuple of base functions."""
        chart = field.chart
        terms: Dict[MultiIndex, GradedPoly] = {}
        for i, comp in enumerate(field.components):
            if comp:
                terms[tuple(1 if s == i else 0 for s in range(chart.n))] = comp
        return cls(chart, terms)

    def order(self):
        """Filtration order; None for the zero operator."""
        return max((mi_weight(i) for i in self.terms), default=None)

    def gr_leading(self) -> SymTensor:
        """Symbol: the top-order part reread as a symmetric tensor."""
        top = self.order()
        if top is None:
            return SymTensor.zero(self.chart)
        return SymTensor(self.chart, {i: c for i, c in self.terms.items()
                                      if mi_weight(i) == top})

    def apply(self, f: GradedPoly) -> GradedPoly:
        if f.chart != self.chart:
            raise ValueError("chart mismatch between operator and argument")
        out = GradedPoly.zero(self.chart)
        for index, coeff in self.terms.items():
            g = f
            for slot in range(self.chart.n):
                for _ in range(index[slot]):
                    g = g.partial(slot)
                if not g:
                    break
            if g:
                out = out + coeff * g
        return out

    def compose_function(self, g: GradedPoly) -> "DiffOp":
        """Normal form of self o (multiplication by g)."""
        out: Dict[MultiIndex, GradedPoly] = {}
        for index, coeff in self.terms.items():
            for word, h in _word_times_function(self.chart, index, g).items():
                val = coeff * h
                cur = out.get(word)
                out[word] = val if cur is None else cur + val
        return self._wrap(out)

    def compose(self, other: "DiffOp", max_order=None) -> "DiffOp":
        """Operator product self o other in normal form.

        ``max_order`` None computes exactly; otherwise a word longer than
        ``max_order`` raises TruncationOverflowError (never dropped
        silently).
        """
        same_chart(self, other)
        out: Dict[MultiIndex, GradedPoly] = {}
        for right_index, g in other.terms.items():
            left = self.compose_function(g)
            for mid_index, coeff in left.terms.items():
                sign, merged = merge_words(self.chart, mid_index, right_index)
                if not sign:
                    continue
                if max_order is not None and mi_weight(merged) > max_order:
                    raise TruncationOverflowError(
                        "operator order %d exceeds cap %d"
                        % (mi_weight(merged), max_order))
                val = coeff if sign > 0 else -coeff
                cur = out.get(merged)
                out[merged] = val if cur is None else cur + val
        return self._wrap(out)


def _word_times_function(chart: Chart, index: MultiIndex,
                         g: GradedPoly) -> Dict[MultiIndex, GradedPoly]:
    """Normal-order (descending word of ``index``) o m_g by peeling the
    innermost derivation and rewriting with the graded Leibniz rule."""
    out: Dict[MultiIndex, GradedPoly] = {}
    if not g:
        return out
    if not any(index):
        out[index] = g
        return out
    slot = min(s for s, e in enumerate(index) if e)
    rest = tuple(e - (1 if s == slot else 0) for s, e in enumerate(index))
    unit = tuple(1 if s == slot else 0 for s in range(chart.n))
    par = chart.coordinate_parity(slot)

    def accumulate(word, coeff):
        if not coeff:
            return
        cur = out.get(word)
        out[word] = coeff if cur is None else cur + coeff

    for part in g.homogeneous_components().values():
        dg = part.partial(slot)
        if dg:
            for word, coeff in _word_times_function(chart, rest, dg).items():
                accumulate(word, coeff)
        passed = -part if par and part.parity() else part
        for word, coeff in _word_times_function(chart, rest, passed).items():
            sign, merged = merge_words(chart, word, unit)
            if sign:
                accumulate(merged, coeff if sign > 0 else -coeff)
    return out


def diffop_apply(op: DiffOp, f: GradedPoly) -> GradedPoly:
    return op.apply(f)


def diffop_compose(a: DiffOp, b: DiffOp) -> DiffOp:
    """Contract-level product, capped at the chart's symmetric-weight
    truncation (internal engines pass explicit headroom instead)."""
    return a.compose(b, max_order=a.chart.truncation.max_sym_weight)


def filtration_order(op: DiffOp):
    return op.order()


def gr_leading(op: DiffOp) -> SymTensor:
    return op.gr_leading()


def sym_mul_vf(field, tensor: SymTensor) -> SymTensor:
    """Symmetric product (vector field) (.) tensor, field on the left."""
    chart = same_chart(field, tensor)
    out = SymTensor.zero(chart)
    for i, comp in enumerate(field.components):
        if comp:
            out = out + tensor.mul_letter_left(i).scale(comp)
    return out


def sym_word_product(chart: Chart, slots: Sequence[int]) -> SymTensor:
    """Canonical form of a symmetric word of coordinate derivations given
    in left-to-right order."""
    out = SymTensor.from_word(chart, (0,) * chart.n)
    for slot in reversed(list(slots)):
        out = out.mul_letter_left(slot)
    return out


# ---------------------------------------------------------------------------
# Symmetrization

def sym_map(tensor: SymTensor) -> DiffOp:
    """Base-function-linear symmetrization of a stored tensor.

    All orderings of a descending basis word of coordinate derivations
    compose to the identical operator (the derivations commute exactly
    and the Koszul signs of reordering in the operator algebra and in
    the symmetric algebra coincide), so the average collapses to the
    word itself.
    """
    return DiffOp(tensor.chart, dict(tensor.terms))


def sym_word(fields: Sequence) -> DiffOp:
    """Symmetrization of a word of homogeneous vector fields: the average
    of all Koszul-signed orderings composed in the operator algebra."""
    if not fields:
        raise ValueError("empty word")
    chart = same_chart(*fields)
    degrees = [f.degree() for f in fields]
    ops = [DiffOp.from_vector_field(f) for f in fields]
    out = DiffOp.zero(chart)
    for perm in itertools.permutations(range(len(fields))):
        sign = koszul_sign(list(perm), degrees)
        term = DiffOp.identity(chart)
        for pos in perm:
            term = term.compose(ops[pos])
        out = out + term.scale(sign)
    return out.scale(Fraction(1, math.factorial(len(fields))))


# ---------------------------------------------------------------------------
# Comultiplication and tensor squares

class TensorSquare:
    """Two-slot tensor over base functions: map (left word, right word)
    -> coefficient, all coefficients normalized into the left slot.

    The balancing over the (graded-commutative) ring of base functions
    moves a coefficient between slots with the Koszul sign of crossing
    the left slot and *left*-multiplies it there:

        u (x) f.v  ==  (-1)^(|f||u|) (f.u) (x) v .

    This is the balancing that makes the exponential map's slot-wise
    application well defined; balancing by right composition instead
    would break the coalgebra-morphism identity (one extra Leibniz term
    per crossing, checked by hand on a two-coordinate mixed chart).
    """

    __slots__ = ("chart", "kind", "terms")

    def __init__(self, chart: Chart, kind: str,
                 terms: Dict[Tuple[MultiIndex, MultiIndex], GradedPoly] = None):
        if kind not in ("sym", "env"):
            raise ValueError("kind must be 'sym' or 'env'")
        self.chart = chart
        self.kind = kind
        self.terms = {k: c for k, c in (terms or {}).items() if c}

    def add_term(self, left_index, right_index, coeff):
        if not coeff:
            return
        key = (tuple(left_index), tuple(right_index))
        cur = self.terms.get(key)
        val = coeff if cur is None else cur + coeff
        if val:
            self.terms[key] = val
        else:
            del self.terms[key]

    def __eq__(self, other):
        return (isinstance(other, TensorSquare)
                and self.chart == other.chart and self.kind == other.kind
                and self.terms == other.terms)

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return "TensorSquare(%s, %d terms)" % (self.kind, len(self.terms))


def _shuffle_splits(chart: Chart, index: MultiIndex):
    """Yield (Koszul sign, left index, right index) over all
    order-preserving two-block splits of the descending word."""
    letters = word_letters(index)
    pars = [chart.coordinate_parity(s) for s in letters]
    k = len(letters)
    n = chart.n
    for mask in range(1 << k):
        left = [0] * n
        right = [0] * n
        inv = 0
        odd_sent_right = 0
        for pos in range(k):
            if mask >> pos & 1:
                left[letters[pos]] += 1
                if pars[pos]:
                    inv += odd_sent_right
            else:
                right[letters[pos]] += 1
                if pars[pos]:
                    odd_sent_right += 1
        yield (-1 if inv & 1 else 1), tuple(left), tuple(right)


def comult_sym(tensor: SymTensor) -> TensorSquare:
    """Shuffle comultiplication of a symmetric tensor, left-linear over
    base functions."""
    out = TensorSquare(tensor.chart, "sym")
    for index, coeff in tensor.terms.items():
        for sign, left, right in _shuffle_splits(tensor.chart, index):
            out.add_term(left, right, coeff * sign)
    return out


def comult_env(op: DiffOp) -> TensorSquare:
    """Shuffle comultiplication of a normal-ordered operator, computed on
    its derivation words and extended left-linearly over coefficients."""
    out = TensorSquare(op.chart, "env")
    for index, coeff in op.terms.items():
        for sign, left, right in _shuffle_splits(op.chart, index):
            out.add_term(left, right, coeff * sign)
    return out


def counit(obj: _IndexedSum) -> GradedPoly:
    """Projection onto the empty word."""
    return obj.terms.get((0,) * obj.chart.n, GradedPoly.zero(obj.chart))


def vf_homogeneous_ops(field):
    """Homogeneous pieces of a vector field as (degree, DiffOp) pairs."""
    chart = field.chart
    buckets: Dict[int, Dict[MultiIndex, GradedPoly]] = {}
    for i, comp in enumerate(field.components):
        for d, part in comp.homogeneous_components().items():
            deg = d - chart.coordinate_degree(i)
            idx = tuple(1 if s == i else 0 for s in range(chart.n))
            dst = buckets.setdefault(deg, {})
            cur = dst.get(idx)
            dst[idx] = part if cur is None else cur + part
    return [(d, DiffOp(chart, t)) for d, t in sorted(buckets.items())]


def tensor_push_left(out: TensorSquare, left_op: DiffOp, right_op: DiffOp):
    """Accumulate left_op (x) right_op into ``out`` in normal form: each
    right-slot coefficient crosses the left slot with a Koszul sign and
    left-multiplies it."""
    for right_index, rcoeff in right_op.terms.items():
        for udeg, upart in left_op.homogeneous_components().items():
            for gdeg, gpart in rcoeff.homogeneous_components().items():
                flip = (gdeg & 1) and (udeg & 1)
                moved = upart.scale(gpart)
                for left_index, lcoeff in moved.terms.items():
                    out.add_term(left_index, right_index,
                                 -lcoeff if flip else lcoeff)


def tensor_square_left_mult_vf(field, square: TensorSquare) -> TensorSquare:
    """Multiply a tensor square from the left by (X (x) 1 + 1 (x) X).

    The X (x) 1 term composes into the left slot; the 1 (x) X term
    crosses the left slot with a Koszul sign, composes into the right
    slot, and the coefficients this produces on the right are pushed
    back into the left slot through the balancing twist.
    """
    chart = same_chart(field, square)
    xop = DiffOp.from_vector_field(field)
    out = TensorSquare(chart, square.kind)
    for (left_index, right_index), coeff in square.terms.items():
        left_op = DiffOp(chart, {left_index: coeff})
        for idx, c in xop.compose(left_op).terms.items():
            out.add_term(idx, right_index, c)
        right_word = DiffOp.from_word(chart, right_index)
        for xdeg, xpart in vf_homogeneous_ops(field):
            xr = xpart.compose(right_word)
            for udeg, upart in left_op.homogeneous_components().items():
                crossed = upart.scale(-1) if (xdeg & 1) and (udeg & 1) \
                    else upart
                tensor_push_left(out, crossed, xr)
    return out


# ---------------------------------------------------------------------------
# Duality pairing with fiber polynomials

def pairing(tensor: SymTensor, sigma: GradedPoly) -> GradedPoly:
    """Pair a symmetric tensor against a polynomial in base and fiber
    generators.

    On basis data <word_I, y^J> = I!.delta_{I,J}; the descending-word
    convention absorbs all odd-sector signs.  A base coefficient sitting
    left of the fiber monomial crosses the word with a Koszul sign:
    <W, g.y^J> = (-1)^(|g||y^J|) g.<W, y^J>, which is exactly the rule
    the monomial form g.y^J requires for dual-basis expansions.
    """
    chart = same_chart(tensor, sigma)
    n = chart.n
    out = GradedPoly.zero(chart)
    for m, c in sigma.terms.items():
        if any(m[2 * n:]):
            raise ValueError("pairing argument must be free of form "
                             "generators")
        fiber = m[n:2 * n]
        coeff = tensor.terms.get(fiber)
        if coeff is None:
            continue
        base_monomial = m[:n] + (0,) * (2 * n)
        base_parity = sum(e * chart.gen_parities[s]
                          for s, e in enumerate(m[:n])) & 1
        word_parity = word_degree(chart, fiber) & 1
        sign = -1 if base_parity and word_parity else 1
        out = out + coeff * GradedPoly(
            chart, {base_monomial: c * mi_factorial(fiber) * sign})
    return out
