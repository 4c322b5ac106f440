"""The formal exponential map between symmetric tensors and differential
operators, its inverse, the flat connection it transports, and the
correction forms measuring the difference from the naive product.

The map is defined on basis words of coordinate derivations by the
averaged recursion

    exp(X_0 (.) ... (.) X_n) = 1/(n+1) * sum_k eps_k *
        ( X_k o exp(word minus X_k) - exp(cov(X_k, word minus X_k)) )

with eps_k the Koszul sign of pulling X_k to the front, and is extended
to arbitrary tensors by left linearity over base functions (its own
well-definedness).  The inverse peels symbols: the top-order part of an
operator is reinterpreted as a word, its image subtracted, and the
remainder (one order lower, because symbols match exactly) recursed on.

A context carries the memo table from basis word to operator; the memo
is the only mutable state and uses atomic get-or-compute under a lock so
contexts can be shared across worker threads.

Weight bookkeeping: a context created with the chart's default cap can
serve the map and its inverse up to weight Q.  Transporting the module
structure (``lightning_nabla``) and the correction forms need one extra
composition with a vector field, so they require ``max_weight`` headroom
of one above the weights they are probed at; the constructor argument
makes that explicit rather than silently truncating.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from typing import Dict, Tuple

from .chart import Chart, mi_all_up_to, mi_factorial, mi_weight, same_chart
from .enveloping import (DiffOp, SymTensor, TruncationOverflowError,
                         pairing, sym_mul_vf, word_degree, word_letters)
from .geometry import Connection, VectorField, nabla_sym
from .poly import GradedPoly


class PbwContext:
    """Chart + connection + memoized basis-word images."""

    def __init__(self, chart: Chart, conn: Connection, max_weight: int = None):
        if conn.chart != chart:
            raise ValueError("chart mismatch between chart and connection")
        self.chart = chart
        self.conn = conn
        self.max_weight = (chart.truncation.max_sym_weight
                           if max_weight is None else int(max_weight))
        self._memo: Dict[Tuple[int, ...], DiffOp] = {}
        self._lock = threading.Lock()

    # -- basis words ---------------------------------------------------------
    def word_image(self, index) -> DiffOp:
        """Image of the descending basis word of ``index`` (memoized)."""
        index = tuple(index)
        hit = self._memo.get(index)
        if hit is not None:
            return hit
        value = self._compute_word(index)
        with self._lock:
            return self._memo.setdefault(index, value)

    def _compute_word(self, index) -> DiffOp:
        chart = self.chart
        letters = word_letters(index)
        m = len(letters)
        if m == 0:
            return DiffOp.identity(chart)
        if m == 1:
            return DiffOp.from_word(chart, index)
        pars = [chart.coordinate_parity(s) for s in letters]
        acc = DiffOp.zero(chart)
        for k, slot in enumerate(letters):
            eps = -1 if (pars[k] and (sum(pars[:k]) & 1)) else 1
            rest_letters = letters[:k] + letters[k + 1:]
            rest_index = [0] * chart.n
            for s in rest_letters:
                rest_index[s] += 1
            rest_index = tuple(rest_index)
            xk = VectorField.coordinate(chart, slot)
            left = DiffOp.from_word(chart, _unit_index(chart.n, slot)).compose(
                self.word_image(rest_index))
            inner = nabla_sym(self.conn, xk,
                              SymTensor.from_word(chart, rest_index))
            right = self.map(inner, _internal=True)
            term = left - right
            acc = acc + (term.scale(eps) if eps < 0 else term)
        return acc.scale(Fraction(1, m))

    # -- the map and its inverse ----------------------------------------------
    def map(self, tensor: SymTensor, _internal: bool = False) -> DiffOp:
        """Left-linear extension of the basis-word images."""
        same_chart(self, tensor)
        cap = self.max_weight + (1 if _internal else 0)
        if tensor.weight() > cap:
            raise TruncationOverflowError(
                "tensor weight %d exceeds context cap %d"
                % (tensor.weight(), self.max_weight))
        out = DiffOp.zero(self.chart)
        for index, coeff in tensor.terms.items():
            out = out + self.word_image(index).scale(coeff)
        return out

    def inv(self, op: DiffOp) -> SymTensor:
        """Inverse by symbol peeling (top order down)."""
        same_chart(self, op)
        order = op.order()
        if order is not None and order > self.max_weight + 1:
            raise TruncationOverflowError(
                "operator order %d exceeds context cap %d"
                % (order, self.max_weight))
        out = SymTensor.zero(self.chart)
        rem = op
        while rem:
            k = rem.order()
            top = rem.gr_leading()
            out = out + top
            rem = rem - self.map(top, _internal=True)
            new_order = rem.order()
            if new_order is not None and new_order >= k:
                raise AssertionError("symbol peeling failed to lower order")
        return out


def _unit_index(n: int, slot: int) -> Tuple[int, ...]:
    return tuple(1 if s == slot else 0 for s in range(n))


def pbw_map(ctx: PbwContext, tensor: SymTensor) -> DiffOp:
    return ctx.map(tensor)


def pbw_inv(ctx: PbwContext, op: DiffOp) -> SymTensor:
    return ctx.inv(op)


def lightning_nabla(ctx: PbwContext, field: VectorField,
                    tensor: SymTensor) -> SymTensor:
    """The flat connection transported from left operator composition:
    cov(X, S) = inv(X o map(S)).  Raises the weight by one, so the
    context needs headroom above the tensor's weight."""
    same_chart(ctx, field, tensor)
    if tensor.weight() + 1 > ctx.max_weight:
        raise TruncationOverflowError(
            "transported derivative of weight-%d tensor exceeds context "
            "cap %d" % (tensor.weight(), ctx.max_weight))
    xop = DiffOp.from_vector_field(field)
    return ctx.inv(xop.compose(ctx.map(tensor)))


def theta_form(ctx: PbwContext, field: VectorField,
               tensor: SymTensor) -> SymTensor:
    """Correction of the transported connection against the naive
    symmetric product plus the input connection (contracted with the
    given field).

    Gated on torsion-freeness: with torsion the weight-one value would
    be half the torsion tensor rather than zero, and none of the
    downstream weight bookkeeping applies.  Lowers weight by at least
    one on torsion-free input.
    """
    if not ctx.conn.torsion_free:
        raise ValueError("correction form requires a torsion-free "
                         "connection")
    lowered = lightning_nabla(ctx, field, tensor)
    return (lowered - sym_mul_vf(field, tensor)
            - nabla_sym(ctx.conn, field, tensor))


def xi_form(ctx: PbwContext, max_fiber_weight: int = None):
    """Dual correction form as a one-form valued in fiberwise vector
    fields: component k is the polynomial (in base, fiber and form
    generators) acting as coefficient of d/dy_k.

    Built from the transpose relation through the duality pairing,
    expanded in the dual bases: for each direction i and word index I,

        contribution_k  +=  sign/I! * y^I * <theta(d_i, word_I), y_k>

    with sign = (-1)^(|word_I||d_i|), then multiplied by the direction's
    form generator on the left.  Requires a torsion-free connection (the
    fiber weight would otherwise start at one, not two).
    """
    if not ctx.conn.torsion_free:
        raise ValueError("dual correction form requires a torsion-free "
                         "connection")
    chart = ctx.chart
    weight = (chart.truncation.max_sym_weight if max_fiber_weight is None
              else int(max_fiber_weight))
    if weight + 1 > ctx.max_weight:
        raise TruncationOverflowError(
            "fiber weight %d needs context cap at least %d"
            % (weight, weight + 1))
    components = [GradedPoly.zero(chart) for _ in range(chart.n)]
    for i in range(chart.n):
        xi_i = VectorField.coordinate(chart, i)
        dxi = GradedPoly.generator(chart, chart.dx_slot(i))
        for index in mi_all_up_to(chart.n, weight):
            if mi_weight(index) < 2:
                continue
            if any(e > 1 and chart.coordinate_parity(s)
                   for s, e in enumerate(index)):
                continue
            theta = theta_form(ctx, xi_i, SymTensor.from_word(chart, index))
            if not theta:
                continue
            sign = -1 if ((word_degree(chart, index) & 1)
                          and chart.coordinate_parity(i)) else 1
            y_mono = GradedPoly(
                chart,
                {(0,) * chart.n + index + (0,) * chart.n:
                 Fraction(sign, mi_factorial(index))})
            for k in range(chart.n):
                yk = GradedPoly.generator(chart, chart.y_slot(k))
                coeff = pairing(theta, yk)
                if coeff:
                    components[k] = components[k] + dxi * (y_mono * coeff)
    return tuple(components)
