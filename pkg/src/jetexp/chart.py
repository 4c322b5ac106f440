"""Chart descriptions for graded polynomial models.

A chart fixes an ordered list of graded coordinates x_1..x_n.  Each
coordinate of degree d induces a fiber generator (the corresponding
linear coordinate on the tangent fiber, same degree d) and a form
generator (degree 1 + d).  Everything else in this package lives in the
free graded-commutative algebra on these 3n generators over exact
rationals: parity = degree mod 2 drives every sign, and odd generators
square to zero.

Generator slots are laid out base block, then fiber block, then form
block; that fixed order is the canonical monomial order used by all
normal forms.  The coordinate list order is frozen for the chart's
lifetime.

Naming: a coordinate named ``x2`` gets fiber generator ``y2`` and form
generator ``dx2`` (leading ``x`` swapped for ``y``); any other name
``t`` gets ``y_t`` and ``dt``.  Collisions are rejected at construction.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple, Sequence, Tuple


class Truncation(NamedTuple):
    """Model truncation: symmetric weight Q, form degree P, base degree B."""

    max_sym_weight: int
    max_form_degree: int
    max_base_degree: int


class Coordinate(NamedTuple):
    name: str
    degree: int


def _fiber_name(name: str) -> str:
    if name.startswith("x"):
        return "y" + name[1:]
    return "y_" + name


def _form_name(name: str) -> str:
    return "d" + name


class Chart:
    """An ordered graded coordinate system plus its truncation data.

    Immutable; equality and hashing are by value so that "same chart"
    checks in the algebra layers are structural.
    """

    __slots__ = (
        "coords", "truncation", "n", "gen_names", "gen_degrees",
        "gen_parities", "_slot_of",
    )

    def __init__(self, coordinates: Iterable[Tuple[str, int]],
                 truncation: Truncation = Truncation(5, 3, 6)):
        coords = tuple(Coordinate(str(n), int(d)) for n, d in coordinates)
        if not coords:
            raise ValueError("chart needs at least one coordinate")
        truncation = Truncation(*map(int, truncation))
        q, p, b = truncation
        if q < 1 or p < 2 or b < 1:
            raise ValueError("truncation must satisfy Q >= 1, P >= 2, B >= 1")
        names = [c.name for c in coords]
        derived = ([_fiber_name(n) for n in names]
                   + [_form_name(n) for n in names])
        all_names = names + derived
        if len(set(all_names)) != len(all_names):
            raise ValueError("coordinate names collide (directly or through "
                             "derived fiber/form generator names)")
        self.coords = coords
        self.truncation = truncation
        self.n = len(coords)
        self.gen_names = tuple(all_names)
        degrees = [c.degree for c in coords]
        self.gen_degrees = tuple(degrees + degrees + [d + 1 for d in degrees])
        self.gen_parities = tuple(d & 1 for d in self.gen_degrees)
        self._slot_of = {name: i for i, name in enumerate(self.gen_names)}

    # slot layout: [0, n) base, [n, 2n) fiber, [2n, 3n) form
    def x_slot(self, i: int) -> int:
        return i

    def y_slot(self, i: int) -> int:
        return self.n + i

    def dx_slot(self, i: int) -> int:
        return 2 * self.n + i

    def slot(self, name: str) -> int:
        try:
            return self._slot_of[name]
        except KeyError:
            raise KeyError("unknown generator %r" % (name,)) from None

    def coordinate_degree(self, i: int) -> int:
        return self.coords[i].degree

    def coordinate_parity(self, i: int) -> int:
        return self.coords[i].degree & 1

    def __eq__(self, other):
        return (isinstance(other, Chart)
                and self.coords == other.coords
                and self.truncation == other.truncation)

    def __hash__(self):
        return hash((self.coords, self.truncation))

    def __repr__(self):
        cs = ", ".join("%s:%d" % (c.name, c.degree) for c in self.coords)
        return "Chart(%s; Q=%d, P=%d, B=%d)" % ((cs,) + tuple(self.truncation))


def same_chart(*objs) -> Chart:
    """Return the shared chart of the arguments, or raise on mismatch."""
    chart = objs[0].chart
    for o in objs[1:]:
        if o.chart != chart:
            raise ValueError("chart mismatch between operands")
    return chart


def koszul_sign(permutation: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign relating a reordered graded symmetric word to the sorted one.

    ``permutation`` lists, position by position, which original element
    (0-based) sits there; ``degrees`` are the degrees of the original
    elements.  The sign is -1 to the number of inversions between odd
    elements, i.e. the sign making

        X_{p(0)} (.) X_{p(1)} (.) ... = sign * X_0 (.) X_1 (.) ...

    hold in the graded symmetric algebra.
    """
    perm = list(permutation)
    if sorted(perm) != list(range(len(perm))):
        raise ValueError("not a permutation of 0..%d: %r"
                         % (len(perm) - 1, permutation))
    if len(degrees) != len(perm):
        raise ValueError("degrees list length must match permutation size")
    par = [int(d) & 1 for d in degrees]
    inv = 0
    for s in range(len(perm)):
        if not par[perm[s]]:
            continue
        for t in range(s + 1, len(perm)):
            if par[perm[t]] and perm[s] > perm[t]:
                inv += 1
    return -1 if inv & 1 else 1


# ---------------------------------------------------------------------------
# Multi-index utilities (tuples over N_0^n)

def mi_weight(index: Sequence[int]) -> int:
    return sum(index)


def mi_factorial(index: Sequence[int]) -> int:
    out = 1
    for e in index:
        out *= math.factorial(e)
    return out


def mi_truncate_le(index: Sequence[int], k: int) -> Tuple[int, ...]:
    """Keep the first k entries (1-based boundary), zero the rest."""
    return tuple(e if pos < k else 0 for pos, e in enumerate(index))


def mi_truncate_lt(index: Sequence[int], k: int) -> Tuple[int, ...]:
    return mi_truncate_le(index, k - 1)


def mi_truncate_gt(index: Sequence[int], k: int) -> Tuple[int, ...]:
    return tuple(e if pos >= k else 0 for pos, e in enumerate(index))


def mi_unit(n: int, k: int) -> Tuple[int, ...]:
    """The k-th unit multi-index (k is 1-based, matching record files)."""
    if not 1 <= k <= n:
        raise ValueError("unit index out of range")
    return tuple(1 if pos == k - 1 else 0 for pos in range(n))


def mi_add(a: Sequence[int], b: Sequence[int]) -> Tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))


def mi_sub(a: Sequence[int], b: Sequence[int]) -> Tuple[int, ...]:
    out = tuple(x - y for x, y in zip(a, b))
    if any(e < 0 for e in out):
        raise ValueError("multi-index subtraction went negative")
    return out


def mi_all(n: int, weight: int):
    """Yield all multi-indices in N_0^n of exact total weight."""
    if n == 1:
        yield (weight,)
        return
    for head in range(weight + 1):
        for rest in mi_all(n - 1, weight - head):
            yield (head,) + rest


def mi_all_up_to(n: int, max_weight: int):
    for w in range(max_weight + 1):
        yield from mi_all(n, w)
