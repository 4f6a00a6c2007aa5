"""Finite abelian groups, their elements, homomorphisms and subgroups.

Groups are stored primary-decomposed: ``Z(12)`` is kept as ``Z(4) + Z(3)``.
Factors are sorted by prime ascending, then exponent descending, so the
coordinates of one primary component are contiguous.

>>> G = make_group([2, 4])
>>> G.literal()
'Z4+Z2'
>>> S = G.subgroup([(1, 1)])
>>> S.order, S.iso_invariants()
(4, ((2, 2),))
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import cached_property, reduce
from math import gcd, prod

from .arith import factorize, is_prime, partitions, prime_power
from .normal_forms import hnf_mod, hnf_reduce, in_lattice, smith_form, solve_upper

MAX_GROUP_ORDER = 2**31


class GroupError(ValueError):
    """Raised for malformed groups, elements or mismatched ambients."""


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


class FiniteAbelianGroup:
    """Direct sum of cyclic groups of prime-power order."""

    __slots__ = ("factors", "primes", "exponents", "__dict__")

    def __init__(self, factors=()):
        parsed = []
        for d in factors:
            d = int(d)
            pe = prime_power(d)
            if pe is None:
                raise GroupError(f"factor {d} is not a prime power >= 2")
            parsed.append((pe[0], -pe[1], d))
        parsed.sort()
        self.factors = tuple(d for _, _, d in parsed)
        self.primes = tuple(p for p, _, _ in parsed)
        self.exponents = tuple(-e for _, e, _ in parsed)
        if prod(self.factors) > MAX_GROUP_ORDER:
            raise GroupError(f"group order exceeds the cap 2^31")

    @property
    def rank(self) -> int:
        return len(self.factors)

    @cached_property
    def order(self) -> int:
        return prod(self.factors)

    @cached_property
    def exponent(self) -> int:
        return reduce(_lcm, self.factors, 1)

    def prime_divisors(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.primes)))

    def component_indices(self, p: int) -> list[int]:
        return [i for i, q in enumerate(self.primes) if q == p]

    def is_p_group(self) -> bool:
        return len(set(self.primes)) <= 1

    def is_homocyclic(self) -> bool:
        return len(set(self.factors)) <= 1

    def __eq__(self, other):
        return isinstance(other, FiniteAbelianGroup) and self.factors == other.factors

    def __hash__(self):
        return hash(self.factors)

    def __repr__(self):
        return f"FiniteAbelianGroup({list(self.factors)})"

    def literal(self) -> str:
        return "+".join(f"Z{d}" for d in self.factors) if self.factors else "0"

    __str__ = literal

    # elements ---------------------------------------------------------------

    def element(self, coords) -> "Element":
        coords = tuple(coords)
        if len(coords) != self.rank:
            raise GroupError(f"element {coords} has {len(coords)} coordinates, "
                             f"group rank is {self.rank}")
        return Element(self, tuple(int(c) % d for c, d in zip(coords, self.factors)))

    def zero(self) -> "Element":
        return Element(self, (0,) * self.rank)

    def gens(self) -> list["Element"]:
        return [Element(self, tuple(int(i == j) for j in range(self.rank)))
                for i in range(self.rank)]

    def elements(self):
        for coords in itertools.product(*(range(d) for d in self.factors)):
            yield Element(self, coords)

    # subgroups ----------------------------------------------------------------

    def subgroup(self, gens=()) -> "Subgroup":
        return Subgroup.from_generators(self, gens)

    def whole(self) -> "Subgroup":
        return Subgroup(self, tuple(tuple(int(i == j) for j in range(self.rank))
                                    for i in range(self.rank)))

    def trivial(self) -> "Subgroup":
        return Subgroup.from_generators(self, ())

    def primary_component(self, p: int) -> "Subgroup":
        return self.subgroup([e for e, q in zip(self.gens(), self.primes) if q == p])

    def iso_invariants(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(Counter(zip(self.primes, self.exponents)).elements()))

    def endomorphism_count(self) -> int:
        return prod(gcd(a, b) for a in self.factors for b in self.factors)

    def identity(self) -> "Homomorphism":
        return Homomorphism(self, self, [[int(i == j) for j in range(self.rank)]
                                         for i in range(self.rank)])


def make_group(orders=()) -> FiniteAbelianGroup:
    """Group ``Z(n_1) + ... + Z(n_k)``, each order split into prime powers."""
    factors = []
    for n in orders:
        n = int(n)
        if n <= 1:
            raise GroupError(f"cyclic order must be >= 2, got {n}")
        factors.extend(p**e for p, e in factorize(n))
    return FiniteAbelianGroup(factors)


def group_from_type(p_exponents) -> FiniteAbelianGroup:
    """Group from ``(p, e)`` pairs, e.g. ``[(2, 2), (2, 1)]`` for ``Z4+Z2``."""
    return FiniteAbelianGroup([p**e for p, e in p_exponents])


@dataclass(frozen=True)
class Element:
    group: FiniteAbelianGroup
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.group.rank:
            raise GroupError("coordinate count does not match group rank")
        if any(not 0 <= c < d for c, d in zip(self.coords, self.group.factors)):
            raise GroupError(f"coordinates {self.coords} are not reduced")

    def _check(self, other: "Element"):
        if other.group != self.group:
            raise GroupError("elements live in different groups")

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        return Element(self.group, tuple((a + b) % d for a, b, d in
                                         zip(self.coords, other.coords, self.group.factors)))

    def __neg__(self) -> "Element":
        return Element(self.group, tuple(-a % d for a, d in zip(self.coords, self.group.factors)))

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def __rmul__(self, n: int) -> "Element":
        return Element(self.group, tuple(n * a % d for a, d in zip(self.coords, self.group.factors)))

    __mul__ = __rmul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    def order(self) -> int:
        return element_order(self)

    def __str__(self):
        return "(" + ",".join(map(str, self.coords)) + ")"


def element_order(x: Element) -> int:
    return reduce(_lcm, (d // gcd(d, c) for c, d in zip(x.coords, x.group.factors)), 1)


def p_height(x: Element, p: int) -> int | float:
    """Largest ``k`` with ``x`` in ``p^k G``; ``math.inf`` for zero.

    Coordinates at other primes are p-divisible, so only the p-part matters:
    in ``Z(p^e)`` the height of ``c != 0`` is ``v_p(c)``.
    """
    if not is_prime(p):
        raise GroupError(f"{p} is not prime")
    best = float("inf")
    for c, q, e in zip(x.coords, x.group.primes, x.group.exponents):
        if q != p or c == 0:
            continue
        v = 0
        while c % p == 0:
            c //= p
            v += 1
        best = min(best, v)
    return best


class HomomorphismError(GroupError):
    pass


class Homomorphism:
    """Integer matrix ``M`` with column ``j`` the image of source generator ``j``."""

    def __init__(self, source: FiniteAbelianGroup, target: FiniteAbelianGroup,
                 matrix, check: bool = True):
        rows = [list(r) for r in matrix]
        if len(rows) != target.rank or any(len(r) != source.rank for r in rows):
            raise HomomorphismError(
                f"matrix shape does not match {target.rank}x{source.rank}")
        self.source = source
        self.target = target
        self.matrix = tuple(tuple(int(v) % d for v in r) for r, d in zip(rows, target.factors))
        self.validated = False
        if check:
            ok, where = self.validate()
            if not ok:
                raise HomomorphismError(f"entry {where} violates well-definedness")

    def validate(self) -> tuple[bool, tuple[int, int] | None]:
        """Check ``M[i][j] * d_j^src == 0 mod d_i^tgt`` for every entry."""
        for i, di in enumerate(self.target.factors):
            for j, dj in enumerate(self.source.factors):
                if self.matrix[i][j] * dj % di:
                    return False, (i, j)
        self.validated = True
        return True, None

    def _require(self):
        if not self.validated:
            raise HomomorphismError("homomorphism has not been validated")

    def __call__(self, x: Element) -> Element:
        return self.apply(x)

    def apply(self, x: Element) -> Element:
        self._require()
        if x.group != self.source:
            raise GroupError("element not in the source group")
        return self.target.element(sum(m * c for m, c in zip(row, x.coords))
                                   for row in self.matrix)

    def compose(self, inner: "Homomorphism") -> "Homomorphism":
        """``self`` after ``inner``."""
        self._require()
        inner._require()
        if inner.target != self.source:
            raise GroupError("cannot compose: target/source mismatch")
        k = self.source.rank
        mat = [[sum(self.matrix[i][t] * inner.matrix[t][j] for t in range(k))
                for j in range(inner.source.rank)] for i in range(self.target.rank)]
        h = Homomorphism(inner.source, self.target, mat, check=False)
        h.validated = True
        return h

    __matmul__ = compose

    def __add__(self, other: "Homomorphism") -> "Homomorphism":
        if (self.source, self.target) != (other.source, other.target):
            raise GroupError("cannot add homomorphisms with different domains")
        h = Homomorphism(self.source, self.target,
                         [[a + b for a, b in zip(r, s)] for r, s in zip(self.matrix, other.matrix)],
                         check=False)
        h.validated = self.validated and other.validated
        return h

    def __sub__(self, other: "Homomorphism") -> "Homomorphism":
        neg = Homomorphism(other.source, other.target,
                           [[-a for a in r] for r in other.matrix], check=False)
        neg.validated = other.validated
        return self + neg

    def __eq__(self, other):
        return (isinstance(other, Homomorphism) and self.source == other.source
                and self.target == other.target and self.matrix == other.matrix)

    def __hash__(self):
        return hash((self.source, self.target, self.matrix))

    def __repr__(self):
        return f"Homomorphism({self.source.literal()} -> {self.target.literal()}, {self.matrix})"

    def is_idempotent(self) -> bool:
        if self.source != self.target:
            return False
        return self.compose(self) == self

    def image(self, S: "Subgroup | None" = None) -> "Subgroup":
        S = S if S is not None else self.source.whole()
        return self.target.subgroup([self.apply(g) for g in S.generators()])

    def kernel(self) -> "Subgroup":
        """Kernel via a Hermite form of ``[h(e_j) | e_j]`` with target columns first."""
        self._require()
        t, s = self.target.rank, self.source.rank
        moduli = list(self.target.factors) + list(self.source.factors)
        rows = []
        for j in range(s):
            rows.append([self.matrix[i][j] for i in range(t)] + [int(k == j) for k in range(s)])
        basis = hnf_mod(rows, moduli)
        gens = [row[t:] for row in basis[t:]]
        return self.source.subgroup(gens)

    def restricted_is_injective(self, S: "Subgroup") -> bool:
        return (self.kernel() & S).order == 1


class Subgroup:
    """Subgroup stored as the Hermite form of its lattice plus relations."""

    __slots__ = ("group", "basis", "order", "__dict__")

    def __init__(self, group: FiniteAbelianGroup, basis):
        self.group = group
        self.basis = tuple(tuple(r) for r in basis)
        index = prod(self.basis[i][i] for i in range(group.rank))
        self.order = group.order // index

    @classmethod
    def from_generators(cls, group: FiniteAbelianGroup, gens) -> "Subgroup":
        rows = []
        for g in gens:
            if isinstance(g, Element):
                if g.group != group:
                    raise GroupError("generator outside the ambient group")
                rows.append(g.coords)
            else:
                g = tuple(g)
                if len(g) != group.rank:
                    raise GroupError(f"generator {g} has wrong length")
                rows.append(g)
        return cls(group, hnf_mod(rows, group.factors))

    def _check(self, other: "Subgroup"):
        if other.group != self.group:
            raise GroupError("subgroups of different ambient groups")

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.group == other.group and self.basis == other.basis

    def __hash__(self):
        return hash((self.group, self.basis))

    def __lt__(self, other: "Subgroup") -> bool:
        # canonical order: by order, then lexicographic Hermite basis
        return (self.order, self.basis) < (other.order, other.basis)

    def __repr__(self):
        return f"Subgroup({self.group.literal()}, {self.literal()})"

    def literal(self) -> str:
        return "gens[" + ";".join("(" + ",".join(map(str, g.coords)) + ")"
                                  for g in self.generators()) + "]"

    def generators(self) -> list[Element]:
        """Nonzero Hermite rows reduced into the group, as elements."""
        out = []
        for row in self.basis:
            e = self.group.element(row)
            if not e.is_zero():
                out.append(e)
        return out

    def contains(self, x) -> bool:
        coords = x.coords if isinstance(x, Element) else tuple(x)
        if isinstance(x, Element) and x.group != self.group:
            raise GroupError("element outside the ambient group")
        return in_lattice(coords, self.basis)

    __contains__ = contains

    def __add__(self, other: "Subgroup") -> "Subgroup":
        self._check(other)
        return Subgroup(self.group, hnf_mod(self.basis + other.basis, self.group.factors))

    def __and__(self, other: "Subgroup") -> "Subgroup":
        """Intersection via a Zassenhaus block ``[[S, S], [T, 0]]`` modulo the exponent."""
        self._check(other)
        r = self.group.rank
        if self <= other:
            return self
        if other <= self:
            return other
        e = self.group.exponent
        rows = [list(b) + list(b) for b in self.basis] + [list(b) + [0] * r for b in other.basis]
        basis = hnf_mod(rows, [e] * (2 * r))
        return self.group.subgroup([row[r:] for row in basis[r:]])

    def __le__(self, other: "Subgroup") -> bool:
        self._check(other)
        return all(in_lattice(row, other.basis) for row in self.basis)

    def is_trivial(self) -> bool:
        return self.order == 1

    def elements(self):
        """All elements, by enumerating combinations of the Hermite rows."""
        seen = {self.group.zero().coords}
        frontier = list(seen)
        factors = self.group.factors
        gens = [g.coords for g in self.generators()]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = tuple((a + b) % d for a, b, d in zip(x, g, factors))
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return [Element(self.group, c) for c in sorted(seen)]

    def multiply(self, n: int) -> "Subgroup":
        return self.group.subgroup([n * g for g in self.generators()])

    def socle(self, p: int) -> "Subgroup":
        """``{x in S : p x = 0}``; from a cyclic decomposition of the p-part."""
        if not is_prime(p):
            raise GroupError(f"{p} is not prime")
        gens = [(o // p) * g for g, (q, o) in self.cyclic_decomposition_with_orders() if q == p]
        return self.group.subgroup(gens)

    def p_component(self, p: int) -> "Subgroup":
        m = self.order
        while m % p == 0:
            m //= p
        return self.multiply(m)

    def _coefficient_matrix(self):
        """Relations ``d_i e_i`` written in the Hermite basis of the lattice."""
        r = self.group.rank
        return [solve_upper(self.basis, [self.group.factors[i] * int(i == j) for j in range(r)])
                for i in range(r)]

    def cyclic_decomposition_with_orders(self) -> list[tuple[Element, tuple[int, int]]]:
        """Generators ``x_i`` with ``S = (+) <x_i>``, each of prime-power order.

        Returned as ``(x_i, (p, p**e))``, sorted by prime then decreasing order.
        """
        cached = self.__dict__.get("_cyclic")
        if cached is not None:
            return cached
        r = self.group.rank
        out = []
        if r:
            delta, vinv = smith_form(self._coefficient_matrix())
            for row, d in zip(vinv, delta):
                if d <= 1:
                    continue
                coords = [sum(row[k] * self.basis[k][j] for k in range(r)) for j in range(r)]
                g = self.group.element(coords)
                for p, e in factorize(d):
                    q = p**e
                    out.append(((d // q) * g, (p, q)))
        out.sort(key=lambda t: (t[1][0], -t[1][1], t[0].coords))
        self.__dict__["_cyclic"] = out
        return out

    def cyclic_decomposition(self) -> list[Element]:
        return [g for g, _ in self.cyclic_decomposition_with_orders()]

    def iso_invariants(self) -> tuple[tuple[int, int], ...]:
        """Cyclic decomposition type as sorted ``(p, e)`` pairs."""
        out = []
        for _, (p, q) in self.cyclic_decomposition_with_orders():
            e = 0
            while q > 1:
                q //= p
                e += 1
            out.append((p, e))
        return tuple(sorted(out))

    def is_isomorphic(self, other: "Subgroup") -> bool:
        return self.iso_invariants() == other.iso_invariants()

    def decompose(self, x: Element, other: "Subgroup") -> tuple[Element, Element]:
        """Split ``x = s + t`` with ``s`` in ``self`` and ``t`` in ``other``.

        Requires ``x`` to lie in ``self + other``; the split is unique when the
        sum is direct.  Works on the block lattice ``[[S, S], [T, 0]]``: reducing
        ``[x | 0]`` kills the left half and leaves ``-s`` on the right.
        """
        self._check(other)
        G = self.group
        r = G.rank
        rows = [list(b) + list(b) for b in self.basis] + [list(b) + [0] * r for b in other.basis]
        basis = hnf_mod(rows, list(G.factors) * 2)
        rest = hnf_reduce(list(x.coords) + [0] * r, basis[:r])
        if any(rest[:r]):
            raise GroupError(f"{x} is not in the sum of the two subgroups")
        s = G.element([-c for c in rest[r:]])
        return s, x - s


def is_direct_sum(G: FiniteAbelianGroup, parts) -> bool:
    """``G = P_1 (+) ... (+) P_k``: orders multiply to ``|G|`` and the sum is ``G``."""
    parts = list(parts)
    if prod(P.order for P in parts) != G.order:
        return False
    total = G.trivial()
    for P in parts:
        if P.group != G:
            raise GroupError("part outside the ambient group")
        total = total + P
    return total.order == G.order


def is_pure(S: Subgroup) -> bool:
    """Purity test ``S & p^k G == p^k S`` for every prime and relevant ``k``.

    For finite groups pure subgroups are exactly the direct summands.
    """
    G = S.group
    W = G.whole()
    for p in G.prime_divisors():
        top = max(e for q, e in zip(G.primes, G.exponents) if q == p)
        pk = 1
        for _ in range(1, top):
            pk *= p
            if (S & W.multiply(pk)).order != S.multiply(pk).order:
                return False
    return True


def groups_of_order(n: int) -> list[FiniteAbelianGroup]:
    """Every abelian group of order ``n`` up to isomorphism, in a fixed order."""
    if n < 1:
        raise GroupError("order must be >= 1")
    if n == 1:
        return [FiniteAbelianGroup(())]
    per_prime = [[[p**k for k in lam] for lam in partitions(e)] for p, e in factorize(n)]
    return [FiniteAbelianGroup([d for part in choice for d in part])
            for choice in itertools.product(*per_prime)]


def groups_up_to(max_order: int) -> list[FiniteAbelianGroup]:
    return [G for n in range(1, max_order + 1) for G in groups_of_order(n)]
