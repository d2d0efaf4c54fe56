"""Attribute domains: the algebra the metrics are computed in.

A domain bundles a value kind with a disjunctive operator (folded across
alternative attacks), a conjunctive operator (folded within one attack) and,
for dynamic models, a sequential operator. Scalar values are exact: python
ints / fractions.Fraction plus a saturating infinity singleton. Pareto fronts
are frozensets of component tuples.

The algebra flags are honest: is_semiring_dynamic is only set when all three
distributivity laws of a dynamic semiring actually hold. Integer addition
does not distribute over itself, so e.g. the cost domain, whose sequential
operator equals its conjunctive one, is NOT flagged dynamic-semiring; the
bottom-up dynamic algorithm accepts it anyway through the seq-equals-and
escape hatch (see analysis.bu_dat), which is exact for a different reason.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from random import Random
from typing import Callable, Optional, Sequence

from .errors import BadAttributeValue, EmptyProduct, UnknownDomain


class _Infinity:
    """Top element of the extended naturals. One instance, totally ordered
    above every finite number, saturating under addition."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("atquant-inf")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INF = _Infinity()


def nat_min(x, y):
    return x if x <= y else y


def nat_max(x, y):
    return y if x <= y else x


def nat_add(x, y):
    if x is INF or y is INF:
        return INF
    return x + y


def prob_max(x, y):
    return x if x >= y else y


def prob_mul(x, y):
    return x * y


class ValueKind(Enum):
    NATURAL = "natural"  # N ∪ {inf}, exact rationals tolerated
    PROBABILITY = "probability"  # Fraction in [0, 1]
    PARETO = "pareto"  # frozenset of component tuples


class KTopMode(Enum):
    MIN_ADDITIVE = "min-additive"
    MAX_ADDITIVE = "max-additive"
    UNSUPPORTED = "unsupported"


@dataclass(frozen=True)
class AttributeDomain:
    """(V, or_op, and_op[, seq_op]) with optional neutral elements.

    or_op is the fold across alternative attacks, and_op the fold within an
    attack, seq_op the fold along a sequential chain (dynamic models only;
    None when sequential composition is undefined for this domain).
    """

    name: str
    kind: ValueKind
    or_op: Callable
    and_op: Callable
    seq_op: Optional[Callable] = None
    or_neutral: object = None
    and_neutral: object = None
    is_semiring: bool = False
    is_semiring_dynamic: bool = False
    ktop_mode: KTopMode = KTopMode.UNSUPPORTED
    sense: Optional[str] = None  # "min" | "max": what or_op optimises
    components: Optional[tuple["AttributeDomain", ...]] = None  # pareto only
    directions: Optional[tuple[str, ...]] = None  # pareto only

    @property
    def has_neutrals(self) -> bool:
        return self.or_neutral is not None and self.and_neutral is not None

    @property
    def seq_equals_and(self) -> bool:
        return self.seq_op is not None and self.seq_op is self.and_op

    def validate_value(self, v) -> None:
        if self.kind is ValueKind.NATURAL:
            if v is INF:
                return
            if isinstance(v, bool) or not isinstance(v, (int, Fraction)):
                raise BadAttributeValue(f"{self.name}: expected a number or inf, got {v!r}")
            if v < 0:
                raise BadAttributeValue(f"{self.name}: negative value {v!r}")
        elif self.kind is ValueKind.PROBABILITY:
            if not isinstance(v, (int, Fraction)) or isinstance(v, bool):
                raise BadAttributeValue(f"{self.name}: expected an exact rational, got {v!r}")
            if not 0 <= v <= 1:
                raise BadAttributeValue(f"{self.name}: probability {v!r} outside [0, 1]")
        else:
            if not isinstance(v, frozenset):
                raise BadAttributeValue(f"{self.name}: expected a pareto front, got {v!r}")
            for vec in v:
                if not isinstance(vec, tuple) or len(vec) != len(self.components):
                    raise BadAttributeValue(f"{self.name}: bad front element {vec!r}")
                for comp, x in zip(self.components, vec):
                    comp.validate_value(x)

    def random_value(self, rng: Random):
        """Small exact values for randomized law checking and oracles."""
        if self.kind is ValueKind.NATURAL:
            if rng.random() < 0.1:
                return INF
            return rng.randint(0, 20)
        if self.kind is ValueKind.PROBABILITY:
            den = rng.choice([1, 2, 3, 4, 5, 8, 10, 100])
            return Fraction(rng.randint(0, den), den)
        vecs = []
        for _ in range(rng.randint(1, 3)):
            vecs.append(tuple(c.random_value(rng) for c in self.components))
        return pareto_prune(frozenset(vecs), self.directions)


def _dominates(u: tuple, w: tuple, directions: Sequence[str]) -> bool:
    """u at least as good everywhere and strictly better somewhere."""
    strict = False
    for a, b, d in zip(u, w, directions):
        if d == "min":
            if a > b:
                return False
            strict = strict or a < b
        else:
            if a < b:
                return False
            strict = strict or a > b
    return strict


def pareto_prune(front: frozenset, directions: Sequence[str]) -> frozenset:
    kept = [u for u in front if not any(_dominates(w, u, directions) for w in front if w != u)]
    return frozenset(kept)


def builtin(name: str) -> AttributeDomain:
    """Look up a builtin domain by name; pareto(a,b,...) builds a product."""
    m = re.fullmatch(r"pareto\(([^()]*)\)", name.strip())
    if m:
        parts = [p.strip() for p in m.group(1).split(",") if p.strip()]
        return pareto_product([builtin(p) for p in parts])
    try:
        return _BUILTINS[name.strip()]()
    except KeyError:
        known = ", ".join(sorted(_BUILTINS))
        raise UnknownDomain(f"unknown domain {name!r}; builtins: {known}, pareto(...)") from None


def pareto_product(
    components: Sequence[AttributeDomain], directions: Optional[Sequence[str]] = None
) -> AttributeDomain:
    """Product domain over vectors of the component values.

    Disjunction is union-then-prune of fronts; conjunction combines fronts
    pairwise with the componentwise conjunctive ops, then prunes. Sequential
    composition is left undefined (open problem for the dynamic case).
    """
    components = tuple(components)
    if not components:
        raise EmptyProduct("pareto product needs at least one component")
    for c in components:
        if c.kind is ValueKind.PARETO:
            raise EmptyProduct("pareto products do not nest")
    if directions is None:
        directions = tuple(c.sense for c in components)
        if any(d is None for d in directions):
            raise EmptyProduct("component without an optimisation sense; pass directions")
    else:
        directions = tuple(directions)
        if len(directions) != len(components) or any(d not in ("min", "max") for d in directions):
            raise EmptyProduct(f"bad directions {directions!r}")

    def or_op(f, g):
        return pareto_prune(f | g, directions)

    def and_op(f, g):
        combined = frozenset(
            tuple(c.and_op(a, b) for c, a, b in zip(components, u, w)) for u in f for w in g
        )
        return pareto_prune(combined, directions)

    name = "pareto(" + ",".join(c.name for c in components) + ")"
    neutrals_ok = all(c.has_neutrals for c in components)
    return AttributeDomain(
        name=name,
        kind=ValueKind.PARETO,
        or_op=or_op,
        and_op=and_op,
        seq_op=None,
        or_neutral=frozenset(),
        and_neutral=frozenset({tuple(c.and_neutral for c in components)}) if neutrals_ok else None,
        is_semiring=all(c.is_semiring for c in components),
        is_semiring_dynamic=False,
        ktop_mode=KTopMode.UNSUPPORTED,
        components=components,
        directions=directions,
    )


def _nat(name, or_op, and_op, seq_op, or_neutral, and_neutral, *, dyn, ktop, sense):
    return AttributeDomain(
        name=name,
        kind=ValueKind.NATURAL,
        or_op=or_op,
        and_op=and_op,
        seq_op=seq_op,
        or_neutral=or_neutral,
        and_neutral=and_neutral,
        is_semiring=True,
        is_semiring_dynamic=dyn,
        ktop_mode=ktop,
        sense=sense,
    )


_BUILTINS: dict[str, Callable[[], AttributeDomain]] = {
    # (N∞, min, +), seq +: cheapest attack; + over + is not distributive,
    # so not a dynamic semiring even though seq composition is well defined.
    "min-cost": lambda: _nat(
        "min-cost", nat_min, nat_add, nat_add, INF, 0,
        dyn=False, ktop=KTopMode.MIN_ADDITIVE, sense="min",
    ),
    # (N∞, min, +), seq +: shortest one-at-a-time schedule.
    "min-time-seq": lambda: _nat(
        "min-time-seq", nat_min, nat_add, nat_add, INF, 0,
        dyn=False, ktop=KTopMode.MIN_ADDITIVE, sense="min",
    ),
    # (N∞, min, max), seq +: shortest schedule with unbounded parallelism;
    # + distributes over max and min, so this IS a dynamic semiring.
    "min-time-par": lambda: _nat(
        "min-time-par", nat_min, nat_max, nat_add, INF, 0,
        dyn=True, ktop=KTopMode.UNSUPPORTED, sense="min",
    ),
    # (N∞, min, max), seq max: weakest adversary that still gets through.
    "min-skill": lambda: _nat(
        "min-skill", nat_min, nat_max, nat_max, INF, 0,
        dyn=True, ktop=KTopMode.UNSUPPORTED, sense="min",
    ),
    # (N∞, max, max), seq max: hardest single obstacle on the best path.
    "max-challenge": lambda: _nat(
        "max-challenge", nat_max, nat_max, nat_max, 0, 0,
        dyn=True, ktop=KTopMode.UNSUPPORTED, sense="max",
    ),
    # (N∞, max, +), seq +: worst-case cumulative damage.
    "max-damage": lambda: _nat(
        "max-damage", nat_max, nat_add, nat_add, 0, 0,
        dyn=False, ktop=KTopMode.MAX_ADDITIVE, sense="max",
    ),
    # ([0,1], max, *), seq *: probability of the most likely attack.
    "prob-max": lambda: AttributeDomain(
        name="prob-max",
        kind=ValueKind.PROBABILITY,
        or_op=prob_max,
        and_op=prob_mul,
        seq_op=prob_mul,
        or_neutral=Fraction(0),
        and_neutral=Fraction(1),
        is_semiring=True,
        is_semiring_dynamic=False,
        ktop_mode=KTopMode.UNSUPPORTED,
        sense="max",
    ),
    # (N∞, +, min): cost to defend against every attack. min does NOT
    # distribute over +; kept as the stock non-semiring example, usable
    # only through the definitional oracle.
    "cost-to-defend": lambda: AttributeDomain(
        name="cost-to-defend",
        kind=ValueKind.NATURAL,
        or_op=nat_add,
        and_op=nat_min,
        seq_op=None,
        or_neutral=0,
        and_neutral=INF,
        is_semiring=False,
        is_semiring_dynamic=False,
        ktop_mode=KTopMode.UNSUPPORTED,
        sense=None,
    ),
}


BUILTIN_NAMES = tuple(sorted(_BUILTINS))


# -- law checking -------------------------------------------------------------

@dataclass(frozen=True)
class LawResult:
    law: str
    holds: bool
    counterexample: Optional[tuple] = None


@dataclass(frozen=True)
class LawReport:
    domain: str
    results: tuple[LawResult, ...]

    @property
    def all_hold(self) -> bool:
        return all(r.holds for r in self.results)

    def result(self, law: str) -> LawResult:
        for r in self.results:
            if r.law == law:
                return r
        raise KeyError(law)


def check_semiring_laws(
    domain: AttributeDomain,
    triples: Optional[Sequence[tuple]] = None,
    *,
    n_triples: int = 1000,
    seed: int = 0,
) -> LawReport:
    """Probe the declared algebra laws on concrete value triples.

    Checks associativity/commutativity of every present operator and neutral
    laws unconditionally, and each distributivity law the domain's flags
    claim (and_op over or_op when is_semiring; additionally seq_op over both
    when is_semiring_dynamic). Reports one pass/fail per law with the first
    counterexample found.
    """
    if triples is None:
        rng = Random(seed)
        triples = [tuple(domain.random_value(rng) for _ in range(3)) for _ in range(n_triples)]

    ops = [("or", domain.or_op), ("and", domain.and_op)]
    if domain.seq_op is not None:
        ops.append(("seq", domain.seq_op))

    results: list[LawResult] = []
    for opname, op in ops:
        results.append(_probe(f"{opname}-associative", triples,
                              lambda x, y, z, op=op: op(op(x, y), z) == op(x, op(y, z))))
        results.append(_probe(f"{opname}-commutative", triples,
                              lambda x, y, z, op=op: op(x, y) == op(y, x)))
    if domain.or_neutral is not None:
        results.append(_probe("or-neutral", triples,
                              lambda x, y, z: domain.or_op(x, domain.or_neutral) == x))
    if domain.and_neutral is not None:
        results.append(_probe("and-neutral", triples,
                              lambda x, y, z: domain.and_op(x, domain.and_neutral) == x))

    claimed = []
    if domain.is_semiring:
        claimed.append(("and-over-or", domain.and_op, domain.or_op))
    if domain.is_semiring_dynamic:
        claimed.append(("seq-over-and", domain.seq_op, domain.and_op))
        claimed.append(("seq-over-or", domain.seq_op, domain.or_op))
    for lawname, outer, inner in claimed:
        results.append(_probe(lawname, triples,
                              lambda x, y, z, o=outer, i=inner: o(x, i(y, z)) == i(o(x, y), o(x, z))))
    if not domain.is_semiring:
        # Still probe the defining law so the failure is visible, not silent.
        results.append(_probe("and-over-or", triples,
                              lambda x, y, z: domain.and_op(x, domain.or_op(y, z))
                              == domain.or_op(domain.and_op(x, y), domain.and_op(x, z))))
    return LawReport(domain.name, tuple(results))


def _probe(law: str, triples, pred) -> LawResult:
    for t in triples:
        x, y, z = t
        if not pred(x, y, z):
            return LawResult(law, False, t)
    return LawResult(law, True, None)
