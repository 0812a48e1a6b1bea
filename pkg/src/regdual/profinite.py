"""Finite-scale profinite machinery.

Nothing infinite is ever materialized: the limit of a finite family of
generated monoids is its subdirect join, computed in one closure pass
over the product of the family.  Joins small enough to table are packed
into ordinary generated monoids; larger ones are kept as lazy joins
(element tuples with memoized products), which is all the factorization
tests need.

A truncated profinite equational theory maps alphabets to such
approximants; membership of a monoid in the induced pseudovariety is the
appendix-style criterion "is a quotient of the approximant on a suitable
alphabet", decided by the graph method and explicitly relative to the
truncation bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import dalg, sigs
from .errors import InputError, InvariantError, ResourceError
from .opfib import FINITE, LocalPseudovariety, pv_finite
from .reglang import Alphabet, FreeMorphism, shortlex_key, normalize_wordset

_MATERIALIZE_LIMIT = 600
_JOIN_LIMIT = 60_000


class _LazyJoin:
    """Subdirect join represented by component value tuples, with products
    computed on demand through the component tables."""

    def __init__(self, components, gen_values, alphabet):
        self.components = components
        self.alphabet = alphabet
        mults = [c.monoid.mult for c in components]
        vals = [tuple(c.monoid.unit for c in components)]
        index = {vals[0]: 0}
        pos = 0
        while pos < len(vals):
            cur = vals[pos]
            for gv in gen_values:
                new = tuple(m[a][b] for m, a, b in zip(mults, cur, gv))
                if new not in index:
                    if len(vals) >= _JOIN_LIMIT:
                        raise ResourceError("approximant join exceeds desk-scale bound")
                    index[new] = len(vals)
                    vals.append(new)
            pos += 1
        self.vals = vals
        self.index = index
        self.gens = tuple(index[gv] for gv in gen_values)
        self.unit = 0
        self._mults = mults
        self._memo: dict = {}

    @property
    def size(self):
        return len(self.vals)

    def mult(self, i, j):
        key = (i, j)
        got = self._memo.get(key)
        if got is None:
            x, y = self.vals[i], self.vals[j]
            got = self.index[tuple(m[a][b] for m, a, b in zip(self._mults, x, y))]
            self._memo[key] = got
        return got


@dataclass(frozen=True)
class ApproximantMonoid:
    """Finite stand-in for the limit of a generating family: its subdirect
    join, canonicalized when small enough to table."""

    alphabet: Alphabet
    dsig: str
    size: int
    provenance: tuple[dalg.GeneratedDMonoid, ...]
    base: dalg.GeneratedDMonoid | None = None
    lazy: object = field(default=None, compare=False, repr=False)
    projections: tuple[dalg.DMonoidMorphism, ...] = ()

    def materialized(self) -> dalg.GeneratedDMonoid:
        if self.base is None:
            raise ResourceError(
                f"approximant of size {self.size} exceeds the table bound {_MATERIALIZE_LIMIT}"
            )
        return self.base


def limit_of(generators) -> ApproximantMonoid:
    """Limit of the finite directed family generated by the given
    quotients: their iterated subdirect join, with surjective projections
    onto every generator."""
    gens = [dalg.canonicalize(g) for g in generators]
    if not gens:
        raise InputError("limit_of needs at least one generator")
    alphabet, dsig = gens[0].alphabet, gens[0].dsig
    for g in gens:
        if g.alphabet != alphabet or g.dsig != dsig:
            raise InputError("generators must share alphabet and signature")
    gen_values = [tuple(g.gen_map[i] for g in gens) for i in range(len(alphabet.symbols))]
    if dsig == sigs.SET:
        lazy = _LazyJoin(gens, gen_values, alphabet)
        size = lazy.size
        if size > _MATERIALIZE_LIMIT:
            projections = _lazy_projections(lazy, gens)
            return ApproximantMonoid(alphabet, dsig, size, tuple(gens), None, lazy, projections)
    base, _ = dalg._pack_generated([g.monoid for g in gens], gen_values, alphabet)
    if base.size > _MATERIALIZE_LIMIT:
        raise ResourceError("approximant join exceeds the table bound")
    projections = []
    for g in gens:
        w = dalg.leq_quo(g, base)
        if w is None:
            raise InvariantError("generator does not factor through its own join")
        if len(set(w.table)) != g.size:
            raise InvariantError("limit projection is not surjective")
        projections.append(w)
    return ApproximantMonoid(alphabet, dsig, base.size, tuple(gens), base, None, tuple(projections))


def _lazy_projections(lazy: _LazyJoin, gens):
    projections = []
    for i, g in enumerate(gens):
        table = [0] * lazy.size
        seen = set()
        for idx, val in enumerate(lazy.vals):
            table[idx] = val[i]
            seen.add(val[i])
        if len(seen) != g.size:
            raise InvariantError("limit projection is not surjective")
        projections.append(dalg.DMonoidMorphism(None, g.monoid, tuple(table)))
    return tuple(projections)


def factors_through(approx: ApproximantMonoid, target: dalg.GeneratedDMonoid, f: FreeMorphism | None = None) -> bool:
    """Does the target quotient factor through the approximant (along f
    when given, along the identity otherwise)?  Decided by the graph
    method; for lazy joins products are computed on demand."""
    if f is None:
        if target.alphabet != approx.alphabet:
            raise InputError("target alphabet does not match the approximant")
        gen_targets = list(target.gen_map)
    else:
        if f.domain != approx.alphabet or f.codomain != target.alphabet:
            raise InputError("morphism endpoints do not match")
        gen_targets = [dalg.evaluate(target, p) for p in f.image]
    if target.dsig != approx.dsig:
        raise InputError("signature mismatch")
    if approx.base is not None:
        if f is None:
            return dalg.leq_quo(target, approx.base) is not None
        return dalg.graph_factorization(approx.base, target, f) is not None
    # lazy SET path: pair closure of (join element, target element)
    lazy = approx.lazy
    tmult = target.monoid.mult
    pairs = [(0, target.monoid.unit)]
    index = {pairs[0]: 0}
    table = {0: target.monoid.unit}
    gen_pairs = list(zip(lazy.gens, gen_targets))
    pos = 0
    while pos < len(pairs):
        a, b = pairs[pos]
        for ga, gb in gen_pairs:
            new = (lazy.mult(a, ga), tmult[b][gb])
            if new not in index:
                index[new] = len(pairs)
                pairs.append(new)
                prev = table.get(new[0])
                if prev is None:
                    table[new[0]] = new[1]
                elif prev != new[1]:
                    return False
        pos += 1
    return True


def recover_ideal(m: ApproximantMonoid, size_bound: int) -> LocalPseudovariety:
    """All quotients of the approximant up to the size bound: the ideal
    its provenance generates, recovered from the limit alone."""
    base = m.materialized()
    members = dalg.enumerate_quotients(base, size_bound)
    ideal = pv_finite(members) if members else pv_finite([_trivial(m.alphabet, m.dsig)])
    # the provenance must regenerate the same ideal
    for g in m.provenance:
        if g.size <= size_bound and not ideal.member(g):
            raise InvariantError("provenance member missing from the recovered ideal")
    return ideal


def _trivial(alphabet: Alphabet, dsig: str) -> dalg.GeneratedDMonoid:
    if dsig == sigs.SET:
        carrier = dalg.set_object(1)
    elif dsig == sigs.POS:
        carrier = dalg.FiniteDObject(sigs.POS, 1, order=((0, 0),))
    elif dsig == sigs.SLAT:
        carrier = dalg.FiniteDObject(sigs.SLAT, 1, join=((0,),), bottom=0)
    else:
        carrier = dalg.z2_object(0)
    mon = dalg.FiniteDMonoid(carrier, 0, ((0,),))
    label = "" if dsig in sigs.WORD_DSIGS else ("",)
    g = dalg.GeneratedDMonoid(mon, alphabet, (0,) * len(alphabet.symbols), (label,))
    return dalg.canonicalize(g)


# ---------------------------------------------------------------------------
# Kernel pairs (truncated profinite equations)


def enumerate_payloads(alphabet: Alphabet, dsig: str, length_bound: int):
    """Free-monoid element payloads with words up to the length bound
    (set payloads limited to at most length_bound words)."""
    words = [""]
    frontier = [""]
    for _ in range(length_bound):
        frontier = [w + s for w in frontier for s in alphabet.symbols]
        words.extend(frontier)
    words.sort(key=lambda w: shortlex_key(alphabet, w))
    if dsig in sigs.WORD_DSIGS:
        return words
    if len(words) > 40:
        raise ResourceError("payload enumeration exceeds its desk-scale bound")
    out = set()
    for r in range(min(length_bound, len(words)) + 1):
        for combo in itertools.combinations(words, r):
            out.add(normalize_wordset(alphabet, combo, mod2=dsig == sigs.Z2VEC))
    from .reglang import payload_key

    return sorted(out, key=lambda p: payload_key(alphabet, p))


def kernel_pairs(g: dalg.GeneratedDMonoid, length_bound: int):
    """All pairs of distinct free-monoid elements (up to the length bound)
    identified by the quotient, shortlex-sorted: the truncated profinite
    equations of g."""
    payloads = enumerate_payloads(g.alphabet, g.dsig, length_bound)
    by_value: dict[int, list] = {}
    for p in payloads:
        by_value.setdefault(dalg.evaluate(g, p), []).append(p)
    pairs = []
    for v in sorted(by_value):
        same = by_value[v]
        for i in range(len(same)):
            for j in range(i + 1, len(same)):
                pairs.append((same[i], same[j]))
    from .reglang import payload_key

    pairs.sort(key=lambda uv: (payload_key(g.alphabet, uv[0]), payload_key(g.alphabet, uv[1])))
    return pairs


# ---------------------------------------------------------------------------
# Pseudovariety predicates and truncated theories


@dataclass(frozen=True)
class PseudovarietyPredicate:
    dsig: str
    membership: object  # predicate on FiniteDMonoid
    description: str


def _pred_all(m: dalg.FiniteDMonoid) -> bool:
    return True


def _pred_idempotent(m: dalg.FiniteDMonoid) -> bool:
    return all(m.mult[x][x] == x for x in range(m.carrier.size))


def _pred_commutative(m: dalg.FiniteDMonoid) -> bool:
    n = m.carrier.size
    return all(m.mult[x][y] == m.mult[y][x] for x in range(n) for y in range(n))


def _pred_xx_eq_xxx(m: dalg.FiniteDMonoid) -> bool:
    t = m.mult
    return all(t[x][x] == t[t[x][x]][x] for x in range(m.carrier.size))


BUILTIN_PREDICATES = {
    "all": _pred_all,
    "idempotent": _pred_idempotent,
    "commutative": _pred_commutative,
    "xx_eq_xxx": _pred_xx_eq_xxx,
}


def predicate(name: str, dsig: str = sigs.SET) -> PseudovarietyPredicate:
    if name not in BUILTIN_PREDICATES:
        raise InputError(f"unknown predicate {name!r}; choose from {sorted(BUILTIN_PREDICATES)}")
    return PseudovarietyPredicate(dsig, BUILTIN_PREDICATES[name], name)


def spot_check_predicate(p: PseudovarietyPredicate, sample_bound: int = 3) -> list[str]:
    """Sample-based closure check (quotients, submonoids, finite
    products); violations are reported, never silently accepted."""
    alphabet = Alphabet(("a",))
    sample = [g for g in dalg.enumerate_generated(p.dsig, alphabet, sample_bound) if p.membership(g.monoid)]
    bad = []
    for g in sample:
        for q in dalg.enumerate_quotients(g, g.size):
            if not p.membership(q.monoid):
                bad.append(f"not closed under quotients at size {g.size}")
                break
        for _, sub in dalg.enumerate_submonoids(g.monoid):
            if not p.membership(sub):
                bad.append(f"not closed under submonoids at size {g.size}")
                break
    for g, h in itertools.combinations(sample, 2):
        if not p.membership(dalg.direct_product(g.monoid, h.monoid)):
            bad.append("not closed under finite products")
            break
    return sorted(set(bad))


@dataclass(frozen=True)
class TruncatedTheory:
    """Finitely truncated profinite equational theory: one approximant per
    alphabet, all built at one size bound."""

    entries: tuple[tuple[Alphabet, ApproximantMonoid], ...]
    size_bound: int
    warnings: tuple[str, ...] = ()

    def entry(self, alphabet: Alphabet) -> ApproximantMonoid:
        for a, m in self.entries:
            if a == alphabet:
                return m
        raise InputError(f"theory has no entry for alphabet {alphabet.symbols}")

    def entries_for_size(self, n: int) -> list[ApproximantMonoid]:
        """Entries to try for a plain monoid of carrier size n: the
        size-matching alphabet when present, otherwise every entry (the
        result is then relative to the available alphabets too)."""
        exact = [m for a, m in self.entries if len(a.symbols) == n]
        return exact if exact else [m for _, m in self.entries]


def theory_from_pseudovariety(p: PseudovarietyPredicate, alphabet: Alphabet, size_bound: int) -> ApproximantMonoid:
    """Truncation of the theory's free object over one alphabet: the join
    of all generated monoids of bounded size satisfying the predicate."""
    members = [
        g
        for g in dalg.enumerate_generated(p.dsig, alphabet, size_bound)
        if p.membership(g.monoid)
    ]
    if not members:
        members = [_trivial(alphabet, p.dsig)]
    return limit_of(members)


def build_theory(p: PseudovarietyPredicate, alphabets, size_bound: int) -> TruncatedTheory:
    warnings = tuple(spot_check_predicate(p))
    entries = tuple((a, theory_from_pseudovariety(p, a, size_bound)) for a in alphabets)
    return TruncatedTheory(entries, size_bound, warnings)


def pseudovariety_from_theory(t: TruncatedTheory, m, alphabet: Alphabet | None = None) -> bool:
    """Bound-relative membership of a finite monoid in the pseudovariety
    induced by the theory: is it a quotient of the approximant on its
    alphabet (generated monoids), or on the designated/size-matching
    alphabet (plain monoids, over all generating assignments)?"""
    if isinstance(m, dalg.GeneratedDMonoid):
        entry = t.entry(m.alphabet if alphabet is None else alphabet)
        return factors_through(entry, m)
    if not isinstance(m, dalg.FiniteDMonoid):
        raise InputError("pseudovariety_from_theory needs a monoid")
    entries = [t.entry(alphabet)] if alphabet is not None else t.entries_for_size(m.carrier.size)
    n = m.carrier.size
    placeholder = ("",) * n if m.carrier.dsig in sigs.WORD_DSIGS else ((),) * n
    for entry in entries:
        syms = entry.alphabet.symbols
        if n ** len(syms) > 200_000:
            raise ResourceError("generator-assignment sweep exceeds its desk-scale bound")
        for gen_map in itertools.product(range(n), repeat=len(syms)):
            cand = dalg.GeneratedDMonoid(m, entry.alphabet, gen_map, placeholder)
            if len(dalg._generated_subset(cand)) != n:
                continue
            if factors_through(entry, dalg.canonicalize(cand)):
                return True
    return False


def theory_naturality_check(t: TruncatedTheory, f: FreeMorphism) -> bool:
    """Does some h complete the naturality square of the theory along f at
    truncated scale?  Decided by the graph method between approximants."""
    dom = t.entry(f.domain)
    cod = t.entry(f.codomain)
    if dom.base is None or cod.base is None:
        raise ResourceError("naturality check needs materialized approximants")
    return dalg.graph_factorization(dom.base, cod.base, f) is not None
