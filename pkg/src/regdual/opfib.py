"""The fibrational layer over free-monoid morphisms.

Fibers are posets: local varieties of languages on one side, local
pseudovarieties of generated monoids on the other.  A base morphism f
acts by preimage closure (language side) and by pushforward along
factorizations (monoid side); the checks here decide morphism claims in
both categories, compute the two pushforwards as bounded oracles, verify
the square that identifies them, and test global sections over a chosen
subcategory, including the fully-invariant (single-object) case.

Pushforward ideals need not stay finitely generated, so pseudovarieties
come in three modes: FINITE (explicit canonical member list), GENERATED
(an antichain of generators), and ORACLE (membership predicate plus an
enumeration bound).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from . import dalg, locvar, sigs
from .errors import InputError, ResourceError
from .reglang import (
    Alphabet,
    CanonicalDfa,
    FreeMorphism,
    compose_morphisms,
    free_morphism,
    normalize_wordset,
    preimage,
)

FINITE = "FINITE"
GENERATED = "GENERATED"
ORACLE = "ORACLE"

_UNARY_ENUM_LIMIT = 12
_PRODUCT_ENUM_LIMIT = 2_000_000


@dataclass(frozen=True)
class LocalPseudovariety:
    """Ideal of Quo over one alphabet, in one of three representations."""

    alphabet: Alphabet
    dsig: str
    mode: str
    gens: tuple[dalg.GeneratedDMonoid, ...] = ()
    membership: object = None  # ORACLE mode: predicate on GeneratedDMonoid
    description: str = ""

    def member(self, g: dalg.GeneratedDMonoid) -> bool:
        if g.alphabet != self.alphabet or g.dsig != self.dsig:
            raise InputError("candidate does not live over this pseudovariety's alphabet")
        if self.mode == ORACLE:
            return bool(self.membership(g))
        if self.mode == FINITE:
            key = dalg.encoding_key(dalg.canonicalize(g))
            return any(key == dalg.encoding_key(h) for h in self.gens)
        return dalg.leq_quo(g, join_of_gens(self)) is not None

    def enumerate(self, size_bound: int) -> list[dalg.GeneratedDMonoid]:
        """All members with carrier size <= size_bound, canonically sorted."""
        if self.mode == FINITE:
            return [g for g in self.gens if g.size <= size_bound]
        cands = dalg.enumerate_generated(self.dsig, self.alphabet, size_bound)
        return [g for g in cands if self.member(g)]


def pv_finite(monoids) -> LocalPseudovariety:
    monoids = [dalg.canonicalize(g) for g in monoids]
    if not monoids:
        raise InputError("a pseudovariety needs at least the trivial member")
    alphabet, dsig = monoids[0].alphabet, monoids[0].dsig
    seen = {}
    for g in monoids:
        if g.alphabet != alphabet or g.dsig != dsig:
            raise InputError("pseudovariety members must share alphabet and signature")
        seen.setdefault(dalg.encoding_key(g), g)
    gens = tuple(seen[k] for k in sorted(seen))
    return LocalPseudovariety(alphabet, dsig, FINITE, gens)


def pv_generated(gens) -> LocalPseudovariety:
    gens = [dalg.canonicalize(g) for g in gens]
    if not gens:
        raise InputError("a generated pseudovariety needs at least one generator")
    alphabet, dsig = gens[0].alphabet, gens[0].dsig
    # reduce to the antichain of maximal generators
    keep = []
    for i, g in enumerate(gens):
        dominated = False
        for j, h in enumerate(gens):
            if i != j and dalg.leq_quo(g, h) is not None:
                if dalg.leq_quo(h, g) is None or j < i:
                    dominated = True
                    break
        if not dominated:
            keep.append(g)
    seen = {}
    for g in keep:
        seen.setdefault(dalg.encoding_key(g), g)
    return LocalPseudovariety(alphabet, dsig, GENERATED, tuple(seen[k] for k in sorted(seen)))


def pv_principal(g: dalg.GeneratedDMonoid) -> LocalPseudovariety:
    return pv_generated([g])


def pv_oracle(alphabet, dsig, membership, description="") -> LocalPseudovariety:
    return LocalPseudovariety(alphabet, dsig, ORACLE, (), membership, description)


def join_of_gens(p: LocalPseudovariety) -> dalg.GeneratedDMonoid:
    if p.mode == ORACLE:
        raise InputError("oracle pseudovarieties have no generator join")
    join = p.gens[0]
    for g in p.gens[1:]:
        join = dalg.subdirect(join, g)
    return join


def validate_pseudovariety(p: LocalPseudovariety) -> list[str]:
    """Spot the definitional closure properties; empty list means valid."""
    bad = []
    if p.mode == FINITE:
        keys = {dalg.encoding_key(g) for g in p.gens}
        for g in p.gens:
            for q in dalg.enumerate_quotients(g, g.size):
                if dalg.encoding_key(q) not in keys:
                    bad.append("not closed under quotients")
                    break
        for g, h in itertools.combinations(p.gens, 2):
            if dalg.encoding_key(dalg.subdirect(g, h)) not in keys:
                bad.append("not closed under subdirect products")
                break
    elif p.mode == GENERATED:
        for g, h in itertools.permutations(p.gens, 2):
            if dalg.leq_quo(g, h) is not None:
                bad.append("generator antichain has a comparable pair")
                break
    return sorted(set(bad))


# ---------------------------------------------------------------------------
# Fibred objects and morphism claims


@dataclass(frozen=True)
class FibMorphismClaim:
    source: object  # LocalVariety | LocalPseudovariety
    morphism: FreeMorphism
    target: object

    def __post_init__(self):
        if self.source.alphabet != self.morphism.domain:
            raise InputError("claim source alphabet must match the morphism domain")
        if self.target.alphabet != self.morphism.codomain:
            raise InputError("claim target alphabet must match the morphism codomain")


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok


def check_flang_morphism(claim: FibMorphismClaim) -> CheckResult:
    """Is (source variety) -> f -> (target variety) a morphism of local
    varieties, i.e. the source closed under f-preimages of the target?"""
    v, w = claim.source, claim.target
    if not isinstance(v, locvar.LocalVariety) or not isinstance(w, locvar.LocalVariety):
        raise InputError("check_flang_morphism needs variety endpoints")
    f = claim.morphism
    if f.dsig in sigs.WORD_DSIGS:
        members = set(v.languages)
        for l in w.languages:
            if preimage(f, l) not in members:
                return CheckResult(False, {"language": l, "preimage": preimage(f, l)})
        return CheckResult(True)
    return CheckResult(locvar.check_preimage_closure(v, f, w))


def check_fvar_morphism(claim: FibMorphismClaim) -> CheckResult:
    """Is (source pv) -> f -> (target pv) a morphism of local
    pseudovarieties: every target member receives a factorization from a
    source member (the join of the source generators suffices)?"""
    p, q = claim.source, claim.target
    if not isinstance(p, LocalPseudovariety) or not isinstance(q, LocalPseudovariety):
        raise InputError("check_fvar_morphism needs pseudovariety endpoints")
    if p.mode == ORACLE or q.mode == ORACLE:
        raise InputError("morphism checks need FINITE or GENERATED pseudovarieties")
    source_join = join_of_gens(p)
    for n in q.gens:
        if dalg.graph_factorization(source_join, n, claim.morphism) is None:
            return CheckResult(False, {"target_member": n})
    return CheckResult(True)


# ---------------------------------------------------------------------------
# Pushforwards


@lru_cache(maxsize=65536)
def two_sided_derivatives(l: CanonicalDfa) -> list[CanonicalDfa]:
    """All languages u^-1 L v^-1: left derivatives shift the initial
    state, right derivatives close the accepting set under letter
    preimages; a minimal DFA has finitely many of each."""
    from .reglang import _canonical

    n = l.states
    k = len(l.alphabet.symbols)
    acc_sets = {frozenset(l.accepting)}
    queue = [frozenset(l.accepting)]
    for fs in queue:
        for a in range(k):
            prev = frozenset(q for q in range(n) if l.delta[q][a] in fs)
            if prev not in acc_sets:
                acc_sets.add(prev)
                queue.append(prev)
    delta = [t for row in l.delta for t in row]
    out = set()
    for q0 in range(n):
        for fs in acc_sets:
            flags = [1 if q in fs else 0 for q in range(n)]
            out.add(_canonical(l.alphabet, n, delta, flags, q0))
    return sorted(out, key=lambda d: d.sort_key())


class PushforwardVariety:
    """The largest local variety over the codomain whose preimages all
    land in the source variety; a membership oracle with bounded
    enumeration."""

    def __init__(self, f: FreeMorphism, v: locvar.LocalVariety):
        if f.domain != v.alphabet:
            raise InputError("morphism domain must match the variety alphabet")
        if f.dsig != v.dsig:
            raise InputError(f"{v.csig} varieties pair with {v.dsig} morphisms")
        self.f = f
        self.v = v
        self.csig = v.csig
        self.alphabet = f.codomain
        self._members = set(v.languages)
        self._pv = None
        self._memo: dict = {}

    def member(self, l: CanonicalDfa) -> bool:
        if l.alphabet != self.alphabet:
            raise InputError("candidate language lives over the wrong alphabet")
        got = self._memo.get(l)
        if got is not None:
            return got
        got = self._member(l)
        self._memo[l] = got
        return got

    def _member(self, l: CanonicalDfa) -> bool:
        if self.f.dsig in sigs.WORD_DSIGS:
            return all(
                _cached_preimage(self.f, d) in self._members
                for d in two_sided_derivatives(l)
            )
        # dual route for set payloads: the dual monoid of the closure of l
        # must be in the pushforward of the principal ideal of the source
        if self._pv is None:
            self._pv = pushforward_pseudovariety(self.f, pv_principal(locvar.variety_to_monoid(self.v)))
        n = locvar.variety_to_monoid(locvar.close(self.csig, self.alphabet, [l]))
        return self._pv.member(n)

    def enumerate(self, state_bound: int) -> list[CanonicalDfa]:
        """All members with canonical DFA of at most state_bound states."""
        return [l for l in enumerate_languages(self.alphabet, state_bound) if self.member(l)]


@lru_cache(maxsize=64)
def enumerate_languages(alphabet: Alphabet, state_bound: int) -> tuple[CanonicalDfa, ...]:
    """All regular languages with minimal DFA of at most the given number
    of states (canonically sorted); desk-scale bounds apply."""
    k = len(alphabet.symbols)
    out = set()
    if k == 1:
        if state_bound > _UNARY_ENUM_LIMIT:
            raise ResourceError("unary language enumeration is desk-scale (<= 12 states)")
        # tail i and cycle p with i + p = n; all accepting subsets
        from .reglang import _canonical

        for n in range(1, state_bound + 1):
            for p in range(1, n + 1):
                i = n - p
                delta = [(q + 1 if q + 1 < n else i) for q in range(n)]
                for accbits in range(1 << n):
                    flags = [(accbits >> q) & 1 for q in range(n)]
                    d = _canonical(alphabet, n, delta, flags, 0)
                    if d.states <= state_bound:
                        out.add(d)
    else:
        total = (state_bound ** (state_bound * k)) * (1 << state_bound)
        if total > _PRODUCT_ENUM_LIMIT:
            raise ResourceError("language enumeration exceeds its desk-scale bound")
        from .reglang import _canonical

        for n in range(1, state_bound + 1):
            for delta in itertools.product(range(n), repeat=n * k):
                for accbits in range(1 << n):
                    flags = [(accbits >> q) & 1 for q in range(n)]
                    d = _canonical(alphabet, n, list(delta), flags, 0)
                    out.add(d)
    return tuple(sorted(out, key=lambda d: d.sort_key()))


@lru_cache(maxsize=262144)
def _cached_preimage(f: FreeMorphism, l: CanonicalDfa) -> CanonicalDfa:
    return preimage(f, l)


def pushforward_variety(f: FreeMorphism, v: locvar.LocalVariety) -> PushforwardVariety:
    return PushforwardVariety(f, v)


def pushforward_pseudovariety(f: FreeMorphism, p: LocalPseudovariety) -> LocalPseudovariety:
    """All codomain-generated monoids receiving a factorization from the
    source ideal along f, as a membership oracle."""
    if p.mode == ORACLE:
        raise InputError("pushforward needs a FINITE or GENERATED pseudovariety")
    if f.domain != p.alphabet or f.dsig != p.dsig:
        raise InputError("morphism does not match the pseudovariety")
    source_join = join_of_gens(p)

    def membership(n: dalg.GeneratedDMonoid) -> bool:
        return dalg.graph_factorization(source_join, n, f) is not None

    return pv_oracle(
        f.codomain,
        p.dsig,
        membership,
        description=f"pushforward along {f.image} of {p.mode.lower()} pseudovariety",
    )


def square_check(
    f: FreeMorphism,
    v: locvar.LocalVariety,
    lang_bound: int = 8,
    size_bound: int = 6,
) -> bool:
    """Verify, up to the enumeration bounds, that the monoid-side
    pushforward of the principal ideal dual to v has the same members as
    the language-side pushforward of v.

    The two membership routes are independent: the monoid side asks for a
    graph factorization along f, the language side tests f-preimages of
    all two-sided derivatives.  Candidates are swept both as generated
    monoids (size <= size_bound) and, over unary codomains, as languages
    (minimal DFA <= lang_bound).
    """
    if f.dsig not in sigs.WORD_DSIGS:
        raise InputError("square_check needs a word morphism (language route)")
    mv = locvar.variety_to_monoid(v)
    fsharp = pushforward_pseudovariety(f, pv_principal(mv))
    fstar = pushforward_variety(f, v)
    for n in dalg.enumerate_generated(v.dsig, f.codomain, size_bound):
        monoid_side = fsharp.member(n)
        lang_side = all(fstar.member(l) for l in locvar.monoid_to_variety(n, v.csig).languages)
        if monoid_side != lang_side:
            return False
    if len(f.codomain.symbols) == 1 and lang_bound <= _UNARY_ENUM_LIMIT:
        for l in fstar.enumerate(lang_bound):
            n = locvar.variety_to_monoid(locvar.close(v.csig, f.codomain, [l]))
            if not fsharp.member(n):
                return False
    return True


# ---------------------------------------------------------------------------
# Sections and full invariance


@dataclass(frozen=True)
class SubcategorySpec:
    objects: tuple[Alphabet, ...]
    generating_morphisms: tuple[FreeMorphism, ...]

    def __post_init__(self):
        objs = set(self.objects)
        for f in self.generating_morphisms:
            if f.domain not in objs or f.codomain not in objs:
                raise InputError("subcategory morphism endpoint not among its objects")


def section_check(spec: SubcategorySpec, family) -> CheckResult:
    """Is the family (alphabet -> local variety) a global section over the
    subcategory?  Generating morphisms suffice: the condition composes."""
    for alphabet in spec.objects:
        if alphabet not in family:
            raise InputError(f"family has no entry for alphabet {alphabet.symbols}")
    for f in spec.generating_morphisms:
        claim = FibMorphismClaim(family[f.domain], f, family[f.codomain])
        res = check_flang_morphism(claim)
        if not res.ok:
            return CheckResult(False, {"morphism": f, "detail": res.witness})
    return CheckResult(True)


def enumerate_endomorphism_payloads(alphabet: Alphabet, dsig: str, length_bound: int):
    """All payloads of endomorphism images with words of length at most
    the bound (and at most bound-many words for set payloads)."""
    words = [""]
    frontier = [""]
    for _ in range(length_bound):
        frontier = [w + s for w in frontier for s in alphabet.symbols]
        words.extend(frontier)
    if dsig in sigs.WORD_DSIGS:
        return list(words)
    out = []
    for r in range(min(length_bound, len(words)) + 1):
        for combo in itertools.combinations(words, r):
            out.append(normalize_wordset(alphabet, combo, mod2=dsig == sigs.Z2VEC))
    return sorted(set(out))


def enumerate_endomorphisms(alphabet: Alphabet, dsig: str, length_bound: int):
    payloads = enumerate_endomorphism_payloads(alphabet, dsig, length_bound)
    k = len(alphabet.symbols)
    if len(payloads) ** k > 200_000:
        raise ResourceError("endomorphism sweep exceeds its desk-scale bound")
    for images in itertools.product(payloads, repeat=k):
        yield free_morphism(alphabet, alphabet, dsig, dict(zip(alphabet.symbols, images)))


def fully_invariant_check(v: locvar.LocalVariety, length_bound: int) -> CheckResult:
    """Bounded full-invariance: closure under preimages of all
    endomorphisms with payloads up to the length bound."""
    for f in enumerate_endomorphisms(v.alphabet, v.dsig, length_bound):
        if f.dsig in sigs.WORD_DSIGS:
            members = set(v.languages)
            for l in v.languages:
                if preimage(f, l) not in members:
                    return CheckResult(False, {"morphism": f, "language": l})
        else:
            if not locvar.check_preimage_closure(v, f, v):
                return CheckResult(False, {"morphism": f})
    return CheckResult(True)


# ---------------------------------------------------------------------------
# JSON


def pv_to_json(p: LocalPseudovariety) -> dict:
    if p.mode == ORACLE:
        raise InputError("oracle pseudovarieties have no JSON form")
    return {
        "alphabet": list(p.alphabet.symbols),
        "dsig": p.dsig,
        "mode": p.mode,
        "gens": [dalg.monoid_to_json(g) for g in p.gens],
    }


def pv_from_json(data: dict) -> LocalPseudovariety:
    try:
        mode = data["mode"]
        gens = [dalg.monoid_from_json(g) for g in data["gens"]]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed pseudovariety JSON: {exc}") from exc
    if mode == FINITE:
        return pv_finite(gens)
    if mode == GENERATED:
        return pv_generated(gens)
    raise InputError(f"unknown pseudovariety mode {mode!r}")
