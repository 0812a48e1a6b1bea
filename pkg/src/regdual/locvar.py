"""Finite local varieties of languages and their dual generated monoids.

A local variety over an alphabet is a finite set of canonical DFAs closed
under the algebraic operations of its signature and under left and right
word derivatives.  Internally every variety carries a recognizer: the
transition monoid N of the product of its member automata, with one
bitmask over N per member.  Members are exactly the mask languages, so the
closure computation, the evaluation homomorphisms and the dual monoid are
all bitmask arithmetic; the DFAs are materialized once per member.

``variety_to_monoid`` realizes a finite variety as its dual generated
monoid (elements are the evaluation homomorphisms into the two-element
algebra), with the well-definedness audit over representative witnesses;
``monoid_to_variety`` goes back by running all structure-preserving maps
into the two-element object through the monoid-as-automaton construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import dalg, sigs
from ._kernels import close_transformations, minimize_dfa
from .errors import InputError, InvariantError, ResourceError
from .reglang import (
    Alphabet,
    CanonicalDfa,
    FreeMorphism,
    const_empty,
    const_full,
    left_derivative,
    preimage,
    right_derivative,
    dfa_to_json,
    dfa_from_json,
)

_POINT_LIMIT = 60_000
_MONOID_LIMIT = 4_096
_HOMSET_LIMIT = 1 << 16


@dataclass(frozen=True)
class Recognizer:
    """Shared monoid recognizer for a family of languages.

    ``mult`` is the transition monoid of the product automaton of the
    family (unit is element 0), ``gens`` the per-symbol elements, and
    ``masks[i]`` the accepting element set of the i-th language, as a
    bitmask: word w is in language i iff bit mu(w) of masks[i] is set.
    """

    size: int
    mult: tuple[tuple[int, ...], ...]
    gens: tuple[int, ...]
    masks: tuple[int, ...]


@dataclass(frozen=True)
class LocalVariety:
    csig: str
    alphabet: Alphabet
    languages: tuple[CanonicalDfa, ...]
    recog: Recognizer | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        sigs.check_csig(self.csig)

    @property
    def dsig(self) -> str:
        return sigs.CSIG_TO_DSIG[self.csig]

    def member(self, l: CanonicalDfa) -> bool:
        return l in set(self.languages)

    def index_of(self, l: CanonicalDfa) -> int:
        try:
            return self.languages.index(l)
        except ValueError:
            raise InputError("language is not a member of the variety") from None


def _sorted_langs(langs):
    return tuple(sorted(set(langs), key=lambda l: l.sort_key()))


def build_recognizer(alphabet: Alphabet, langs) -> Recognizer:
    """Transition monoid of the reachable product of the given DFAs."""
    k = len(alphabet.symbols)
    langs = list(langs)
    for l in langs:
        if l.alphabet != alphabet:
            raise InputError("language alphabet mismatch")
    if not langs:
        mult = ((0,),)
        return Recognizer(1, mult, (0,) * k, ())
    # reachable product states
    init = tuple(l.initial for l in langs)
    points = {init: 0}
    order = [init]
    for p in order:
        for a in range(k):
            q = tuple(l.delta[p[i]][a] for i, l in enumerate(langs))
            if q not in points:
                if len(points) >= _POINT_LIMIT:
                    raise ResourceError("product automaton exceeds desk-scale bound")
                points[q] = len(order)
                order.append(q)
    npts = len(order)
    gens = [0] * (k * npts)
    for a in range(k):
        for i, p in enumerate(order):
            q = tuple(l.delta[p[j]][a] for j, l in enumerate(langs))
            gens[a * npts + i] = points[q]
    try:
        m, elems, mult, gen_index, _, _ = close_transformations(npts, k, gens, _MONOID_LIMIT)
    except ValueError:
        raise ResourceError("family transition monoid exceeds desk-scale bound") from None
    rows = tuple(tuple(mult[i * m : (i + 1) * m]) for i in range(m))
    masks = []
    acc = [set(l.accepting) for l in langs]
    for i in range(len(langs)):
        mask = 0
        for t in range(m):
            p = order[elems[t * npts]]  # image of the initial point
            if p[i] in acc[i]:
                mask |= 1 << t
        masks.append(mask)
    return Recognizer(m, rows, tuple(gen_index), tuple(masks))


def recognizer(v: LocalVariety) -> Recognizer:
    if v.recog is not None:
        return v.recog
    r = build_recognizer(v.alphabet, v.languages)
    object.__setattr__(v, "recog", r)
    return r


def _dfa_of_mask(alphabet: Alphabet, r: Recognizer, mask: int) -> CanonicalDfa:
    k = len(alphabet.symbols)
    delta = [0] * (r.size * k)
    for x in range(r.size):
        row = r.mult[x]
        for a in range(k):
            delta[x * k + a] = row[r.gens[a]]
    flags = [(mask >> x) & 1 for x in range(r.size)]
    m, d2, acc2 = minimize_dfa(r.size, k, delta, flags, 0)
    rows = tuple(tuple(d2[q * k : (q + 1) * k]) for q in range(m))
    return CanonicalDfa(alphabet, m, rows, tuple(q for q in range(m) if acc2[q]))


def _lder_mask(r: Recognizer, mask: int, a: int) -> int:
    g = r.gens[a]
    out = 0
    row = r.mult[g]
    for x in range(r.size):
        if mask >> row[x] & 1:
            out |= 1 << x
    return out


def _rder_mask(r: Recognizer, mask: int, a: int) -> int:
    g = r.gens[a]
    out = 0
    for x in range(r.size):
        if mask >> r.mult[x][g] & 1:
            out |= 1 << x
    return out


def _algebraic_mask_closure(csig: str, masks: set[int], full: int) -> set[int]:
    """Close a mask set under the signature operations."""
    work = sorted(masks)
    idx = set(work)
    if csig == sigs.BA:
        i = 0
        while i < len(work):
            c = full ^ work[i]
            if c not in idx:
                idx.add(c)
                work.append(c)
            for j in range(i + 1):
                for v in (work[i] | work[j], work[i] & work[j]):
                    if v not in idx:
                        idx.add(v)
                        work.append(v)
            i += 1
    elif csig == sigs.DLAT:
        i = 0
        while i < len(work):
            for j in range(i + 1):
                for v in (work[i] | work[j], work[i] & work[j]):
                    if v not in idx:
                        idx.add(v)
                        work.append(v)
            i += 1
    elif csig == sigs.SLAT_C:
        i = 0
        while i < len(work):
            for j in range(i + 1):
                v = work[i] | work[j]
                if v not in idx:
                    idx.add(v)
                    work.append(v)
            i += 1
    else:
        i = 0
        while i < len(work):
            for j in range(i + 1):
                v = work[i] ^ work[j]
                if v not in idx:
                    idx.add(v)
                    work.append(v)
            i += 1
    return idx


def close(csig: str, alphabet: Alphabet, generators) -> LocalVariety:
    """Least local variety of the signature containing the generators.

    Saturates the generator masks under two-sided derivatives first, then
    closes under the signature operations; derivatives commute with those
    operations, so a final re-check certifies derivative closure of the
    result.  Everything is recognized by the product of the generators'
    minimal DFAs, which bounds the computation.
    """
    sigs.check_csig(csig)
    gens = _sorted_langs(generators)
    for l in gens:
        if l.alphabet != alphabet:
            raise InputError("generator alphabet mismatch")
    r = build_recognizer(alphabet, gens)
    full = (1 << r.size) - 1
    seeds = {0} | set(r.masks)
    if csig in (sigs.BA, sigs.DLAT):
        seeds.add(full)
    # two-sided derivative saturation
    k = len(alphabet.symbols)
    work = sorted(seeds)
    seen = set(work)
    i = 0
    while i < len(work):
        m = work[i]
        for a in range(k):
            for v in (_lder_mask(r, m, a), _rder_mask(r, m, a)):
                if v not in seen:
                    seen.add(v)
                    work.append(v)
        i += 1
    closed = _algebraic_mask_closure(csig, seen, full)
    # certificate: the algebraic closure stayed derivative-closed
    for m in closed:
        for a in range(k):
            if _lder_mask(r, m, a) not in closed or _rder_mask(r, m, a) not in closed:
                raise InvariantError("algebraic closure broke derivative closure")
    mask_list = sorted(closed)
    langs = [_dfa_of_mask(alphabet, r, m) for m in mask_list]
    if len(set(langs)) != len(langs):
        raise InvariantError("distinct recognizer masks produced equal languages")
    pairs = sorted(zip(langs, mask_list), key=lambda p: p[0].sort_key())
    rec = Recognizer(r.size, r.mult, r.gens, tuple(m for _, m in pairs))
    return LocalVariety(csig, alphabet, tuple(l for l, _ in pairs), rec)


def least_variety(csig: str, alphabet: Alphabet) -> LocalVariety:
    return close(csig, alphabet, [])


def coalgebra_structure(v: LocalVariety):
    """The automaton structure carried by the variety: acceptance of the
    empty word, and left derivatives (guaranteed to stay inside)."""
    members = set(v.languages)

    def gamma1(l: CanonicalDfa) -> bool:
        if l not in members:
            raise InputError("language is not a member of the variety")
        return l.initial in l.accepting

    def gamma2(l: CanonicalDfa, a: str) -> CanonicalDfa:
        if l not in members:
            raise InputError("language is not a member of the variety")
        d = left_derivative(l, a)
        if d not in members:
            raise InvariantError("left derivative escaped the variety")
        return d

    return gamma1, gamma2


def validate_variety(v: LocalVariety) -> list[str]:
    """Recompute all closure invariants; empty list means valid."""
    bad = []
    members = set(v.languages)
    if len(members) != len(v.languages):
        bad.append("duplicate languages")
    if v.languages != _sorted_langs(v.languages):
        bad.append("languages not canonically sorted")
    if const_empty(v.alphabet) not in members:
        bad.append("empty language missing")
    if v.csig in (sigs.BA, sigs.DLAT) and const_full(v.alphabet) not in members:
        bad.append("full language missing")
    for l in v.languages:
        if l.alphabet != v.alphabet:
            bad.append("member alphabet mismatch")
            return bad
        for a in v.alphabet.symbols:
            if left_derivative(l, a) not in members:
                bad.append(f"not closed under left derivative by {a!r}")
            if right_derivative(l, a) not in members:
                bad.append(f"not closed under right derivative by {a!r}")
    r = recognizer(v)
    masks = set(r.masks)
    closed = _algebraic_mask_closure(v.csig, masks or {0}, (1 << r.size) - 1)
    if not closed <= masks:
        bad.append("not closed under the signature operations")
    return sorted(set(bad))


# ---------------------------------------------------------------------------
# Varieties as finite algebras (used for cross-checks against the generic
# hom machinery of the duality module)


def variety_algebra(v: LocalVariety):
    from .duality import FiniteCAlgebra

    r = recognizer(v)
    idx = {m: i for i, m in enumerate(r.masks)}
    n = len(r.masks)
    full = (1 << r.size) - 1
    if v.csig == sigs.BA:
        meet = tuple(tuple(idx[a & b] for b in r.masks) for a in r.masks)
        join = tuple(tuple(idx[a | b] for b in r.masks) for a in r.masks)
        comp = tuple(idx[full ^ a] for a in r.masks)
        return FiniteCAlgebra(sigs.BA, n, meet=meet, join=join, comp=comp, zero=idx[0], one=idx[full])
    if v.csig == sigs.DLAT:
        meet = tuple(tuple(idx[a & b] for b in r.masks) for a in r.masks)
        join = tuple(tuple(idx[a | b] for b in r.masks) for a in r.masks)
        return FiniteCAlgebra(sigs.DLAT, n, meet=meet, join=join, zero=idx[0], one=idx[full])
    if v.csig == sigs.SLAT_C:
        join = tuple(tuple(idx[a | b] for b in r.masks) for a in r.masks)
        return FiniteCAlgebra(sigs.SLAT_C, n, join=join, zero=idx[0])
    # Z2VEC_C: identify members with coordinate vectors over a mask basis
    basis = []
    for m in r.masks:
        x = m
        for b in basis:
            if x >> (b.bit_length() - 1) & 1:
                x ^= b
        if x:
            basis.append(m)
    d = len(basis)
    if 1 << d != n:
        raise InvariantError("xor-closed variety is not a space")
    return FiniteCAlgebra(sigs.Z2VEC_C, n, zero=0)


# ---------------------------------------------------------------------------
# Variety -> generated monoid (Stone-type dual at the finite level)


def variety_to_monoid(v: LocalVariety) -> dalg.GeneratedDMonoid:
    """The generated D-monoid dual to a finite local variety.

    Elements are the evaluation homomorphisms of free-monoid elements on
    the member languages; the multiplication resolves products through
    witnesses and is audited for well-definedness across all retained
    representative pairs.
    """
    r = recognizer(v)
    n = r.size
    nl = len(v.languages)
    dsig = v.dsig
    # evaluation homomorphism of each recognizer element, as a bitmask
    # over member indices
    point_hom = []
    for x in range(n):
        h = 0
        for i, mask in enumerate(r.masks):
            if mask >> x & 1:
                h |= 1 << i
        point_hom.append(h)

    # SV with witnesses; a witness is a recognizer element (word case) or
    # a frozenset of recognizer elements (set payload case)
    hom_wit: dict[int, list] = {}

    def note(h, wit):
        lst = hom_wit.setdefault(h, [])
        if len(lst) < 2 and wit not in lst:
            lst.append(wit)

    if dsig in sigs.WORD_DSIGS:
        for x in range(n):
            note(point_hom[x], x)
    else:
        if n > 30:
            raise ResourceError("dual monoid construction exceeds desk-scale bound")
        note(0, frozenset())
        for x in range(n):
            note(point_hom[x], frozenset([x]))
        grow = [(h, ws[0]) for h, ws in sorted(hom_wit.items())]
        i = 0
        while i < len(grow):
            hi, wi = grow[i]
            for j in range(i + 1):
                hj, wj = grow[j]
                if dsig == sigs.SLAT:
                    h2, w2 = hi | hj, wi | wj
                else:
                    h2, w2 = hi ^ hj, wi ^ wj
                if h2 not in hom_wit:
                    grow.append((h2, w2))
                note(h2, w2)
            i += 1

    homs = sorted(hom_wit)
    hidx = {h: i for i, h in enumerate(homs)}
    sv = len(homs)

    def hom_of_word_elem(x):
        return point_hom[x]

    def hom_of_set(ws):
        if dsig == sigs.SLAT:
            h = 0
            for x in ws:
                h |= point_hom[x]
            return h
        h = 0
        for x in ws:
            h ^= point_hom[x]
        return h

    def product_wit(w1, w2):
        if dsig in sigs.WORD_DSIGS:
            return r.mult[w1][w2]
        if dsig == sigs.SLAT:
            return frozenset(r.mult[x][y] for x in w1 for y in w2)
        out = set()
        for x in w1:
            for y in w2:
                z = r.mult[x][y]
                if z in out:
                    out.remove(z)
                else:
                    out.add(z)
        return frozenset(out)

    def hom_of_wit(w):
        return hom_of_word_elem(w) if dsig in sigs.WORD_DSIGS else hom_of_set(w)

    # multiplication through first witnesses, audited across all retained
    # representative pairs
    mult = [[0] * sv for _ in range(sv)]
    for i, hi in enumerate(homs):
        for j, hj in enumerate(homs):
            results = set()
            for wi in hom_wit[hi]:
                for wj in hom_wit[hj]:
                    results.add(hom_of_wit(product_wit(wi, wj)))
            if len(results) != 1:
                raise InvariantError("well-definedness audit failed: product depends on representatives")
            h2 = results.pop()
            if h2 not in hidx:
                raise InvariantError("product escaped the evaluation homomorphisms")
            mult[i][j] = hidx[h2]
    unit_wit = 0 if dsig in sigs.WORD_DSIGS else frozenset([0])
    unit = hidx[hom_of_wit(unit_wit)]
    gen_map = []
    for a in range(len(v.alphabet.symbols)):
        w = r.gens[a] if dsig in sigs.WORD_DSIGS else frozenset([r.gens[a]])
        gen_map.append(hidx[hom_of_wit(w)])
    if dsig == sigs.SET:
        carrier = dalg.set_object(sv)
    elif dsig == sigs.POS:
        pairs = tuple(
            (i, j) for i in range(sv) for j in range(sv) if homs[i] & ~homs[j] == 0
        )
        carrier = dalg.FiniteDObject(sigs.POS, sv, order=pairs)
    elif dsig == sigs.SLAT:
        join = tuple(tuple(hidx[homs[i] | homs[j]] for j in range(sv)) for i in range(sv))
        carrier = dalg.FiniteDObject(sigs.SLAT, sv, join=join, bottom=hidx[0])
    else:
        d = sv.bit_length() - 1
        if 1 << d != sv:
            raise InvariantError("Z2 evaluation homs do not form a space")
        carrier = None  # re-coordinatized below via canonicalize
    if dsig == sigs.Z2VEC:
        # present over hom indices first; canonicalize re-coordinatizes,
        # but the carrier must already be a space: map homs to vectors
        # via a greedy basis
        basis = []
        for h in homs:
            x = h
            for b in basis:
                if x >> (b.bit_length() - 1) & 1:
                    x ^= b
            if x:
                basis.append(h)
        d = len(basis)
        coord = {}
        for code in range(1 << d):
            hh = 0
            for b in range(d):
                if code >> b & 1:
                    hh ^= basis[b]
            coord[hh] = code
        if len(coord) != sv:
            raise InvariantError("Z2 evaluation homs do not form a space")
        remap = [coord[h] for h in homs]
        mult2 = [[0] * sv for _ in range(sv)]
        for i in range(sv):
            for j in range(sv):
                mult2[remap[i]][remap[j]] = remap[mult[i][j]]
        mon = dalg.FiniteDMonoid(
            dalg.z2_object(d), remap[unit], tuple(tuple(row) for row in mult2)
        )
        raw = dalg.GeneratedDMonoid(
            mon, v.alphabet, tuple(remap[x] for x in gen_map), ((),) * sv
        )
    else:
        mon = dalg.FiniteDMonoid(carrier, unit, tuple(tuple(row) for row in mult))
        placeholder = ("",) * sv if dsig in sigs.WORD_DSIGS else ((),) * sv
        raw = dalg.GeneratedDMonoid(mon, v.alphabet, tuple(gen_map), placeholder)
    return dalg.canonicalize(raw)


# ---------------------------------------------------------------------------
# Generated monoid -> variety


def monoid_to_variety(g: dalg.GeneratedDMonoid, csig: str) -> LocalVariety:
    """All languages recognized by the generated monoid through
    structure-preserving maps into the two-element object."""
    sigs.check_csig(csig)
    if sigs.CSIG_TO_DSIG[csig] != g.dsig:
        raise InputError(f"{csig} pairs with {sigs.CSIG_TO_DSIG[csig]}, not {g.dsig}")
    n = g.size
    # the number of maps to run is 2**n for SET/POS but only n (SLAT)
    # or n (Z2VEC functionals) otherwise
    if n > (14 if g.dsig in sigs.WORD_DSIGS else 512):
        raise ResourceError("monoid_to_variety exceeds its desk-scale bound")
    m = g.monoid
    dsig = g.dsig
    if dsig == sigs.SET:
        pmasks = range(1 << n)
    elif dsig == sigs.POS:
        pmasks = [
            mask
            for mask in range(1 << n)
            if all(
                not (mask >> i & 1) or (mask >> j & 1)
                for i, j in dalg._order_set(m.carrier.order)
            )
        ]
    elif dsig == sigs.SLAT:
        pmasks = sorted(
            {
                sum(1 << x for x in range(n) if not dalg.leq_in(m.carrier, x, m0))
                for m0 in range(n)
            }
        )
    else:
        d = m.carrier.dim
        pmasks = [
            sum(1 << x for x in range(n) if bin(x & s).count("1") % 2) if d else 0
            for s in range(1 << d)
        ]
    k = len(g.alphabet.symbols)
    delta = [0] * (n * k)
    for x in range(n):
        for a in range(k):
            delta[x * k + a] = m.mult[x][g.gen_map[a]]
    langs = set()
    for mask in pmasks:
        flags = [(mask >> x) & 1 for x in range(n)]
        sz, d2, acc2 = minimize_dfa(n, k, delta, flags, m.unit)
        rows = tuple(tuple(d2[q * k : (q + 1) * k]) for q in range(sz))
        langs.add(CanonicalDfa(g.alphabet, sz, rows, tuple(q for q in range(sz) if acc2[q])))
    return LocalVariety(csig, g.alphabet, _sorted_langs(langs))


# ---------------------------------------------------------------------------
# Preimage closure (language level for word morphisms, dual criterion
# for set payloads)


def check_preimage_closure(v: LocalVariety, f: FreeMorphism, w: LocalVariety) -> bool:
    """Is v closed under f-preimages of the languages of w?"""
    if v.csig != w.csig:
        raise InputError("varieties have different signatures")
    if f.dsig != v.dsig:
        raise InputError(f"{v.csig} varieties pair with {v.dsig} morphisms")
    if f.domain != v.alphabet or f.codomain != w.alphabet:
        raise InputError("morphism endpoints do not match the varieties")
    if f.dsig in sigs.WORD_DSIGS:
        members = set(v.languages)
        return all(preimage(f, l) in members for l in w.languages)
    return check_preimage_closure_dual(v, f, w)


def check_preimage_closure_dual(v: LocalVariety, f: FreeMorphism, w: LocalVariety) -> bool:
    """The dual criterion: a factorization between the dual monoids."""
    gm = variety_to_monoid(v)
    gn = variety_to_monoid(w)
    return dalg.graph_factorization(gm, gn, f) is not None


# ---------------------------------------------------------------------------
# JSON


def variety_to_json(v: LocalVariety) -> dict:
    return {
        "csig": v.csig,
        "alphabet": list(v.alphabet.symbols),
        "languages": [dfa_to_json(l) for l in v.languages],
    }


def variety_from_json(data: dict, check: bool = True) -> LocalVariety:
    try:
        csig = sigs.check_csig(data["csig"])
        a = Alphabet(tuple(data["alphabet"]))
        langs = tuple(dfa_from_json(d) for d in data["languages"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed variety JSON: {exc}") from exc
    v = LocalVariety(csig, a, _sorted_langs(langs))
    if check:
        bad = validate_variety(v)
        if bad:
            raise InputError(f"variety JSON is not closed: {bad[:3]}")
    return v
