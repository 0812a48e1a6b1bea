"""Finite D-monoids for the four base signatures and the poset Quo.

A D-monoid is a finite monoid whose multiplication is a bimorphism for
the extra structure of its signature: nothing for SET, monotone in each
argument for POS (ordered monoids), join-and-bottom-preserving for SLAT
(idempotent semirings), linear for Z2VEC (Z2-algebras).  A Sigma-generated
D-monoid carries generator images and is, up to canonical relabeling, a
point of the poset Quo of quotients of the free D-monoid; joins in Quo
are subdirect products and the order is decided by the graph method.

Conventions fixed here:

* Z2VEC carriers are full spaces: elements are the ``2**dim`` bit-vectors
  and addition is xor of indices.
* canonical element labels: shortlex-least word representatives for
  SET/POS; for SLAT the join normal form (all word-generated elements
  below the element); for Z2VEC the combination of a greedy basis of
  word-generated elements in discovery order.
* ``mult[i][j]`` is the image of (word of i)(word of j).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from . import sigs
from ._kernels import close_transformations
from .errors import InputError, InvariantError, ResourceError
from .reglang import Alphabet, CanonicalDfa, payload_key, shortlex_key

_CLOSURE_LIMIT = 200_000
_ENUM_LIMIT = 2_000_000


@dataclass(frozen=True)
class FiniteDObject:
    """Carrier of a finite D-algebra: a set, poset, semilattice or Z2-space."""

    dsig: str
    size: int
    order: tuple[tuple[int, int], ...] | None = None  # POS: all pairs i <= j, reflexive included
    join: tuple[tuple[int, ...], ...] | None = None  # SLAT
    bottom: int | None = None  # SLAT
    dim: int | None = None  # Z2VEC: size == 2**dim


@dataclass(frozen=True)
class FiniteDMonoid:
    carrier: FiniteDObject
    unit: int
    mult: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class FreeDElement:
    """Element of the free D-monoid: a word, or a normalized word set."""

    dsig: str
    alphabet: Alphabet
    payload: str | tuple[str, ...]


@dataclass(frozen=True)
class GeneratedDMonoid:
    """Finite D-monoid together with a generating quotient from the free one."""

    monoid: FiniteDMonoid
    alphabet: Alphabet
    gen_map: tuple[int, ...]  # aligned with alphabet.symbols
    labels: tuple  # canonical free-element payload per element

    @property
    def dsig(self) -> str:
        return self.monoid.carrier.dsig

    @property
    def size(self) -> int:
        return self.monoid.carrier.size


@dataclass(frozen=True)
class DMonoidMorphism:
    source: FiniteDMonoid
    target: FiniteDMonoid
    table: tuple[int, ...]


def set_object(size):
    return FiniteDObject(sigs.SET, size)


def pos_object(size, pairs):
    full = set(tuple(p) for p in pairs)
    full.update((i, i) for i in range(size))
    return FiniteDObject(sigs.POS, size, order=tuple(sorted(full)))


def slat_object(size, join, bottom):
    return FiniteDObject(sigs.SLAT, size, join=tuple(tuple(r) for r in join), bottom=bottom)


def z2_object(dim):
    return FiniteDObject(sigs.Z2VEC, 1 << dim, dim=dim)


@lru_cache(maxsize=65536)
def _order_set(pairs):
    return frozenset(pairs)


def leq_in(obj: FiniteDObject, x: int, y: int) -> bool:
    if obj.dsig == sigs.POS:
        return (x, y) in _order_set(obj.order)
    if obj.dsig == sigs.SLAT:
        return obj.join[x][y] == y
    raise InputError(f"no order on {obj.dsig} carriers")


# ---------------------------------------------------------------------------
# Validation


def validate_object(obj: FiniteDObject) -> list[str]:
    bad = []
    n = obj.size
    if n <= 0:
        return ["carrier is empty"]
    if obj.dsig == sigs.POS:
        rel = _order_set(obj.order)
        for i, j in rel:
            if not (0 <= i < n and 0 <= j < n):
                return ["order relation out of range"]
        for i in range(n):
            if (i, i) not in rel:
                bad.append(f"order not reflexive at {i}")
        for i, j in rel:
            if i != j and (j, i) in rel:
                bad.append(f"order not antisymmetric at ({i},{j})")
            for k in range(n):
                if (j, k) in rel and (i, k) not in rel:
                    bad.append(f"order not transitive at ({i},{j},{k})")
    elif obj.dsig == sigs.SLAT:
        j = obj.join
        if obj.bottom is None or not 0 <= obj.bottom < n:
            return ["semilattice bottom missing or out of range"]
        for x in range(n):
            if j[x][x] != x:
                bad.append(f"join not idempotent at {x}")
            if j[obj.bottom][x] != x:
                bad.append(f"bottom not a join unit at {x}")
            for y in range(n):
                if j[x][y] != j[y][x]:
                    bad.append(f"join not commutative at ({x},{y})")
                for z in range(n):
                    if j[j[x][y]][z] != j[x][j[y][z]]:
                        bad.append(f"join not associative at ({x},{y},{z})")
    elif obj.dsig == sigs.Z2VEC:
        if obj.dim is None or n != 1 << obj.dim:
            bad.append("Z2 space size is not 2**dim")
    elif obj.dsig != sigs.SET:
        bad.append(f"unknown signature {obj.dsig}")
    return bad


def validate(m: FiniteDMonoid) -> list[str]:
    """Check the monoid and bimorphism laws; returns the violated clauses."""
    bad = validate_object(m.carrier)
    n = m.carrier.size
    t = m.mult
    if len(t) != n or any(len(r) != n for r in t):
        return bad + ["mult table has wrong shape"]
    if any(not 0 <= v < n for r in t for v in r):
        return bad + ["mult table value out of range"]
    if not 0 <= m.unit < n:
        return bad + ["unit out of range"]
    for x in range(n):
        if t[m.unit][x] != x or t[x][m.unit] != x:
            bad.append(f"unit law fails at {x}")
    for x in range(n):
        for y in range(n):
            txy = t[x][y]
            for z in range(n):
                if t[txy][z] != t[x][t[y][z]]:
                    bad.append(f"associativity fails at ({x},{y},{z})")
    d = m.carrier.dsig
    if d == sigs.POS:
        rel = _order_set(m.carrier.order)
        for x, y in rel:
            if x == y:
                continue
            for z in range(n):
                if (t[z][x], t[z][y]) not in rel:
                    bad.append(f"mult not monotone in right argument at ({z};{x}<={y})")
                if (t[x][z], t[y][z]) not in rel:
                    bad.append(f"mult not monotone in left argument at ({z};{x}<={y})")
    elif d == sigs.SLAT:
        j = m.carrier.join
        b = m.carrier.bottom
        for x in range(n):
            if t[x][b] != b or t[b][x] != b:
                bad.append(f"bottom not absorbing at {x}")
            for y in range(n):
                for z in range(n):
                    if t[x][j[y][z]] != j[t[x][y]][t[x][z]]:
                        bad.append(f"mult does not distribute over join on the right at ({x};{y},{z})")
                    if t[j[y][z]][x] != j[t[y][x]][t[z][x]]:
                        bad.append(f"mult does not distribute over join on the left at ({x};{y},{z})")
    elif d == sigs.Z2VEC:
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    if t[x][y ^ z] != t[x][y] ^ t[x][z]:
                        bad.append(f"mult not linear in right argument at ({x};{y},{z})")
                    if t[y ^ z][x] != t[y][x] ^ t[z][x]:
                        bad.append(f"mult not linear in left argument at ({x};{y},{z})")
    return bad


def validate_morphism(f: DMonoidMorphism) -> list[str]:
    bad = []
    s, t = f.source, f.target
    n = s.carrier.size
    if len(f.table) != n or any(not 0 <= v < t.carrier.size for v in f.table):
        return ["morphism table has wrong shape or range"]
    if s.carrier.dsig != t.carrier.dsig:
        return ["signature mismatch"]
    h = f.table
    if h[s.unit] != t.unit:
        bad.append("unit not preserved")
    for x in range(n):
        for y in range(n):
            if h[s.mult[x][y]] != t.mult[h[x]][h[y]]:
                bad.append(f"mult not preserved at ({x},{y})")
    d = s.carrier.dsig
    if d == sigs.POS:
        rel_t = _order_set(t.carrier.order)
        for x, y in _order_set(s.carrier.order):
            if (h[x], h[y]) not in rel_t:
                bad.append(f"order not preserved at ({x},{y})")
    elif d == sigs.SLAT:
        if h[s.carrier.bottom] != t.carrier.bottom:
            bad.append("bottom not preserved")
        for x in range(n):
            for y in range(n):
                if h[s.carrier.join[x][y]] != t.carrier.join[h[x]][h[y]]:
                    bad.append(f"join not preserved at ({x},{y})")
    elif d == sigs.Z2VEC:
        for x in range(n):
            for y in range(n):
                if h[x ^ y] != h[x] ^ h[y]:
                    bad.append(f"addition not preserved at ({x},{y})")
    return bad


def validate_generated(g: GeneratedDMonoid) -> list[str]:
    bad = validate(g.monoid)
    n = g.size
    if len(g.gen_map) != len(g.alphabet.symbols):
        bad.append("generator map does not cover the alphabet")
    elif any(not 0 <= v < n for v in g.gen_map):
        bad.append("generator image out of range")
    else:
        if len(_generated_subset(g)) != n:
            bad.append("generators do not generate the carrier")
        if len(g.labels) == n:
            for i, lab in enumerate(g.labels):
                if evaluate(g, lab) != i:
                    bad.append(f"label of element {i} does not evaluate back to it")
        else:
            bad.append("label list has wrong length")
    return bad


def _generated_subset(g: GeneratedDMonoid) -> set[int]:
    t = g.monoid.mult
    seen = {g.monoid.unit}
    queue = [g.monoid.unit]
    for x in queue:
        for ga in g.gen_map:
            y = t[x][ga]
            if y not in seen:
                seen.add(y)
                queue.append(y)
    if g.dsig == sigs.SLAT:
        j = g.monoid.carrier.join
        seen.add(g.monoid.carrier.bottom)
        vals = sorted(seen)
        i = 0
        while i < len(vals):
            for k in range(i + 1):
                v = j[vals[i]][vals[k]]
                if v not in seen:
                    seen.add(v)
                    vals.append(v)
            i += 1
    elif g.dsig == sigs.Z2VEC:
        seen.add(0)
        vals = sorted(seen)
        i = 0
        while i < len(vals):
            for k in range(i + 1):
                v = vals[i] ^ vals[k]
                if v not in seen:
                    seen.add(v)
                    vals.append(v)
            i += 1
    return seen


# ---------------------------------------------------------------------------
# Evaluation of free-monoid elements


def evaluate(g: GeneratedDMonoid, x) -> int:
    """Image of a free D-monoid element under the generating quotient."""
    if isinstance(x, FreeDElement):
        if x.dsig != g.dsig:
            raise InputError(f"free element signature {x.dsig} does not match monoid {g.dsig}")
        if x.alphabet != g.alphabet:
            raise InputError("free element alphabet does not match the monoid")
        x = x.payload
    if isinstance(x, str):
        v = g.monoid.unit
        t = g.monoid.mult
        for c in x:
            v = t[v][g.gen_map[g.alphabet.index(c)]]
        return v
    if g.dsig == sigs.SLAT:
        v = g.monoid.carrier.bottom
        j = g.monoid.carrier.join
        for w in x:
            v = j[v][evaluate(g, w)]
        return v
    if g.dsig == sigs.Z2VEC:
        v = 0
        for w in x:
            v ^= evaluate(g, w)
        return v
    raise InputError(f"word-set payload given to a {g.dsig} monoid")


# ---------------------------------------------------------------------------
# Closure machinery: the submonoid of a product generated by per-symbol
# images and closed under the D-operations.  This single engine drives
# subdirect products, the graph method and canonicalization.


class _Ambient:
    """Product of finite D-monoids; elements are index tuples."""

    def __init__(self, components):
        self.components = tuple(components)
        self.dsig = self.components[0].carrier.dsig
        self.unit = tuple(c.unit for c in self.components)
        if self.dsig == sigs.SLAT:
            self.bottom = tuple(c.carrier.bottom for c in self.components)
        elif self.dsig == sigs.Z2VEC:
            self.bottom = tuple(0 for _ in self.components)
            self._dims = tuple(c.carrier.dim for c in self.components)

    def mult(self, x, y):
        return tuple(c.mult[a][b] for c, a, b in zip(self.components, x, y))

    def join(self, x, y):
        return tuple(c.carrier.join[a][b] for c, a, b in zip(self.components, x, y))

    def add(self, x, y):
        return tuple(a ^ b for a, b in zip(x, y))

    def leq(self, x, y):
        return all(leq_in(c.carrier, a, b) for c, a, b in zip(self.components, x, y))

    def pack(self, x):
        v = 0
        for a, d in zip(x, self._dims):
            v = (v << d) | a
        return v


def _word_closure(amb: _Ambient, gen_values, alphabet: Alphabet):
    """BFS right-multiplication closure: values in shortlex discovery
    order with their shortlex-least word representatives."""
    vals = [amb.unit]
    index = {amb.unit: 0}
    reps = [""]
    pos = 0
    while pos < len(vals):
        cur = vals[pos]
        for s, gv in enumerate(gen_values):
            new = amb.mult(cur, gv)
            if new not in index:
                if len(vals) >= _CLOSURE_LIMIT:
                    raise ResourceError("monoid closure exceeds desk-scale bound")
                index[new] = len(vals)
                vals.append(new)
                reps.append(reps[pos] + alphabet.symbols[s])
        pos += 1
    return vals, index, reps


def _d_closure(amb: _Ambient, vals, index):
    """Close a mult-closed value list under the signature operations."""
    if amb.dsig == sigs.SLAT:
        op = amb.join
    elif amb.dsig == sigs.Z2VEC:
        op = amb.add
    else:
        return
    if amb.bottom not in index:
        index[amb.bottom] = len(vals)
        vals.append(amb.bottom)
    i = 0
    while i < len(vals):
        for k in range(i + 1):
            v = op(vals[i], vals[k])
            if v not in index:
                if len(vals) >= _CLOSURE_LIMIT:
                    raise ResourceError("monoid closure exceeds desk-scale bound")
                index[v] = len(vals)
                vals.append(v)
        i += 1


def _pack_generated(components, gen_values, alphabet: Alphabet):
    """Canonical generated D-monoid on the closure of the generator values
    inside the product of the components.

    Returns ``(g, value_index)`` where ``value_index`` maps ambient value
    tuples to element indices of ``g``.
    """
    amb = _Ambient(components)
    vals, index, reps = _word_closure(amb, gen_values, alphabet)
    n_words = len(vals)
    _d_closure(amb, vals, index)
    dsig = amb.dsig

    if dsig == sigs.Z2VEC:
        return _pack_z2(amb, vals, reps, n_words, gen_values, alphabet)

    if dsig in sigs.WORD_DSIGS:
        order = list(range(len(vals)))
        labels = list(reps)
    else:  # SLAT: join normal form labels, elements sorted by label
        labels_by_pos = []
        for v in vals:
            below = [reps[w] for w in range(n_words) if amb.join(vals[w], v) == v]
            labels_by_pos.append(tuple(sorted(below, key=lambda w: shortlex_key(alphabet, w))))
        order = sorted(range(len(vals)), key=lambda i: payload_key(alphabet, labels_by_pos[i]))
        labels = [labels_by_pos[i] for i in order]

    new_vals = [vals[i] for i in order]
    value_index = {v: i for i, v in enumerate(new_vals)}
    n = len(new_vals)
    mult = tuple(tuple(value_index[amb.mult(x, y)] for y in new_vals) for x in new_vals)
    gen_idx = tuple(value_index[gv] for gv in gen_values)
    if dsig == sigs.POS:
        pairs = tuple(
            (i, j) for i in range(n) for j in range(n) if amb.leq(new_vals[i], new_vals[j])
        )
        carrier = FiniteDObject(sigs.POS, n, order=pairs)
    elif dsig == sigs.SLAT:
        join = tuple(tuple(value_index[amb.join(x, y)] for y in new_vals) for x in new_vals)
        carrier = FiniteDObject(sigs.SLAT, n, join=join, bottom=value_index[amb.bottom])
    else:
        carrier = set_object(n)
    mon = FiniteDMonoid(carrier, value_index[amb.unit], mult)
    return GeneratedDMonoid(mon, alphabet, gen_idx, tuple(labels)), value_index


def _pack_z2(amb, vals, reps, n_words, gen_values, alphabet):
    """Re-coordinatize a Z2 closure over a greedy basis of word values."""
    basis = []  # (packed reduced vector, original value tuple, word rep)
    for w in range(n_words):
        v = amb.pack(vals[w])
        for bv, _, _ in basis:
            if v >> (bv.bit_length() - 1) & 1:
                v ^= bv
        if v:
            basis.append((v, vals[w], reps[w]))
    dim = len(basis)
    if 1 << dim != len(vals):
        raise InvariantError("Z2 closure is not the span of its word part")
    new_vals = []
    labels = []
    for code in range(1 << dim):
        acc = amb.bottom
        words = []
        for b in range(dim):
            if code >> b & 1:
                acc = amb.add(acc, basis[b][1])
                words.append(basis[b][2])
        new_vals.append(acc)
        labels.append(tuple(sorted(words, key=lambda w: shortlex_key(alphabet, w))))
    value_index = {v: i for i, v in enumerate(new_vals)}
    if len(value_index) != len(vals):
        raise InvariantError("Z2 re-coordinatization lost elements")
    mult = tuple(tuple(value_index[amb.mult(x, y)] for y in new_vals) for x in new_vals)
    gen_idx = tuple(value_index[gv] for gv in gen_values)
    mon = FiniteDMonoid(z2_object(dim), value_index[amb.unit], mult)
    return GeneratedDMonoid(mon, alphabet, gen_idx, tuple(labels)), value_index


def canonicalize(g: GeneratedDMonoid) -> GeneratedDMonoid:
    """Relabel by canonical representatives; Quo equality is encoding equality."""
    return _canonicalize_with_map(g)[0]


def _canonicalize_with_map(g: GeneratedDMonoid):
    packed, value_index = _pack_generated([g.monoid], [(v,) for v in g.gen_map], g.alphabet)
    if packed.size != g.size:
        raise InvariantError("generators do not generate the carrier")
    perm = [0] * g.size
    for v, i in value_index.items():
        perm[v[0]] = i
    return packed, perm


def subdirect(g1: GeneratedDMonoid, g2: GeneratedDMonoid) -> GeneratedDMonoid:
    """The join in Quo: image of the paired quotients, canonicalized."""
    _check_compatible(g1, g2)
    gens = [(a, b) for a, b in zip(g1.gen_map, g2.gen_map)]
    packed, _ = _pack_generated([g1.monoid, g2.monoid], gens, g1.alphabet)
    return packed


def _check_compatible(g1: GeneratedDMonoid, g2: GeneratedDMonoid):
    if g1.alphabet != g2.alphabet:
        raise InputError("generated monoids live over different alphabets")
    if g1.dsig != g2.dsig:
        raise InputError("generated monoids have different signatures")


def _graph_method(domain: GeneratedDMonoid, pair_gens, codomain: FiniteDMonoid):
    """Close the paired generators inside domain x codomain and test that
    the relation is the graph of a D-monoid morphism out of the domain."""
    amb = _Ambient([domain.monoid, codomain])
    vals, index, _ = _word_closure(amb, pair_gens, domain.alphabet)
    _d_closure(amb, vals, index)
    table = {}
    for x, y in vals:
        if x in table and table[x] != y:
            return None
        table[x] = y
    if len(table) != domain.size:
        raise InvariantError("pair closure does not cover the generated domain")
    tab = tuple(table[x] for x in range(domain.size))
    if domain.dsig == sigs.POS:
        rel_s = _order_set(domain.monoid.carrier.order)
        rel_t = _order_set(codomain.carrier.order)
        for x, y in rel_s:
            if (tab[x], tab[y]) not in rel_t:
                return None
    morph = DMonoidMorphism(domain.monoid, codomain, tab)
    bad = validate_morphism(morph)
    if bad:
        raise InvariantError(f"graph method produced a non-morphism: {bad[:3]}")
    return morph


def leq_quo(g1: GeneratedDMonoid, g2: GeneratedDMonoid) -> DMonoidMorphism | None:
    """Decide g1 <= g2 in Quo; returns the witness morphism g2 -> g1 or None."""
    _check_compatible(g1, g2)
    pair_gens = [(b, a) for a, b in zip(g1.gen_map, g2.gen_map)]
    return _graph_method(g2, pair_gens, g1.monoid)


def graph_factorization(gm: GeneratedDMonoid, gn: GeneratedDMonoid, f) -> DMonoidMorphism | None:
    """Witness g: M -> N with g e_M = e_N f for a free morphism f, or None."""
    if f.domain != gm.alphabet or f.codomain != gn.alphabet:
        raise InputError("morphism endpoints do not match the generated monoids")
    if f.dsig != gm.dsig or f.dsig != gn.dsig:
        raise InputError("morphism signature does not match the generated monoids")
    pair_gens = [(gm.gen_map[i], evaluate(gn, f.image[i])) for i in range(len(f.image))]
    return _graph_method(gm, pair_gens, gn.monoid)


def fill_in(e: DMonoidMorphism, m: DMonoidMorphism, u: DMonoidMorphism, v: DMonoidMorphism) -> DMonoidMorphism:
    """Diagonal d with u = m d and v = d e, for u e = m v, e surjective, m injective."""
    if len(set(e.table)) != e.target.carrier.size:
        raise InputError("fill-in needs a surjective e")
    if len(set(m.table)) != len(m.table):
        raise InputError("fill-in needs an injective m")
    inv_m = {y: x for x, y in enumerate(m.table)}
    for x in range(e.source.carrier.size):
        if u.table[e.table[x]] != m.table[v.table[x]]:
            raise InputError("fill-in square does not commute")
    d = []
    for b in range(e.target.carrier.size):
        c = inv_m.get(u.table[b])
        if c is None:
            raise InvariantError("fill-in diagonal does not exist")
        d.append(c)
    morph = DMonoidMorphism(e.target, m.source, tuple(d))
    bad = validate_morphism(morph)
    if bad:
        raise InvariantError(f"fill-in diagonal is not a morphism: {bad[:3]}")
    return morph


def morphism_compose(g: DMonoidMorphism, f: DMonoidMorphism) -> DMonoidMorphism:
    if f.target != g.source:
        raise InputError("morphisms do not compose")
    return DMonoidMorphism(f.source, g.target, tuple(g.table[v] for v in f.table))


def identity_dmorphism(m: FiniteDMonoid) -> DMonoidMorphism:
    return DMonoidMorphism(m, m, tuple(range(m.carrier.size)))


# ---------------------------------------------------------------------------
# Transition monoids


def transition_monoid(l: CanonicalDfa) -> GeneratedDMonoid:
    """Monoid of state transformations of a canonical DFA (SET signature)."""
    n = l.states
    k = len(l.alphabet.symbols)
    gens = [l.delta[q][a] for a in range(k) for q in range(n)]
    m, _, mult, gen_index, parent, via = close_transformations(n, k, gens, _CLOSURE_LIMIT)
    words = [""] * m
    for i in range(1, m):
        words[i] = words[parent[i]] + l.alphabet.symbols[via[i]]
    rows = tuple(tuple(mult[i * m : (i + 1) * m]) for i in range(m))
    mon = FiniteDMonoid(set_object(m), 0, rows)
    return GeneratedDMonoid(mon, l.alphabet, tuple(gen_index), tuple(words))


# ---------------------------------------------------------------------------
# Congruences and quotients


def _set_congruence_closure(m: FiniteDMonoid, seed_pairs, with_join: bool):
    """Least (semiring) monoid congruence containing the seeds, as the
    class index per element with classes numbered by least member."""
    n = m.carrier.size
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    queue = [tuple(p) for p in seed_pairs]
    while queue:
        x, y = queue.pop()
        rx, ry = find(x), find(y)
        if rx == ry:
            continue
        if rx > ry:
            rx, ry = ry, rx
        parent[ry] = rx
        for z in range(n):
            queue.append((m.mult[z][rx], m.mult[z][ry]))
            queue.append((m.mult[rx][z], m.mult[ry][z]))
            if with_join:
                queue.append((m.carrier.join[z][rx], m.carrier.join[z][ry]))
    reps = {}
    cls = [0] * n
    for x in range(n):
        r = find(x)
        if r not in reps:
            reps[r] = len(reps)
        cls[x] = reps[r]
    return tuple(cls)


def _pos_precongruence_closure(m: FiniteDMonoid, seed_pairs):
    """Least stable preorder containing the order and the inequations,
    as a tuple of row bitmasks."""
    n = m.carrier.size
    rel = [0] * n
    for i, j in _order_set(m.carrier.order):
        rel[i] |= 1 << j
    for x, y in seed_pairs:
        rel[x] |= 1 << y
    changed = True
    while changed:
        changed = False
        for i in range(n):
            acc = rel[i]
            row = acc
            j = 0
            while row:
                if row & 1:
                    acc |= rel[j]
                row >>= 1
                j += 1
            if acc != rel[i]:
                rel[i] = acc
                changed = True
        for i in range(n):
            row = rel[i]
            j = 0
            while row:
                if row & 1 and j != i:
                    for z in range(n):
                        a, b = m.mult[z][i], m.mult[z][j]
                        if not rel[a] >> b & 1:
                            rel[a] |= 1 << b
                            changed = True
                        a, b = m.mult[i][z], m.mult[j][z]
                        if not rel[a] >> b & 1:
                            rel[a] |= 1 << b
                            changed = True
                row >>= 1
                j += 1
    return tuple(rel)


def _z2_ideal_closure(m: FiniteDMonoid, seed_vectors):
    """Least two-sided ideal subspace containing the seeds, as a reduced
    echelon basis sorted by pivot (tuple of ints)."""
    d = m.carrier.dim
    vecs = []  # distinct pivots, unsorted

    def reduce(v):
        for w in sorted(vecs, reverse=True):
            if v >> (w.bit_length() - 1) & 1:
                v ^= w
        return v

    queue = [v for v in seed_vectors if v]
    while queue:
        v = reduce(queue.pop())
        if not v:
            continue
        vecs.append(v)
        for b in range(d):
            e = 1 << b
            queue.append(m.mult[e][v])
            queue.append(m.mult[v][e])
    # reduced echelon form
    vecs.sort(reverse=True)
    for i, v in enumerate(vecs):
        p = v.bit_length() - 1
        for j in range(len(vecs)):
            if j != i and vecs[j] >> p & 1:
                vecs[j] ^= v
    return tuple(sorted(vecs))


def _z2_reduce(ideal_basis, v):
    for vec in reversed(ideal_basis):
        if v >> (vec.bit_length() - 1) & 1:
            v ^= vec
    return v


def _cong_close(g: GeneratedDMonoid, seed_pairs):
    dsig = g.dsig
    if dsig == sigs.SET:
        return _set_congruence_closure(g.monoid, seed_pairs, with_join=False)
    if dsig == sigs.SLAT:
        return _set_congruence_closure(g.monoid, seed_pairs, with_join=True)
    if dsig == sigs.POS:
        return _pos_precongruence_closure(g.monoid, seed_pairs)
    return _z2_ideal_closure(g.monoid, [x ^ y for x, y in seed_pairs])


def _quotient_from_cong(g: GeneratedDMonoid, cong):
    """Quotient generated monoid (canonical) and projection for a closed
    congruence object (partition / stable preorder / ideal basis)."""
    m = g.monoid
    n = g.size
    dsig = g.dsig
    if dsig in (sigs.SET, sigs.SLAT):
        cls = list(cong)
        k = max(cls) + 1
        rep = [-1] * k
        for x in range(n):
            if rep[cls[x]] < 0:
                rep[cls[x]] = x
        mult = tuple(tuple(cls[m.mult[rep[i]][rep[j]]] for j in range(k)) for i in range(k))
        if dsig == sigs.SLAT:
            join = tuple(tuple(cls[m.carrier.join[rep[i]][rep[j]]] for j in range(k)) for i in range(k))
            carrier = FiniteDObject(sigs.SLAT, k, join=join, bottom=cls[m.carrier.bottom])
        else:
            carrier = set_object(k)
        proj = cls
    elif dsig == sigs.POS:
        rel = cong
        cls = [-1] * n
        k = 0
        for x in range(n):
            if cls[x] >= 0:
                continue
            cls[x] = k
            for y in range(x + 1, n):
                if rel[x] >> y & 1 and rel[y] >> x & 1:
                    cls[y] = k
            k += 1
        rep = [-1] * k
        for x in range(n):
            if rep[cls[x]] < 0:
                rep[cls[x]] = x
        mult = tuple(tuple(cls[m.mult[rep[i]][rep[j]]] for j in range(k)) for i in range(k))
        pairs = tuple(
            (i, j) for i in range(k) for j in range(k) if rel[rep[i]] >> rep[j] & 1
        )
        carrier = FiniteDObject(sigs.POS, k, order=pairs)
        proj = cls
    else:  # Z2VEC: quotient by an ideal
        ideal = cong
        pivots = {vec.bit_length() - 1 for vec in ideal}
        free_bits = [b for b in range(m.carrier.dim) if b not in pivots]
        d2 = len(free_bits)

        def compress(v):
            v = _z2_reduce(ideal, v)
            out = 0
            for i, b in enumerate(free_bits):
                out |= (v >> b & 1) << i
            return out

        def decompress(c):
            v = 0
            for i, b in enumerate(free_bits):
                v |= (c >> i & 1) << b
            return v

        k = 1 << d2
        mult = tuple(
            tuple(compress(m.mult[decompress(i)][decompress(j)]) for j in range(k))
            for i in range(k)
        )
        carrier = z2_object(d2)
        proj = [compress(x) for x in range(n)]
    unit2 = proj[m.unit]
    gens2 = tuple(proj[v] for v in g.gen_map)
    placeholder = ("",) * carrier.size if dsig in sigs.WORD_DSIGS else ((),) * carrier.size
    raw = GeneratedDMonoid(FiniteDMonoid(carrier, unit2, mult), g.alphabet, gens2, placeholder)
    canon, perm = _canonicalize_with_map(raw)
    projection = DMonoidMorphism(g.monoid, canon.monoid, tuple(perm[p] for p in proj))
    return canon, projection


def quotient(g: GeneratedDMonoid, pairs):
    """Quotient by the least congruence containing the pairs (read as
    inequations for POS); returns (quotient, projection)."""
    pairs = [tuple(p) for p in pairs]
    for x, y in pairs:
        if not (0 <= x < g.size and 0 <= y < g.size):
            raise InputError("quotient pair out of range")
    cong = _cong_close(g, pairs)
    return _quotient_from_cong(g, cong)


def _cong_pairs(g: GeneratedDMonoid, cong):
    """Seed pairs regenerating a congruence object (used to join them)."""
    n = g.size
    if g.dsig in (sigs.SET, sigs.SLAT):
        first = {}
        pairs = []
        for x in range(n):
            c = cong[x]
            if c in first:
                pairs.append((first[c], x))
            else:
                first[c] = x
        return pairs
    if g.dsig == sigs.POS:
        return [(i, j) for i in range(n) for j in range(n) if cong[i] >> j & 1]
    return [(vec, 0) for vec in cong]


def enumerate_quotients(g: GeneratedDMonoid, size_bound: int) -> list[GeneratedDMonoid]:
    """All quotients of g in Quo with carrier size <= size_bound,
    canonically sorted, via joins of principal congruences."""
    if g.size > 24:
        raise ResourceError("enumerate_quotients is desk-scale (size <= 24)")
    n = g.size
    if g.dsig == sigs.POS:
        principal_seeds = [(x, y) for x in range(n) for y in range(n) if x != y]
    elif g.dsig == sigs.Z2VEC:
        principal_seeds = [(v, 0) for v in range(1, n)]
    else:
        principal_seeds = [(x, y) for x in range(n) for y in range(x + 1, n)]
    principals = []
    seen_p = set()
    for p in principal_seeds:
        c = _cong_close(g, [p])
        if c not in seen_p:
            seen_p.add(c)
            principals.append(c)
    bottom = _cong_close(g, [])
    congs = {bottom}
    queue = [bottom]
    while queue:
        c = queue.pop()
        base_pairs = _cong_pairs(g, c)
        for p in principals:
            merged = _cong_close(g, base_pairs + _cong_pairs(g, p))
            if merged not in congs:
                if len(congs) > 50_000:
                    raise ResourceError("congruence lattice exceeds desk-scale bound")
                congs.add(merged)
                queue.append(merged)
    out = []
    for c in congs:
        q, _ = _quotient_from_cong(g, c)
        if q.size <= size_bound:
            out.append(q)
    out.sort(key=_encoding_key)
    return out


def _encoding_key(g: GeneratedDMonoid):
    lab = tuple(payload_key(g.alphabet, l) for l in g.labels)
    mon = g.monoid
    extra = ()
    if g.dsig == sigs.POS:
        extra = mon.carrier.order
    elif g.dsig == sigs.SLAT:
        extra = (mon.carrier.join, mon.carrier.bottom)
    return (g.size, lab, mon.mult, mon.unit, g.gen_map, extra)


def encoding_key(g: GeneratedDMonoid):
    """Deterministic sort/dedup key; equal exactly for equal canonical forms."""
    return _encoding_key(g)


# ---------------------------------------------------------------------------
# Direct products and submonoids (used by pseudovariety closure checks)


def direct_product(m1: FiniteDMonoid, m2: FiniteDMonoid) -> FiniteDMonoid:
    if m1.carrier.dsig != m2.carrier.dsig:
        raise InputError("product of monoids with different signatures")
    n1, n2 = m1.carrier.size, m2.carrier.size
    dsig = m1.carrier.dsig
    mult = tuple(
        tuple(m1.mult[i1][j1] * n2 + m2.mult[i2][j2] for j1 in range(n1) for j2 in range(n2))
        for i1 in range(n1)
        for i2 in range(n2)
    )
    if dsig == sigs.POS:
        r1, r2 = _order_set(m1.carrier.order), _order_set(m2.carrier.order)
        pairs = tuple(
            sorted(
                (i1 * n2 + i2, j1 * n2 + j2)
                for i1, j1 in r1
                for i2, j2 in r2
            )
        )
        carrier = FiniteDObject(sigs.POS, n1 * n2, order=pairs)
    elif dsig == sigs.SLAT:
        join = tuple(
            tuple(
                m1.carrier.join[i1][j1] * n2 + m2.carrier.join[i2][j2]
                for j1 in range(n1)
                for j2 in range(n2)
            )
            for i1 in range(n1)
            for i2 in range(n2)
        )
        carrier = FiniteDObject(
            sigs.SLAT, n1 * n2, join=join, bottom=m1.carrier.bottom * n2 + m2.carrier.bottom
        )
    elif dsig == sigs.Z2VEC:
        carrier = z2_object(m1.carrier.dim + m2.carrier.dim)
    else:
        carrier = set_object(n1 * n2)
    return FiniteDMonoid(carrier, m1.unit * n2 + m2.unit, mult)


def enumerate_submonoids(m: FiniteDMonoid):
    """All sub-D-monoids, as (element tuple, FiniteDMonoid) pairs."""
    n = m.carrier.size
    if n > 12:
        raise ResourceError("submonoid enumeration is desk-scale (size <= 12)")
    dsig = m.carrier.dsig
    out = []
    for bits in range(1 << n):
        if not bits >> m.unit & 1:
            continue
        if dsig == sigs.SLAT and not bits >> m.carrier.bottom & 1:
            continue
        if dsig == sigs.Z2VEC and not bits & 1:
            continue
        elems = [x for x in range(n) if bits >> x & 1]
        ok = True
        for x in elems:
            for y in elems:
                if not bits >> m.mult[x][y] & 1:
                    ok = False
                elif dsig == sigs.SLAT and not bits >> m.carrier.join[x][y] & 1:
                    ok = False
                elif dsig == sigs.Z2VEC and not bits >> (x ^ y) & 1:
                    ok = False
                if not ok:
                    break
            if not ok:
                break
        if ok:
            out.append((tuple(elems), _sub_monoid(m, elems)))
    return out


def _sub_monoid(m: FiniteDMonoid, elems):
    dsig = m.carrier.dsig
    if dsig == sigs.Z2VEC:
        basis = []
        for v in elems:
            r = v
            for b in basis:
                if r >> (b.bit_length() - 1) & 1:
                    r ^= b
            if r:
                basis.append(r)
        basis.sort()
        d = len(basis)
        vals = []
        for code in range(1 << d):
            v = 0
            for i in range(d):
                if code >> i & 1:
                    v ^= basis[i]
            vals.append(v)
        idx = {v: i for i, v in enumerate(vals)}
        mult = tuple(tuple(idx[m.mult[x][y]] for y in vals) for x in vals)
        return FiniteDMonoid(z2_object(d), idx[m.unit], mult)
    idx = {v: i for i, v in enumerate(elems)}
    k = len(elems)
    mult = tuple(tuple(idx[m.mult[x][y]] for y in elems) for x in elems)
    if dsig == sigs.POS:
        rel = _order_set(m.carrier.order)
        pairs = tuple(
            sorted((idx[x], idx[y]) for x in elems for y in elems if (x, y) in rel)
        )
        carrier = FiniteDObject(sigs.POS, k, order=pairs)
    elif dsig == sigs.SLAT:
        join = tuple(tuple(idx[m.carrier.join[x][y]] for y in elems) for x in elems)
        carrier = FiniteDObject(sigs.SLAT, k, join=join, bottom=idx[m.carrier.bottom])
    else:
        carrier = set_object(k)
    return FiniteDMonoid(carrier, idx[m.unit], mult)


# ---------------------------------------------------------------------------
# Enumeration of all Sigma-generated D-monoids up to a size bound
# (regular-representation search, deduplicated by canonical encoding).

_enum_cache: dict = {}


def enumerate_generated(dsig: str, alphabet: Alphabet, size_bound: int) -> list[GeneratedDMonoid]:
    """All Sigma-generated D-monoids with carrier size <= size_bound, up
    to isomorphism in Quo, canonically sorted.

    Practical bounds: SET size <= 6 with one generator / <= 4 with two;
    POS size <= 4; SLAT size <= 4; Z2VEC size <= 8 (dim <= 3).
    """
    sigs.check_dsig(dsig)
    key = (dsig, alphabet, size_bound)
    if key in _enum_cache:
        return list(_enum_cache[key])
    seen = {}
    if dsig == sigs.SET:
        for g in _enumerate_set_generated(alphabet, size_bound):
            seen.setdefault(_encoding_key(g), g)
    elif dsig == sigs.POS:
        for g in _enumerate_set_generated(alphabet, size_bound):
            for order in _compatible_orders(g.monoid):
                carrier = FiniteDObject(sigs.POS, g.size, order=order)
                mon = FiniteDMonoid(carrier, g.monoid.unit, g.monoid.mult)
                gp = GeneratedDMonoid(mon, alphabet, g.gen_map, g.labels)
                seen.setdefault(_encoding_key(gp), gp)
    elif dsig == sigs.Z2VEC:
        for g in _enumerate_z2_generated(alphabet, size_bound):
            seen.setdefault(_encoding_key(g), g)
    else:
        for g in _enumerate_slat_generated(alphabet, size_bound):
            seen.setdefault(_encoding_key(g), g)
    out = [seen[k] for k in sorted(seen)]
    _enum_cache[key] = out
    return list(out)


def _enumerate_set_generated(alphabet: Alphabet, size_bound: int):
    k = len(alphabet.symbols)
    total = sum(m ** (m * k) for m in range(1, size_bound + 1))
    if total > _ENUM_LIMIT:
        raise ResourceError("generated-monoid enumeration exceeds desk-scale bound")
    out = {}
    for m in range(1, size_bound + 1):
        for gens in itertools.product(itertools.product(range(m), repeat=m), repeat=k):
            flat = [p for t in gens for p in t]
            try:
                size, elems, mult, gen_index, _, _ = close_transformations(m, k, flat, m + 1)
            except ValueError:
                continue
            if size != m:
                continue
            # transport along evaluation at the base point 0
            point = [elems[i * m] for i in range(size)]
            if len(set(point)) != size:
                continue
            by_point = [0] * size
            for i in range(size):
                by_point[point[i]] = i
            rows = tuple(
                tuple(point[mult[by_point[x] * size + by_point[y]]] for y in range(size))
                for x in range(size)
            )
            mon = FiniteDMonoid(set_object(size), point[0], rows)
            g = GeneratedDMonoid(mon, alphabet, tuple(point[i] for i in gen_index), ("",) * size)
            g = canonicalize(g)
            out.setdefault(_encoding_key(g), g)
    return list(out.values())


def _compatible_orders(m: FiniteDMonoid):
    """All partial orders on the carrier making mult monotone."""
    n = m.carrier.size
    if n > 5:
        raise ResourceError("POS enumeration is desk-scale (size <= 5)")
    cells = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for choice in itertools.product((0, 1, 2), repeat=len(cells)):
        rel = [1 << i for i in range(n)]
        for (i, j), c in zip(cells, choice):
            if c == 1:
                rel[i] |= 1 << j
            elif c == 2:
                rel[j] |= 1 << i
        ok = True
        for i in range(n):
            row = rel[i]
            j = 0
            while row and ok:
                if row & 1 and rel[j] & ~rel[i]:
                    ok = False
                row >>= 1
                j += 1
            if not ok:
                break
        if not ok:
            continue
        stable = True
        for i in range(n):
            if not stable:
                break
            for j in range(n):
                if i != j and rel[i] >> j & 1:
                    for z in range(n):
                        if not rel[m.mult[z][i]] >> m.mult[z][j] & 1:
                            stable = False
                            break
                        if not rel[m.mult[i][z]] >> m.mult[j][z] & 1:
                            stable = False
                            break
                    if not stable:
                        break
        if stable:
            yield tuple((i, j) for i in range(n) for j in range(n) if rel[i] >> j & 1)


def _enumerate_z2_generated(alphabet: Alphabet, size_bound: int):
    k = len(alphabet.symbols)
    out = {}
    d = 0
    while (1 << d) <= size_bound:
        if d * d * k > 21:  # 2**21 candidate tuples
            raise ResourceError("Z2 generated-monoid enumeration exceeds desk-scale bound")
        n = 1 << d
        for mats in itertools.product(itertools.product(range(n), repeat=d), repeat=k):
            g = _z2_from_matrices(alphabet, d, mats)
            if g is not None:
                g = canonicalize(g)
                out.setdefault(_encoding_key(g), g)
        d += 1
    return list(out.values())


def _z2_apply(mat, v):
    out = 0
    b = 0
    while v:
        if v & 1:
            out ^= mat[b]
        v >>= 1
        b += 1
    return out


def _z2_from_matrices(alphabet: Alphabet, d, mats):
    """Transport the unital matrix algebra generated by the images along
    evaluation at the unit vector; None unless this is a regular
    representation of a d-dimensional algebra."""
    k = len(alphabet.symbols)
    if d == 0:
        mon = FiniteDMonoid(z2_object(0), 0, ((0,),))
        return GeneratedDMonoid(mon, alphabet, (0,) * k, ((),))
    ident = tuple(1 << b for b in range(d))
    mats = [tuple(m) for m in mats]

    def pack(mat):
        v = 0
        for row in mat:
            v = (v << d) | row
        return v

    basis = []  # (packed reduced, matrix) with distinct pivots

    def try_add(mat):
        v = pack(mat)
        red = mat
        for bv, bm in basis:
            if v >> (bv.bit_length() - 1) & 1:
                v ^= bv
                red = tuple(a ^ b for a, b in zip(red, bm))
        if v:
            basis.append((v, red))
            return True
        return False

    queue = [ident] + mats
    added = []
    while queue:
        mat = queue.pop(0)
        if try_add(mat):
            added.append(mat)
            for a in mats:
                queue.append(tuple(_z2_apply(a, mat[b]) for b in range(d)))
    if len(basis) != d:
        return None
    mat_list = [bm for _, bm in basis]
    # solve for the algebra element with a given value (row at the unit
    # vector 1); the evaluation must be a bijection
    rows = [(mat[0], i) for i, mat in enumerate(mat_list)]
    ech = []
    for r, i in rows:
        c = 1 << i
        for pr, pc in ech:
            if r >> (pr.bit_length() - 1) & 1:
                r ^= pr
                c ^= pc
        if not r:
            return None
        ech.append((r, c))

    def mat_for(y):
        comb = 0
        v = y
        for pr, pc in ech:
            if v >> (pr.bit_length() - 1) & 1:
                v ^= pr
                comb ^= pc
        if v:
            return None
        acc = (0,) * d
        for i in range(d):
            if comb >> i & 1:
                acc = tuple(a ^ b for a, b in zip(acc, mat_list[i]))
        return acc

    n = 1 << d
    mat_of = [mat_for(y) for y in range(n)]
    if any(m is None for m in mat_of):
        return None
    if mat_of[1] != ident:
        return None  # the unit vector must be the algebra unit
    mult = tuple(tuple(_z2_apply(mat_of[y], x) for y in range(n)) for x in range(n))
    mon = FiniteDMonoid(z2_object(d), 1, mult)
    gen_map = tuple(mats[i][0] for i in range(k))
    g = GeneratedDMonoid(mon, alphabet, gen_map, ((),) * n)
    if validate(mon):
        return None
    if len(_generated_subset(g)) != n:
        return None
    return g


def _enumerate_slat_join_tables(m):
    """All join-semilattice-with-bottom structures on 0..m-1 (labeled)."""
    if m == 1:
        yield ((0,),), 0
        return
    cells = [(i, j) for i in range(m) for j in range(i + 1, m)]
    for choice in itertools.product(range(m), repeat=len(cells)):
        tab = [[0] * m for _ in range(m)]
        for i in range(m):
            tab[i][i] = i
        for (i, j), v in zip(cells, choice):
            tab[i][j] = v
            tab[j][i] = v
        bottom = None
        for b in range(m):
            if all(tab[b][x] == x for x in range(m)):
                bottom = b
                break
        if bottom is None:
            continue
        ok = True
        for x in range(m):
            if not ok:
                break
            for y in range(m):
                if not ok:
                    break
                for z in range(m):
                    if tab[tab[x][y]][z] != tab[x][tab[y][z]]:
                        ok = False
                        break
        if ok:
            yield tuple(tuple(r) for r in tab), bottom


def _enumerate_slat_generated(alphabet: Alphabet, size_bound: int):
    if size_bound > 4 or len(alphabet.symbols) > 2:
        raise ResourceError("SLAT enumeration is desk-scale (size <= 4, two generators)")
    k = len(alphabet.symbols)
    out = {}
    for m in range(1, size_bound + 1):
        for join, bottom in _enumerate_slat_join_tables(m):
            endos = []
            for tab in itertools.product(range(m), repeat=m):
                if tab[bottom] != bottom:
                    continue
                if all(
                    tab[join[x][y]] == join[tab[x]][tab[y]]
                    for x in range(m)
                    for y in range(m)
                ):
                    endos.append(tab)
            for gens in itertools.product(endos, repeat=k):
                for base in range(m):
                    g = _slat_from_endos(alphabet, m, join, bottom, gens, base)
                    if g is not None:
                        g = canonicalize(g)
                        out.setdefault(_encoding_key(g), g)
    return list(out.values())


def _slat_from_endos(alphabet, m, join, bottom, gens, base):
    """Transport the generated subalgebra of join endomorphisms along
    evaluation at the base point; None unless it is a bijection."""
    ident = tuple(range(m))
    const_bottom = (bottom,) * m
    vals = [ident]
    index = {ident: 0}
    pos = 0
    while pos < len(vals):
        cur = vals[pos]
        for gt in gens:
            new = tuple(gt[cur[p]] for p in range(m))
            if new not in index:
                index[new] = len(vals)
                vals.append(new)
        pos += 1
    if const_bottom not in index:
        index[const_bottom] = len(vals)
        vals.append(const_bottom)
    i = 0
    while i < len(vals):
        for kk in range(i + 1):
            new = tuple(join[vals[i][p]][vals[kk][p]] for p in range(m))
            if new not in index:
                index[new] = len(vals)
                vals.append(new)
        i += 1
    if len(vals) != m:
        return None
    points = [t[base] for t in vals]
    if len(set(points)) != m:
        return None
    by_point = {}
    for i, p in enumerate(points):
        by_point[p] = i
    mult = tuple(tuple(vals[by_point[y]][x] for y in range(m)) for x in range(m))
    jt = tuple(tuple(join[x][y] for y in range(m)) for x in range(m))
    carrier = FiniteDObject(sigs.SLAT, m, join=jt, bottom=bottom)
    mon = FiniteDMonoid(carrier, base, mult)
    gen_map = tuple(gt[base] for gt in gens)
    g = GeneratedDMonoid(mon, alphabet, gen_map, ((),) * m)
    if validate(mon):
        return None
    if len(_generated_subset(g)) != m:
        return None
    return g


# ---------------------------------------------------------------------------
# JSON and DOT


def monoid_to_json(g: GeneratedDMonoid) -> dict:
    m = g.monoid
    data = {
        "dsig": g.dsig,
        "size": g.size,
        "unit": m.unit,
        "mult": [list(r) for r in m.mult],
        "alphabet": list(g.alphabet.symbols),
        "gens": {s: g.gen_map[i] for i, s in enumerate(g.alphabet.symbols)},
        "labels": [l if isinstance(l, str) else list(l) for l in g.labels],
    }
    if g.dsig == sigs.POS:
        data["order"] = [list(p) for p in m.carrier.order]
    elif g.dsig == sigs.SLAT:
        data["join"] = [list(r) for r in m.carrier.join]
        data["bottom"] = m.carrier.bottom
    elif g.dsig == sigs.Z2VEC:
        data["dim"] = m.carrier.dim
    return data


def monoid_from_json(data: dict) -> GeneratedDMonoid:
    try:
        dsig = sigs.check_dsig(data["dsig"])
        size = int(data["size"])
        unit = int(data["unit"])
        mult = tuple(tuple(int(v) for v in r) for r in data["mult"])
        a = Alphabet(tuple(data["alphabet"]))
        gen_map = tuple(int(data["gens"][s]) for s in a.symbols)
        labels = tuple(l if isinstance(l, str) else tuple(l) for l in data["labels"])
        if dsig == sigs.POS:
            carrier = FiniteDObject(
                sigs.POS, size, order=tuple(sorted(tuple(p) for p in data["order"]))
            )
        elif dsig == sigs.SLAT:
            carrier = FiniteDObject(
                sigs.SLAT,
                size,
                join=tuple(tuple(int(v) for v in r) for r in data["join"]),
                bottom=int(data["bottom"]),
            )
        elif dsig == sigs.Z2VEC:
            carrier = z2_object(int(data["dim"]))
        else:
            carrier = set_object(size)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed monoid JSON: {exc}") from exc
    g = GeneratedDMonoid(FiniteDMonoid(carrier, unit, mult), a, gen_map, labels)
    bad = validate_generated(g)
    if bad:
        raise InputError(f"monoid JSON violates D-monoid laws: {bad[:3]}")
    return g


def label_str(g: GeneratedDMonoid, i: int) -> str:
    lab = g.labels[i]
    if isinstance(lab, str):
        return lab if lab else "e"
    if not lab:
        return "0"
    return "{" + ",".join(w if w else "e" for w in lab) + "}"


def quo_poset_dot(monoids) -> str:
    """DOT digraph of the Quo order on the given generated monoids
    (canonicalized, deduplicated); edges are covering relations."""
    canon = []
    seen = set()
    for g in monoids:
        c = canonicalize(g)
        key = _encoding_key(c)
        if key not in seen:
            seen.add(key)
            canon.append(c)
    canon.sort(key=_encoding_key)
    n = len(canon)
    less = [[False] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and leq_quo(canon[i], canon[j]) is not None:
                less[i][j] = True
    lines = ["digraph quo {", "  rankdir=BT;"]
    for i, g in enumerate(canon):
        label = "M%d: %s [%s]" % (i, g.dsig, " ".join(label_str(g, e) for e in range(g.size)))
        lines.append('  m%d [label="%s"];' % (i, label))
    for i in range(n):
        for j in range(n):
            if less[i][j] and not any(
                less[i][k] and less[k][j] for k in range(n) if k not in (i, j)
            ):
                lines.append("  m%d -> m%d;" % (i, j))
    lines.append("}")
    return "\n".join(lines) + "\n"
