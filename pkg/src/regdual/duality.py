"""Finite dual equivalences between the algebra and monoid sides.

Objects on the algebra side are finite boolean algebras, bounded
distributive lattices, semilattices with zero, or Z2 vector spaces.  The
dual of an algebra is its set of homomorphisms into the two-element
algebra of the same signature, carried as bit-vectors indexed by the
source carrier; the dual of a morphism is precomposition.  The inverse
direction takes a set/poset/semilattice/space to its algebra of
structure-preserving maps into the two-element object, with pointwise
operations.

Hom enumeration is by direct backtracking over the operation tables; the
Birkhoff join-irreducible description of distributive-lattice duals is
kept only as a test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import sigs
from .dalg import FiniteDObject, leq_in, z2_object
from .errors import InputError, InvariantError


@dataclass(frozen=True)
class FiniteCAlgebra:
    """Finite algebra of one of the four C-signatures, with total tables."""

    csig: str
    size: int
    meet: tuple[tuple[int, ...], ...] | None = None  # BA, DLAT
    join: tuple[tuple[int, ...], ...] | None = None  # BA, DLAT, SLAT_C
    comp: tuple[int, ...] | None = None  # BA
    zero: int | None = None  # all
    one: int | None = None  # BA, DLAT


@dataclass(frozen=True)
class CAlgebraMorphism:
    source: FiniteCAlgebra
    target: FiniteCAlgebra
    table: tuple[int, ...]


@dataclass(frozen=True)
class DObjectMap:
    """Structure-preserving map between finite D-objects."""

    source: FiniteDObject
    target: FiniteDObject
    table: tuple[int, ...]


def two_element(csig: str) -> FiniteCAlgebra:
    """The dualizing two-element algebra of a C-signature (0 < 1)."""
    sigs.check_csig(csig)
    if csig == sigs.BA:
        return FiniteCAlgebra(
            csig, 2, meet=((0, 0), (0, 1)), join=((0, 1), (1, 1)), comp=(1, 0), zero=0, one=1
        )
    if csig == sigs.DLAT:
        return FiniteCAlgebra(csig, 2, meet=((0, 0), (0, 1)), join=((0, 1), (1, 1)), zero=0, one=1)
    if csig == sigs.SLAT_C:
        return FiniteCAlgebra(csig, 2, join=((0, 1), (1, 1)), zero=0)
    return FiniteCAlgebra(csig, 2, zero=0)  # Z2VEC_C: addition is xor of indices


def two_element_dobject(dsig: str) -> FiniteDObject:
    sigs.check_dsig(dsig)
    if dsig == sigs.SET:
        return FiniteDObject(sigs.SET, 2)
    if dsig == sigs.POS:
        return FiniteDObject(sigs.POS, 2, order=((0, 0), (0, 1), (1, 1)))
    if dsig == sigs.SLAT:
        return FiniteDObject(sigs.SLAT, 2, join=((0, 1), (1, 1)), bottom=0)
    return z2_object(1)


def _add(a: FiniteCAlgebra, x: int, y: int) -> int:
    return x ^ y  # Z2VEC_C carriers are coordinate spaces


def _binary_ops(a: FiniteCAlgebra):
    ops = []
    if a.csig in (sigs.BA, sigs.DLAT):
        ops.append(("meet", a.meet))
        ops.append(("join", a.join))
    elif a.csig == sigs.SLAT_C:
        ops.append(("join", a.join))
    else:
        ops.append(("add", None))  # xor of indices
    return ops


def _op_value(a: FiniteCAlgebra, name, table, x, y):
    if name == "add":
        return x ^ y
    return table[x][y]


def validate_algebra(a: FiniteCAlgebra) -> list[str]:
    """Exhaustively check the equational laws of the signature."""
    sigs.check_csig(a.csig)
    bad = []
    n = a.size
    if n <= 0:
        return ["carrier is empty"]
    for name, table in _binary_ops(a):
        if name == "add":
            if n & (n - 1):
                bad.append("Z2 algebra size is not a power of two")
            continue
        if table is None or len(table) != n or any(len(r) != n for r in table):
            return [f"{name} table missing or wrong shape"]
        if any(not 0 <= v < n for r in table for v in r):
            return [f"{name} table value out of range"]
        for x in range(n):
            if table[x][x] != x:
                bad.append(f"{name} not idempotent at {x}")
            for y in range(n):
                if table[x][y] != table[y][x]:
                    bad.append(f"{name} not commutative at ({x},{y})")
                for z in range(n):
                    if table[table[x][y]][z] != table[x][table[y][z]]:
                        bad.append(f"{name} not associative at ({x},{y},{z})")
    if a.csig in (sigs.BA, sigs.DLAT):
        if a.zero is None or a.one is None:
            return ["bounds missing"]
        for x in range(n):
            if a.join[a.zero][x] != x or a.meet[a.one][x] != x:
                bad.append(f"bounds are not units at {x}")
            for y in range(n):
                if a.meet[x][a.join[x][y]] != x or a.join[x][a.meet[x][y]] != x:
                    bad.append(f"absorption fails at ({x},{y})")
                for z in range(n):
                    if a.meet[x][a.join[y][z]] != a.join[a.meet[x][y]][a.meet[x][z]]:
                        bad.append(f"distributivity fails at ({x},{y},{z})")
    if a.csig == sigs.BA:
        if a.comp is None or len(a.comp) != n:
            return ["complement table missing"]
        for x in range(n):
            if a.meet[x][a.comp[x]] != a.zero or a.join[x][a.comp[x]] != a.one:
                bad.append(f"complement laws fail at {x}")
        if not bad:
            k = len(atoms(a))
            if n != 1 << k:
                bad.append("carrier size is not 2**#atoms")
    if a.csig == sigs.SLAT_C:
        if a.zero is None:
            return ["zero missing"]
        for x in range(n):
            if a.join[a.zero][x] != x:
                bad.append(f"zero is not a join unit at {x}")
    if a.csig == sigs.Z2VEC_C and a.zero != 0:
        bad.append("Z2 algebra zero must be index 0")
    return bad


def alg_leq(a: FiniteCAlgebra, x: int, y: int) -> bool:
    if a.csig in (sigs.BA, sigs.DLAT):
        return a.meet[x][y] == x
    if a.csig == sigs.SLAT_C:
        return a.join[x][y] == y
    raise InputError("no order on Z2 algebras")


def atoms(a: FiniteCAlgebra) -> list[int]:
    """Minimal nonzero elements of a BA/DLAT/SLAT_C algebra."""
    out = []
    for x in range(a.size):
        if x == a.zero:
            continue
        if all(y == a.zero or y == x or not alg_leq(a, y, x) for y in range(a.size)):
            out.append(x)
    return out


# ---------------------------------------------------------------------------
# Hom enumeration into the two-element algebra (direct backtracking)


def homs_to_2(a: FiniteCAlgebra) -> list[int]:
    """All homomorphisms a -> 2 as bit-vectors over the carrier, ascending."""
    n = a.size
    assign = [-1] * n
    if a.csig in (sigs.BA, sigs.DLAT):
        assign[a.zero] = 0
        assign[a.one] = 1
        if a.zero == a.one:
            return []
    else:
        assign[a.zero if a.zero is not None else 0] = 0
    ops = _binary_ops(a)
    out = []

    def propagate():
        changed = True
        while changed:
            changed = False
            for name, table in ops:
                for x in range(n):
                    hx = assign[x]
                    if hx < 0:
                        continue
                    for y in range(n):
                        hy = assign[y]
                        if hy < 0:
                            continue
                        z = _op_value(a, name, table, x, y)
                        hz = hy | hx if name == "join" else (hx & hy if name == "meet" else hx ^ hy)
                        if assign[z] < 0:
                            assign[z] = hz
                            changed = True
                        elif assign[z] != hz:
                            return False
            if a.csig == sigs.BA:
                for x in range(n):
                    if assign[x] >= 0:
                        c = a.comp[x]
                        if assign[c] < 0:
                            assign[c] = 1 - assign[x]
                            changed = True
                        elif assign[c] != 1 - assign[x]:
                            return False
        return True

    def search():
        saved = list(assign)
        if not propagate():
            assign[:] = saved
            return
        try:
            free = assign.index(-1)
        except ValueError:
            out.append(sum(1 << i for i in range(n) if assign[i]))
            assign[:] = saved
            return
        for v in (0, 1):
            inner = list(assign)
            assign[free] = v
            search()
            assign[:] = inner
        assign[:] = saved

    search()
    return sorted(set(out))


def algebra_homs(a: FiniteCAlgebra, b: FiniteCAlgebra) -> list[tuple[int, ...]]:
    """All homomorphisms a -> b, by backtracking (small carriers only)."""
    if a.csig != b.csig:
        raise InputError("hom search across signatures")
    n = a.size
    assign = [-1] * n
    if a.csig in (sigs.BA, sigs.DLAT):
        assign[a.zero] = b.zero
        assign[a.one] = b.one
    else:
        assign[a.zero if a.zero is not None else 0] = b.zero if b.zero is not None else 0
    ops_a = _binary_ops(a)
    ops_b = dict((name, t) for name, t in _binary_ops(b))
    out = []

    def propagate():
        changed = True
        while changed:
            changed = False
            for name, table in ops_a:
                bt = ops_b[name]
                for x in range(n):
                    if assign[x] < 0:
                        continue
                    for y in range(n):
                        if assign[y] < 0:
                            continue
                        z = _op_value(a, name, table, x, y)
                        hz = _op_value(b, name, bt, assign[x], assign[y])
                        if assign[z] < 0:
                            assign[z] = hz
                            changed = True
                        elif assign[z] != hz:
                            return False
            if a.csig == sigs.BA:
                for x in range(n):
                    if assign[x] >= 0:
                        c, hc = a.comp[x], b.comp[assign[x]]
                        if assign[c] < 0:
                            assign[c] = hc
                            changed = True
                        elif assign[c] != hc:
                            return False
        return True

    def search():
        saved = list(assign)
        if not propagate():
            assign[:] = saved
            return
        try:
            free = assign.index(-1)
        except ValueError:
            out.append(tuple(assign))
            assign[:] = saved
            return
        for v in range(b.size):
            assign[free] = v
            search()
        assign[free] = -1
        assign[:] = saved

    search()
    return sorted(set(out))


def validate_calgebra_morphism(f: CAlgebraMorphism) -> list[str]:
    a, b = f.source, f.target
    if a.csig != b.csig:
        return ["signature mismatch"]
    n = a.size
    if len(f.table) != n or any(not 0 <= v < b.size for v in f.table):
        return ["morphism table has wrong shape or range"]
    bad = []
    h = f.table
    for name, table in _binary_ops(a):
        bt = dict(_binary_ops(b))[name]
        for x in range(n):
            for y in range(n):
                if h[_op_value(a, name, table, x, y)] != _op_value(b, name, bt, h[x], h[y]):
                    bad.append(f"{name} not preserved at ({x},{y})")
    if a.csig == sigs.BA:
        for x in range(n):
            if h[a.comp[x]] != b.comp[h[x]]:
                bad.append(f"complement not preserved at {x}")
    if a.zero is not None and h[a.zero] != b.zero:
        bad.append("zero not preserved")
    if a.csig in (sigs.BA, sigs.DLAT) and h[a.one] != b.one:
        bad.append("one not preserved")
    return bad


# ---------------------------------------------------------------------------
# The dual equivalence on objects


def dual_with_homs(a: FiniteCAlgebra):
    """Dual D-object of an algebra plus its hom bit-vectors, aligned with
    the canonical element order of the dual."""
    bad = validate_algebra(a)
    if bad:
        raise InputError(f"invalid algebra: {bad[:3]}")
    homs = homs_to_2(a)
    dsig = sigs.CSIG_TO_DSIG[a.csig]
    n = len(homs)
    if dsig == sigs.SET:
        return FiniteDObject(sigs.SET, n), tuple(homs)
    if dsig == sigs.POS:
        pairs = tuple(
            (i, j) for i in range(n) for j in range(n) if homs[i] & ~homs[j] == 0
        )
        return FiniteDObject(sigs.POS, n, order=pairs), tuple(homs)
    if dsig == sigs.SLAT:
        idx = {h: i for i, h in enumerate(homs)}
        join = tuple(tuple(idx[homs[i] | homs[j]] for j in range(n)) for i in range(n))
        return FiniteDObject(sigs.SLAT, n, join=join, bottom=idx[0]), tuple(homs)
    # Z2VEC: coordinates over a greedy basis of the hom space
    basis = []
    for h in homs:
        v = h
        for b in basis:
            if v >> (b.bit_length() - 1) & 1:
                v ^= b
        if v:
            basis.append(h)
    dim = len(basis)
    if 1 << dim != n:
        raise InvariantError("hom space of a Z2 algebra is not a space")
    ordered = []
    for code in range(1 << dim):
        v = 0
        for b in range(dim):
            if code >> b & 1:
                v ^= basis[b]
        ordered.append(v)
    if len(set(ordered)) != n:
        raise InvariantError("hom basis does not span the hom set")
    return z2_object(dim), tuple(ordered)


def dual_object(a: FiniteCAlgebra) -> FiniteDObject:
    """Set/poset/semilattice/space of homomorphisms into the two-element
    algebra, with pointwise structure."""
    return dual_with_homs(a)[0]


def p_with_elements(x: FiniteDObject):
    """Algebra of structure-preserving maps x -> 2 with pointwise
    operations, plus the maps as bit-vectors aligned with element order."""
    n = x.size
    if x.dsig == sigs.SET:
        masks = tuple(range(1 << n))
        meet = tuple(tuple(i & j for j in masks) for i in masks)
        join = tuple(tuple(i | j for j in masks) for i in masks)
        full = (1 << n) - 1
        comp = tuple(full ^ i for i in masks)
        return (
            FiniteCAlgebra(sigs.BA, 1 << n, meet=meet, join=join, comp=comp, zero=0, one=full),
            masks,
        )
    if x.dsig == sigs.POS:
        ups = []
        for m in range(1 << n):
            if all(
                not (m >> i & 1) or (m >> j & 1)
                for i in range(n)
                for j in range(n)
                if leq_in(x, i, j)
            ):
                ups.append(m)
        ups = tuple(sorted(ups))
        idx = {m: i for i, m in enumerate(ups)}
        meet = tuple(tuple(idx[a & b] for b in ups) for a in ups)
        join = tuple(tuple(idx[a | b] for b in ups) for a in ups)
        return (
            FiniteCAlgebra(
                sigs.DLAT, len(ups), meet=meet, join=join, zero=idx[0], one=idx[(1 << n) - 1]
            ),
            ups,
        )
    if x.dsig == sigs.SLAT:
        masks = []
        for m in range(n):
            masks.append(sum(1 << y for y in range(n) if not leq_in(x, y, m)))
        masks = tuple(sorted(set(masks)))
        if len(masks) != n:
            raise InvariantError("semilattice hom kernels are not distinct")
        idx = {m: i for i, m in enumerate(masks)}
        join = tuple(tuple(idx[a | b] for b in masks) for a in masks)
        return FiniteCAlgebra(sigs.SLAT_C, n, join=join, zero=idx[0]), masks
    # Z2VEC: functionals indexed by coordinate vectors
    d = x.dim
    masks = []
    for s in range(1 << d):
        masks.append(
            sum(1 << y for y in range(n) if bin(y & s).count("1") % 2) if d else 0
        )
    return FiniteCAlgebra(sigs.Z2VEC_C, 1 << d, zero=0), tuple(masks)


def p_object(x: FiniteDObject) -> FiniteCAlgebra:
    return p_with_elements(x)[0]


# ---------------------------------------------------------------------------
# The dual equivalence on morphisms (contravariant, by precomposition)


def dual_morphism(h: CAlgebraMorphism) -> DObjectMap:
    """Precomposition with h: from the dual of the target to the dual of
    the source."""
    bad = validate_calgebra_morphism(h)
    if bad:
        raise InputError(f"invalid algebra morphism: {bad[:3]}")
    src_obj, src_homs = dual_with_homs(h.target)
    tgt_obj, tgt_homs = dual_with_homs(h.source)
    tgt_idx = {m: i for i, m in enumerate(tgt_homs)}
    table = []
    for f in src_homs:
        composed = sum(((f >> h.table[x]) & 1) << x for x in range(h.source.size))
        table.append(tgt_idx[composed])
    return DObjectMap(src_obj, tgt_obj, tuple(table))


def p_morphism(f: DObjectMap) -> CAlgebraMorphism:
    """Precomposition with f: from the algebra of the target to the
    algebra of the source."""
    src_alg, src_elems = p_with_elements(f.target)
    tgt_alg, tgt_elems = p_with_elements(f.source)
    tgt_idx = {m: i for i, m in enumerate(tgt_elems)}
    table = []
    for m in src_elems:
        composed = sum(((m >> f.table[x]) & 1) << x for x in range(f.source.size))
        table.append(tgt_idx[composed])
    return CAlgebraMorphism(src_alg, tgt_alg, tuple(table))


def validate_dobject_map(f: DObjectMap) -> list[str]:
    s, t = f.source, f.target
    if s.dsig != t.dsig:
        return ["signature mismatch"]
    if len(f.table) != s.size or any(not 0 <= v < t.size for v in f.table):
        return ["map table has wrong shape or range"]
    bad = []
    h = f.table
    if s.dsig == sigs.POS:
        for i in range(s.size):
            for j in range(s.size):
                if leq_in(s, i, j) and not leq_in(t, h[i], h[j]):
                    bad.append(f"not monotone at ({i},{j})")
    elif s.dsig == sigs.SLAT:
        if h[s.bottom] != t.bottom:
            bad.append("bottom not preserved")
        for i in range(s.size):
            for j in range(s.size):
                if h[s.join[i][j]] != t.join[h[i]][h[j]]:
                    bad.append(f"join not preserved at ({i},{j})")
    elif s.dsig == sigs.Z2VEC:
        for i in range(s.size):
            for j in range(s.size):
                if h[i ^ j] != h[i] ^ h[j]:
                    bad.append(f"not linear at ({i},{j})")
    return bad


def unit_iso(a: FiniteCAlgebra) -> CAlgebraMorphism:
    """The evaluation map a -> P(dual(a)); raises when it is not an
    isomorphism (which would signal a bug)."""
    dobj, homs = dual_with_homs(a)
    palg, pelems = p_with_elements(dobj)
    pidx = {m: i for i, m in enumerate(pelems)}
    table = []
    for x in range(a.size):
        v = sum(((homs[i] >> x) & 1) << i for i in range(len(homs)))
        if v not in pidx:
            raise InvariantError("evaluation image is not a hom of the dual object")
        table.append(pidx[v])
    if len(set(table)) != a.size or a.size != palg.size:
        raise InvariantError("evaluation map is not bijective")
    morph = CAlgebraMorphism(a, palg, tuple(table))
    bad = validate_calgebra_morphism(morph)
    if bad:
        raise InvariantError(f"evaluation map is not a morphism: {bad[:3]}")
    return morph


# ---------------------------------------------------------------------------
# Constructions used by tests and the CLI


def powerset_ba(k: int) -> FiniteCAlgebra:
    """Boolean algebra with k atoms (the powerset of a k-set)."""
    return p_with_elements(FiniteDObject(sigs.SET, k))[0]


def downset_dlat(size: int, pairs) -> FiniteCAlgebra:
    """Distributive lattice of up-sets of the given poset (Birkhoff form)."""
    obj = FiniteDObject(sigs.POS, size, order=None)
    full = set(tuple(p) for p in pairs)
    full.update((i, i) for i in range(size))
    obj = FiniteDObject(sigs.POS, size, order=tuple(sorted(full)))
    return p_with_elements(obj)[0]


def algebra_to_json(a: FiniteCAlgebra) -> dict:
    data = {"csig": a.csig, "size": a.size}
    if a.meet is not None:
        data["meet"] = [list(r) for r in a.meet]
    if a.join is not None:
        data["join"] = [list(r) for r in a.join]
    if a.comp is not None:
        data["comp"] = list(a.comp)
    if a.zero is not None:
        data["zero"] = a.zero
    if a.one is not None:
        data["one"] = a.one
    return data


def algebra_from_json(data: dict) -> FiniteCAlgebra:
    try:
        a = FiniteCAlgebra(
            sigs.check_csig(data["csig"]),
            int(data["size"]),
            meet=tuple(tuple(r) for r in data["meet"]) if "meet" in data else None,
            join=tuple(tuple(r) for r in data["join"]) if "join" in data else None,
            comp=tuple(data["comp"]) if "comp" in data else None,
            zero=data.get("zero"),
            one=data.get("one"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed algebra JSON: {exc}") from exc
    bad = validate_algebra(a)
    if bad:
        raise InputError(f"algebra JSON violates the signature laws: {bad[:3]}")
    return a


def dobject_to_json(x: FiniteDObject) -> dict:
    data = {"dsig": x.dsig, "size": x.size}
    if x.order is not None:
        data["order"] = [list(p) for p in x.order]
    if x.join is not None:
        data["join"] = [list(r) for r in x.join]
        data["bottom"] = x.bottom
    if x.dim is not None:
        data["dim"] = x.dim
    return data
