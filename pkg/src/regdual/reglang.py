"""Regular languages as canonical minimal DFAs.

A language lives here as a ``CanonicalDfa``: minimal, total, reachable,
with states numbered by breadth-first shortlex discovery from the initial
state.  Two regexes denote the same language exactly when they compile to
the same encoding, so language equality is plain ``==``.

The module also provides the algebraic operations of the four base
signatures (union, intersection, complement, symmetric difference), left
and right word derivatives, and preimages under free-monoid morphisms
with word payloads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

from . import sigs
from ._kernels import minimize_dfa
from .errors import InputError, ResourceError

_RESERVED = set("0e|&~^*() \t\n")

# Exploration cap for derivative-based regex compilation.
_MAX_EXPLORE = 100_000


@dataclass(frozen=True, order=True)
class Alphabet:
    """Ordered alphabet of distinct single-character symbols."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        if not self.symbols:
            raise InputError("alphabet must be non-empty")
        if len(set(self.symbols)) != len(self.symbols):
            raise InputError("alphabet symbols must be distinct")
        for s in self.symbols:
            if len(s) != 1 or s in _RESERVED:
                raise InputError(f"bad alphabet symbol {s!r} (single characters outside '0e|&~^*()' only)")

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise InputError(f"symbol {symbol!r} not in alphabet {self.symbols}") from None

    def __len__(self):
        return len(self.symbols)


def alphabet(spec) -> Alphabet:
    """Build an Alphabet from a string like 'ab' or an iterable of symbols."""
    return Alphabet(tuple(spec))


def check_word(a: Alphabet, w: str) -> str:
    for c in w:
        if c not in a.symbols:
            raise InputError(f"letter {c!r} not in alphabet {a.symbols}")
    return w


def shortlex_key(a: Alphabet, w: str):
    return (len(w), tuple(a.index(c) for c in w))


def payload_key(a: Alphabet, payload):
    """Sort key for free-monoid elements: shortlex on words, extended
    lexicographically to normalized word sets."""
    if isinstance(payload, str):
        return shortlex_key(a, payload)
    return tuple(shortlex_key(a, w) for w in payload)


def normalize_wordset(a: Alphabet, words, mod2: bool = False) -> tuple[str, ...]:
    """Shortlex-sort a collection of words; drop duplicates (mod-2 cancels pairs)."""
    out = {}
    for w in words:
        check_word(a, w)
        out[w] = out.get(w, 0) + 1
    if mod2:
        kept = [w for w, c in out.items() if c % 2]
    else:
        kept = list(out)
    return tuple(sorted(kept, key=lambda w: shortlex_key(a, w)))


# ---------------------------------------------------------------------------
# Canonical DFAs


@dataclass(frozen=True)
class CanonicalDfa:
    """Minimal total DFA in canonical numbering (initial state is 0)."""

    alphabet: Alphabet
    states: int
    delta: tuple[tuple[int, ...], ...]  # delta[state][symbol index]
    accepting: tuple[int, ...]
    initial: int = 0

    def sort_key(self):
        return (self.states, self.delta, self.accepting)


def _canonical(a: Alphabet, n: int, delta_flat, accepting_flags, initial: int) -> CanonicalDfa:
    k = len(a.symbols)
    m, d2, acc2 = minimize_dfa(n, k, delta_flat, accepting_flags, initial)
    rows = tuple(tuple(d2[q * k : (q + 1) * k]) for q in range(m))
    return CanonicalDfa(a, m, rows, tuple(q for q in range(m) if acc2[q]))


def const_empty(a: Alphabet) -> CanonicalDfa:
    return CanonicalDfa(a, 1, ((0,) * len(a.symbols),), ())


def const_full(a: Alphabet) -> CanonicalDfa:
    return CanonicalDfa(a, 1, ((0,) * len(a.symbols),), (0,))


def membership(l: CanonicalDfa, w: str) -> bool:
    check_word(l.alphabet, w)
    q = l.initial
    for c in w:
        q = l.delta[q][l.alphabet.index(c)]
    return q in l.accepting


def equal(l1: CanonicalDfa, l2: CanonicalDfa) -> bool:
    if l1.alphabet != l2.alphabet:
        raise InputError("alphabet mismatch in equality test")
    return l1 == l2


# ---------------------------------------------------------------------------
# Regexes: syntax tree over 0, e, literals, |, &, ~, ^, *, juxtaposition.
#
# Nodes are hashable tuples normalized by the smart constructors below
# (flattening, sorting, idempotence, mod-2 cancellation), which keeps the
# set of Brzozowski derivatives finite.

EMPTY = ("0",)
EPS = ("e",)


def lit(c: str):
    return ("lit", c)


def _node_key(r) -> str:
    if r[0] == "lit":
        return "lit:" + r[1]
    return r[0] + "(" + ",".join(_node_key(x) for x in r[1:] if isinstance(x, tuple)) + ")"


def _flatten(tag, rs):
    out = []
    for r in rs:
        if r[0] == tag:
            out.extend(r[1:])
        else:
            out.append(r)
    return out


def neg(r):
    if r[0] == "not":
        return r[1]
    return ("not", r)


TOP = neg(EMPTY)


def cat(*rs):
    parts = []
    for r in _flatten("cat", rs):
        if r == EMPTY:
            return EMPTY
        if r != EPS:
            parts.append(r)
    if not parts:
        return EPS
    if len(parts) == 1:
        return parts[0]
    return ("cat", *parts)


def alt(*rs):
    parts = set()
    for r in _flatten("or", rs):
        if r == TOP:
            return TOP
        if r != EMPTY:
            parts.add(r)
    if not parts:
        return EMPTY
    ordered = sorted(parts, key=_node_key)
    if len(ordered) == 1:
        return ordered[0]
    return ("or", *ordered)


def inter(*rs):
    parts = set()
    for r in _flatten("and", rs):
        if r == EMPTY:
            return EMPTY
        if r != TOP:
            parts.add(r)
    if not parts:
        return TOP
    ordered = sorted(parts, key=_node_key)
    if len(ordered) == 1:
        return ordered[0]
    return ("and", *ordered)


def xor(*rs):
    count = {}
    for r in _flatten("xor", rs):
        if r != EMPTY:
            count[r] = count.get(r, 0) + 1
    parts = sorted((r for r, c in count.items() if c % 2), key=_node_key)
    if not parts:
        return EMPTY
    if len(parts) == 1:
        return parts[0]
    return ("xor", *parts)


def star(r):
    if r in (EMPTY, EPS):
        return EPS
    if r[0] == "star":
        return r
    return ("star", r)


def nullable(r) -> bool:
    tag = r[0]
    if tag == "0" or tag == "lit":
        return False
    if tag == "e" or tag == "star":
        return True
    if tag == "cat":
        return all(nullable(x) for x in r[1:])
    if tag == "or":
        return any(nullable(x) for x in r[1:])
    if tag == "and":
        return all(nullable(x) for x in r[1:])
    if tag == "xor":
        return sum(nullable(x) for x in r[1:]) % 2 == 1
    if tag == "not":
        return not nullable(r[1])
    raise InputError(f"unknown regex node {tag!r}")


def deriv(r, c: str):
    tag = r[0]
    if tag in ("0", "e"):
        return EMPTY
    if tag == "lit":
        return EPS if r[1] == c else EMPTY
    if tag == "cat":
        head, rest = r[1], cat(*r[2:])
        d = cat(deriv(head, c), rest)
        if nullable(head):
            return alt(d, deriv(rest, c))
        return d
    if tag == "or":
        return alt(*(deriv(x, c) for x in r[1:]))
    if tag == "and":
        return inter(*(deriv(x, c) for x in r[1:]))
    if tag == "xor":
        return xor(*(deriv(x, c) for x in r[1:]))
    if tag == "not":
        return neg(deriv(r[1], c))
    if tag == "star":
        return cat(deriv(r[1], c), r)
    raise InputError(f"unknown regex node {tag!r}")


def check_regex(r, a: Alphabet):
    tag = r[0]
    if tag == "lit":
        if r[1] not in a.symbols:
            raise InputError(f"regex literal {r[1]!r} not in alphabet {a.symbols}")
    elif tag in ("cat", "or", "and", "xor"):
        for x in r[1:]:
            check_regex(x, a)
    elif tag in ("not", "star"):
        check_regex(r[1], a)
    elif tag not in ("0", "e"):
        raise InputError(f"unknown regex node {tag!r}")


def compile_regex(r, a: Alphabet) -> CanonicalDfa:
    """Compile a regex to its canonical minimal DFA via Brzozowski derivatives."""
    check_regex(r, a)
    k = len(a.symbols)
    states = {r: 0}
    order = [r]
    delta = []
    pos = 0
    while pos < len(order):
        cur = order[pos]
        for c in a.symbols:
            d = deriv(cur, c)
            idx = states.get(d)
            if idx is None:
                if len(order) >= _MAX_EXPLORE:
                    raise ResourceError("regex derivative exploration exceeded bound")
                idx = len(order)
                states[d] = idx
                order.append(d)
            delta.append(idx)
        pos += 1
    acc = [1 if nullable(x) else 0 for x in order]
    return _canonical(a, len(order), delta, acc, 0)


# --- text grammar ----------------------------------------------------------
#   expr   := xor ('|' xor)*
#   xor    := inter ('^' inter)*
#   inter  := concat ('&' concat)*
#   concat := unary+
#   unary  := '~' unary | postfix
#   postfix:= atom '*'*
#   atom   := '0' | 'e' | symbol | '(' expr ')'


class _Parser:
    def __init__(self, text, a: Alphabet):
        self.text = text
        self.pos = 0
        self.alphabet = a

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t\n":
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else None

    def take(self):
        c = self.peek()
        self.pos += 1
        return c

    def parse(self):
        r = self.expr()
        if self.peek() is not None:
            raise InputError(f"unexpected {self.peek()!r} at position {self.pos} in regex")
        return r

    def expr(self):
        parts = [self.xor()]
        while self.peek() == "|":
            self.take()
            parts.append(self.xor())
        return alt(*parts)

    def xor(self):
        parts = [self.inter()]
        while self.peek() == "^":
            self.take()
            parts.append(self.inter())
        return xor(*parts) if len(parts) > 1 else parts[0]

    def inter(self):
        parts = [self.concat()]
        while self.peek() == "&":
            self.take()
            parts.append(self.concat())
        return inter(*parts)

    def concat(self):
        parts = []
        while True:
            c = self.peek()
            if c is None or c in "|&^)":
                break
            parts.append(self.unary())
        if not parts:
            raise InputError(f"empty regex factor at position {self.pos}")
        return cat(*parts)

    def unary(self):
        if self.peek() == "~":
            self.take()
            return neg(self.unary())
        return self.postfix()

    def postfix(self):
        r = self.atom()
        while self.peek() == "*":
            self.take()
            r = star(r)
        return r

    def atom(self):
        c = self.take()
        if c is None:
            raise InputError("unexpected end of regex")
        if c == "0":
            return EMPTY
        if c == "e":
            return EPS
        if c == "(":
            r = self.expr()
            if self.take() != ")":
                raise InputError("unbalanced parenthesis in regex")
            return r
        if c in self.alphabet.symbols:
            return lit(c)
        raise InputError(f"unknown literal {c!r} in regex")


def parse_regex(text: str, a: Alphabet):
    return _Parser(text, a).parse()


def compile(text_or_node, a: Alphabet) -> CanonicalDfa:
    """Compile regex text (or an already-built node) over the alphabet."""
    node = parse_regex(text_or_node, a) if isinstance(text_or_node, str) else text_or_node
    return compile_regex(node, a)


# ---------------------------------------------------------------------------
# Algebraic operations on canonical DFAs


def _product(l1: CanonicalDfa, l2: CanonicalDfa, accept_pair) -> CanonicalDfa:
    a = l1.alphabet
    k = len(a.symbols)
    n1, n2 = l1.states, l2.states
    acc1 = set(l1.accepting)
    acc2 = set(l2.accepting)
    delta = []
    acc = []
    for q1 in range(n1):
        for q2 in range(n2):
            for s in range(k):
                delta.append(l1.delta[q1][s] * n2 + l2.delta[q2][s])
            acc.append(1 if accept_pair(q1 in acc1, q2 in acc2) else 0)
    return _canonical(a, n1 * n2, delta, acc, l1.initial * n2 + l2.initial)


def complement(l: CanonicalDfa) -> CanonicalDfa:
    flags = [0 if q in l.accepting else 1 for q in range(l.states)]
    delta = [t for row in l.delta for t in row]
    return _canonical(l.alphabet, l.states, delta, flags, l.initial)


def union(l1, l2):
    return _product(l1, l2, lambda x, y: x or y)


def intersection(l1, l2):
    return _product(l1, l2, lambda x, y: x and y)


def symmetric_difference(l1, l2):
    return _product(l1, l2, lambda x, y: x != y)


_OPS = {
    "union": (union, 2),
    "intersection": (intersection, 2),
    "xor": (symmetric_difference, 2),
    "complement": (complement, 1),
    "const_empty": (const_empty, 0),
    "const_full": (const_full, 0),
}


def algebra_op(op: str, args, alphabet_for_consts: Alphabet | None = None) -> CanonicalDfa:
    """Apply one of the base-signature operations to canonical DFAs.

    Binary operations fold over two or more arguments; nullary ones need
    ``alphabet_for_consts``.
    """
    if op not in _OPS:
        raise InputError(f"unknown operation {op!r}")
    fn, arity = _OPS[op]
    args = list(args)
    if arity == 0:
        if alphabet_for_consts is None:
            raise InputError(f"{op} needs an alphabet")
        return fn(alphabet_for_consts)
    alphabets = {l.alphabet for l in args}
    if len(alphabets) != 1:
        raise InputError("all operands must share one alphabet")
    if arity == 1:
        if len(args) != 1:
            raise InputError(f"{op} takes exactly one operand")
        return fn(args[0])
    if len(args) < 2:
        raise InputError(f"{op} takes at least two operands")
    return reduce(fn, args)


def left_derivative(l: CanonicalDfa, a: str) -> CanonicalDfa:
    """Canonical DFA of a^-1 L = {w : aw in L}."""
    s = l.alphabet.index(a)
    delta = [t for row in l.delta for t in row]
    flags = [1 if q in l.accepting else 0 for q in range(l.states)]
    return _canonical(l.alphabet, l.states, delta, flags, l.delta[l.initial][s])


def right_derivative(l: CanonicalDfa, a: str) -> CanonicalDfa:
    """Canonical DFA of L a^-1 = {w : wa in L}."""
    s = l.alphabet.index(a)
    acc = set(l.accepting)
    flags = [1 if l.delta[q][s] in acc else 0 for q in range(l.states)]
    delta = [t for row in l.delta for t in row]
    return _canonical(l.alphabet, l.states, delta, flags, l.initial)


# ---------------------------------------------------------------------------
# Free-monoid morphisms


@dataclass(frozen=True)
class FreeMorphism:
    """Morphism between free D-monoids, given by per-symbol images.

    Image payloads are words for SET/POS and normalized word sets for
    SLAT (plain sets) and Z2VEC (mod-2 combinations).  Only word payloads
    drive language preimages; set payloads are consumed on the monoid
    side via the dual characterization.
    """

    domain: Alphabet
    codomain: Alphabet
    dsig: str
    image: tuple  # per domain symbol, aligned with domain.symbols

    def __post_init__(self):
        sigs.check_dsig(self.dsig)
        if len(self.image) != len(self.domain.symbols):
            raise InputError("morphism image must cover every domain symbol")
        for payload in self.image:
            if self.dsig in sigs.WORD_DSIGS:
                if not isinstance(payload, str):
                    raise InputError("SET/POS morphism images must be words")
                check_word(self.codomain, payload)
            else:
                if isinstance(payload, str):
                    raise InputError("SLAT/Z2VEC morphism images must be word sets")
                norm = normalize_wordset(self.codomain, payload, mod2=self.dsig == sigs.Z2VEC)
                if tuple(payload) != norm:
                    raise InputError("SLAT/Z2VEC morphism images must be normalized word sets")

    def image_of(self, symbol: str):
        return self.image[self.domain.index(symbol)]

    def apply_word(self, w: str):
        """Homomorphic image of a single word (a payload over the codomain)."""
        check_word(self.domain, w)
        if self.dsig in sigs.WORD_DSIGS:
            return "".join(self.image_of(c) for c in w)
        acc = ("",)
        for c in w:
            img = self.image_of(c)
            acc = normalize_wordset(
                self.codomain, (u + v for u in acc for v in img), mod2=self.dsig == sigs.Z2VEC
            )
        return acc

    def apply(self, payload):
        """Homomorphic image of a free-monoid element payload."""
        if isinstance(payload, str):
            return self.apply_word(payload)
        if self.dsig in sigs.WORD_DSIGS:
            raise InputError("set payload given to a word morphism")
        parts = []
        for w in payload:
            parts.extend(self.apply_word(w))
        return normalize_wordset(self.codomain, parts, mod2=self.dsig == sigs.Z2VEC)


def free_morphism(domain: Alphabet, codomain: Alphabet, dsig: str, mapping) -> FreeMorphism:
    """Build a FreeMorphism from a symbol -> payload mapping."""
    image = []
    for s in domain.symbols:
        if s not in mapping:
            raise InputError(f"morphism image missing for symbol {s!r}")
        payload = mapping[s]
        if dsig in sigs.SETLIKE_DSIGS and not isinstance(payload, str):
            payload = normalize_wordset(codomain, payload, mod2=dsig == sigs.Z2VEC)
        image.append(payload)
    return FreeMorphism(domain, codomain, dsig, tuple(image))


def identity_morphism(a: Alphabet, dsig: str) -> FreeMorphism:
    if dsig in sigs.WORD_DSIGS:
        return FreeMorphism(a, a, dsig, tuple(a.symbols))
    return FreeMorphism(a, a, dsig, tuple((s,) for s in a.symbols))


def compose_morphisms(g: FreeMorphism, f: FreeMorphism) -> FreeMorphism:
    """The composite g . f (apply f first)."""
    if f.codomain != g.domain or f.dsig != g.dsig:
        raise InputError("morphisms do not compose")
    return FreeMorphism(f.domain, g.codomain, f.dsig, tuple(g.apply(p) for p in f.image))


def preimage(f: FreeMorphism, l: CanonicalDfa) -> CanonicalDfa:
    """Canonical DFA of {w over the domain : f(w) in L}, for word morphisms."""
    if f.dsig not in sigs.WORD_DSIGS:
        raise InputError("language preimage needs a word (SET/POS) morphism")
    if l.alphabet != f.codomain:
        raise InputError("language alphabet must match the morphism codomain")
    a = f.domain
    delta = []
    for q in range(l.states):
        for s in a.symbols:
            t = q
            for c in f.image_of(s):
                t = l.delta[t][l.alphabet.index(c)]
            delta.append(t)
    flags = [1 if q in l.accepting else 0 for q in range(l.states)]
    return _canonical(a, l.states, delta, flags, l.initial)


# ---------------------------------------------------------------------------
# JSON encoding: {"alphabet": [...], "states": n, "initial": 0,
#                 "accepting": [...], "delta": [[...], ...]}


def dfa_to_json(l: CanonicalDfa) -> dict:
    return {
        "alphabet": list(l.alphabet.symbols),
        "states": l.states,
        "initial": l.initial,
        "accepting": list(l.accepting),
        "delta": [list(row) for row in l.delta],
    }


def dfa_from_json(data: dict) -> CanonicalDfa:
    try:
        a = Alphabet(tuple(data["alphabet"]))
        n = int(data["states"])
        delta = tuple(tuple(int(t) for t in row) for row in data["delta"])
        acc = tuple(sorted(int(q) for q in data["accepting"]))
        initial = int(data.get("initial", 0))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed DFA JSON: {exc}") from exc
    if len(delta) != n or any(len(row) != len(a.symbols) for row in delta):
        raise InputError("DFA JSON delta has wrong shape")
    for row in delta:
        for t in row:
            if not 0 <= t < n:
                raise InputError("DFA JSON transition out of range")
    if any(not 0 <= q < n for q in acc):
        raise InputError("DFA JSON accepting state out of range")
    dfa = CanonicalDfa(a, n, delta, acc, initial)
    flat = [t for row in delta for t in row]
    recanon = _canonical(a, n, flat, [1 if q in acc else 0 for q in range(n)], initial)
    if recanon != dfa:
        raise InputError("DFA JSON is not in canonical minimal form")
    return dfa


def morphism_to_json(f: FreeMorphism) -> dict:
    img = {}
    for s in f.domain.symbols:
        p = f.image_of(s)
        img[s] = p if isinstance(p, str) else list(p)
    return {
        "dsig": f.dsig,
        "domain": list(f.domain.symbols),
        "codomain": list(f.codomain.symbols),
        "image": img,
    }


def morphism_from_json(data: dict) -> FreeMorphism:
    try:
        dom = Alphabet(tuple(data["domain"]))
        cod = Alphabet(tuple(data["codomain"]))
        dsig = sigs.check_dsig(data["dsig"])
        mapping = {
            s: (p if isinstance(p, str) else tuple(p)) for s, p in data["image"].items()
        }
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed morphism JSON: {exc}") from exc
    return free_morphism(dom, cod, dsig, mapping)
