"""Pure-Python kernels: DFA minimization and transformation-monoid closure.

The compiled twin in ``_speed.pyx`` implements the same two functions with
identical signatures and bit-identical outputs; ``regdual._kernels``
selects one at import time.
"""

BACKEND = "pure"


def minimize_dfa(n, k, delta, accepting, initial):
    """Minimize a total DFA and renumber it canonically.

    ``delta`` is a flat row-major table (state*k + symbol), ``accepting`` a
    list of 0/1 flags.  Returns ``(m, delta2, accepting2)`` where the
    minimal automaton has initial state 0 and states numbered by
    breadth-first discovery in symbol order, so equal languages yield
    identical encodings.  Uses reachability pruning followed by Hopcroft
    partition refinement.
    """
    # Reachability prune (BFS from the initial state, symbol order).
    reach = [-1] * n
    order = [initial]
    reach[initial] = 0
    for q in order:
        base = q * k
        for a in range(k):
            t = delta[base + a]
            if reach[t] < 0:
                reach[t] = len(order)
                order.append(t)
    nr = len(order)
    rdelta = [0] * (nr * k)
    racc = [0] * nr
    for i, q in enumerate(order):
        base = q * k
        for a in range(k):
            rdelta[i * k + a] = reach[delta[base + a]]
        racc[i] = accepting[q]

    block = _hopcroft(nr, k, rdelta, racc)

    # Canonical BFS renumbering of the quotient automaton.
    nb = max(block) + 1
    rep = [-1] * nb
    for q in range(nr):
        b = block[q]
        if rep[b] < 0:
            rep[b] = q
    number = [-1] * nb
    b0 = block[0]
    number[b0] = 0
    out_order = [b0]
    delta2 = []
    acc2 = []
    for b in out_order:
        q = rep[b]
        for a in range(k):
            t = block[rdelta[q * k + a]]
            if number[t] < 0:
                number[t] = len(out_order)
                out_order.append(t)
    m = len(out_order)
    delta2 = [0] * (m * k)
    acc2 = [0] * m
    for b in out_order:
        i = number[b]
        q = rep[b]
        for a in range(k):
            delta2[i * k + a] = number[block[rdelta[q * k + a]]]
        acc2[i] = racc[rep[b]]
    return m, delta2, acc2


def _hopcroft(n, k, delta, accepting):
    """Hopcroft refinement on a reachable total DFA; returns block index per state."""
    # Inverse transitions as CSR.
    counts = [0] * (n * k)
    for q in range(n):
        for a in range(k):
            counts[delta[q * k + a] * k + a] += 1
    start = [0] * (n * k + 1)
    for i in range(n * k):
        start[i + 1] = start[i] + counts[i]
    fill = list(start[:-1])
    inv = [0] * (n * k)
    for q in range(n):
        for a in range(k):
            key = delta[q * k + a] * k + a
            inv[fill[key]] = q
            fill[key] += 1

    block = [0] * n
    blocks = [[q for q in range(n) if not accepting[q]]]
    acc = [q for q in range(n) if accepting[q]]
    if acc and blocks[0]:
        blocks.append(acc)
        for q in acc:
            block[q] = 1
    elif acc:
        blocks[0] = acc
    if len(blocks) == 1:
        return block

    worklist = [0 if len(blocks[0]) <= len(blocks[-1]) else len(blocks) - 1]
    in_work = [False] * 2
    in_work[worklist[0]] = True

    while worklist:
        w = worklist.pop()
        in_work[w] = False
        splitter = list(blocks[w])
        for a in range(k):
            # States with an a-transition into the splitter, grouped by block.
            touched = {}
            for t in splitter:
                key = t * k + a
                for idx in range(start[key], start[key + 1]):
                    q = inv[idx]
                    b = block[q]
                    if b in touched:
                        touched[b].append(q)
                    else:
                        touched[b] = [q]
            for b, hits in touched.items():
                if len(hits) == len(blocks[b]):
                    continue
                hitset = set(hits)
                stay = [q for q in blocks[b] if q not in hitset]
                nb = len(blocks)
                blocks[b] = stay
                blocks.append(hits)
                in_work.append(False)
                for q in hits:
                    block[q] = nb
                if in_work[b]:
                    worklist.append(nb)
                    in_work[nb] = True
                else:
                    small = b if len(stay) <= len(hits) else nb
                    worklist.append(small)
                    in_work[small] = True
    return block


def close_transformations(n, k, gens, limit):
    """Close ``k`` transformations of ``n`` points under composition.

    ``gens`` is flat (symbol*n + point).  Returns
    ``(m, elems, mult, gen_index, parent, via)``: the ``m`` closure
    elements (identity first, then breadth-first discovery by right
    multiplication in symbol order, i.e. shortlex word order), the full
    ``m*m`` multiplication table (``mult[i*m+j]`` = element of word_i
    followed by word_j), generator element indices, and the BFS tree
    (``parent[e]``, ``via[e]`` symbol) for word representatives.
    Raises ValueError when the closure exceeds ``limit`` elements.
    """
    ident = tuple(range(n))
    elems = [ident]
    index = {ident: 0}
    parent = [-1]
    via = [-1]
    gen_tabs = [tuple(gens[a * n : (a + 1) * n]) for a in range(k)]
    pos = 0
    while pos < len(elems):
        cur = elems[pos]
        for a in range(k):
            g = gen_tabs[a]
            new = tuple(g[cur[p]] for p in range(n))
            if new not in index:
                if len(elems) >= limit:
                    raise ValueError("transformation closure exceeds limit %d" % limit)
                index[new] = len(elems)
                elems.append(new)
                parent.append(pos)
                via.append(a)
        pos += 1
    m = len(elems)
    gen_index = [index[g] for g in gen_tabs]
    mult = [0] * (m * m)
    for i in range(m):
        ei = elems[i]
        row = i * m
        for j in range(m):
            ej = elems[j]
            mult[row + j] = index[tuple(ej[ei[p]] for p in range(n))]
    flat = [p for e in elems for p in e]
    return m, flat, mult, gen_index, parent, via
