"""Pure-Python kernels for word reduction and cover traces.

This module mirrors the compiled extension ``surfint._speedups``.  Both
expose the same four functions; ``surfint.backend`` picks whichever is
available.  Words are ``bytes`` whose values encode letters (see
``surfint.words``); height states are tuples of ints (arbitrary size).
"""


def free_reduce(w):
    """Freely reduce a word, cancelling adjacent inverse pairs."""
    out = bytearray()
    for x in w:
        if out and out[-1] == x ^ 1:
            out.pop()
        else:
            out.append(x)
    return bytes(out)


def normal_form(w, table):
    """Free reduction followed by repeated relator-piece replacement.

    ``table`` maps every factor of length >= 5 of a cyclic rotation of the
    relator (or its inverse) to the inverse of the complementary piece.
    Each replacement shortens the word by at least two letters, so this
    terminates; the result represents the same group element.
    """
    w = free_reduce(w)
    changed = True
    while changed:
        changed = False
        n = len(w)
        for i in range(n - 4):
            for m in (8, 7, 6, 5):
                if i + m > n:
                    continue
                rep = table.get(w[i:i + m])
                if rep is not None:
                    w = free_reduce(w[:i] + rep + w[i + m:])
                    changed = True
                    break
            if changed:
                break
    return w


def fold_gl2(w, mats, p):
    """Fold a word through eight 2x2 matrices mod p (one per letter code).

    ``mats`` is a flat tuple of 32 ints: matrix for letter code c occupies
    ``mats[4*c : 4*c+4]`` in row-major order.  Returns the product matrix
    as a 4-tuple; the empty word gives the identity.
    """
    a, b, c, d = 1, 0, 0, 1
    for x in w:
        o = 4 * x
        m0, m1, m2, m3 = mats[o], mats[o + 1], mats[o + 2], mats[o + 3]
        a, b, c, d = ((a * m0 + b * m2) % p, (a * m1 + b * m3) % p,
                      (c * m0 + d * m2) % p, (c * m1 + d * m3) % p)
    return (a, b, c, d)


def trace_state(w, heights, supports):
    """Trace a word through the cover tower from a height state.

    ``supports[j]`` is a 4-tuple (indexed by generator) of dicts mapping a
    length-j height prefix to the integer increment applied to coordinate
    j.  A positive letter advances every coordinate using increments read
    at the pre-step state; a negative letter retraces the edge crossed at
    the post-step state, so coordinates are rebuilt low-to-high with the
    already-updated prefix.  Returns the end state as a tuple.
    """
    h = list(heights)
    n = len(h)
    for x in w:
        g = x >> 1
        if x & 1 == 0:
            incs = None
            for j in range(n):
                d = supports[j][g]
                if d:
                    v = d.get(tuple(h[:j]))
                    if v:
                        if incs is None:
                            incs = [0] * n
                        incs[j] = v
            if incs is not None:
                for j in range(n):
                    if incs[j]:
                        h[j] += incs[j]
        else:
            for j in range(n):
                d = supports[j][g]
                if d:
                    v = d.get(tuple(h[:j]))
                    if v:
                        h[j] -= v
    return tuple(h)
