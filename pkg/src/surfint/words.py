"""Exact arithmetic in the genus-2 surface group.

The group is presented on four generators a, b, p, q with the single
relator R = a b a^-1 b^-1 q p q^-1 p^-1.  Letters are coded as ints::

    a=0  a^-1=1  b=2  b^-1=3  p=4  p^-1=5  q=6  q^-1=7

so that ``x ^ 1`` inverts a letter, ``x >> 1`` is the generator index and
the code order realises the shortlex letter order a < a^-1 < b < ... .
Words are ``bytes`` of letter codes; the ASCII form uses aAbBpPqQ with
capitals for inverses and "1" for the empty word.

Every factor of length >= 5 of a cyclic rotation of R or R^-1 is more
than half a relator, so replacing it by the inverse of the complementary
piece shortens the word.  The presentation is C'(1/6) (all pieces have
length 1), hence this procedure decides the word problem: a word equals
the identity iff it reduces to the empty word.  Reduced storage forms are
geodesic but not unique; element equality always goes through
``is_identity(mul(u, inv(v)))``.
"""

import random
from functools import lru_cache

from .backend import BACKEND, fold_gl2, free_reduce, normal_form, trace_state

__all__ = [
    "BACKEND", "N_LETTERS", "RELATOR", "GENERATORS",
    "from_string", "to_string", "inv", "mul", "dehn_reduce", "is_identity",
    "equal", "abelianize", "iter_reduced_words", "iter_ball", "ball",
    "element_key", "rand_reduced_word", "free_reduce", "trace_state",
]

N_LETTERS = 8
_ALPHA = "aAbBpPqQ"
_CODE = {ch: i for i, ch in enumerate(_ALPHA)}

GENERATORS = tuple(bytes([2 * i]) for i in range(4))   # a, b, p, q


def from_string(s):
    """Parse an ASCII word ("1" or empty string = identity)."""
    if s in ("1", ""):
        return b""
    try:
        return bytes(_CODE[ch] for ch in s)
    except KeyError as exc:
        raise ValueError(f"bad letter {exc.args[0]!r} in word {s!r}") from None


def to_string(w):
    return "".join(_ALPHA[x] for x in w) if w else "1"


def inv(w):
    """Inverse word: reverse and flip every letter."""
    return bytes(x ^ 1 for x in reversed(w))


RELATOR = from_string("abABqpQP")


def _rotations(w):
    return [w[i:] + w[:i] for i in range(len(w))]


def _build_tables():
    table = {}
    for rot in _rotations(RELATOR) + _rotations(inv(RELATOR)):
        for m in range(5, 9):
            head, tail = rot[:m], rot[m:]
            table[head] = inv(tail)
    forbidden = frozenset(k for k in table if len(k) == 5)
    return table, forbidden


_TABLE, _FORBIDDEN5 = _build_tables()


def dehn_reduce(w):
    """Canonical storage form: freely reduced, no >half-relator factor."""
    return normal_form(w, _TABLE)


def mul(u, v):
    return normal_form(u + v, _TABLE)


def is_identity(w):
    return normal_form(w, _TABLE) == b""


def equal(u, v):
    return normal_form(u + inv(v), _TABLE) == b""


def abelianize(w):
    """Exponent-sum vector in the basis (a, b, p, q)."""
    e = [0, 0, 0, 0]
    for x in w:
        e[x >> 1] += 1 - 2 * (x & 1)
    return tuple(e)


# ---------------------------------------------------------------------------
# Homomorphisms to GL(2, F_p), used as exact-arithmetic hash keys when
# enumerating group elements.  Any matrices with [A,B] = [P,Q] define a
# homomorphism (the relator folds to the identity); faithfulness is not
# needed because hash buckets are always confirmed with the word problem.
# ---------------------------------------------------------------------------

_HASH_PRIMES = (2000000011, 2000000033)


def _mat_mul(m, n, p):
    return ((m[0] * n[0] + m[1] * n[2]) % p, (m[0] * n[1] + m[1] * n[3]) % p,
            (m[2] * n[0] + m[3] * n[2]) % p, (m[2] * n[1] + m[3] * n[3]) % p)


def _mat_inv(m, p):
    det = (m[0] * m[3] - m[1] * m[2]) % p
    d = pow(det, -1, p)
    return (m[3] * d % p, -m[1] * d % p, -m[2] * d % p, m[0] * d % p)


def _commutator(m, n, p):
    return _mat_mul(_mat_mul(m, n, p), _mat_mul(_mat_inv(m, p), _mat_inv(n, p), p), p)


def _nullspace_mod(rows, p):
    """Nullspace basis of a small matrix over F_p (rows of equal length)."""
    rows = [list(r) for r in rows]
    ncols = len(rows[0])
    pivots = {}
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] % p), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        s = pow(rows[r][c], -1, p)
        rows[r] = [x * s % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        pivots[c] = r
        r += 1
    basis = []
    for c in range(ncols):
        if c in pivots:
            continue
        vec = [0] * ncols
        vec[c] = 1
        for pc, pr in pivots.items():
            vec[pc] = (-rows[pr][c]) % p
        basis.append(tuple(vec))
    return basis


def _find_quadruple(p, seed):
    """Deterministic search for A, B, P, Q in GL(2,F_p) with [A,B] = [P,Q]."""
    rng = random.Random(seed)

    def rand_mat():
        while True:
            m = tuple(rng.randrange(p) for _ in range(4))
            if (m[0] * m[3] - m[1] * m[2]) % p:
                return m

    while True:
        A, B = rand_mat(), rand_mat()
        C = _commutator(A, B, p)
        c00, c01, c10, c11 = C
        # Build P with tr(adj P) = tr(adj(P) C); then P^-1 C is conjugate
        # to P^-1 (same trace and det), so [P,Q] = C has a solution Q.
        coeff = (1 - c11) % p
        if coeff == 0:
            continue
        y, z, w = (rng.randrange(p) for _ in range(3))
        x = (-(y * c10 + z * c01 + w * ((1 - c00) % p))) * pow(coeff, -1, p) % p
        P = (x, y, z, w)
        if (P[0] * P[3] - P[1] * P[2]) % p == 0:
            continue
        M = _mat_inv(P, p)
        X = _mat_mul(M, C, p)
        # Solve Q M = X Q as a linear system in the entries of Q.
        rows = [
            (M[0] - X[0], M[2], -X[1], 0),
            (M[1], M[3] - X[0], 0, -X[1]),
            (-X[2], 0, M[0] - X[3], M[2]),
            (0, -X[2], M[1], M[3] - X[3]),
        ]
        basis = _nullspace_mod([[v % p for v in row] for row in rows], p)
        if not basis:
            continue
        Q = None
        for _ in range(64):
            coeffs = [rng.randrange(p) for _ in basis]
            cand = tuple(sum(cf * b[i] for cf, b in zip(coeffs, basis)) % p
                         for i in range(4))
            if (cand[0] * cand[3] - cand[1] * cand[2]) % p:
                Q = cand
                break
        if Q is None:
            continue
        if _commutator(P, Q, p) != C:
            continue
        mats = []
        for m in (A, B, P, Q):   # letter codes 0..7 = a, a^-1, b, b^-1, ...
            mats.extend(m)
            mats.extend(_mat_inv(m, p))
        flat = tuple(mats)
        if fold_gl2(RELATOR, flat, p) != (1, 0, 0, 1):
            continue
        return flat


@lru_cache(maxsize=None)
def _hash_tables():
    return tuple((p, _find_quadruple(p, seed=31 + 17 * i))
                 for i, p in enumerate(_HASH_PRIMES))


def element_key(w):
    """Hash key constant on group elements (two GL(2,F_p) folds)."""
    parts = []
    for p, mats in _hash_tables():
        parts.extend(fold_gl2(w, mats, p))
    return tuple(parts)


# ---------------------------------------------------------------------------
# Ball enumeration
# ---------------------------------------------------------------------------

def iter_reduced_words(max_len, *, min_len=0):
    """All storage-form words of length min_len..max_len, shortlex order.

    These are exactly the freely reduced words avoiding the sixteen
    forbidden 5-letter relator factors.  No element deduplication.
    """
    if min_len == 0:
        yield b""
    word = bytearray()

    def extend(remaining):
        for x in range(N_LETTERS):
            if word and word[-1] == x ^ 1:
                continue
            word.append(x)
            if len(word) >= 5 and bytes(word[-5:]) in _FORBIDDEN5:
                word.pop()
                continue
            if remaining == 1:
                yield bytes(word)
            else:
                yield from extend(remaining - 1)
            word.pop()

    for target in range(max(1, min_len), max_len + 1):
        yield from extend(target)


def iter_ball(max_len):
    """Each group element of word length <= max_len exactly once, shortlex.

    Elements are identified by hash key and confirmed with the word
    problem, so the output is exact: the first (hence shortlex-least)
    geodesic representative of each element is emitted.
    """
    buckets = {}
    for w in iter_reduced_words(max_len):
        key = element_key(w)
        hits = buckets.get(key)
        if hits is None:
            buckets[key] = [w]
            yield w
        else:
            if any(normal_form(w + inv(u), _TABLE) == b"" for u in hits):
                continue
            hits.append(w)
            yield w


@lru_cache(maxsize=4)
def ball(max_len):
    """Cached list of canonical elements with |w| <= max_len (incl. identity)."""
    return tuple(iter_ball(max_len))


def rand_reduced_word(rng, length):
    """Random freely reduced word of exactly the given length."""
    out = bytearray()
    while len(out) < length:
        x = rng.randrange(N_LETTERS)
        if out and out[-1] == x ^ 1:
            continue
        out.append(x)
    return dehn_reduce(bytes(out))
