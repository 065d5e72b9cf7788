"""Sparse exact integer linear algebra for cocycle solving.

The only primitive needed is the kernel of an integer matrix.  Columns
are reduced by unimodular operations (gcd steps), so the returned basis
spans the *saturated* kernel lattice: any integer solution is an integer
combination of basis vectors.
"""

from math import gcd


def xgcd(a, b):
    """Extended gcd: returns (x, y, g) with x*a + y*b = g >= 0."""
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def kernel_basis(rows, ncols):
    """Integer kernel of the matrix with the given sparse rows.

    ``rows`` is a list of dicts mapping column index (0..ncols-1) to a
    nonzero integer.  Returns a list of kernel vectors, each a dict
    column->value, forming a basis of the saturation of the kernel.
    """
    # cols[c]: current column as {row_index: value}; recipe[c]: expression
    # of the current column in the original basis.
    cols = {c: {} for c in range(ncols)}
    for r, row in enumerate(rows):
        for c, v in row.items():
            if v:
                cols[c][r] = v
    recipe = {c: {c: 1} for c in range(ncols)}
    row_occ = [set() for _ in rows]
    for c, col in cols.items():
        for r in col:
            row_occ[r].add(c)

    def addmul(dst, src, f):
        if not f:
            return
        for k, v in src.items():
            nv = dst.get(k, 0) + f * v
            if nv:
                dst[k] = nv
            else:
                dst.pop(k, None)

    def combine(ci, cj, r):
        # unimodular op making cols[ci][r] = gcd, cols[cj][r] = 0
        a, b = cols[ci][r], cols[cj][r]
        x, y, g = xgcd(a, b)
        u, v = -(b // g), a // g
        for store in (cols, recipe):
            old_i, old_j = store[ci], store[cj]
            new_i, new_j = {}, {}
            for k in set(old_i) | set(old_j):
                ai, aj = old_i.get(k, 0), old_j.get(k, 0)
                ni = x * ai + y * aj
                nj = u * ai + v * aj
                if ni:
                    new_i[k] = ni
                if nj:
                    new_j[k] = nj
            if store is cols:
                for k in set(old_i) | set(old_j):
                    row_occ[k].discard(ci)
                    row_occ[k].discard(cj)
                for k in new_i:
                    row_occ[k].add(ci)
                for k in new_j:
                    row_occ[k].add(cj)
            store[ci], store[cj] = new_i, new_j

    active = set(range(ncols))
    order = sorted(range(len(rows)), key=lambda r: len(row_occ[r]))
    for r in order:
        live = sorted(c for c in row_occ[r] if c in active)
        if not live:
            continue
        while len(live) > 1:
            live.sort(key=lambda c: (abs(cols[c][r]), c))
            pivot = live[0]
            for c in live[1:]:
                combine(pivot, c, r)
            live = sorted(c for c in row_occ[r] if c in active)
        active.discard(live[0])

    basis = []
    for c in sorted(active):
        assert not cols[c], "column retired with nonzero entries"
        basis.append(dict(recipe[c]))
    return basis


def content(vec):
    """Gcd of the values of a sparse vector (0 for the zero vector)."""
    g = 0
    for v in vec.values():
        g = gcd(g, v)
    return g


def divide(vec, d):
    return {k: v // d for k, v in vec.items()}


def dot(vec, other):
    if len(other) < len(vec):
        vec, other = other, vec
    return sum(v * other.get(k, 0) for k, v in vec.items())


def gcd_combination(vectors, values):
    """Integer combination of ``vectors`` whose pairing value is gcd(values).

    ``values[i]`` is the value of a linear functional on ``vectors[i]``.
    Returns (combo, g) with g > 0, or (None, 0) if all values vanish.
    """
    combo, g = None, 0
    for vec, val in zip(vectors, values):
        if not val:
            continue
        if combo is None:
            combo, g = dict(vec), val
            continue
        if g % val == 0 and abs(val) < abs(g):
            combo, g = dict(vec), val
            continue
        x, y, g2 = xgcd(g, val)
        if abs(g2) == abs(g):
            continue
        new = {}
        for k in set(combo) | set(vec):
            nv = x * combo.get(k, 0) + y * vec.get(k, 0)
            if nv:
                new[k] = nv
        combo, g = new, g2
    if combo is None:
        return None, 0
    if g < 0:
        combo = {k: -v for k, v in combo.items()}
        g = -g
    return combo, g
