"""Double description: generators of a cone given by linear inequalities.

The cone is {x : r . x >= 0 for every row r}. Its lineality space is the
nullspace of the rows; modulo that space the cone is pointed, and Motzkin's
incremental method with the combinatorial adjacency test yields the extreme
rays. All arithmetic is on Python integers.
"""

from fractions import Fraction

from .linalg import dot, independent_rows, inverse, nullspace, primitive, row_basis


def _prim_int(v):
    return primitive(v)


def dd_generators(rows, dim):
    """Return ``(rays, lineality)`` for the cone {x : r . x >= 0}.

    ``rays`` are primitive integer vectors lying in the orthogonal complement
    of the lineality space, so they are canonical up to ordering. The
    lineality basis is a list of primitive integer vectors.
    """
    rows = [tuple(Fraction(x) for x in r) for r in rows]
    rows = [r for r in rows if any(r)]
    lin = [_prim_int(v) for v in nullspace(rows, dim)]
    if not rows:
        return [], lin
    basis = row_basis(rows)  # spans the complement of the lineality space
    r = len(basis)
    # constraint matrix in coordinates y with x = sum y_i basis_i, scaled to ints
    m = [_prim_int([dot(row, b) for b in basis]) for row in rows]
    # deduplicate positively parallel constraints
    seen, uniq = set(), []
    for row in m:
        if row not in seen:
            seen.add(row)
            uniq.append(row)
    m = uniq
    init = independent_rows(m)[:r]
    binv = inverse([m[i] for i in init])
    rays = []
    for j in range(r):
        col = _prim_int([binv[i][j] for i in range(r)])
        tight = 0
        for t, i in enumerate(init):
            if t != j:
                tight |= 1 << i
        rays.append((col, tight))
    rest = [i for i in range(len(m)) if i not in set(init)]
    for i in rest:
        a = m[i]
        bit = 1 << i
        vals = [dot(a, y) for y, _ in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        new = []
        for k, v in enumerate(vals):
            if v > 0:
                new.append(rays[k])
            elif v == 0:
                new.append((rays[k][0], rays[k][1] | bit))
        if pos and neg:
            masks = [z for _, z in rays]
            for p in pos:
                for q in neg:
                    common = masks[p] & masks[q]
                    adjacent = True
                    for w in range(len(rays)):
                        if w != p and w != q and masks[w] & common == common:
                            adjacent = False
                            break
                    if not adjacent:
                        continue
                    vp, vq = vals[p], vals[q]
                    yp, yq = rays[p][0], rays[q][0]
                    comb = _prim_int([vp * b - vq * c for b, c in zip(yq, yp)])
                    new.append((comb, common | bit))
        rays = new
    out = []
    for y, _ in rays:
        x = [sum(yi * b[c] for yi, b in zip(y, basis)) for c in range(dim)]
        out.append(_prim_int(x))
    out = sorted(set(out))
    return out, lin
