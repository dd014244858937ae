"""Exact linear algebra over the rationals and the integers.

Matrices are lists of rows. Rational entries are ``fractions.Fraction``;
integer routines work on plain ``int`` so that Python's bignums keep every
intermediate value exact.
"""

from fractions import Fraction
from math import gcd, lcm

Rat = Fraction


def to_rat(x):
    """Convert an int, Fraction or ``"p/q"`` string to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def rref(rows, ncols=None):
    """Reduced row echelon form. Returns (rows, pivot_columns)."""
    m = [[to_rat(x) for x in r] for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows, ncols=None):
    if not rows:
        return 0
    return len(rref(rows, ncols)[1])


def nullspace(rows, ncols):
    """Basis of {x : A x = 0} as a list of Fraction tuples."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    red, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, piv):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def independent_rows(rows):
    """Indices of a maximal linearly independent subset, chosen greedily."""
    chosen, basis = [], []
    for i, r in enumerate(rows):
        if rank(basis + [list(r)]) > len(basis):
            basis.append(list(r))
            chosen.append(i)
    return chosen


def row_basis(rows):
    """A basis (rows of an echelon form) of the row space."""
    if not rows:
        return []
    return [tuple(r) for r in rref(rows)[0]]


def solve(a, b):
    """Solve the square system a x = b exactly; raises on singular input."""
    n = len(a)
    aug = [list(map(to_rat, row)) + [to_rat(bi)] for row, bi in zip(a, b)]
    red, piv = rref(aug, n)
    if piv != list(range(n)):
        raise ZeroDivisionError("singular system")
    return tuple(row[n] for row in red)


def inverse(a):
    n = len(a)
    aug = [list(map(to_rat, row)) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(a)]
    red, piv = rref(aug, n)
    if piv != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def det(a):
    """Determinant by fraction-free Bareiss elimination on integers, else Fractions."""
    n = len(a)
    if n == 0:
        return 1
    if all(isinstance(x, int) for row in a for x in row):
        m = [list(row) for row in a]
        sign, prev = 1, 1
        for k in range(n - 1):
            if m[k][k] == 0:
                sw = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
                if sw is None:
                    return 0
                m[k], m[sw] = m[sw], m[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[n - 1][n - 1]
    m = [list(map(to_rat, row)) for row in a]
    out = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            out = -out
        out *= m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] / m[k][k]
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    return out


def primitive(v):
    """Scale a rational vector to the primitive integer vector with the same direction."""
    v = [to_rat(x) for x in v]
    den = lcm(*(x.denominator for x in v)) if v else 1
    ints = [int(x * den) for x in v]
    g = gcd(*ints)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def integer_kernel(rows, ncols):
    """Lattice basis of {x in Z^n : A x = 0} for a rational matrix A.

    Unimodular column operations bring A to column echelon form; the
    transformation columns past the last pivot then span the kernel over Z.
    """
    a = [list(primitive(r)) for r in rows if any(r)]
    u = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def colop(j, k, q):
        # column j -= q * column k
        for row in a:
            row[j] -= q * row[k]
        for row in u:
            row[j] -= q * row[k]

    def swap(j, k):
        for row in a:
            row[j], row[k] = row[k], row[j]
        for row in u:
            row[j], row[k] = row[k], row[j]

    col = 0
    for row in a:
        if col == ncols:
            break
        while True:
            nz = [j for j in range(col, ncols) if row[j] != 0]
            if not nz:
                break
            jmin = min(nz, key=lambda j: abs(row[j]))
            swap(col, jmin)
            for j in range(col + 1, ncols):
                if row[j]:
                    colop(j, col, row[j] // row[col])
            if all(row[j] == 0 for j in range(col + 1, ncols)):
                col += 1
                break
    kernel = [tuple(u[i][j] for i in range(ncols)) for j in range(col, ncols)]
    return lll_reduce(kernel)


def lll_reduce(basis, delta=Fraction(3, 4)):
    """LLL reduction of an integer lattice basis in exact arithmetic.

    Only used to tidy small kernel bases so that intrinsic coordinates stay short.
    """
    b = [list(v) for v in basis]
    n = len(b)
    if n <= 1:
        return [tuple(v) for v in b]

    def gso(b):
        bstar, mu = [], [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                mu[i][j] = Fraction(dot(b[i], bstar[j])) / dot(bstar[j], bstar[j])
                v = [x - mu[i][j] * y for x, y in zip(v, bstar[j])]
            bstar.append(v)
        return bstar, mu

    bstar, mu = gso(b)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                bstar, mu = gso(b)
        lhs = dot(bstar[k], bstar[k])
        rhs = (delta - mu[k][k - 1] ** 2) * dot(bstar[k - 1], bstar[k - 1])
        if lhs >= rhs:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            bstar, mu = gso(b)
            k = max(k - 1, 1)
    return [tuple(v) for v in b]


def gram_det(basis):
    """Determinant of the Gram matrix B B^T (1 for an empty basis)."""
    g = [[dot(u, v) for v in basis] for u in basis]
    return det(g)
