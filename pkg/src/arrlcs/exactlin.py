"""Exact linear algebra over the integers.

Everything here works with arbitrary-precision Python ints; no floats
appear anywhere.  Matrices are immutable and row-major.  A lattice is
the set of integer combinations of the rows of a basis matrix, viewed
as a sublattice of ZZ^ambient_rank.

Normal form conventions:

* ``hnf`` is the row-style Hermite normal form: nonzero rows only, each
  pivot positive, zeros below each pivot, and entries above a pivot
  reduced into ``[0, pivot)``.  It is the unique canonical form of the
  row span, so two lattices are equal iff their forms are identical.
* ``snf`` returns ``(divisors, left, right)`` with
  ``left @ m @ right`` diagonal, divisors positive and each dividing
  the next.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class IntMatrix:
    """Immutable integer matrix; entries stored as a tuple of row tuples."""

    __slots__ = ("entries", "rows", "cols")

    def __init__(self, rows: Iterable[Sequence[int]], cols: int | None = None):
        ents = tuple(tuple(int(x) for x in row) for row in rows)
        if ents:
            ncols = len(ents[0]) if cols is None else cols
            for row in ents:
                if len(row) != ncols:
                    raise ValueError("ragged rows")
        else:
            if cols is None:
                raise ValueError("empty matrix needs an explicit column count")
            ncols = cols
        object.__setattr__(self, "entries", ents)
        object.__setattr__(self, "rows", len(ents))
        object.__setattr__(self, "cols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @staticmethod
    def zeros(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix([[0] * cols for _ in range(rows)], cols)

    def transpose(self) -> "IntMatrix":
        if not self.entries:
            return IntMatrix([()] * self.cols, 0)
        return IntMatrix(list(zip(*self.entries)), self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.cols == 0:
            return IntMatrix.zeros(self.rows, other.cols)
        bt = list(zip(*other.entries))
        out = [
            [sum(x * y for x, y in zip(ra, cb)) for cb in bt]
            for ra in self.entries
        ]
        return IntMatrix(out, other.cols)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix(
            [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)],
            self.cols,
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + other.scale(-1)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix([[k * x for x in row] for row in self.entries], self.cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IntMatrix)
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        return hash((self.entries, self.cols))

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}x{self.cols})"


def vstack(*mats: IntMatrix) -> IntMatrix:
    cols = mats[0].cols
    rows: list[Sequence[int]] = []
    for m in mats:
        if m.cols != cols:
            raise ValueError("column mismatch in vstack")
        rows.extend(m.entries)
    return IntMatrix(rows, cols)


def hstack(*mats: IntMatrix) -> IntMatrix:
    nrows = mats[0].rows
    out = []
    for i in range(nrows):
        row: list[int] = []
        for m in mats:
            if m.rows != nrows:
                raise ValueError("row mismatch in hstack")
            row.extend(m.entries[i])
        out.append(row)
    return IntMatrix(out, sum(m.cols for m in mats))


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    if len(u) != len(v):
        raise ValueError("length mismatch")
    return sum(x * y for x, y in zip(u, v))


def vec_mat(v: Sequence[int], m: IntMatrix) -> tuple[int, ...]:
    """Row vector times matrix."""
    if len(v) != m.rows:
        raise ValueError("length mismatch")
    out = [0] * m.cols
    for x, row in zip(v, m.entries):
        if x:
            for j, y in enumerate(row):
                if y:
                    out[j] += x * y
    return tuple(out)


def mat_vec(m: IntMatrix, v: Sequence[int]) -> tuple[int, ...]:
    """Matrix times column vector."""
    if len(v) != m.cols:
        raise ValueError("length mismatch")
    return tuple(dot(row, v) for row in m.entries)


# -- row operation helpers on list-of-list workspaces --------------------


def _row_sub(a: list[list[int]], i: int, j: int, q: int) -> None:
    if q:
        rj = a[j]
        a[i] = [x - q * y for x, y in zip(a[i], rj)]


def _hnf_core(a: list[list[int]], ncols: int, u: list[list[int]] | None):
    """Reduce `a` to row HNF in place, mirroring ops on `u`.  Returns pivots."""
    nrows = len(a)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        while True:
            nz = [i for i in range(r, nrows) if a[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(a[i][c]))
            if i0 != r:
                a[r], a[i0] = a[i0], a[r]
                if u is not None:
                    u[r], u[i0] = u[i0], u[r]
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
                if u is not None:
                    u[r] = [-x for x in u[r]]
            clean = True
            for i in range(r + 1, nrows):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    _row_sub(a, i, r, q)
                    if u is not None:
                        _row_sub(u, i, r, q)
                    if a[i][c]:
                        clean = False
            if clean:
                break
        if r < nrows and a[r][c]:
            for i in range(r):
                q = a[i][c] // a[r][c]
                _row_sub(a, i, r, q)
                if u is not None:
                    _row_sub(u, i, r, q)
            pivots.append(c)
            r += 1
    return pivots


def hnf(m: IntMatrix) -> IntMatrix:
    """Row Hermite normal form with zero rows dropped (canonical)."""
    a = m.to_lists()
    pivots = _hnf_core(a, m.cols, None)
    return IntMatrix(a[: len(pivots)], m.cols)


def hnf_with_transform(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, list[int]]:
    """Return ``(h, u, pivots)`` with ``u @ m`` equal to ``h`` stacked on zero rows.

    ``u`` is square unimodular of size ``m.rows``; ``h`` has the zero rows
    dropped, so ``len(pivots) == h.rows`` is the rank.
    """
    a = m.to_lists()
    u = IntMatrix.identity(m.rows).to_lists()
    pivots = _hnf_core(a, m.cols, u)
    return IntMatrix(a[: len(pivots)], m.cols), IntMatrix(u, m.rows), pivots


def kernel_basis(m: IntMatrix) -> IntMatrix:
    """Canonical basis of ``{v in ZZ^cols : m @ v^T = 0}``."""
    _, u, pivots = hnf_with_transform(m.transpose())
    rank = len(pivots)
    return hnf(IntMatrix(u.entries[rank:], m.cols))


def _snf_full(m: IntMatrix):
    """Smith form with transforms and their inverses.

    Returns ``(divisors, left, right, left_inv, right_inv)`` where
    ``left @ m @ right`` is diagonal with the given positive divisor
    chain and ``left_inv``/``right_inv`` are exact inverses.
    """
    nr, nc = m.rows, m.cols
    a = m.to_lists()
    left = IntMatrix.identity(nr).to_lists()
    left_inv = IntMatrix.identity(nr).to_lists()
    right = IntMatrix.identity(nc).to_lists()
    right_inv = IntMatrix.identity(nc).to_lists()

    def row_sub(i, j, q):
        _row_sub(a, i, j, q)
        _row_sub(left, i, j, q)
        for row in left_inv:  # inverse op: column j += q * column i
            row[j] += q * row[i]

    def col_sub(j, i, q):
        if q:
            for row in a:
                row[j] -= q * row[i]
            for row in right:
                row[j] -= q * row[i]
            ri, rj = right_inv[i], right_inv[j]
            right_inv[i] = [x + q * y for x, y in zip(ri, rj)]

    def row_swap(i, j):
        if i != j:
            a[i], a[j] = a[j], a[i]
            left[i], left[j] = left[j], left[i]
            for row in left_inv:
                row[i], row[j] = row[j], row[i]

    def col_swap(i, j):
        if i != j:
            for row in a:
                row[i], row[j] = row[j], row[i]
            for row in right:
                row[i], row[j] = row[j], row[i]
            right_inv[i], right_inv[j] = right_inv[j], right_inv[i]

    def row_neg(i):
        a[i] = [-x for x in a[i]]
        left[i] = [-x for x in left[i]]
        for row in left_inv:
            row[i] = -row[i]

    t = 0
    while True:
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                x = a[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        row_swap(t, best[1])
        col_swap(t, best[2])
        while True:
            # clear column t, then row t; repeat while either dirties the other
            for i in range(nr):
                if i != t and a[i][t]:
                    q = a[i][t] // a[t][t]
                    row_sub(i, t, q)
                    if a[i][t]:
                        row_swap(t, i)
            if any(a[i][t] for i in range(nr) if i != t):
                continue
            for j in range(nc):
                if j != t and a[t][j]:
                    q = a[t][j] // a[t][t]
                    col_sub(j, t, q)
                    if a[t][j]:
                        col_swap(t, j)
            if any(a[t][j] for j in range(nc) if j != t):
                continue
            if any(a[i][t] for i in range(nr) if i != t):
                continue
            # enforce pivot | remaining block before moving on
            bad = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if a[i][j] % a[t][t]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_sub(t, bad, -1)
        if a[t][t] < 0:
            row_neg(t)
        t += 1
    divisors = tuple(a[k][k] for k in range(t))
    return (
        divisors,
        IntMatrix(left, nr),
        IntMatrix(right, nc),
        IntMatrix(left_inv, nr),
        IntMatrix(right_inv, nc),
    )


def snf(m: IntMatrix) -> tuple[tuple[int, ...], IntMatrix, IntMatrix]:
    """Smith normal form: ``(divisors, left, right)``, ``left @ m @ right`` diagonal."""
    divisors, left, right, _, _ = _snf_full(m)
    return divisors, left, right


# -- lattices -------------------------------------------------------------


class Lattice:
    """Integer row span of ``basis`` inside ZZ^ambient_rank."""

    __slots__ = ("ambient_rank", "basis", "canonical_form", "_reduction", "_perp")

    def __init__(self, ambient_rank: int, basis: IntMatrix | Iterable[Sequence[int]]):
        if not isinstance(basis, IntMatrix):
            basis = IntMatrix(basis, ambient_rank)
        if basis.cols != ambient_rank:
            raise ValueError("basis width does not match ambient rank")
        object.__setattr__(self, "ambient_rank", ambient_rank)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "canonical_form", hnf(basis))
        object.__setattr__(self, "_reduction", None)
        object.__setattr__(self, "_perp", None)

    def __setattr__(self, name, value):
        raise AttributeError("Lattice is immutable")

    @staticmethod
    def zero(ambient_rank: int) -> "Lattice":
        return Lattice(ambient_rank, IntMatrix([], ambient_rank))

    @staticmethod
    def full(ambient_rank: int) -> "Lattice":
        return Lattice(ambient_rank, IntMatrix.identity(ambient_rank))

    @property
    def rank(self) -> int:
        return self.canonical_form.rows

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Lattice)
            and self.ambient_rank == other.ambient_rank
            and self.canonical_form == other.canonical_form
        )

    def __hash__(self) -> int:
        return hash((self.ambient_rank, self.canonical_form))

    def __repr__(self) -> str:
        return f"Lattice(rank {self.rank} in ZZ^{self.ambient_rank})"

    def _reduction_data(self):
        if self._reduction is None:
            h, u, pivots = hnf_with_transform(self.basis)
            keep = IntMatrix(u.entries[: len(pivots)], u.cols)
            object.__setattr__(self, "_reduction", (h, keep, pivots))
        return self._reduction

    def _perp_rows(self) -> IntMatrix:
        if self._perp is None:
            object.__setattr__(self, "_perp", kernel_basis(self.basis))
        return self._perp


@dataclass(frozen=True)
class Witness:
    """Functional separating a vector from a lattice.

    ``functional . w ≡ 0 (mod modulus)`` for every lattice element ``w``
    while ``functional . v`` is not.  ``modulus == 0`` means honest
    integer orthogonality: the functional kills the lattice exactly but
    not the vector, so the failure is already rational.
    """

    functional: tuple[int, ...]
    modulus: int
    pairing: int


@dataclass(frozen=True)
class MembershipResult:
    ok: bool
    coefficients: tuple[int, ...] | None = None
    witness: Witness | None = None

    def __bool__(self) -> bool:
        return self.ok


def member(v: Sequence[int], lat: Lattice) -> MembershipResult:
    """Decide ``v in lat``; return combination coefficients or a witness.

    On success ``coefficients`` expresses ``v`` over ``lat.basis`` rows.
    On failure the witness has ``modulus == 0`` (rational failure) or a
    positive modulus dividing the pivot product (divisibility failure).
    """
    v = tuple(int(x) for x in v)
    if len(v) != lat.ambient_rank:
        raise ValueError("vector length does not match ambient rank")
    h, keep, pivots = lat._reduction_data()
    rank = len(pivots)
    rem = list(v)
    coeffs: list[int] = []
    for k in range(rank):
        c = pivots[k]
        piv = h.entries[k][c]
        q, r = divmod(rem[c], piv)
        if r:
            return MembershipResult(False, witness=_divisor_witness(h, pivots, k, v))
        coeffs.append(q)
        if q:
            hk = h.entries[k]
            rem = [x - q * y for x, y in zip(rem, hk)]
    if any(rem):
        for f in lat._perp_rows().entries:
            pairing = dot(f, v)
            if pairing:
                return MembershipResult(
                    False, witness=Witness(tuple(f), 0, pairing)
                )
        raise AssertionError("residue outside span but no orthogonal witness")
    return MembershipResult(True, coefficients=vec_mat(coeffs, keep))


def _divisor_witness(h: IntMatrix, pivots: list[int], k: int, v: Sequence[int]) -> Witness:
    """Adjugate-style witness for a divisibility failure at pivot row ``k``.

    Let P be the square pivot-column submatrix of ``h`` (upper triangular).
    The functional carries ``det(P) * (P^{-1} e_k)`` on the pivot
    coordinates; it maps the lattice into ``det(P) ZZ`` exactly and the
    vector outside it.
    """
    from fractions import Fraction

    rank = len(pivots)
    p = [[h.entries[i][pivots[j]] for j in range(rank)] for i in range(rank)]
    det = 1
    for i in range(rank):
        det *= p[i][i]
    # back-substitute P x = e_k
    x = [Fraction(0)] * rank
    for i in range(rank - 1, -1, -1):
        s = Fraction(1 if i == k else 0)
        for j in range(i + 1, rank):
            s -= p[i][j] * x[j]
        x[i] = s / p[i][i]
    f = [0] * h.cols
    for i in range(rank):
        fi = x[i] * det
        assert fi.denominator == 1
        f[pivots[i]] = int(fi)
    pairing = dot(f, v) % det
    return Witness(tuple(f), det, pairing)


def lattice_sum(a: Lattice, b: Lattice) -> Lattice:
    """Smallest lattice containing both; basis is the concatenation."""
    if a.ambient_rank != b.ambient_rank:
        raise ValueError("ambient rank mismatch")
    return Lattice(a.ambient_rank, vstack(a.basis, b.basis))


def lattice_equal(a: Lattice, b: Lattice) -> bool:
    return a == b


def perp(lat: Lattice) -> Lattice:
    """Integer functionals vanishing on the lattice (ambient dual, same coords)."""
    return Lattice(lat.ambient_rank, lat._perp_rows())


def saturate(lat: Lattice) -> Lattice:
    """Largest sublattice of the ambient with the same rational span."""
    return perp(perp(lat))


@dataclass(frozen=True)
class QuotientPresentation:
    """Integer presentation of ``ZZ^ambient_rank / lattice``.

    ``projection`` (ambient x free_rank) maps a vector to coordinates on
    the free part; ``section`` (free_rank x ambient) is a right inverse,
    i.e. ``v -> section_row_combination`` lifts quotient coordinates.
    ``elementary_divisors`` lists the full SNF diagonal of the relator
    lattice; the quotient is torsion-free iff they are all 1.
    """

    ambient_rank: int
    relators: Lattice
    elementary_divisors: tuple[int, ...]
    free_rank: int
    projection: IntMatrix
    section: IntMatrix

    @property
    def is_torsion_free(self) -> bool:
        return all(d == 1 for d in self.elementary_divisors)


def quotient_presentation(lat: Lattice) -> QuotientPresentation:
    m = lat.canonical_form
    divisors, _, right, _, right_inv = _snf_full(m)
    s = len(divisors)
    n = lat.ambient_rank
    projection = IntMatrix([row[s:] for row in right.entries], n - s)
    section = IntMatrix(right_inv.entries[s:], n)
    return QuotientPresentation(
        ambient_rank=n,
        relators=lat,
        elementary_divisors=divisors,
        free_rank=n - s,
        projection=projection,
        section=section,
    )
