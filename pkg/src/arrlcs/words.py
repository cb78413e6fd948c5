"""Free-group words, arrangement relators, and the truncated Magnus map.

Generators are w1..wn, one per finite line of a configuration (line 0,
the line at infinity, has none).  Words are stored freely reduced as
tuples of signed indices: +i for wi, -i for its inverse.

Group commutators follow [a, b] = a^-1 b^-1 a b; the Magnus expansion
sends wi to 1 + Xi and wi^-1 to 1 - Xi + Xi^2 - Xi^3, truncated in
degree 3, so commutator brackets match [x, y] = xy - yx on the graded
pieces.  Degree-d components are sparse dicts keyed by words in the
free associative algebra (tuples of generator indices).

The Lie bases used for coordinates are Lyndon bases: for each Lyndon
word the bracketing of its standard factorization.  Expansion of such a
bracketing is the word itself plus lexicographically larger words of
the same letter content, so coordinates are read off by a
division-free triangular sweep.
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .config import Configuration, IncidenceIndex


class NotInGamma(ValueError):
    """Series has a nonzero component below the requested degree."""


class NotLieElement(ValueError):
    """Degree component is not in the span of the Lie basis expansions."""


# -- words ------------------------------------------------------------------


class Word:
    """Freely reduced word in the free group on w1, w2, ..."""

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[int] = ()):
        stack: list[int] = []
        for x in letters:
            x = int(x)
            if x == 0:
                raise ValueError("letter index 0 is reserved")
            if stack and stack[-1] == -x:
                stack.pop()
            else:
                stack.append(x)
        object.__setattr__(self, "letters", tuple(stack))

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    @staticmethod
    def gen(i: int, exponent: int = 1) -> "Word":
        if i <= 0:
            raise ValueError("generator index must be positive")
        if exponent >= 0:
            return Word([i] * exponent)
        return Word([-i] * (-exponent))

    @staticmethod
    def identity() -> "Word":
        return Word()

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word([-x for x in reversed(self.letters)])

    def conjugated(self, g: "Word") -> "Word":
        """g^-1 * self * g."""
        return g.inverse() * self * g

    def relabeled(self, line_map: Mapping[int, int]) -> "Word":
        """Rename generators by a line relabeling (identity where unmapped)."""
        out = []
        for x in self.letters:
            i = abs(x)
            j = line_map.get(i, i)
            out.append(j if x > 0 else -j)
        return Word(out)

    def __pow__(self, k: int) -> "Word":
        if k < 0:
            return self.inverse() ** (-k)
        out = Word()
        for _ in range(k):
            out = out * self
        return out

    def is_identity(self) -> bool:
        return not self.letters

    def exponent_sums(self, n: int) -> tuple[int, ...]:
        out = [0] * n
        for x in self.letters:
            i = abs(x)
            if i > n:
                raise ValueError(f"letter w{i} outside range 1..{n}")
            out[i - 1] += 1 if x > 0 else -1
        return tuple(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        parts = []
        k = 0
        while k < len(self.letters):
            x = self.letters[k]
            j = k
            while j < len(self.letters) and self.letters[j] == x:
                j += 1
            e = (j - k) if x > 0 else -(j - k)
            parts.append(f"w{abs(x)}" if e == 1 else f"w{abs(x)}^{e}")
            k = j
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Word({self})"


_TOKEN = re.compile(r"^w(\d+)(?:\^(-?\d+))?$")


def parse_word(text: str) -> Word:
    """Parse the whitespace-separated word syntax, e.g. 'w6^-1 w3^-1'."""
    text = text.strip()
    if text in ("", "1"):
        return Word()
    letters: list[int] = []
    for token in text.split():
        m = _TOKEN.match(token)
        if not m:
            raise ValueError(f"bad word token {token!r}")
        i = int(m.group(1))
        if i == 0:
            raise ValueError("generator index 0 is reserved for the infinity line")
        e = int(m.group(2)) if m.group(2) is not None else 1
        letters.extend([i if e > 0 else -i] * abs(e))
    return Word(letters)


def commutator(a: Word, b: Word) -> Word:
    return a.inverse() * b.inverse() * a * b


# -- conjugator maps --------------------------------------------------------


_FLAG_KEY = re.compile(r"^\((\d+),\s*([^)]+)\)$")


def _check_flag(config: Configuration, idx: IncidenceIndex, i: int, p: str) -> None:
    if (i, p) not in idx.pair_pos:
        raise ValueError(f"({i},{p}) is not a line/point flag off the infinity line")


class GMap:
    """Assignment of a conjugating word to each flag; defaults to identity."""

    __slots__ = ("config", "index", "assignments")

    def __init__(self, config: Configuration, assignments: Mapping[tuple[int, str], Word] | None = None):
        idx = IncidenceIndex(config)
        clean: dict[tuple[int, str], Word] = {}
        for (i, p), w in (assignments or {}).items():
            _check_flag(config, idx, i, p)
            if not w.is_identity():
                clean[(i, p)] = w
        object.__setattr__(self, "config", config)
        object.__setattr__(self, "index", idx)
        object.__setattr__(self, "assignments", clean)

    def __setattr__(self, name, value):
        raise AttributeError("GMap is immutable")

    def value(self, i: int, p: str) -> Word:
        return self.assignments.get((i, p), Word())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GMap)
            and self.config == other.config
            and self.assignments == other.assignments
        )

    def __hash__(self) -> int:
        return hash((self.config, tuple(sorted(self.assignments.items()))))

    def to_json_dict(self) -> dict:
        return {f"({i},{p})": str(w) for (i, p), w in sorted(self.assignments.items(), key=lambda kv: (kv[0][1], kv[0][0]))}

    @staticmethod
    def from_json_dict(config: Configuration, data: Mapping[str, str]) -> "GMap":
        assignments = {}
        for key, text in data.items():
            m = _FLAG_KEY.match(key.strip())
            if not m:
                raise ValueError(f"bad flag key {key!r}; expected '(i,point)'")
            assignments[(int(m.group(1)), m.group(2).strip())] = parse_word(text)
        return GMap(config, assignments)


class AbelianGMap:
    """Flag-indexed vectors in ZZ^n (n = number of finite lines)."""

    __slots__ = ("config", "index", "values")

    def __init__(self, config: Configuration, values: Mapping[tuple[int, str], Sequence[int]] | None = None):
        idx = IncidenceIndex(config)
        n = idx.n
        clean = {}
        for (i, p), v in (values or {}).items():
            _check_flag(config, idx, i, p)
            v = tuple(int(x) for x in v)
            if len(v) != n:
                raise ValueError("abelian value has wrong length")
            if any(v):
                clean[(i, p)] = v
        object.__setattr__(self, "config", config)
        object.__setattr__(self, "index", idx)
        object.__setattr__(self, "values", clean)

    def __setattr__(self, name, value):
        raise AttributeError("AbelianGMap is immutable")

    def value(self, i: int, p: str) -> tuple[int, ...]:
        return self.values.get((i, p), (0,) * self.index.n)

    def __sub__(self, other: "AbelianGMap") -> "AbelianGMap":
        if self.config != other.config:
            raise ValueError("different configurations")
        keys = set(self.values) | set(other.values)
        return AbelianGMap(
            self.config,
            {k: tuple(a - b for a, b in zip(self.value(*k), other.value(*k))) for k in keys},
        )

    def __add__(self, other: "AbelianGMap") -> "AbelianGMap":
        if self.config != other.config:
            raise ValueError("different configurations")
        keys = set(self.values) | set(other.values)
        return AbelianGMap(
            self.config,
            {k: tuple(a + b for a, b in zip(self.value(*k), other.value(*k))) for k in keys},
        )

    def is_zero(self) -> bool:
        return not self.values

    def vector(self) -> tuple[int, ...]:
        """Flatten over the index pair order, n coordinates per flag."""
        n = self.index.n
        out = [0] * (len(self.index.pairs) * n)
        for (i, p), v in self.values.items():
            base = self.index.pair_pos[(i, p)] * n
            for j, x in enumerate(v):
                out[base + j] = x
        return tuple(out)

    @staticmethod
    def from_vector(config: Configuration, vec: Sequence[int]) -> "AbelianGMap":
        idx = IncidenceIndex(config)
        n = idx.n
        if len(vec) != len(idx.pairs) * n:
            raise ValueError("vector length mismatch")
        vals = {}
        for k, flag in enumerate(idx.pairs):
            chunk = tuple(vec[k * n : (k + 1) * n])
            if any(chunk):
                vals[flag] = chunk
        return AbelianGMap(config, vals)


def abelianize(g: GMap) -> AbelianGMap:
    n = g.index.n
    return AbelianGMap(g.config, {flag: w.exponent_sums(n) for flag, w in g.assignments.items()})


# -- relators ---------------------------------------------------------------


def conjugated_generators(config: Configuration, g: GMap, p: str) -> list[tuple[int, Word]]:
    """[(i, g(i,p)^-1 wi g(i,p))] for the lines through p, ascending."""
    return [
        (i, Word.gen(i).conjugated(g.value(i, p)))
        for i in config.lines_through(p)
    ]


def relators_from_g(config: Configuration, g: GMap) -> dict[tuple[int, str], Word]:
    """One relator per non-minimal flag of each finite point.

    At a point p with lines i_1 < ... < i_k the cyclic products are
    c_a = w(i_a) w(i_{a-1}) ... w(i_1) w(i_k) ... w(i_{a+1}) with the
    conjugated generators w(i) = g(i,p)^-1 wi g(i,p); the relator at
    the flag (i_a, p) is c_{a-1}^-1 c_a, which also equals
    [w(i_a), c_a].  The a = 1 relator is the redundant one and is
    dropped.
    """
    idx = g.index
    out: dict[tuple[int, str], Word] = {}
    for p in idx.p0:
        ws = conjugated_generators(config, g, p)
        k = len(ws)
        cs = []
        for a in range(1, k + 1):
            prod = Word()
            for b in range(a - 1, -1, -1):
                prod = prod * ws[b][1]
            for b in range(k - 1, a - 1, -1):
                prod = prod * ws[b][1]
            cs.append(prod)
        for a in range(2, k + 1):
            out[(ws[a - 1][0], p)] = cs[a - 2].inverse() * cs[a - 1]
    return out


def relator_at_flag(config: Configuration, g: GMap, i: int, p: str) -> Word:
    """[w(i), c_a] at the flag, defined for the minimal line too."""
    ws = conjugated_generators(config, g, p)
    lines = [j for j, _ in ws]
    a = lines.index(i) + 1
    k = len(ws)
    prod = Word()
    for b in range(a - 1, -1, -1):
        prod = prod * ws[b][1]
    for b in range(k - 1, a - 1, -1):
        prod = prod * ws[b][1]
    return commutator(ws[a - 1][1], prod)


# -- truncated Magnus expansion ---------------------------------------------


class TruncatedSeries:
    """Degree-<=3 part of a free associative series with integer coefficients."""

    __slots__ = ("unit", "terms")

    def __init__(self, unit: int = 0, terms: Mapping[int, Mapping[tuple[int, ...], int]] | None = None):
        clean: dict[int, dict[tuple[int, ...], int]] = {1: {}, 2: {}, 3: {}}
        for d, comp in (terms or {}).items():
            if d not in (1, 2, 3):
                raise ValueError("degrees 1..3 only")
            for w, c in comp.items():
                if len(w) != d:
                    raise ValueError("word length does not match degree")
                if c:
                    clean[d][tuple(w)] = int(c)
        object.__setattr__(self, "unit", int(unit))
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("TruncatedSeries is immutable")

    @staticmethod
    def one() -> "TruncatedSeries":
        return TruncatedSeries(1)

    @staticmethod
    def letter(i: int, sign: int) -> "TruncatedSeries":
        """Expansion of a single group letter wi^(+-1)."""
        if sign > 0:
            return TruncatedSeries(1, {1: {(i,): 1}})
        return TruncatedSeries(
            1, {1: {(i,): -1}, 2: {(i, i): 1}, 3: {(i, i, i): -1}}
        )

    def component(self, d: int) -> dict[tuple[int, ...], int]:
        return dict(self.terms[d])

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        out: dict[int, dict[tuple[int, ...], int]] = {1: {}, 2: {}, 3: {}}

        def acc(d, w, c):
            if c:
                comp = out[d]
                comp[w] = comp.get(w, 0) + c

        for d in (1, 2, 3):
            for w, c in self.terms[d].items():
                acc(d, w, c * other.unit)
            for w, c in other.terms[d].items():
                acc(d, w, c * self.unit)
        for d1 in (1, 2):
            for d2 in range(1, 4 - d1):
                for w1, c1 in self.terms[d1].items():
                    for w2, c2 in other.terms[d2].items():
                        acc(d1 + d2, w1 + w2, c1 * c2)
        return TruncatedSeries(self.unit * other.unit, out)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        out = {d: dict(self.terms[d]) for d in (1, 2, 3)}
        for d in (1, 2, 3):
            for w, c in other.terms[d].items():
                out[d][w] = out[d].get(w, 0) + c
        return TruncatedSeries(self.unit + other.unit, out)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        out = {d: dict(self.terms[d]) for d in (1, 2, 3)}
        for d in (1, 2, 3):
            for w, c in other.terms[d].items():
                out[d][w] = out[d].get(w, 0) - c
        return TruncatedSeries(self.unit - other.unit, out)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TruncatedSeries)
            and self.unit == other.unit
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash(
            (self.unit, tuple(tuple(sorted(self.terms[d].items())) for d in (1, 2, 3)))
        )

    def __repr__(self) -> str:
        nterms = sum(len(self.terms[d]) for d in (1, 2, 3))
        return f"TruncatedSeries(unit={self.unit}, {nterms} terms)"


def magnus(word: Word) -> TruncatedSeries:
    """Truncated Magnus expansion of a group word."""
    out = TruncatedSeries.one()
    for x in word.letters:
        out = out * TruncatedSeries.letter(abs(x), 1 if x > 0 else -1)
    return out


# -- Lyndon bases -------------------------------------------------------------


def witt_dimension(n: int, k: int) -> int:
    """Number of Lyndon words of length k over n letters."""

    def mobius(m: int) -> int:
        out = 1
        d = 2
        while d * d <= m:
            if m % d == 0:
                m //= d
                if m % d == 0:
                    return 0
                out = -out
            d += 1
        if m > 1:
            out = -out
        return out

    total = 0
    for d in range(1, k + 1):
        if k % d == 0:
            total += mobius(d) * n ** (k // d)
    return total // k


def _is_lyndon(w: tuple[int, ...]) -> bool:
    return all(w < w[k:] + w[:k] for k in range(1, len(w)))


def lyndon_words(n: int, k: int) -> list[tuple[int, ...]]:
    """All Lyndon words of length k over letters 1..n, lexicographic."""

    def gen(prefix: tuple[int, ...]):
        if len(prefix) == k:
            if _is_lyndon(prefix):
                yield prefix
            return
        for x in range(1, n + 1):
            yield from gen(prefix + (x,))

    return list(gen(()))


def standard_bracketing(w: tuple[int, ...]):
    """Nested-pair tree from the standard (right) factorization."""
    if len(w) == 1:
        return w[0]
    best = None
    for s in range(1, len(w)):
        suf = w[s:]
        if _is_lyndon(suf):
            best = s
            break  # longest proper Lyndon suffix = earliest start
    return (standard_bracketing(w[:best]), standard_bracketing(w[best:]))


def _tree_tensor(tree) -> dict[tuple[int, ...], int]:
    if isinstance(tree, int):
        return {(tree,): 1}
    a = _tree_tensor(tree[0])
    b = _tree_tensor(tree[1])
    out: dict[tuple[int, ...], int] = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            w = wa + wb
            out[w] = out.get(w, 0) + ca * cb
            w = wb + wa
            out[w] = out.get(w, 0) - ca * cb
    return {w: c for w, c in out.items() if c}


class LieBasis:
    """Lyndon basis of the degree-k piece of the free Lie ring on n letters."""

    __slots__ = ("n", "degree", "words", "index", "expansions")

    def __init__(self, n: int, degree: int):
        words = lyndon_words(n, degree)
        expansions = []
        for w in words:
            t = _tree_tensor(standard_bracketing(w))
            assert t.get(w) == 1 and min(t) == w  # triangular with unit diagonal
            expansions.append(t)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "words", tuple(words))
        object.__setattr__(self, "index", {w: i for i, w in enumerate(words)})
        object.__setattr__(self, "expansions", tuple(expansions))

    def __setattr__(self, name, value):
        raise AttributeError("LieBasis is immutable")

    def __len__(self) -> int:
        return len(self.words)


@lru_cache(maxsize=None)
def lie_basis(n: int, degree: int) -> LieBasis:
    return LieBasis(n, degree)


def lie_component_coords(component: Mapping[tuple[int, ...], int], basis: LieBasis) -> tuple[int, ...]:
    """Lyndon coordinates of a raw tensor component (triangular sweep)."""
    target = {w: c for w, c in component.items() if c}
    for w in target:
        if any(x < 1 or x > basis.n for x in w):
            raise NotLieElement(f"letter outside 1..{basis.n} in {w}")
    coords = []
    for w, expansion in zip(basis.words, basis.expansions):
        c = target.get(w, 0)
        coords.append(c)
        if c:
            for u, cu in expansion.items():
                r = target.get(u, 0) - c * cu
                if r:
                    target[u] = r
                else:
                    target.pop(u, None)
    if target:
        raise NotLieElement(f"residual terms {sorted(target)[:3]}...")
    return tuple(coords)


def lie_coords(series: TruncatedSeries, degree: int, n: int) -> tuple[int, ...]:
    """Coordinates of the degree component in the Lyndon basis.

    Requires every component below `degree` to vanish (the unit may be
    0 or 1, covering both group elements and differences); raises
    NotInGamma otherwise, and NotLieElement if the component is not a
    ZZ-combination of Lyndon bracketings.
    """
    if series.unit not in (0, 1):
        raise NotInGamma(f"unit component is {series.unit}")
    for d in range(1, degree):
        if series.terms[d]:
            raise NotInGamma(f"degree-{d} component is nonzero")
    return lie_component_coords(series.terms[degree], lie_basis(n, degree))


# -- degree-2 coordinates of the canonical relator classes -------------------


def wedge_index(n: int) -> dict[tuple[int, int], int]:
    """Position of the pair (i, j), i < j, in the Lyndon order of degree 2."""
    out = {}
    k = 0
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            out[(i, j)] = k
            k += 1
    return out


def rbar_coords(config: Configuration, i: int, p: str) -> tuple[int, ...]:
    """Degree-2 class [x_i, sum of x_j over lines j through p]."""
    n = len(config.lines) - 1
    idx = wedge_index(n)
    out = [0] * len(idx)
    for j in config.lines_through(p):
        if j == i or j == 0:
            continue
        if i < j:
            out[idx[(i, j)]] += 1
        else:
            out[idx[(j, i)]] -= 1
    return tuple(out)


def admissibility_check(config: Configuration, relators: Mapping[tuple[int, str], Word]) -> bool:
    """Each relator is in gamma_2 with degree-2 leading term [x_i, s_p]."""
    n = len(config.lines) - 1
    for (i, p), w in relators.items():
        s = magnus(w)
        try:
            coords = lie_coords(s, 2, n)
        except (NotInGamma, NotLieElement):
            return False
        if coords != rbar_coords(config, i, p):
            return False
    return True
