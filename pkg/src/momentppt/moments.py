"""Moments of two-mode ladder-operator words and the matrices built from them.

A moment is ``Tr[f_i^dag f_j rho]`` where ``f_i = a^dag^i1 a^i2 b^dag^i3 b^i4``.
Three backends compute it:

``exact``
    Normal-ordered closed forms over Gaussian rationals with square-root
    bookkeeping. Raises :class:`IrrationalValue` when a surd survives or the
    state has no exact representation (coherent states).
``float``
    The same closed forms in complex floating point.
``trace``
    Explicit truncated matrices and a trace. Independent of the closed
    forms; used to cross-validate them.

``auto`` tries ``exact`` per entry and falls back to ``float``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import IrrationalValue, TruncationTooSevere
from .exact import GaussianRational, SurdSum, to_exact
from .fock import (
    CoherentSuperposition,
    Factor,
    FockSuperposition,
    TruncatedDensityMatrix,
    basis_index,
    to_density_matrix,
    word_matrix,
)
from .oracle import default_cutoffs, partial_transpose

EXACT = "exact"
FLOAT = "float"
TRACE = "trace"
AUTO = "auto"
BACKENDS = (EXACT, FLOAT, TRACE, AUTO)


class MultiIndex(NamedTuple):
    """Exponents of ``a^dag^i1 a^i2 b^dag^i3 b^i4``."""

    i1: int
    i2: int
    i3: int
    i4: int

    @property
    def degree(self) -> int:
        return self.i1 + self.i2 + self.i3 + self.i4

    def factors(self) -> list[Factor]:
        return (
            [Factor("a", True)] * self.i1
            + [Factor("a", False)] * self.i2
            + [Factor("b", True)] * self.i3
            + [Factor("b", False)] * self.i4
        )

    def word(self) -> str:
        parts = []
        for symbol, power in (("a†", self.i1), ("a", self.i2), ("b†", self.i3), ("b", self.i4)):
            if power == 1:
                parts.append(symbol)
            elif power > 1:
                parts.append(f"{symbol}^{power}")
        return " ".join(parts) or "1"

    def __str__(self):
        return self.word()


IDENTITY = MultiIndex(0, 0, 0, 0)


def monomials(degree: int) -> list[MultiIndex]:
    """All multiindices of the given degree, lexicographically ascending."""
    return [
        MultiIndex(*t)
        for t in itertools.product(range(degree + 1), repeat=4)
        if sum(t) == degree
    ]


# degree-2 block of the default ordering: mixed and number-like products
# first, single-mode squares last
_SV_DEGREE_TWO = (
    MultiIndex(1, 1, 0, 0),
    MultiIndex(0, 0, 1, 1),
    MultiIndex(0, 1, 0, 1),
    MultiIndex(1, 0, 0, 1),
    MultiIndex(0, 1, 1, 0),
    MultiIndex(1, 0, 1, 0),
    MultiIndex(0, 2, 0, 0),
    MultiIndex(2, 0, 0, 0),
    MultiIndex(0, 0, 0, 2),
    MultiIndex(0, 0, 2, 0),
)
_SV_DEGREE_ONE = (MultiIndex(0, 1, 0, 0), MultiIndex(1, 0, 0, 0), MultiIndex(0, 0, 0, 1), MultiIndex(0, 0, 1, 0))


@dataclass(frozen=True)
class OperatorOrdering:
    """A graded enumeration of multiindices labeling moment-matrix rows."""

    name: str
    sequence: tuple[MultiIndex, ...]

    def __post_init__(self):
        seq = tuple(MultiIndex(*map(int, m)) for m in self.sequence)
        if not seq or seq[0] != IDENTITY:
            raise ValueError("an ordering must start with the identity (0,0,0,0)")
        if any(min(m) < 0 for m in seq):
            raise ValueError("multiindex entries must be nonnegative")
        if len(set(seq)) != len(seq):
            raise ValueError("ordering contains duplicate multiindices")
        degrees = [m.degree for m in seq]
        if any(b < a for a, b in zip(degrees, degrees[1:])):
            raise ValueError("ordering is not graded: degrees must be non-decreasing")
        object.__setattr__(self, "sequence", seq)

    def __len__(self):
        return len(self.sequence)

    def __getitem__(self, k):
        return self.sequence[k]

    def __iter__(self):
        return iter(self.sequence)

    @property
    def max_degree(self) -> int:
        return self.sequence[-1].degree

    def words(self, n: int | None = None) -> list[str]:
        return [m.word() for m in self.sequence[:n]]

    def position(self, index) -> int:
        """1-based row of ``index`` (a multiindex or an operator word)."""
        if isinstance(index, str):
            for k, m in enumerate(self.sequence, 1):
                if m.word().replace(" ", "") == index.replace(" ", ""):
                    return k
            raise KeyError(index)
        return self.sequence.index(MultiIndex(*index)) + 1

    def to_list(self) -> list[list[int]]:
        return [list(m) for m in self.sequence]


def sv_compatible(max_degree: int = 2) -> OperatorOrdering:
    """Default ordering: ``1``; ``a, a†, b, b†``; a fixed degree-2 block; then lexicographic."""
    seq = [IDENTITY]
    if max_degree >= 1:
        seq.extend(_SV_DEGREE_ONE)
    if max_degree >= 2:
        seq.extend(_SV_DEGREE_TWO)
    for d in range(3, max_degree + 1):
        seq.extend(monomials(d))
    return OperatorOrdering("sv-compatible", tuple(seq))


def grlex(max_degree: int = 2) -> OperatorOrdering:
    seq = [m for d in range(max_degree + 1) for m in monomials(d)]
    return OperatorOrdering("grlex", tuple(seq))


ORDERINGS = {"sv-compatible": sv_compatible, "grlex": grlex}


def count_up_to_degree(degree: int) -> int:
    return math.comb(degree + 4, 4)


def resolve_ordering(order="sv-compatible", length: int = 15) -> OperatorOrdering:
    """Turn a name, an explicit multiindex list or an ordering into an ordering of at least ``length``."""
    if isinstance(order, OperatorOrdering):
        ordering = order
    elif isinstance(order, str):
        if order not in ORDERINGS:
            raise ValueError(f"unknown ordering {order!r}; expected one of {sorted(ORDERINGS)}")
        degree = 0
        while count_up_to_degree(degree) < length:
            degree += 1
        ordering = ORDERINGS[order](degree)
    else:
        ordering = OperatorOrdering("explicit", tuple(MultiIndex(*m) for m in order))
    if len(ordering) < length:
        raise ValueError(f"ordering {ordering.name!r} has {len(ordering)} operators, need {length}")
    return ordering


def normal_order_contraction(m: int, n: int) -> list[tuple[int, int]]:
    """Coefficients of ``a^m a†^n = sum_k c_k a†^(n-k) a^(m-k)``, with ``c_k = k! C(m,k) C(n,k)``."""
    if m < 0 or n < 0:
        raise ValueError("powers must be nonnegative")
    return [(k, math.factorial(k) * math.comb(m, k) * math.comb(n, k)) for k in range(min(m, n) + 1)]


def swap_for_partial_transpose(i, j) -> tuple[MultiIndex, MultiIndex]:
    """Index pair whose moment on ``rho`` equals the ``(i, j)`` moment on the partial transpose."""
    i, j = MultiIndex(*i), MultiIndex(*j)
    return MultiIndex(i.i1, i.i2, j.i3, j.i4), MultiIndex(j.i1, j.i2, i.i3, i.i4)


def normal_ordered_terms(i: MultiIndex, j: MultiIndex):
    """Expand ``f_i^dag f_j`` into ``(coefficient, p, q, r, s)`` for ``a†^p a^q b†^r b^s``."""
    for k, ck in normal_order_contraction(i.i1, j.i1):
        p, q = i.i2 + j.i1 - k, i.i1 + j.i2 - k
        for l, cl in normal_order_contraction(i.i3, j.i3):
            yield ck * cl, p, q, i.i4 + j.i3 - l, i.i3 + j.i4 - l


class MomentValue(NamedTuple):
    value: GaussianRational | complex
    exact: bool
    surd_residue: bool = False

    def __complex__(self):
        return complex(self.value)


def _ladder_element(n_a, n_b, p, q, r, s):
    """Target occupation and squared element of ``<t| a†^p a^q b†^r b^s |n_a n_b>``."""
    if n_a < q or n_b < s:
        return None
    t_a, t_b = n_a - q + p, n_b - s + r
    return t_a, t_b, math.perm(n_a, q) * math.perm(t_a, p) * math.perm(n_b, s) * math.perm(t_b, r)


def _exact_expectation(state, p, q, r, s, weight: GaussianRational, acc: SurdSum) -> None:
    if isinstance(state, FockSuperposition):
        lookup = {(a, b): c for c, a, b in state.raw_terms}
        for c_u, u_a, u_b in state.raw_terms:
            hit = _ladder_element(u_a, u_b, p, q, r, s)
            if hit is None:
                continue
            c_t = lookup.get(hit[:2])
            if c_t is not None:
                acc.add(weight * c_t.conjugate() * c_u / state.norm_sq, hit[2])
    elif isinstance(state, TruncatedDensityMatrix):
        if state.exact_entries is None:
            raise IrrationalValue("density matrix was given in floating point; no exact moments")
        rho = state.exact_entries
        for u_a in range(state.n_max_a + 1):
            for u_b in range(state.n_max_b + 1):
                hit = _ladder_element(u_a, u_b, p, q, r, s)
                if hit is None or hit[0] > state.n_max_a or hit[1] > state.n_max_b:
                    continue
                entry = rho[basis_index(u_a, u_b, state.n_max_b), basis_index(hit[0], hit[1], state.n_max_b)]
                if not entry.is_zero():
                    acc.add(weight * entry, hit[2])
    else:
        raise IrrationalValue("coherent-state moments involve exponentials; no exact value")


def _float_expectation(state, p, q, r, s) -> complex:
    if isinstance(state, CoherentSuperposition):
        alphas = np.array([t[1] for t in state.terms])
        betas = np.array([t[2] for t in state.terms])
        left = alphas.conj() ** p * betas.conj() ** r
        right = alphas**q * betas**s
        return complex(left @ state.overlap_weights @ right)
    total = 0j
    if isinstance(state, FockSuperposition):
        lookup = {(a, b): c for c, a, b in state.terms}
        for c_u, u_a, u_b in state.terms:
            hit = _ladder_element(u_a, u_b, p, q, r, s)
            if hit is None:
                continue
            c_t = lookup.get(hit[:2])
            if c_t is not None:
                total += c_t.conjugate() * c_u * math.sqrt(hit[2])
        return total
    rho = state.entries
    for u_a in range(state.n_max_a + 1):
        for u_b in range(state.n_max_b + 1):
            hit = _ladder_element(u_a, u_b, p, q, r, s)
            if hit is None or hit[0] > state.n_max_a or hit[1] > state.n_max_b:
                continue
            total += rho[basis_index(u_a, u_b, state.n_max_b), basis_index(hit[0], hit[1], state.n_max_b)] * math.sqrt(hit[2])
    return total


_CACHE: dict = {}
_CACHE_LIMIT = 500_000
_NOT_EXACT = object()


def clear_moment_cache() -> None:
    _CACHE.clear()


def _cached(key, compute):
    try:
        return _CACHE[key]
    except KeyError:
        pass
    if len(_CACHE) >= _CACHE_LIMIT:
        _CACHE.clear()
    value = compute()
    _CACHE[key] = value
    return value


def _exact_moment(state, i, j):
    def compute():
        acc = SurdSum()
        try:
            for coef, p, q, r, s in normal_ordered_terms(i, j):
                _exact_expectation(state, p, q, r, s, GaussianRational(coef), acc)
            return acc.value()
        except IrrationalValue as exc:
            return (_NOT_EXACT, exc)

    return _cached((state.fingerprint, EXACT, i, j), compute)


def _float_moment(state, i, j) -> complex:
    def compute():
        return sum((coef * _float_expectation(state, p, q, r, s) for coef, p, q, r, s in normal_ordered_terms(i, j)), 0j)

    return _cached((state.fingerprint, FLOAT, i, j), compute)


def moment(state, i, j, backend: str = AUTO, cutoffs: tuple[int, int] | None = None) -> MomentValue:
    """``Tr[f_i^dag f_j rho]`` for the untransposed state."""
    i, j = MultiIndex(*i), MultiIndex(*j)
    if backend == TRACE:
        values = _trace_block(state, [i, j], [i], [j], transposed=False, cutoffs=cutoffs)
        return MomentValue(complex(values[0, 0]), exact=False)
    if backend in (EXACT, AUTO):
        result = _exact_moment(state, i, j)
        if not isinstance(result, tuple):
            return MomentValue(result, exact=True)
        exc = result[1]
        if backend == EXACT:
            raise IrrationalValue(str(exc), radicands=exc.radicands)
        return MomentValue(_float_moment(state, i, j), exact=False, surd_residue=bool(exc.radicands))
    if backend == FLOAT:
        return MomentValue(_float_moment(state, i, j), exact=False)
    raise ValueError(f"unknown backend {backend!r}")


def _trace_cutoffs(state, cutoffs):
    if cutoffs is not None:
        return tuple(cutoffs)
    return default_cutoffs(state)


def _trace_block(state, operators, rows, cols, transposed, cutoffs=None) -> np.ndarray:
    """Moments ``Tr[F_r^dag F_c sigma]`` by explicit truncated matrices.

    ``sigma`` is ``rho`` or its partial transpose, computed directly rather
    than through the index swap. The density matrix is embedded with enough
    padding that no operator in ``operators`` raises out of the space.
    """
    n_a, n_b = _trace_cutoffs(state, cutoffs)
    rho = to_density_matrix(state, n_a, n_b)
    pad = max(m.degree for m in operators)
    big_a, big_b = n_a + pad, n_b + pad
    sigma = partial_transpose(rho) if transposed else rho.entries
    embed = np.zeros(((big_a + 1) * (big_b + 1),) * 2, dtype=complex)
    idx = np.array([basis_index(x, y, big_b) for x in range(n_a + 1) for y in range(n_b + 1)])
    embed[np.ix_(idx, idx)] = sigma
    mats = {m: word_matrix(m.factors(), big_a, big_b) for m in set(rows) | set(cols)}
    applied = {m: mats[m] @ embed for m in set(cols)}
    out = np.empty((len(rows), len(cols)), dtype=complex)
    for r, m_r in enumerate(rows):
        for c, m_c in enumerate(cols):
            out[r, c] = np.vdot(mats[m_r], applied[m_c])
    return out


@dataclass(frozen=True, eq=False)
class MomentMatrix:
    """An ``N x N`` Hermitian moment matrix, possibly of the partially transposed state.

    ``values`` always holds complex floats; ``exact_values`` holds a
    :class:`GaussianRational` where the entry is exact and ``None`` elsewhere.
    """

    ordering: OperatorOrdering
    values: np.ndarray
    exact_values: np.ndarray
    transposed: bool
    backend: str
    fingerprint: str

    @classmethod
    def from_array(cls, entries, ordering="grlex", transposed: bool = True) -> MomentMatrix:
        """Wrap an arbitrary Hermitian matrix, e.g. to exercise the minor routines.

        Entries that are ints, Fractions, strings or :class:`GaussianRational`
        are kept exact; floats make the whole matrix inexact.
        """
        rows = [list(r) for r in entries]
        n = len(rows)
        exact = all(not isinstance(v, (float, complex, np.floating, np.complexfloating)) for r in rows for v in r)
        exact_values = np.full((n, n), None, dtype=object)
        if exact:
            for p in range(n):
                for q in range(n):
                    exact_values[p, q] = to_exact(rows[p][q])
            values = np.array([[complex(v) for v in r] for r in exact_values], dtype=complex)
        else:
            values = np.array(rows, dtype=complex)
        if not np.allclose(values, values.conj().T, rtol=0, atol=1e-12):
            raise ValueError("matrix is not Hermitian")
        return cls(resolve_ordering(ordering, n), values, exact_values, transposed, EXACT if exact else FLOAT, "array")

    @property
    def size(self) -> int:
        return self.values.shape[0]

    @property
    def operators(self) -> tuple[MultiIndex, ...]:
        return self.ordering.sequence[: self.size]

    @property
    def fully_exact(self) -> bool:
        return all(v is not None for v in self.exact_values.flat)

    def entry(self, p: int, q: int) -> MomentValue:
        """1-based entry ``(p, q)``."""
        exact = self.exact_values[p - 1, q - 1]
        if exact is not None:
            return MomentValue(exact, exact=True)
        return MomentValue(complex(self.values[p - 1, q - 1]), exact=False)

    def submatrix(self, rows: Sequence[int]) -> np.ndarray:
        """Float principal submatrix on 0-based ``rows``."""
        rows = list(rows)
        return self.values[np.ix_(rows, rows)]

    def exact_submatrix(self, rows: Sequence[int]) -> list[list[GaussianRational]] | None:
        """Exact principal submatrix on 0-based ``rows``, or ``None`` if any entry is inexact."""
        out = []
        for p in rows:
            row = []
            for q in rows:
                v = self.exact_values[p, q]
                if v is None:
                    return None
                row.append(v)
            out.append(row)
        return out

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.values)[0])


def build_moment_matrix(
    state,
    ordering="sv-compatible",
    n: int = 15,
    transposed: bool = True,
    backend: str = AUTO,
    cutoffs: tuple[int, int] | None = None,
) -> MomentMatrix:
    """Assemble ``M(rho)`` or, with ``transposed=True``, ``M(rho^Gamma)`` on the first ``n`` operators.

    Analytic backends evaluate the upper triangle through the index swap and
    fill the lower triangle by conjugation. Errors name the failing 1-based entry.
    """
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    ordering = resolve_ordering(ordering, n)
    ops = ordering.sequence[:n]
    values = np.zeros((n, n), dtype=complex)
    exact_values = np.full((n, n), None, dtype=object)

    if backend == TRACE:
        values[:] = _trace_block(state, ops, ops, ops, transposed, cutoffs)
        return MomentMatrix(ordering, values, exact_values, transposed, backend, state.fingerprint)

    for p in range(n):
        for q in range(p, n):
            i, j = (swap_for_partial_transpose(ops[p], ops[q]) if transposed else (ops[p], ops[q]))
            try:
                mv = moment(state, i, j, backend=backend)
            except (IrrationalValue, TruncationTooSevere) as exc:
                exc.args = (f"entry ({p + 1}, {q + 1}): {exc}",)
                exc.entry = (p + 1, q + 1)
                raise
            values[p, q] = complex(mv.value)
            values[q, p] = values[p, q].conjugate()
            if mv.exact:
                exact_values[p, q] = mv.value
                exact_values[q, p] = mv.value.conjugate()
        if not (exact_values[p, p] is None or exact_values[p, p].is_real()):
            raise ArithmeticError(f"diagonal entry ({p + 1}, {p + 1}) is not real")
        values[p, p] = values[p, p].real
    values.setflags(write=False)
    exact_values.setflags(write=False)
    return MomentMatrix(ordering, values, exact_values, transposed, backend, state.fingerprint)


def cross_validate_backends(state, ordering="sv-compatible", n: int = 15, transposed: bool = True, cutoffs=None) -> float:
    """Largest entrywise gap between the closed-form moments and the truncated-trace moments."""
    analytic = build_moment_matrix(state, ordering, n, transposed, backend=FLOAT)
    traced = build_moment_matrix(state, ordering, n, transposed, backend=TRACE, cutoffs=cutoffs)
    return float(np.max(np.abs(analytic.values - traced.values)))
