"""Two-mode bosonic states and truncated Fock-space linear algebra.

The product basis is ordered row-major with the mode-a occupation as the slow
index, so basis vector ``|n_a, n_b>`` sits at ``n_a * (n_max_b + 1) + n_b``.
"""

from __future__ import annotations

import cmath
import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateState, TruncationTooSevere
from .exact import GaussianRational, to_exact

DISCARD_THRESHOLD = 1e-12


def basis_index(n_a: int, n_b: int, n_max_b: int) -> int:
    return n_a * (n_max_b + 1) + n_b


def coherent_overlap(alpha: complex, beta: complex) -> complex:
    """``<alpha|beta>`` for single-mode coherent states."""
    return cmath.exp(-abs(alpha) ** 2 / 2 - abs(beta) ** 2 / 2 + alpha.conjugate() * beta)


def adequate_cutoff(amplitude: float) -> int:
    """Smallest photon cutoff accepted for a coherent amplitude of modulus ``amplitude``."""
    mean = abs(amplitude) ** 2
    return math.ceil(mean + 8 * math.sqrt(max(mean, 1.0)) + 10)


def coherent_fock_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """``<n|alpha>`` for ``n = 0..cutoff``."""
    out = np.empty(cutoff + 1, dtype=complex)
    out[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, cutoff + 1):
        out[n] = out[n - 1] * alpha / math.sqrt(n)
    return out


def _fingerprint(payload) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


class FockSuperposition:
    """A pure state ``sum_k c_k |n_a, n_b>`` with finitely many Fock terms.

    Amplitudes are kept exactly as given (floats are taken at their binary
    value) and normalized once; ``norm_sq`` is the rational squared norm of
    the raw amplitudes, so exact moments divide by it instead of taking roots.
    """

    kind = "fock"

    def __init__(self, terms):
        raw = []
        seen = set()
        for amplitude, n_a, n_b in terms:
            n_a, n_b = int(n_a), int(n_b)
            if n_a < 0 or n_b < 0:
                raise ValueError(f"negative occupation ({n_a}, {n_b})")
            if (n_a, n_b) in seen:
                raise ValueError(f"duplicate Fock term ({n_a}, {n_b})")
            seen.add((n_a, n_b))
            raw.append((to_exact(amplitude), n_a, n_b))
        if not raw:
            raise DegenerateState("a Fock superposition needs at least one term")
        norm_sq = sum((c.abs2() for c, _, _ in raw), Fraction(0))
        if norm_sq == 0:
            raise DegenerateState("all amplitudes are zero")
        self.raw_terms: tuple[tuple[GaussianRational, int, int], ...] = tuple(raw)
        self.norm_sq: Fraction = norm_sq
        scale = 1 / math.sqrt(norm_sq)
        self.terms: tuple[tuple[complex, int, int], ...] = tuple(
            (complex(c) * scale, n_a, n_b) for c, n_a, n_b in raw
        )

    @property
    def max_occupation(self) -> tuple[int, int]:
        return (max(t[1] for t in self.raw_terms), max(t[2] for t in self.raw_terms))

    def norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c, _, _ in self.terms))

    def amplitude(self, n_a: int, n_b: int) -> complex:
        for c, m_a, m_b in self.terms:
            if (m_a, m_b) == (n_a, n_b):
                return c
        return 0j

    def vector(self, n_max_a: int, n_max_b: int) -> tuple[np.ndarray, float]:
        """Normalized amplitudes on the truncated basis and the discarded weight."""
        vec = np.zeros((n_max_a + 1) * (n_max_b + 1), dtype=complex)
        for c, n_a, n_b in self.terms:
            if n_a <= n_max_a and n_b <= n_max_b:
                vec[basis_index(n_a, n_b, n_max_b)] = c
        kept = sum(
            (c.abs2() for c, n_a, n_b in self.raw_terms if n_a <= n_max_a and n_b <= n_max_b),
            Fraction(0),
        )
        return vec, float(1 - kept / self.norm_sq)

    @cached_property
    def fingerprint(self) -> str:
        return _fingerprint(
            {"kind": self.kind, "terms": sorted([str(c.re), str(c.im), a, b] for c, a, b in self.raw_terms)}
        )

    def __repr__(self):
        body = ", ".join(f"({c}, {a}, {b})" for c, a, b in self.raw_terms)
        return f"FockSuperposition([{body}])"


class CoherentSuperposition:
    """A pure state ``sum_k c_k |alpha_k, beta_k>`` of two-mode coherent states."""

    kind = "coherent"

    def __init__(self, terms, degeneracy_tol: float = 1e-13):
        raw = [(complex(c), complex(alpha), complex(beta)) for c, alpha, beta in terms]
        if not raw:
            raise DegenerateState("a coherent superposition needs at least one term")
        norm_sq = 0j
        for c_t, a_t, b_t in raw:
            for c_u, a_u, b_u in raw:
                norm_sq += c_t.conjugate() * c_u * coherent_overlap(a_t, a_u) * coherent_overlap(b_t, b_u)
        weight = sum(abs(c) ** 2 for c, _, _ in raw)
        if weight == 0 or norm_sq.real <= degeneracy_tol * weight:
            raise DegenerateState("coherent branches cancel; the superposition has zero norm")
        self.raw_terms: tuple[tuple[complex, complex, complex], ...] = tuple(raw)
        self.norm_sq: float = norm_sq.real
        self.normalization: float = 1 / math.sqrt(self.norm_sq)
        self.terms = tuple((c * self.normalization, a, b) for c, a, b in raw)

    @property
    def max_amplitudes(self) -> tuple[float, float]:
        return (max(abs(a) for _, a, _ in self.raw_terms), max(abs(b) for _, _, b in self.raw_terms))

    def adequate_cutoffs(self) -> tuple[int, int]:
        amp_a, amp_b = self.max_amplitudes
        return adequate_cutoff(amp_a), adequate_cutoff(amp_b)

    def norm(self) -> float:
        return math.sqrt(self.overlap_weights.sum().real)

    def vector(self, n_max_a: int, n_max_b: int) -> tuple[np.ndarray, float]:
        vec = np.zeros((n_max_a + 1, n_max_b + 1), dtype=complex)
        for c, alpha, beta in self.terms:
            vec += c * np.outer(coherent_fock_amplitudes(alpha, n_max_a), coherent_fock_amplitudes(beta, n_max_b))
        vec = vec.ravel()
        return vec, max(0.0, 1.0 - float(np.vdot(vec, vec).real))

    @cached_property
    def fingerprint(self) -> str:
        return _fingerprint(
            {
                "kind": self.kind,
                # + 0.0 folds -0.0 into 0.0 so equal states hash equally
                "terms": [[(x + 0.0).hex() for z in t for x in (z.real, z.imag)] for t in self.raw_terms],
            }
        )

    @cached_property
    def overlap_weights(self) -> np.ndarray:
        """``conj(c_t) c_u <alpha_t|alpha_u> <beta_t|beta_u>`` over normalized amplitudes."""
        n = len(self.terms)
        out = np.empty((n, n), dtype=complex)
        for t, (c_t, a_t, b_t) in enumerate(self.terms):
            for u, (c_u, a_u, b_u) in enumerate(self.terms):
                out[t, u] = c_t.conjugate() * c_u * coherent_overlap(a_t, a_u) * coherent_overlap(b_t, b_u)
        return out

    def __repr__(self):
        return f"CoherentSuperposition({list(self.raw_terms)!r})"


@dataclass(frozen=True, eq=False)
class TruncatedDensityMatrix:
    """A two-mode density matrix on ``{0..n_max_a} x {0..n_max_b}``.

    ``exact_entries`` holds Gaussian-rational entries when the matrix came
    from exact data; ``discarded_weight`` records the trace lost to
    truncation before renormalization.
    """

    entries: np.ndarray
    n_max_a: int
    n_max_b: int
    exact_entries: np.ndarray | None = None
    discarded_weight: float = 0.0
    tol: float = field(default=1e-10, repr=False)

    kind = "density"

    def __post_init__(self):
        dim = (self.n_max_a + 1) * (self.n_max_b + 1)
        entries = np.array(self.entries, dtype=complex)
        if entries.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got shape {entries.shape}")
        if not np.allclose(entries, entries.conj().T, atol=self.tol, rtol=0):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(entries) - 1) > self.tol:
            raise ValueError(f"density matrix trace is {np.trace(entries).real:.6g}, not 1")
        if np.linalg.eigvalsh(entries).min() < -self.tol:
            raise ValueError("density matrix has a negative eigenvalue")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        if self.exact_entries is not None:
            exact = np.array(self.exact_entries, dtype=object)
            if exact.shape != (dim, dim):
                raise ValueError("exact entries do not match the matrix shape")
            exact.setflags(write=False)
            object.__setattr__(self, "exact_entries", exact)

    @classmethod
    def from_matrix(cls, matrix, n_max_a: int, n_max_b: int, exact: bool | None = None):
        """Build from raw entries, renormalizing by the trace.

        With ``exact=None`` the entries are kept exact when every one of them
        converts to a Gaussian rational (ints, Fractions, decimal strings).
        """
        rows = [list(row) for row in matrix]
        if exact is None:
            exact = all(not isinstance(v, (float, complex)) for row in rows for v in row)
        exact_arr = np.array([[to_exact(v) for v in row] for row in rows], dtype=object)
        trace = sum((exact_arr[k, k] for k in range(len(rows))), GaussianRational(0))
        if trace.is_zero() or not trace.is_real() or trace.re < 0:
            raise DegenerateState(f"density matrix trace {trace} cannot be normalized")
        exact_arr = exact_arr / trace
        floats = np.array([[complex(v) for v in row] for row in exact_arr], dtype=complex)
        return cls(floats, n_max_a, n_max_b, exact_entries=exact_arr if exact else None)

    @property
    def dims(self) -> tuple[int, int]:
        return self.n_max_a + 1, self.n_max_b + 1

    @property
    def max_occupation(self) -> tuple[int, int]:
        """Largest occupations carrying weight on the diagonal."""
        diag = np.abs(np.diag(self.entries)).reshape(self.dims)
        rows = np.nonzero(diag.sum(axis=1) > 0)[0]
        cols = np.nonzero(diag.sum(axis=0) > 0)[0]
        return int(rows.max(initial=0)), int(cols.max(initial=0))

    @cached_property
    def fingerprint(self) -> str:
        if self.exact_entries is not None:
            data = [[str(v) for v in row] for row in self.exact_entries]
        else:
            data = [[v.real.hex() + "," + v.imag.hex() for v in row] for row in self.entries.tolist()]
        return _fingerprint({"kind": self.kind, "n_max": [self.n_max_a, self.n_max_b], "entries": data})


BipartiteState = FockSuperposition | CoherentSuperposition | TruncatedDensityMatrix


def make_singlet() -> FockSuperposition:
    """``(|01> - |10>)/sqrt(2)``."""
    return FockSuperposition([(1, 0, 1), (-1, 1, 0)])


def make_bell_phi() -> FockSuperposition:
    """``(|00> + |11>)/sqrt(2)``."""
    return FockSuperposition([(1, 0, 0), (1, 1, 1)])


def make_vacuum() -> FockSuperposition:
    return FockSuperposition([(1, 0, 0)])


def make_fock(n_a: int, n_b: int) -> FockSuperposition:
    return FockSuperposition([(1, n_a, n_b)])


def make_coherent_bell(alpha: complex, beta: complex) -> CoherentSuperposition:
    """Normalized ``|alpha, beta> - |-alpha, -beta>``."""
    alpha, beta = complex(alpha), complex(beta)
    if alpha == 0 and beta == 0:
        raise DegenerateState("alpha = beta = 0: both branches are the vacuum")
    return CoherentSuperposition([(1, alpha, beta), (-1, -alpha, -beta)])


def make_product_coherent(alpha: complex, beta: complex) -> CoherentSuperposition:
    return CoherentSuperposition([(1, alpha, beta)])


def to_density_matrix(state, n_max_a: int, n_max_b: int, threshold: float = DISCARD_THRESHOLD):
    """Project ``|psi><psi|`` onto the truncated basis and renormalize.

    Coherent inputs must also meet the cutoff from :func:`adequate_cutoff`.
    """
    if isinstance(state, TruncatedDensityMatrix):
        if (n_max_a, n_max_b) == (state.n_max_a, state.n_max_b):
            return state
        raise ValueError("re-truncating a density matrix is not supported")
    if isinstance(state, CoherentSuperposition):
        need_a, need_b = state.adequate_cutoffs()
        if n_max_a < need_a or n_max_b < need_b:
            raise TruncationTooSevere(
                f"cutoffs ({n_max_a}, {n_max_b}) below the adequate ({need_a}, {need_b}) for this coherent state"
            )
    vec, discarded = state.vector(n_max_a, n_max_b)
    if discarded > threshold:
        raise TruncationTooSevere(
            f"truncation at ({n_max_a}, {n_max_b}) discards weight {discarded:.3e} > {threshold:.1e}",
            discarded_weight=discarded,
        )
    if isinstance(state, FockSuperposition):
        kept = [(c, a, b) for c, a, b in state.raw_terms if a <= n_max_a and b <= n_max_b]
        kept_norm = sum((c.abs2() for c, _, _ in kept), Fraction(0))
        dim = (n_max_a + 1) * (n_max_b + 1)
        exact = np.full((dim, dim), GaussianRational(0), dtype=object)
        for c_t, a_t, b_t in kept:
            for c_u, a_u, b_u in kept:
                exact[basis_index(a_t, b_t, n_max_b), basis_index(a_u, b_u, n_max_b)] = (
                    c_t * c_u.conjugate() / kept_norm
                )
        floats = np.array([[complex(v) for v in row] for row in exact], dtype=complex)
        return TruncatedDensityMatrix(floats, n_max_a, n_max_b, exact_entries=exact, discarded_weight=discarded)
    vec = vec / np.linalg.norm(vec)
    return TruncatedDensityMatrix(np.outer(vec, vec.conj()), n_max_a, n_max_b, discarded_weight=discarded)


@dataclass(frozen=True)
class LadderMatrix:
    """Single-mode ladder operator truncated at occupation ``cutoff``.

    ``radicands`` holds the squared matrix elements, so the float
    ``entries`` are their square roots and exact checks can use integers.
    """

    mode: str
    dagger: bool
    cutoff: int

    @property
    def radicands(self) -> np.ndarray:
        out = np.zeros((self.cutoff + 1, self.cutoff + 1), dtype=np.int64)
        n = np.arange(1, self.cutoff + 1)
        out[n - 1, n] = n
        return out.T if self.dagger else out

    @property
    def entries(self) -> np.ndarray:
        return np.sqrt(self.radicands.astype(float))

    def adjoint(self) -> LadderMatrix:
        return LadderMatrix(self.mode, not self.dagger, self.cutoff)


def ladder_matrix(mode: str, dagger: bool, cutoff: int) -> LadderMatrix:
    if mode not in ("a", "b"):
        raise ValueError(f"unknown mode {mode!r}")
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    return LadderMatrix(mode, bool(dagger), int(cutoff))


class Factor(NamedTuple):
    mode: str
    dagger: bool


_TOKEN = re.compile(r"\s*([ab])(†|\+|\^dag|dag)?(?:\^(\d+))?")


def parse_word(word) -> list[Factor]:
    """Parse an operator word such as ``"a† b"``, ``"a^2"`` or ``"1"``.

    Already-parsed sequences of ``Factor`` or ``(mode, dagger)`` pairs pass through.
    """
    if not isinstance(word, str):
        return [Factor(m, bool(d)) for m, d in word]
    text = word.strip()
    if text in ("", "1"):
        return []
    out: list[Factor] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            raise ValueError(f"cannot parse operator word {word!r} at position {pos}")
        mode, dag, power = match.groups()
        out.extend([Factor(mode, dag is not None)] * int(power or 1))
        pos = match.end()
    return out


def _apply_factor(psi: np.ndarray, factor: Factor) -> tuple[np.ndarray, float]:
    axis = 0 if factor.mode == "a" else 1
    cutoff = psi.shape[axis] - 1
    out = np.zeros_like(psi)
    src = np.moveaxis(psi, axis, 0)
    dst = np.moveaxis(out, axis, 0)
    roots = np.sqrt(np.arange(1, cutoff + 1, dtype=float))
    if factor.dagger:
        dst[1:] = roots[:, None] * src[:-1]
        lost = math.sqrt(cutoff + 1) * src[-1]
        return out, float(np.vdot(lost, lost).real)
    dst[:-1] = roots[:, None] * src[1:]
    return out, 0.0


class Applied(NamedTuple):
    vector: np.ndarray
    leakage: float


def apply_operator(vector, words: Sequence, n_max_a: int, n_max_b: int) -> Applied:
    """Act with the product ``words[0] words[1] ...`` on a truncated state vector.

    Creation above the cutoff drops the amplitude; the root-sum-square of
    everything dropped is returned as ``leakage``.
    """
    if isinstance(words, str):
        words = [words]
    factors: list[Factor] = []
    for w in words:
        factors.extend(parse_word(w))
    psi = np.asarray(vector, dtype=complex).reshape(n_max_a + 1, n_max_b + 1)
    leaked_sq = 0.0
    for factor in reversed(factors):
        psi, lost = _apply_factor(psi, factor)
        leaked_sq += lost
    return Applied(psi.ravel(), math.sqrt(leaked_sq))


def word_matrix(factors: Sequence[Factor], n_max_a: int, n_max_b: int) -> np.ndarray:
    """Matrix of an operator word on the truncated two-mode basis."""
    ops = {
        "a": (ladder_matrix("a", False, n_max_a).entries, np.eye(n_max_b + 1)),
        "b": (np.eye(n_max_a + 1), ladder_matrix("b", False, n_max_b).entries),
    }
    dim = (n_max_a + 1) * (n_max_b + 1)
    out = np.eye(dim, dtype=complex)
    for factor in factors:
        left, right = ops[factor.mode]
        mat = np.kron(left, right)
        out = out @ (mat.T if factor.dagger else mat)
    return out
