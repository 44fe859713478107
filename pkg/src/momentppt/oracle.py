"""Ground-truth NPT test: explicit partial transposition and eigenvalues."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import SoundnessViolation
from .fock import CoherentSuperposition, FockSuperposition, TruncatedDensityMatrix, to_density_matrix

NPT = "NPT"
PPT_AT_TRUNCATION = "PPT-at-truncation"

RESIDUAL_LIMIT = 1e-8


def partial_transpose(rho, dims=None, system: int = 2, exact: bool = False) -> np.ndarray:
    """Transpose the indices of one subsystem of a bipartite matrix.

    With ``system=2`` the result satisfies
    ``<m_a m_b| rho^T |n_a n_b> = <m_a n_b| rho |n_a m_b>``. ``rho`` may be a
    :class:`TruncatedDensityMatrix` (``exact=True`` selects its exact
    entries) or a square array together with ``dims = (d_a, d_b)``.
    """
    if isinstance(rho, TruncatedDensityMatrix):
        dims = rho.dims
        if exact:
            if rho.exact_entries is None:
                raise ValueError("density matrix has no exact entries")
            mat = rho.exact_entries
        else:
            mat = rho.entries
    else:
        mat = np.asarray(rho)
        if dims is None:
            raise ValueError("dims are required for a bare matrix")
    d_a, d_b = dims
    if mat.shape != (d_a * d_b, d_a * d_b):
        raise ValueError(f"matrix shape {mat.shape} does not match dims {dims}")
    if system == 2:
        axes = (0, 3, 2, 1)
    elif system == 1:
        axes = (2, 1, 0, 3)
    else:
        raise ValueError("system must be 1 or 2")
    return mat.reshape(d_a, d_b, d_a, d_b).transpose(axes).reshape(d_a * d_b, d_a * d_b)


def default_cutoffs(state) -> tuple[int, int]:
    if isinstance(state, TruncatedDensityMatrix):
        return state.n_max_a, state.n_max_b
    if isinstance(state, CoherentSuperposition):
        return state.adequate_cutoffs()
    return state.max_occupation


def has_finite_support(state) -> bool:
    return isinstance(state, (FockSuperposition, TruncatedDensityMatrix))


@dataclass(frozen=True)
class PartialTransposeResult:
    min_eigenvalue: float
    negativity: float
    eigenvalues: np.ndarray
    cutoffs: tuple[int, int]
    tolerance: float
    residual: float
    exact_support: bool

    @property
    def verdict(self) -> str:
        return NPT if self.min_eigenvalue < -self.tolerance else PPT_AT_TRUNCATION

    @property
    def npt(self) -> bool:
        return self.verdict == NPT

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "min_eigenvalue": self.min_eigenvalue,
            "negativity": self.negativity,
            "cutoffs": list(self.cutoffs),
            "tolerance": self.tolerance,
            "exact_support": self.exact_support,
        }


def oracle_npt(state, n_max_a: int | None = None, n_max_b: int | None = None, tol: float = 1e-10):
    """Diagonalize the partial transpose of ``state`` truncated at the given cutoffs.

    The verdict is NPT when the smallest eigenvalue is below ``-tol``. For
    states whose Fock support fits inside the cutoffs the verdict is exact.
    """
    if n_max_a is None or n_max_b is None:
        d_a, d_b = default_cutoffs(state)
        n_max_a = d_a if n_max_a is None else n_max_a
        n_max_b = d_b if n_max_b is None else n_max_b
    rho = to_density_matrix(state, n_max_a, n_max_b)
    pt = partial_transpose(rho)
    evals, evecs = scipy.linalg.eigh(pt)
    lam, vec = evals[0], evecs[:, 0]
    residual = float(np.linalg.norm(pt @ vec - lam * vec))
    if residual > RESIDUAL_LIMIT:
        raise ArithmeticError(f"eigenpair residual {residual:.2e} exceeds {RESIDUAL_LIMIT:.0e}")
    if abs(evals.sum() - 1) > 1e-9:
        raise ArithmeticError(f"partial transpose spectrum sums to {evals.sum():.12g}")
    return PartialTransposeResult(
        min_eigenvalue=float(lam),
        negativity=float(-evals[evals < 0].sum()),
        eigenvalues=evals,
        cutoffs=(n_max_a, n_max_b),
        tolerance=tol,
        residual=residual,
        exact_support=has_finite_support(state),
    )


CONSISTENT = "consistent"
INCOMPLETE = "expected-incompleteness"
HARD_FAILURE = "hard-failure"


@dataclass(frozen=True)
class AuditRecord:
    status: str
    moment_npt: bool
    oracle_npt: bool
    exact_support: bool
    message: str

    @property
    def ok(self) -> bool:
        return self.status != HARD_FAILURE

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "moment_npt": self.moment_npt,
            "oracle_npt": self.oracle_npt,
            "exact_support": self.exact_support,
            "message": self.message,
        }


def agreement_audit(state, moment_verdict, oracle_result: PartialTransposeResult, strict: bool = False):
    """Compare a moment-based verdict with the oracle.

    ``moment_verdict`` is anything with a boolean ``npt`` attribute. A moment
    witness that the oracle does not confirm is a soundness violation;
    ``strict=True`` raises :class:`SoundnessViolation` for it.
    """
    moment_npt = bool(moment_verdict.npt)
    oracle_flag = oracle_result.npt
    exact_support = has_finite_support(state)
    if moment_npt and not oracle_flag:
        status = HARD_FAILURE
        message = (
            f"moment witness found but partial transpose min eigenvalue is "
            f"{oracle_result.min_eigenvalue:.3e} at cutoffs {oracle_result.cutoffs}"
        )
    elif oracle_flag and not moment_npt:
        status = INCOMPLETE
        message = "oracle finds NPT; no principal-minor witness within the configured truncation"
    else:
        status = CONSISTENT
        message = "both NPT" if moment_npt else "both non-detecting"
    record = AuditRecord(status, moment_npt, oracle_flag, exact_support, message)
    if strict and status == HARD_FAILURE:
        raise SoundnessViolation(message)
    return record
