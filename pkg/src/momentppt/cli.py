"""Command-line front end.

Exit codes: 0 PPT-consistent (or success), 2 NPT witnessed, 1 error.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import minors, moments
from .errors import MomentPPTError, NoMatchingOrdering
from .oracle import agreement_audit, oracle_npt
from .report import RunReport, leading_row
from .statefile import StateFileError, load_state, parse_ordering

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NPT = 2


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_ERROR)


def _parse_cutoff(text):
    if text is None:
        return None
    try:
        parts = [int(p) for p in text.split(",")]
    except ValueError:
        raise click.BadParameter(f"expected N or NA,NB, got {text!r}") from None
    if len(parts) == 1:
        parts *= 2
    if len(parts) != 2:
        raise click.BadParameter(f"expected N or NA,NB, got {text!r}")
    return tuple(parts)


def _resolve_order(order, spec, n):
    if order is None:
        return spec.ordering if spec.ordering is not None else moments.resolve_ordering("sv-compatible", n)
    if order in moments.ORDERINGS:
        return moments.resolve_ordering(order, n)
    path = Path(order)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise StateFileError(f"--order is neither a known ordering nor a readable file: {order}") from exc
    except json.JSONDecodeError as exc:
        raise StateFileError(f"cannot parse ordering file {order}: {exc}") from exc
    return parse_ordering(data, name=path.stem)


def common_options(func):
    @click.argument("state_file", type=click.Path(dir_okay=False))
    @click.option("--order", default=None, help="sv-compatible, grlex, or a JSON file of multiindices.")
    @click.option("--n-max", "n_max", default=minors.DEFAULT_N, show_default=True, type=click.IntRange(1))
    @click.option(
        "--backend",
        default=moments.AUTO,
        show_default=True,
        type=click.Choice([moments.AUTO, moments.EXACT, moments.FLOAT]),
    )
    @click.option("--tol", default=minors.DEFAULT_TOL, show_default=True, type=float)
    @click.option("--cutoff", default=None, help="Fock cutoff N or NA,NB for truncated computations.")
    @click.option("--json", "as_json", is_flag=True, help="Print the machine-readable report.")
    @functools.wraps(func)
    def wrapper(state_file, order, n_max, backend, tol, cutoff, as_json, **kwargs):
        try:
            spec = load_state(state_file)
            ordering = _resolve_order(order, spec, n_max)
            cutoffs = _parse_cutoff(cutoff) or spec.cutoffs
            report, code = func(spec, ordering, n_max, backend, tol, cutoffs, **kwargs)
        except (MomentPPTError, ValueError, ArithmeticError) as exc:
            _fail(str(exc))
        click.echo(report.to_json() if as_json else report.render())
        sys.exit(code)

    return wrapper


def _base_report(command, spec, matrix, backend, n, tol):
    return RunReport(
        command=command,
        fingerprint=spec.state.fingerprint,
        state_kind=spec.state.kind,
        ordering=matrix.ordering.name,
        operators=matrix.ordering.words(n),
        backend=backend,
        n=n,
        tol=tol,
    )


@click.group()
def main():
    """Moment-matrix tests for non-positive partial transposition of two-mode bosonic states."""


@main.command("scan-leading")
@common_options
def scan_leading(spec, ordering, n_max, backend, tol, cutoffs):
    """Leading principal minors det M_N(rho^Gamma), N = 1..n-max."""
    matrix = moments.build_moment_matrix(spec.state, ordering, n_max, transposed=True, backend=backend)
    rows = minors.leading_minor_scan(matrix, n_max, tol)
    report = _base_report("scan-leading", spec, matrix, backend, n_max, tol)
    report.leading = [leading_row(k, r) for k, r in enumerate(rows, 1)]
    negative = any(r.sign is minors.Sign.NEGATIVE for r in rows)
    report.verdict = minors.NPT_WITNESSED if negative else minors.PPT_CONSISTENT
    return report, EXIT_OK


@main.command("check")
@common_options
@click.option("--max-card", "max_card", default=minors.DEFAULT_MAX_CARDINALITY, show_default=True, type=click.IntRange(1))
@click.option(
    "--strategy",
    default=minors.EXHAUSTIVE,
    show_default=True,
    type=click.Choice([minors.EXHAUSTIVE, minors.GUIDED]),
)
@click.option("--with-oracle", is_flag=True, help="Also diagonalize the truncated partial transpose.")
def check(spec, ordering, n_max, backend, tol, cutoffs, max_card, strategy, with_oracle):
    """Search all principal minors of M(rho^Gamma) up to --max-card for a negative one."""
    matrix = moments.build_moment_matrix(spec.state, ordering, n_max, transposed=True, backend=backend)
    result = minors.search_witness(matrix, max_card, strategy=strategy, tol=tol)
    report = _base_report("check", spec, matrix, backend, n_max, tol)
    report.witness = result.to_dict()
    if with_oracle:
        cut = cutoffs or (None, None)
        report.oracle = oracle_npt(spec.state, *cut).to_dict()
    report.verdict = minors.NPT_WITNESSED if result.npt else minors.PPT_CONSISTENT
    return report, EXIT_NPT if result.npt else EXIT_OK


@main.command("compare")
@common_options
@click.option("--max-card", "max_card", default=minors.DEFAULT_MAX_CARDINALITY, show_default=True, type=click.IntRange(1))
def compare(spec, ordering, n_max, backend, tol, cutoffs, max_card):
    """Run the witness search and the partial-transpose oracle, then audit their agreement."""
    matrix = moments.build_moment_matrix(spec.state, ordering, n_max, transposed=True, backend=backend)
    result = minors.search_witness(matrix, max_card, tol=tol)
    cut = cutoffs or (None, None)
    oracle = oracle_npt(spec.state, *cut)
    audit = agreement_audit(spec.state, result, oracle)
    report = _base_report("compare", spec, matrix, backend, n_max, tol)
    report.witness = result.to_dict()
    report.oracle = oracle.to_dict()
    report.audit = audit.to_dict()
    report.verdict = minors.NPT_WITNESSED if result.npt else minors.PPT_CONSISTENT
    if not audit.ok:
        return report, EXIT_ERROR
    return report, EXIT_NPT if result.npt else EXIT_OK


@main.command("find-ordering")
@click.argument("state_file", type=click.Path(dir_okay=False))
@click.option("--signature", required=True, help='Target leading-minor signs, e.g. "+++++++00000000".')
@click.option("--budget", default=200_000, show_default=True, type=click.IntRange(1))
@click.option(
    "--backend",
    default=moments.AUTO,
    show_default=True,
    type=click.Choice([moments.AUTO, moments.EXACT, moments.FLOAT]),
)
@click.option("--tol", default=minors.DEFAULT_TOL, show_default=True, type=float)
@click.option("--json", "as_json", is_flag=True)
def find_ordering(state_file, signature, budget, backend, tol, as_json):
    """Reorder the degree-1 and degree-2 operators to reproduce a leading-minor signature."""
    try:
        spec = load_state(state_file)
        match = minors.ordering_signature_search(spec.state, signature, budget=budget, backend=backend, tol=tol)
    except NoMatchingOrdering as exc:
        click.echo(f"NoMatchingOrdering: {exc} (examined {exc.examined})", err=True)
        sys.exit(EXIT_ERROR)
    except (MomentPPTError, ValueError, ArithmeticError) as exc:
        _fail(str(exc))
    if as_json:
        click.echo(
            json.dumps(
                {
                    "ordering": match.ordering.name,
                    "operators": match.ordering.words(),
                    "multiindices": match.ordering.to_list(),
                    "signature": match.signature,
                    "examined": match.examined,
                },
                indent=2,
                ensure_ascii=False,
            )
        )
    else:
        click.echo(f"ordering   {match.ordering.name}")
        click.echo(f"operators  {', '.join(match.ordering.words())}")
        click.echo(f"signature  {match.signature}")
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
