"""Run reports shared by the command-line tools."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .minors import MinorReport

SCHEMA = "momentppt.run-report/1"


def format_det(report: MinorReport) -> str:
    return f"{float(report.determinant):.12g}"


def leading_row(n: int, report: MinorReport) -> dict:
    return {
        "N": n,
        "determinant": format_det(report),
        "rational": str(report.determinant) if report.exact else None,
        "exact": report.exact,
        "sign": report.sign.value,
    }


@dataclass
class RunReport:
    command: str
    fingerprint: str
    state_kind: str
    ordering: str
    operators: list[str]
    backend: str
    n: int
    tol: float
    leading: list[dict] | None = None
    witness: dict | None = None
    oracle: dict | None = None
    audit: dict | None = None
    verdict: str | None = None
    schema: str = field(default=SCHEMA)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)

    def render(self) -> str:
        lines = [
            f"state      {self.state_kind} [{self.fingerprint}]",
            f"ordering   {self.ordering}: {', '.join(self.operators)}",
            f"backend    {self.backend}   N = {self.n}   tol = {self.tol:g}",
        ]
        if self.leading is not None:
            lines.append("")
            lines.append(f"{'N':>3}  {'sign':>4}  {'det M_N(rho^Gamma)':>20}  {'exact':>10}")
            for row in self.leading:
                exact = row["rational"] if row["exact"] else "float"
                lines.append(f"{row['N']:>3}  {row['sign']:>4}  {row['determinant']:>20}  {exact:>10}")
        if self.witness is not None:
            lines.append("")
            if self.witness["witness"]:
                minor = self.witness["minor"]
                value = minor.get("rational") or f"{minor['determinant']:.12g}"
                lines.append(
                    f"witness    r = {tuple(self.witness['witness'])}  operators: {', '.join(self.witness['witness_words'])}"
                )
                lines.append(f"           det M^r(rho^Gamma) = {value}")
            else:
                lines.append(
                    f"witness    none among {self.witness['examined']} principal minors "
                    f"of cardinality <= {self.witness['max_cardinality']}"
                )
        if self.oracle is not None:
            lines.append(
                f"oracle     {self.oracle['verdict']}  min eigenvalue {self.oracle['min_eigenvalue']:.12g}"
                f"  cutoffs {tuple(self.oracle['cutoffs'])}"
            )
        if self.audit is not None:
            lines.append(f"audit      {self.audit['status']}: {self.audit['message']}")
        if self.verdict is not None:
            lines.append("")
            lines.append(self.verdict)
        return "\n".join(lines)
