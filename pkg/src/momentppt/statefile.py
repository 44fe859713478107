"""JSON state descriptions.

A state file holds one object with ``kind`` set to ``"fock"``, ``"coherent"``
or ``"density"``. Complex numbers are ``[re, im]`` pairs whose parts may be
numbers, decimal strings or ``"p/q"`` strings; a bare real value is also
accepted. Example::

    {"kind": "fock",
     "terms": [{"amplitude": ["1", "0"], "n_a": 0, "n_b": 1},
               {"amplitude": ["-1", "0"], "n_a": 1, "n_b": 0}]}

Coherent terms carry ``alpha`` and ``beta`` instead of occupations; a
density file carries ``n_max_a``, ``n_max_b`` and a square ``matrix``.
Optional keys: ``name``, ``cutoffs`` (``[n_max_a, n_max_b]``) and
``ordering`` (a list of ``[i1, i2, i3, i4]``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import MomentPPTError
from .exact import to_exact
from .fock import CoherentSuperposition, FockSuperposition, TruncatedDensityMatrix
from .moments import OperatorOrdering, MultiIndex


class StateFileError(MomentPPTError, ValueError):
    """The state file is unreadable or does not describe a valid state."""


@dataclass(frozen=True)
class StateSpec:
    state: object
    name: str | None = None
    cutoffs: tuple[int, int] | None = None
    ordering: OperatorOrdering | None = None


def _complex(value, what):
    try:
        return complex(to_exact(value))
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise StateFileError(f"bad complex number for {what}: {value!r}") from exc


def _exact(value, what):
    try:
        return to_exact(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise StateFileError(f"bad complex number for {what}: {value!r}") from exc


def parse_ordering(data, name: str = "explicit") -> OperatorOrdering:
    if isinstance(data, dict):
        # find-ordering --json output carries the list under "multiindices"
        data = data.get("multiindices", data.get("ordering"))
    if not isinstance(data, list):
        raise StateFileError("an ordering must be a list of [i1, i2, i3, i4] entries")
    try:
        return OperatorOrdering(name, tuple(MultiIndex(*(int(x) for x in m)) for m in data))
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"invalid ordering: {exc}") from exc


def parse_state(data: dict) -> StateSpec:
    if not isinstance(data, dict):
        raise StateFileError("state file must contain a JSON object")
    kind = data.get("kind")
    try:
        if kind == "fock":
            terms = [
                (_exact(t.get("amplitude", 1), "amplitude"), int(t["n_a"]), int(t["n_b"]))
                for t in data["terms"]
            ]
            state = FockSuperposition(terms)
        elif kind == "coherent":
            terms = [
                (
                    _complex(t.get("amplitude", 1), "amplitude"),
                    _complex(t["alpha"], "alpha"),
                    _complex(t["beta"], "beta"),
                )
                for t in data["terms"]
            ]
            state = CoherentSuperposition(terms)
        elif kind == "density":
            matrix = [[_exact(v, "matrix entry") for v in row] for row in data["matrix"]]
            state = TruncatedDensityMatrix.from_matrix(matrix, int(data["n_max_a"]), int(data["n_max_b"]), exact=True)
        else:
            raise StateFileError(f"unknown state kind {kind!r}; expected fock, coherent or density")
    except StateFileError:
        raise
    except KeyError as exc:
        raise StateFileError(f"missing key {exc.args[0]!r} in {kind} state") from exc
    except (TypeError, ValueError, AttributeError) as exc:
        raise StateFileError(f"invalid {kind} state: {exc}") from exc

    cutoffs = data.get("cutoffs")
    if cutoffs is not None:
        if isinstance(cutoffs, int):
            cutoffs = [cutoffs, cutoffs]
        cutoffs = tuple(int(c) for c in cutoffs)
        if len(cutoffs) != 2:
            raise StateFileError("cutoffs must be [n_max_a, n_max_b]")
    ordering = parse_ordering(data["ordering"]) if "ordering" in data else None
    return StateSpec(state, data.get("name"), cutoffs, ordering)


def load_state(path) -> StateSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise StateFileError(f"cannot read state file {path}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"cannot parse state file {path}: {exc}") from exc
    return parse_state(data)


def _pair(z) -> list[str]:
    z = to_exact(z)
    return [str(z.re), str(z.im)]


def dump_state(state, name: str | None = None, cutoffs=None) -> dict:
    """JSON-ready description of ``state`` that :func:`parse_state` reads back unchanged."""
    if isinstance(state, FockSuperposition):
        out = {"kind": "fock", "terms": [{"amplitude": _pair(c), "n_a": a, "n_b": b} for c, a, b in state.raw_terms]}
    elif isinstance(state, CoherentSuperposition):
        out = {
            "kind": "coherent",
            "terms": [{"amplitude": _pair(c), "alpha": _pair(a), "beta": _pair(b)} for c, a, b in state.raw_terms],
        }
    elif isinstance(state, TruncatedDensityMatrix):
        entries = state.exact_entries if state.exact_entries is not None else state.entries
        out = {
            "kind": "density",
            "n_max_a": state.n_max_a,
            "n_max_b": state.n_max_b,
            "matrix": [[_pair(v) for v in row] for row in entries],
        }
    else:
        raise TypeError(f"cannot serialize {type(state).__name__}")
    if name:
        out["name"] = name
    if cutoffs:
        out["cutoffs"] = list(cutoffs)
    return out
