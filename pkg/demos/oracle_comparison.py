"""
Moment witnesses against the partial-transpose spectrum
=======================================================

Diagonalize the truncated rho^Gamma and compare with the principal-minor
search, for the bundled example states.
"""

from pathlib import Path

from momentppt import build_moment_matrix
from momentppt.minors import search_witness
from momentppt.oracle import agreement_audit, oracle_npt
from momentppt.statefile import load_state

here = Path(__file__).resolve().parent / "states"

print(f"{'state':<18} {'moment':<18} {'min eig rho^G':>14}  audit")
for path in sorted(here.glob("*.json")):
    spec = load_state(path)
    w = search_witness(build_moment_matrix(spec.state, n=15), max_cardinality=3)
    o = oracle_npt(spec.state)
    a = agreement_audit(spec.state, w, o)
    print(f"{path.stem:<18} {w.verdict:<18} {o.min_eigenvalue:>14.6f}  {a.status}")

# bell_phi is NPT but its first witness needs three operators;
# vacuum and the product state are separable, so nothing is found.
