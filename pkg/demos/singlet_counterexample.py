"""
Leading minors can miss an entangled state
==========================================

The two-mode singlet (|01> - |10>)/sqrt(2) is NPT, yet with a suitable
operator ordering every leading minor of the transposed moment matrix is
nonnegative. The negative determinant only shows up in a non-leading
principal minor.
"""

from momentppt import build_moment_matrix, make_singlet
from momentppt.minors import leading_minor_scan, ordering_signature_search, search_witness, signature

state = make_singlet()

# Default ordering: 1; a, a†, b, b†; then the degree-2 block.
m = build_moment_matrix(state, "sv-compatible", 15)
scan = leading_minor_scan(m)
print("default ordering   ", ", ".join(m.ordering.words(15)))
print("leading signs      ", signature(scan))
for k, r in enumerate(scan, 1):
    print(f"  det M_{k:<2} = {r.determinant}")

# The default ordering already goes negative at N = 8. Search for a graded
# reordering whose leading minors stop at zero instead.
match = ordering_signature_search(state, "+++++++00000000")
print()
print("reordered          ", ", ".join(match.ordering.words()))
print("leading signs      ", match.signature)

# Under that ordering the Sylvester scan sees nothing, but the full
# principal-minor search still finds the 2x2 witness on {1, a b}.
m2 = build_moment_matrix(state, match.ordering, 15)
w = search_witness(m2, max_cardinality=2)
print("witness            ", w.witness_words(), "det =", w.report.determinant)
