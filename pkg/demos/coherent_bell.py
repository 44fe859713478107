"""
Coherent-state Bell pair
========================

N (|alpha, beta> - |-alpha, -beta>) with alpha = beta = 1. Moments come
from closed-form coherent overlaps; the truncated Fock trace is used only
as a cross-check.
"""

import numpy as np

from momentppt import build_moment_matrix, make_coherent_bell, make_product_coherent
from momentppt.minors import principal_minor, search_witness
from momentppt.moments import cross_validate_backends

bell = make_coherent_bell(1, 1)
print("normalization", bell.normalization, "adequate cutoffs", bell.adequate_cutoffs())

m = build_moment_matrix(bell, n=15)
rows = sorted([1, m.ordering.position("b"), m.ordering.position("a b")])
r = principal_minor(m, rows)
x = 1 / np.tanh(2)
print("minor on {1, b, a b}:", r.determinant, " closed form x(1-x^2):", x * (1 - x * x))

w = search_witness(m, max_cardinality=3)
print("first witness:", w.witness_words(), w.report.determinant)

# The product state |1>|1> has no witness among all 575 subsets of size <= 3.
p = search_witness(build_moment_matrix(make_product_coherent(1, 1), n=15), max_cardinality=3)
print("product state:", p.verdict, "after", p.examined, "subsets")

# agreement between the two moment routes
for transposed in (True, False):
    gap = cross_validate_backends(bell, n=15, transposed=transposed)
    print(f"analytic vs traced (transposed={transposed}): {gap:.2e}")
