"""
Which orderings hide the NPT witness?
=====================================

Leading minors depend only on which operators sit in the prefix, so the
search walks prefix sets depth first. Here we ask for several target
signatures on the singlet and the coherent Bell pair.
"""

from momentppt import make_coherent_bell, make_singlet
from momentppt.errors import NoMatchingOrdering
from momentppt.minors import ordering_signature_search

targets = ["+++++++00000000", "++++++0----0000", "+++++++---00000"]

for name, state in [("singlet", make_singlet()), ("coherent bell", make_coherent_bell(1, 1))]:
    for target in targets:
        try:
            match = ordering_signature_search(state, target)
        except NoMatchingOrdering as exc:
            print(f"{name:<14} {target}  no match ({exc.examined} determinants)")
            continue
        print(f"{name:<14} {target}  {match.ordering.name:<17} {', '.join(match.ordering.words()[5:9])}, ...")
