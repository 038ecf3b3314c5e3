"""
Graphs and the brute-force oracle
=================================

Parse small graphs from edge-list text, query neighborhoods, and compute
automorphism groups by exhaustive backtracking.  Everything else in the
package is validated against these oracle results.
"""

from autgrammar.graph import closed_neighborhood, is_connected, max_degree, parse_graph
from autgrammar.oracle import brute_force_automorphisms, restricted_action
from autgrammar.perm import format_permutation

# the 4-cycle: vertices 1..4, edges around the square
c4 = parse_graph("4 4\n1 2\n2 3\n3 4\n1 4")
print("C4 connected:", is_connected(c4), "max degree:", max_degree(c4))
print("closed neighborhood of {1}:", closed_neighborhood(c4, [1]))

# its automorphism group: 4 rotations and 4 reflections
auts = brute_force_automorphisms(c4)
print(f"\n|Aut(C4)| = {len(auts)}:")
for a in auts:
    print(" ", format_permutation(a))

# a star with center 5: every leaf permutation is an automorphism, so the
# action restricted to the leaves 1..4 is the full symmetric group
star = parse_graph("5 4\n1 5\n2 5\n3 5\n4 5")
res = restricted_action(star, 4)
print(f"\nstar leaves invariant: {res.invariant}, |restriction| = {len(res.group)}")

# a path is rigid except for the end-to-end flip; its prefix {1,2} is NOT
# invariant, and the oracle returns the violating automorphism as a witness
p3 = parse_graph("3 2\n1 2\n2 3")
res = restricted_action(p3, 2)
print("P3 prefix {1,2} invariant:", res.invariant,
      "witness:", format_permutation(res.witness))
