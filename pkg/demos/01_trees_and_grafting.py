"""Planar forests and left grafting, from the bottom up.

Run as ``python3 demos/01_trees_and_grafting.py``.
"""

from postlie import (
    enumerate_forests,
    format_forest,
    format_tree,
    left_graft,
    parse_tree,
    trees_of_size,
)

print("== canonical enumeration ==")
print("trees per vertex count:", [len(trees_of_size(n)) for n in range(1, 6)])
for w in enumerate_forests(3):
    print(f"  grade {w.grade}: {format_forest(w)}")

print()
print("== left grafting ==")
# Grafting attaches the left tree as a new leftmost child of each vertex
# of the right tree, one summand per vertex.
for a, b in [("o", "o"), ("o", "[o]"), ("[o]", "[oo]")]:
    terms = left_graft(parse_tree(a), parse_tree(b))
    shown = " + ".join(
        (f"{m}*" if m != 1 else "") + format_tree(t)
        for t, m in sorted(terms.items(), key=lambda kv: kv[0].sort_key)
    )
    print(f"  {a} grafted into {b}  =  {shown}")

print()
print("== planarity matters ==")
left = parse_tree("[[o]o]")
right = parse_tree("[o[o]]")
print(f"  {format_tree(left)} and {format_tree(right)} are distinct:", left != right)
