"""The product structure in action: grafting, composition, antipodes.

Run as ``python3 demos/02_algebra_identities.py``.
"""

from postlie import (
    braid_pair,
    check_braiding,
    gl_antipode,
    gl_product,
    parse_element,
    suite_axioms,
    theta,
    triangle,
)

o = parse_element("o")
cherry = parse_element("[o]")

print("== grafting and composition ==")
print("o > o       =", triangle(o, o))
print("o > [o]     =", triangle(o, cherry))
print("o * o       =", gl_product(o, o))
print("(o*o)*o     =", gl_product(gl_product(o, o), o))

print()
print("== antipodes ==")
print("S(o)        =", gl_antipode(o))
print("S(o o)      =", gl_antipode(parse_element("o o")))
print("theta(o)    =", theta(o))
print("theta^2 = id:", theta(theta(parse_element("2 [o] o + o"))) ==
      parse_element("2 [o] o + o"))

print()
print("== the braiding on the smallest pair ==")
print(braid_pair(o, o))

print()
print("== a quick identity sweep (reduced depth) ==")
for report in suite_axioms(max_grade=2, samples=20, sample_grade=3, seed=0):
    print(" ", report.line())
for report in check_braiding(max_grade=2, samples=10, sample_grade=3, seed=0):
    print(" ", report.line())
