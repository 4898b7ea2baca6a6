"""Backward error analysis as series algebra.

The one-step map of a method is a series in the step size; its formal
logarithm is the field the method follows exactly.  Run as
``python3 demos/03_modified_fields.py``.
"""

from postlie import (
    exp_concat,
    exp_gl,
    field_series,
    log_gl,
    modified_field,
)

ORDER = 4

print("== the flow itself ==")
print("exp_gl(t.o) through t^3:")
print(exp_gl(field_series(3), 3).dump())

print()
print("== the geodesic method's pullback ==")
print("exp_concat(t.o) through t^3:")
print(exp_concat(field_series(3), 3).dump())

print()
print("== modified field of the geodesic method ==")
m = modified_field("lie-euler", ORDER)
print(m.dump())
print()
print("degree-2 term is -1/2.[o]; the method is first order only.")

print()
print("== round trip ==")
print("exp_gl(log_gl(exp_concat)) == exp_concat:",
      exp_gl(log_gl(exp_concat(field_series(ORDER), ORDER), ORDER), ORDER)
      == exp_concat(field_series(ORDER), ORDER))

print()
print("== preprocessed field with the divergence aroma ==")
print(modified_field("aromatic", 3).dump())
