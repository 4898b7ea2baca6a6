"""Post-Lie structure on planar rooted forests, with a numeric back end.

The package splits into a symbolic half and a numeric half.  The symbolic
half works with planar rooted trees and forests (:mod:`postlie.trees`),
aroma coefficient polynomials (:mod:`postlie.coeffs`), the grafting and
Grossman-Larson operations together with their antipodes and module
actions (:mod:`postlie.algebroid`), the braiding operator
(:mod:`postlie.braiding`), and truncated series built on top of all of
that (:mod:`postlie.series`).  The numeric half (:mod:`postlie.geomint`)
evaluates those symbols as differential operators on a matrix Lie group
and drives the volume and accuracy experiments.  :mod:`postlie.cli`
exposes the whole thing as the ``postlie`` command.

All symbolic arithmetic is exact: integer or Fraction coefficients, no
floating point anywhere until geomint evaluates on the group.
"""

from .trees import (
    CapacityError,
    DEFAULT_MAX_GRADE,
    EMPTY_FOREST,
    Forest,
    LEAF,
    MAX_OPERATION_GRADE,
    ParseError,
    PlanarTree,
    enumerate_forests,
    forests_of_grade,
    format_forest,
    format_tree,
    graft_into_forest,
    left_graft,
    parse_forest,
    parse_tree,
    single,
    trees_of_size,
)
from .coeffs import AromaGenerator, CoeffPoly
from .algebroid import (
    AlgebroidElement,
    TensorElement,
    antipode_concat,
    concat_mul,
    coproduct,
    counit,
    elements_equal,
    gl_antipode,
    gl_product,
    lu_action,
    module_action,
    parse_element,
    theta,
    triangle,
)
from .checks import (
    CheckReport,
    SUITES,
    suite_axioms,
    suite_degenerate,
    suite_gl,
    suite_smash,
    suite_theta,
)
from .braiding import (
    BraidReport,
    braid_expansion,
    braid_pair,
    braid_r,
    check_braiding,
    multiply_tensor,
    reduce_pairs,
)
from .series import (
    DIV_AROMA,
    TruncatedSeries,
    compose_gl,
    exp_concat,
    exp_gl,
    field_series,
    log_gl,
    modified_field,
    preprocessed_field,
)
from .geomint import (
    AnalyticCoeff,
    ConfigurationError,
    ExperimentConfig,
    ExperimentResult,
    ExperimentRow,
    FrameVectorField,
    GroupFrame,
    MatrixPoly,
    NumericCoeff,
    NumericError,
    aromatic_lie_euler_step,
    connection,
    connection_field,
    divergence,
    divergence_free_field,
    element_operator_value,
    element_tangent_matrix,
    eval_aroma,
    eval_forest_op,
    eval_tree,
    geometric_grid,
    jacobi_bracket_fd,
    lie_euler_step,
    make_aromatic_stepper,
    make_field,
    make_reference_stepper,
    make_stepper,
    random_rotation,
    reference_flow,
    run_experiment,
    slope_estimate,
    so3,
    step_volume,
    torsion_bracket,
    tree_field,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebroidElement",
    "AnalyticCoeff",
    "AromaGenerator",
    "BraidReport",
    "CapacityError",
    "CheckReport",
    "CoeffPoly",
    "ConfigurationError",
    "DEFAULT_MAX_GRADE",
    "DIV_AROMA",
    "EMPTY_FOREST",
    "ExperimentConfig",
    "ExperimentResult",
    "ExperimentRow",
    "Forest",
    "FrameVectorField",
    "GroupFrame",
    "LEAF",
    "MAX_OPERATION_GRADE",
    "MatrixPoly",
    "NumericCoeff",
    "NumericError",
    "ParseError",
    "PlanarTree",
    "SUITES",
    "TensorElement",
    "TruncatedSeries",
    "antipode_concat",
    "aromatic_lie_euler_step",
    "braid_expansion",
    "braid_pair",
    "braid_r",
    "check_braiding",
    "compose_gl",
    "concat_mul",
    "connection",
    "connection_field",
    "coproduct",
    "counit",
    "divergence",
    "divergence_free_field",
    "element_operator_value",
    "element_tangent_matrix",
    "elements_equal",
    "enumerate_forests",
    "eval_aroma",
    "eval_forest_op",
    "eval_tree",
    "exp_concat",
    "exp_gl",
    "field_series",
    "forests_of_grade",
    "format_forest",
    "format_tree",
    "geometric_grid",
    "gl_antipode",
    "gl_product",
    "graft_into_forest",
    "jacobi_bracket_fd",
    "left_graft",
    "lie_euler_step",
    "log_gl",
    "lu_action",
    "make_aromatic_stepper",
    "make_field",
    "make_reference_stepper",
    "make_stepper",
    "modified_field",
    "module_action",
    "multiply_tensor",
    "parse_element",
    "parse_forest",
    "parse_tree",
    "preprocessed_field",
    "random_rotation",
    "reduce_pairs",
    "reference_flow",
    "run_experiment",
    "single",
    "slope_estimate",
    "so3",
    "step_volume",
    "suite_axioms",
    "suite_degenerate",
    "suite_gl",
    "suite_smash",
    "suite_theta",
    "theta",
    "torsion_bracket",
    "tree_field",
    "trees_of_size",
    "triangle",
]
