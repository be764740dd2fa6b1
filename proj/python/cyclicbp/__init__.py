"""Cyclic multivalued iteration toolkit.

Set geometry over compact regions of R^d, contraction certificates for
p-cyclic multivalued maps, and order-respecting trajectory diagnostics.
"""

try:
    from ._cyclicbp import *  # noqa: F401,F403  (installed layout)
    from ._cyclicbp import __doc__ as _core_doc  # noqa: F401
except ImportError:  # in-tree build: extension sits on sys.path directly
    from _cyclicbp import *  # noqa: F401,F403

__all__ = [
    "Region",
    "ScenarioError",
    "metric",
    "point_to_set_distance",
    "nearest_point",
    "set_distance",
    "hausdorff",
    "sup_deviation",
    "diameter",
    "sample",
    "run_scenario_text",
    "run_scenario_file",
    "check_scenario_file",
    "canonical_scenario_json",
]
