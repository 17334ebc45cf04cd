"""Published reference values, stored at printed (3-decimal) precision.

Configurations are keyed by id 1-18.  Turnout columns are group-1 cutpoints
t[1, A] and t[1, B]; deviations are observed minus equilibrium turnout of the
majority / minority camp.
"""

from __future__ import annotations

from types import MappingProxyType

from .model import Category, ElectorateConfig, Rule

# Table 1, "Voter configurations": id -> (category, (n1, n2, n3), (p1, p2, p3), printed pbar)
_CONFIGS = {
    1: ("IC", (21, 21, 21), (0.5, 0.5, 0.5), 0.5),
    2: ("IC", (21, 21, 7), (0.5, 0.5, 0.5), 0.5),
    3: ("IC", (21, 21, 3), (0.5, 0.5, 0.5), 0.5),
    4: ("Global", (21, 21, 21), (0.5, 0.5, 0.35), 0.45),
    5: ("Local", (21, 21, 21), (0.1, 0.7, 0.7), 0.5),
    6: ("Both", (21, 21, 21), (0.35, 0.5, 0.5), 0.45),
    7: ("Global", (21, 21, 7), (0.5, 0.5, 0.35), 0.48),
    8: ("Both", (21, 21, 7), (0.48, 0.48, 0.48), 0.48),
    9: ("Both", (21, 21, 7), (0.45, 0.5, 0.5), 0.48),
    10: ("IC", (7, 7, 7), (0.5, 0.5, 0.5), 0.5),
    11: ("IC", (7, 21, 21), (0.5, 0.5, 0.5), 0.5),
    12: ("Both", (7, 21, 21), (0.15, 0.5, 0.5), 0.45),
    13: ("Local", (7, 21, 21), (0.1, 0.57, 0.57), 0.5),
    14: ("Global", (7, 7, 7), (0.5, 0.5, 0.35), 0.45),
    15: ("Local", (7, 7, 7), (0.1, 0.7, 0.7), 0.5),
    16: ("Both", (7, 7, 7), (0.35, 0.5, 0.5), 0.45),
    17: ("Both", (7, 21, 21), (0.48, 0.48, 0.48), 0.48),
    18: ("Global", (7, 21, 21), (0.5, 0.5, 0.45), 0.48),
}

CONFIG_IDS = tuple(sorted(_CONFIGS))

# Table 4, equilibrium columns: id -> (WTA t1A, WTA t1B, PR t1A, PR t1B)
_EQUILIBRIUM = {
    1: (0.359, 0.359, 0.391, 0.391),
    2: (0.359, 0.359, 0.424, 0.424),
    3: (0.359, 0.359, 0.442, 0.442),
    4: (0.359, 0.359, 0.367, 0.383),
    5: (0.283, 0.144, 0.753, 0.250),
    6: (0.368, 0.301, 0.437, 0.333),
    7: (0.359, 0.359, 0.417, 0.425),
    8: (0.363, 0.353, 0.427, 0.416),
    9: (0.368, 0.345, 0.441, 0.405),
    10: (0.516, 0.516, 0.553, 0.553),
    11: (0.516, 0.516, 0.421, 0.421),
    12: (0.585, 0.344, 0.630, 0.301),
    13: (0.588, 0.307, 0.737, 0.287),
    14: (0.516, 0.516, 0.526, 0.555),
    15: (0.538, 0.284, 1.000, 0.354),
    16: (0.553, 0.455, 0.629, 0.480),
    17: (0.521, 0.508, 0.424, 0.414),
    18: (0.516, 0.516, 0.415, 0.422),
}

# Table 4, "Experiment (average)" columns, same layout as _EQUILIBRIUM
_EXPERIMENT = {
    1: (0.449, 0.473, 0.495, 0.448),
    2: (0.471, 0.493, 0.504, 0.462),
    3: (0.481, 0.477, 0.489, 0.467),
    4: (0.340, 0.486, 0.321, 0.496),
    5: (0.071, 0.291, 0.103, 0.457),
    6: (0.184, 0.444, 0.218, 0.522),
    7: (0.410, 0.440, 0.415, 0.491),
    8: (0.340, 0.465, 0.301, 0.471),
    9: (0.288, 0.494, 0.314, 0.559),
    10: (0.420, 0.532, 0.485, 0.451),
    11: (0.410, 0.408, 0.434, 0.375),
    12: (0.188, 0.407, 0.113, 0.428),
    13: (0.121, 0.309, 0.161, 0.369),
    14: (0.329, 0.543, 0.306, 0.489),
    15: (0.162, 0.309, 0.195, 0.455),
    16: (0.232, 0.530, 0.175, 0.540),
    17: (0.322, 0.472, 0.285, 0.392),
    18: (0.370, 0.479, 0.362, 0.367),
}

# Table 3, Panel A (majority, experiment - theory): id -> (WTA, PR)
_DEV_MAJORITY = {
    4: (0.127, 0.113),
    7: (0.081, 0.066),
    14: (0.027, -0.066),
    18: (-0.037, -0.055),
    5: (0.146, 0.207),
    13: (0.002, 0.082),
    15: (0.025, 0.101),
    6: (0.144, 0.189),
    8: (0.112, 0.055),
    9: (0.149, 0.154),
    12: (0.062, 0.127),
    16: (0.075, 0.059),
    17: (-0.035, -0.022),
}

# Table 3, Panel B (minority): id -> (WTA, PR)
_DEV_MINORITY = {
    4: (-0.019, -0.046),
    7: (0.051, -0.002),
    14: (-0.187, -0.220),
    18: (-0.146, -0.053),
    5: (-0.212, -0.650),
    13: (-0.467, -0.576),
    15: (-0.376, -0.805),
    6: (-0.183, -0.219),
    8: (-0.023, -0.126),
    9: (-0.080, -0.127),
    12: (-0.397, -0.516),
    16: (-0.321, -0.454),
    17: (-0.200, -0.138),
}

# Table 6, theory and experiment columns: (category, rule) -> values
_WELFARE_THEORY = {
    ("Global", "WTA"): {"majority": 0.552, "minority": 0.409, "gini": 0.074},
    ("Local", "WTA"): {"majority": 0.442, "minority": 0.527, "gini": 0.040},
    ("Both", "WTA"): {"majority": 0.560, "minority": 0.403, "gini": 0.060},
    ("Global", "PR"): {"majority": 0.563, "minority": 0.398, "gini": 0.086},
    ("Local", "PR"): {"majority": 0.553, "minority": 0.367, "gini": 0.031},
    ("Both", "PR"): {"majority": 0.571, "minority": 0.387, "gini": 0.073},
}
_WELFARE_EXPERIMENT = {
    ("Global", "WTA"): {"majority": 0.598, "minority": 0.343, "gini": 0.135},
    ("Local", "WTA"): {"majority": 0.466, "minority": 0.507, "gini": 0.034},
    ("Both", "WTA"): {"majority": 0.641, "minority": 0.310, "gini": 0.137},
    ("Global", "PR"): {"majority": 0.610, "minority": 0.336, "gini": 0.145},
    ("Local", "PR"): {"majority": 0.709, "minority": 0.252, "gini": 0.060},
    ("Both", "PR"): {"majority": 0.712, "minority": 0.239, "gini": 0.193},
}

_RULE_COL = {Rule.WTA: 0, Rule.PR: 2}


def config(config_id: int) -> ElectorateConfig:
    try:
        _, n, p, _ = _CONFIGS[int(config_id)]
    except (KeyError, ValueError):
        raise KeyError(f"no embedded configuration {config_id!r} (expected 1-18)") from None
    return ElectorateConfig(n, p, label=str(config_id))


def category(config_id: int) -> Category:
    return Category(_CONFIGS[config_id][0])


def printed_pbar(config_id: int) -> float:
    return _CONFIGS[config_id][3]


def equilibrium_turnout(config_id: int, rule) -> tuple[float, float]:
    """Published equilibrium (t[1, A], t[1, B])."""
    i = _RULE_COL[Rule.parse(rule)]
    row = _EQUILIBRIUM[config_id]
    return row[i], row[i + 1]


def experiment_turnout(config_id: int, rule) -> tuple[float, float]:
    """Published experimental averages (t[1, A], t[1, B])."""
    i = _RULE_COL[Rule.parse(rule)]
    row = _EXPERIMENT[config_id]
    return row[i], row[i + 1]


def printed_deviation(config_id: int, rule, camp: str) -> float:
    table = {"majority": _DEV_MAJORITY, "minority": _DEV_MINORITY}[camp]
    return table[config_id][0 if Rule.parse(rule) is Rule.WTA else 1]


def deviation_ids() -> tuple[int, ...]:
    return tuple(sorted(_DEV_MAJORITY))


def welfare_theory(category_name: str, rule) -> dict:
    return MappingProxyType(_WELFARE_THEORY[(str(Category(category_name).value), Rule.parse(rule).value)])


def welfare_experiment(category_name: str, rule) -> dict:
    return MappingProxyType(_WELFARE_EXPERIMENT[(str(Category(category_name).value), Rule.parse(rule).value)])


def ids_in(category_name) -> tuple[int, ...]:
    cat = Category(category_name)
    return tuple(i for i in CONFIG_IDS if category(i) is cat)
