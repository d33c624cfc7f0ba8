"""Built-in experiment list run by the ``suite`` subcommand.

Each entry is ``(name, config)``; the configs are ordinary documents for
:func:`~roughideal.experiment.run` and can be copied into files.
"""
from __future__ import annotations

SEC2_GRID = {"lo": -2.0, "hi": 2.0, "step": 0.01}
EX44_CANDIDATES = {"kind": "candidates",
                   "names": ["g1", "g2", "g3", "g4", "g5", "g6", "0"],
                   "limits": {"0": ["g1", "g2", "g3", "g4", "g5", "g6"]}}

SUITE: list[tuple[str, dict]] = [
    ("density_evens", {"task": "density", "set": "evens", "horizon": 10000}),
    ("density_squares", {"task": "density", "set": "squares", "horizon": 100000}),
    ("sec2_limit_r1", {"task": "limit-set", "sequence": "sec2_example", "r": 1.0,
                       "grid": SEC2_GRID, "horizon": 100000}),
    ("sec2_limit_r09", {"task": "limit-set", "sequence": "sec2_example", "r": 0.9,
                        "grid": SEC2_GRID, "horizon": 100000}),
    ("sec2_min_degree", {"task": "min-degree", "sequence": "sec2_example",
                         "grid": SEC2_GRID, "horizon": 100000, "tol": 0.05}),
    ("const_zero_min_degree", {"task": "min-degree", "sequence": "const_zero",
                               "grid": SEC2_GRID, "ideal": "fin"}),
    ("const_zero_structure", {"task": "structure", "sequence": "const_zero",
                              "grid": SEC2_GRID, "ideal": "fin",
                              "r_grid": [0.5, 1.0]}),
    ("remark_4_3_cluster", {"task": "cluster-set", "sequence": "remark_4_3",
                            "grid": {"lo": -1.0, "hi": 2.0, "step": 0.01},
                            "r_grid": [0.5, 1.0, 5.0], "horizon": 100000}),
    ("example_4_4_cluster", {"task": "cluster-set", "sequence": "example_4_4",
                             "grid": EX44_CANDIDATES, "r": 0.5,
                             "thresholds": [0.005, 0.01]}),
    ("example_4_6_cluster", {"task": "cluster-set", "sequence": "example_4_6",
                             "grid": {"kind": "candidates", "names": ["0", "P"]},
                             "r_grid": [1.5, 0.5], "horizon": 100000}),
    ("repr_closed_two_points", {"task": "repr-closed", "F": [0.0, 1.0],
                                "grid": {"lo": -1.0, "hi": 2.0, "step": 0.05},
                                "r_grid": [0.5, 0.2, 0.1, 0.05],
                                "eps_grid": [0.1, 0.05]}),
    ("lim_gamma_gap", {"task": "lim-gamma-gap", "r": 1.0}),
    ("korovkin_field_g", {"task": "korovkin-field", "mode": "g", "j_list": 200}),
    ("korovkin_field_h", {"task": "korovkin-field", "mode": "h", "j_list": 200}),
    ("korovkin_bound_e2", {"task": "korovkin-bound", "f": "e2", "t_list": 64}),
    ("tachev_e2", {"task": "tachev", "f": "e2", "t_list": [25, 100, 400]}),
    ("adjudicate_5_3", {"task": "adjudicate-5-3", "f": "x2_plus_3x", "j_list": 200}),
]
