"""Slice regions, wslice datasets and the checks of the wslice conditions."""
from .census import CensusRow, census_aggregate, dyadic_census
from .conditions import (DatasetMeasures, WsPlusMeasures, check_slice_condition, check_wsplus,
                         evaluate_dataset, measure_dataset, measure_wsplus, sample_paths,
                         smallest_passing_C, ws1plus_exact, ws1plus_walk_oracle)
from .corridors import SliceKind, admissible_for_pair, all_corridor_slices, make_corridor_slices
from .regions import (SliceRegion, WsliceDataset, dataset_from_dict, load_dataset, make_slice,
                      rectangle_piece, save_dataset)
from .witness import avoiding_route, slice_failure_witness, witness_points
from ..reports import CheckReport, ConditionResult

__all__ = [
    "CensusRow", "census_aggregate", "dyadic_census", "DatasetMeasures", "WsPlusMeasures",
    "check_slice_condition", "check_wsplus", "evaluate_dataset", "measure_dataset",
    "measure_wsplus", "sample_paths", "smallest_passing_C", "ws1plus_exact",
    "ws1plus_walk_oracle", "SliceKind", "admissible_for_pair", "all_corridor_slices",
    "make_corridor_slices", "SliceRegion", "WsliceDataset", "dataset_from_dict", "load_dataset",
    "make_slice", "rectangle_piece", "save_dataset", "avoiding_route", "slice_failure_witness",
    "witness_points", "CheckReport", "ConditionResult",
]
