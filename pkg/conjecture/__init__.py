from conjecture.scan_service import (
    CSV_COLUMNS,
    NEAR_REAL_POINT,
    ScanConfig,
    ScanRow,
    ScanService,
    TrialOutcome,
    aggregate,
    imaginary_fraction,
    run_trial,
    scan,
)
from conjecture.tangent import (
    ParameterLayout,
    RankReport,
    ambient_dim,
    expected_chart_dim_complex,
    expected_image_rank_real,
    fd_jacobian,
    gram_map_rank,
    gram_map_rank_report,
    linearized_constraints,
    tangent_basis,
)

__all__ = [
    "CSV_COLUMNS",
    "NEAR_REAL_POINT",
    "ParameterLayout",
    "RankReport",
    "ScanConfig",
    "ScanRow",
    "ScanService",
    "TrialOutcome",
    "aggregate",
    "ambient_dim",
    "expected_chart_dim_complex",
    "expected_image_rank_real",
    "fd_jacobian",
    "gram_map_rank",
    "gram_map_rank_report",
    "imaginary_fraction",
    "linearized_constraints",
    "run_trial",
    "scan",
    "tangent_basis",
]
