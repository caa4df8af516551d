from elastika.distances.edit import erp, lcss, msm, twe
from elastika.distances.warping import (
    UNLIMITED,
    AlignmentResult,
    adtw,
    ddtw,
    direct_alignment,
    dtw,
    dtw_cells,
    dwdtw,
    normalize_window,
    path_cost,
    wdtw,
    wdtw_weights,
)

__all__ = [
    "UNLIMITED",
    "AlignmentResult",
    "adtw",
    "ddtw",
    "direct_alignment",
    "dtw",
    "dtw_cells",
    "dwdtw",
    "erp",
    "lcss",
    "msm",
    "normalize_window",
    "path_cost",
    "twe",
    "wdtw",
    "wdtw_weights",
]
