"""Delta-discretized sum-product experiments.

Covering numbers of sumsets and productsets, delta-tube/delta-ball incidence
counting with a grid-accelerated engine, the Elekes line-family construction,
and the experiment harness that checks the measured exponents.
"""

from .elekes import (
    DEFAULT_CONSTANT_FLOOR,
    ElekesSystem,
    Eq1Report,
    build_elekes,
    eq1_report,
    verify_tube_richness,
)
from .errors import SnapWouldMergeError, TooLargeError
from .experiments import (
    ApGpResult,
    ApGpRow,
    ExperimentConfig,
    ExponentFit,
    RichnessRow,
    SweepResult,
    SweepRow,
    admissible_jittered,
    apgp_proof_step_ok,
    apgp_row,
    fit_exponent,
    load_config,
    parse_config,
    read_apgp_rows,
    read_sweep_rows,
    render_csv,
    render_summary,
    richness_table,
    run_apgp,
    run_richness_diagnostic,
    run_sumprod_sweep,
    write_report,
)
from .geometry import (
    DeltaBall,
    DeltaTube,
    IncidenceReport,
    RichnessHistogram,
    WellSpacingParams,
    WellSpacingReport,
    ball_lattice,
    count_incidences,
    count_incidences_bruteforce,
    essentially_distinct_tubes,
    rich_objects,
    serialize_incidence_report,
    tube_contains,
    tube_from_line,
    tube_overlap_ratio,
    well_spaced_check,
)
from .sets import (
    ORACLE_MAX_VALUES,
    Scale,
    SeparatedSet,
    ValueList,
    covering_number,
    covering_number_oracle,
    covering_witness,
    load_values,
    make_ap,
    make_gp,
    make_jittered,
    productset,
    save_values,
    separation_threshold,
    snap_to_grid,
    sumset,
)

__version__ = "0.1.0"

__all__ = [
    "ApGpResult",
    "ApGpRow",
    "DEFAULT_CONSTANT_FLOOR",
    "DeltaBall",
    "DeltaTube",
    "ElekesSystem",
    "Eq1Report",
    "ExperimentConfig",
    "ExponentFit",
    "IncidenceReport",
    "ORACLE_MAX_VALUES",
    "RichnessHistogram",
    "RichnessRow",
    "Scale",
    "SeparatedSet",
    "SnapWouldMergeError",
    "SweepResult",
    "SweepRow",
    "TooLargeError",
    "ValueList",
    "WellSpacingParams",
    "WellSpacingReport",
    "admissible_jittered",
    "apgp_proof_step_ok",
    "apgp_row",
    "ball_lattice",
    "build_elekes",
    "count_incidences",
    "count_incidences_bruteforce",
    "covering_number",
    "covering_number_oracle",
    "covering_witness",
    "eq1_report",
    "essentially_distinct_tubes",
    "fit_exponent",
    "load_config",
    "load_values",
    "make_ap",
    "make_gp",
    "make_jittered",
    "parse_config",
    "productset",
    "read_apgp_rows",
    "read_sweep_rows",
    "render_csv",
    "render_summary",
    "rich_objects",
    "richness_table",
    "run_apgp",
    "run_richness_diagnostic",
    "run_sumprod_sweep",
    "save_values",
    "separation_threshold",
    "serialize_incidence_report",
    "snap_to_grid",
    "sumset",
    "tube_contains",
    "tube_from_line",
    "tube_overlap_ratio",
    "verify_tube_richness",
    "well_spaced_check",
    "write_report",
]
