"""Estimate the female/male composition of a group of people from their
first names.

The package ships reference-table ingestion (:mod:`gendermix.reference`),
the individual and self-consistent global estimators
(:mod:`gendermix.estimator`), a synthetic-population simulator with a
configurable attrition model (:mod:`gendermix.simulator`), a benchmark
sweep harness (:mod:`gendermix.experiments`), and a command-line
interface (``gendermix``).
"""

__version__ = "0.1.0"

from .errors import EstimationError, GendermixError, InputError
from .estimator import (
    METHOD_0,
    METHOD_1,
    METHOD_2,
    METHOD_GGEM,
    METHODS,
    BootstrapInterval,
    EstimateReport,
    GenderComposition,
    MethodSpec,
    PipelineRatio,
    bootstrap_interval,
    convert_composition,
    default_bin_edges,
    estimate_method0,
    estimate_method1,
    estimate_method2,
    inclination,
    partial_contributions,
    residual,
    solve_ggem,
    transform_conditional,
    with_bootstrap,
)
from .experiments import (
    Coverage,
    SweepConfig,
    SweepReport,
    abs_error,
    coverage_stats,
    export_report,
    rel_error,
    run_sweep,
)
from .reference import (
    MODE_FULL_NAME,
    MODE_INITIAL,
    MODE_LAST,
    GenderCounts,
    ReferenceTable,
    TargetList,
    export_canonical_csv,
    export_target_csv,
    filter_min_count,
    inclination_shift,
    ingest_canonical_csv,
    ingest_ssa_year_files,
    letter_table,
    letter_target,
    load_target,
    merge,
    name_entropy,
    normalize_name,
)
from .simulator import (
    GENERATOR_ID,
    LabeledPopulation,
    apply_pipeline,
    default_beta0_grid,
    export_population,
    generate,
    letter_population,
)

__all__ = [
    "__version__",
    "GendermixError",
    "InputError",
    "EstimationError",
    "GenderCounts",
    "ReferenceTable",
    "TargetList",
    "MODE_FULL_NAME",
    "MODE_INITIAL",
    "MODE_LAST",
    "normalize_name",
    "ingest_canonical_csv",
    "ingest_ssa_year_files",
    "filter_min_count",
    "merge",
    "letter_table",
    "letter_target",
    "load_target",
    "export_canonical_csv",
    "export_target_csv",
    "name_entropy",
    "inclination_shift",
    "METHOD_0",
    "METHOD_1",
    "METHOD_2",
    "METHOD_GGEM",
    "METHODS",
    "GenderComposition",
    "PipelineRatio",
    "convert_composition",
    "inclination",
    "transform_conditional",
    "residual",
    "estimate_method0",
    "estimate_method1",
    "estimate_method2",
    "solve_ggem",
    "MethodSpec",
    "EstimateReport",
    "BootstrapInterval",
    "bootstrap_interval",
    "with_bootstrap",
    "partial_contributions",
    "default_bin_edges",
    "LabeledPopulation",
    "generate",
    "apply_pipeline",
    "letter_population",
    "export_population",
    "default_beta0_grid",
    "GENERATOR_ID",
    "SweepConfig",
    "SweepReport",
    "Coverage",
    "run_sweep",
    "export_report",
    "coverage_stats",
    "abs_error",
    "rel_error",
]
