"""Wind-electrolyser dispatch simulation and levelised cost of hydrogen.

Simulates a year of half-hourly power flows between a wind plant, a PEM
electrolyser with its compressor, and the public grid under nine deployment
patterns, then decomposes the annualised cost into a levelised cost of
hydrogen with sensitivity sweeps.
"""

from .dispatch import (
    DispatchRule,
    DispatchVariant,
    FlowLedger,
    FlowRecord,
    dispatch_step,
    simulate_year,
    verify_ledger,
)
from .econ import (
    AnnualReport,
    CostReport,
    EconParams,
    UndefinedLCOHError,
    annual_report,
    comp_annual_cost,
    cost_report,
    crf,
    elec_annual_cost,
    export_revenue,
    ic_annual_cost,
    lcoh,
    pem_annual_cost,
)
from .plantmodel import (
    DEFAULT_CONSTANTS,
    DEFAULT_PEM_EFFICIENCY,
    Compressor,
    ConvergenceError,
    EfficiencyCurve,
    Electrolyser,
    GridConnection,
    PhysicalConstants,
    PlantSpec,
    WindPlant,
    efficiency_at,
    equivalent_full_load_hours,
    hydrogen_mass,
    split_power,
    split_power_array,
    stack_life_years,
)
from .profiles import (
    ProfileFormatError,
    WindProfile,
    load_farm_profiles,
    load_profile,
    save_profile,
    scale_to_cf,
    synth_profile,
)
from .scenarios import (
    CALIBRATED_CF,
    CALIBRATED_SEED,
    PRESET_IDS,
    SWEEP_PARAMETERS,
    ConfigError,
    ScenarioConfig,
    SweepPoint,
    SweepSpec,
    evaluate,
    preset,
    reference_profile,
    run_comparison,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "AnnualReport",
    "CALIBRATED_CF",
    "CALIBRATED_SEED",
    "Compressor",
    "ConfigError",
    "ConvergenceError",
    "CostReport",
    "DEFAULT_CONSTANTS",
    "DEFAULT_PEM_EFFICIENCY",
    "DispatchRule",
    "DispatchVariant",
    "EconParams",
    "EfficiencyCurve",
    "Electrolyser",
    "FlowLedger",
    "FlowRecord",
    "GridConnection",
    "PhysicalConstants",
    "PlantSpec",
    "PRESET_IDS",
    "ProfileFormatError",
    "ScenarioConfig",
    "SweepPoint",
    "SweepSpec",
    "SWEEP_PARAMETERS",
    "UndefinedLCOHError",
    "WindPlant",
    "WindProfile",
    "annual_report",
    "comp_annual_cost",
    "cost_report",
    "crf",
    "dispatch_step",
    "efficiency_at",
    "elec_annual_cost",
    "equivalent_full_load_hours",
    "evaluate",
    "export_revenue",
    "hydrogen_mass",
    "ic_annual_cost",
    "lcoh",
    "load_farm_profiles",
    "load_profile",
    "pem_annual_cost",
    "preset",
    "reference_profile",
    "run_comparison",
    "save_profile",
    "scale_to_cf",
    "simulate_year",
    "split_power",
    "split_power_array",
    "stack_life_years",
    "sweep",
    "synth_profile",
    "verify_ledger",
]
