"""Annualised cost components and levelised cost of hydrogen.

Capital is annualised with the capital recovery factor and combined with the
simulated year's energy and mass flows.  Currency is GBP throughout: prices
per kWh, capital per kW (per kg/yr of throughput for the compressor),
levelised cost per kg and per MWh of hydrogen on the higher-heating-value
basis.
"""

import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

from .dispatch import DispatchVariant, FlowLedger
from .plantmodel import (
    DEFAULT_CONSTANTS,
    Compressor,
    Electrolyser,
    GridConnection,
    PhysicalConstants,
    PlantSpec,
    equivalent_full_load_hours,
    stack_life_years,
)

if TYPE_CHECKING:  # pragma: no cover
    from .scenarios import ScenarioConfig

# Long-run variable cost proxy for industrial import prices; an alternative
# to the retail default, selectable via overrides.
INDUSTRIAL_IMPORT_PRICE_GBP_PER_KWH = 0.119

TABLE_HEADER = (
    "use_case",
    "lcoh_gbp_per_mwh",
    "lcoh_gbp_per_kg",
    "lcoh_free_gbp_per_mwh",
    "annual_h2_t",
    "stack_life_years",
    "load_factor_pct",
)

# Deployment patterns where the wind and hydrogen businesses could plausibly
# be a single investor, so a zero-PPA "free electricity" bound is reported.
_FREE_VARIANTS = {
    DispatchVariant.OFF_GRID_DIRECT,
    DispatchVariant.CURTAILMENT_HARVEST,
    DispatchVariant.BTM_GRID_FIRST,
    DispatchVariant.BTM_PEM_FIRST,
}


class UndefinedLCOHError(RuntimeError):
    """Levelised cost is undefined because annual hydrogen mass is zero."""


@dataclass(frozen=True)
class EconParams:
    """Discount rate and the electricity price book (GBP/kWh)."""

    discount_rate: float = 0.03
    p_ppa: float = 0.057      # wind-to-electrolyser contract price
    p_import: float = 0.184   # grid retail import price
    p_export: float = 0.07    # grid export price (informational revenue)
    multi_stack_replacement: bool = False

    def __post_init__(self):
        if self.discount_rate <= 0:
            raise ValueError("discount_rate must be positive")
        if min(self.p_ppa, self.p_import, self.p_export) < 0:
            raise ValueError("prices must be >= 0")


def crf(d: float, n: float) -> float:
    """Capital recovery factor: equal annual payment per unit of capital."""
    if d <= 0:
        raise ValueError("discount rate must be positive")
    if n < 1:
        raise ValueError("lifetime must be >= 1 year")
    growth = (1.0 + d) ** n
    return d * growth / (growth - 1.0)


def pem_annual_cost(
    el: Electrolyser,
    n_stack_years: float,
    d: float,
    multi_replacement: bool = False,
) -> float:
    """Annualised electrolyser cost: capital plus levelised stack replacement plus O&M.

    The replacement outlay is discounted to present value at the stack's
    realised life and annualised with the capital recovery factor.  The
    default levelises a single replacement; ``multi_replacement`` discounts
    one replacement per stack life that fits inside the asset lifetime.
    """
    if n_stack_years <= 0:
        raise ValueError("n_stack_years must be positive")
    replace_outlay = el.stack_replace_frac_of_capex * el.capex_per_kw
    if math.isinf(n_stack_years):
        levelised = 0.0
    elif multi_replacement:
        levelised = 0.0
        k = 1
        while k * n_stack_years < el.lifetime_years:
            levelised += replace_outlay * (1.0 + d) ** -(k * n_stack_years)
            k += 1
    else:
        # negative exponent so very long stack lives underflow to zero
        levelised = replace_outlay * (1.0 + d) ** -n_stack_years
    per_kw = (el.capex_per_kw + levelised) * crf(d, el.lifetime_years)
    per_kw += el.opex_frac_of_capex_per_year * el.capex_per_kw
    return el.rated_kw * per_kw


def comp_annual_cost(comp: Compressor, annual_capacity_kg: float, d: float) -> float:
    """Annualised compressor cost for a given hydrogen throughput (kg/yr).

    O&M is charged as a fraction of the full (non-annualised) capital.
    """
    if annual_capacity_kg < 0:
        raise ValueError("annual_capacity_kg must be >= 0")
    capex = comp.capex_per_kg_annual * annual_capacity_kg
    return capex * crf(d, comp.lifetime_years) + comp.opex_frac_of_capex_per_year * capex


def ic_annual_cost(grid: GridConnection, d: float) -> float:
    """Annualised interconnection cost borne by the hydrogen producer."""
    factor = crf(d, grid.ic_lifetime_years)
    line = (
        grid.line_cost_share_h2
        * grid.line_capacity_mw * 1000.0
        * grid.line_cost_per_kw
        * factor
    )
    wire = (
        grid.wire_cost_share_h2
        * grid.wire_capacity_mw * 1000.0
        * grid.wire_cost_per_kw
        * factor
    )
    return line + wire


def elec_annual_cost(ledger: FlowLedger, prices: EconParams) -> float:
    """Annual electricity bill: wind energy at the PPA price, imports at retail."""
    return (
        ledger.wind_to_h2_mwh * 1000.0 * prices.p_ppa
        + ledger.import_mwh * 1000.0 * prices.p_import
    )


def export_revenue(ledger: FlowLedger, prices: EconParams) -> float:
    """Wind-side export revenue (GBP/yr).  Reported, never netted off costs."""
    return ledger.export_mwh * 1000.0 * prices.p_export


def lcoh(
    c_total: float,
    annual_mass_kg: float,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> tuple[float, float]:
    """Levelised cost of hydrogen as (GBP/kg, GBP/MWh on the HHV basis)."""
    if annual_mass_kg <= 0:
        raise UndefinedLCOHError("annual hydrogen mass is zero; LCOH undefined")
    per_kg = c_total / annual_mass_kg
    per_mwh = c_total / (annual_mass_kg * consts.hhv_kwh_per_kg / 1000.0)
    return per_kg, per_mwh


@dataclass(frozen=True)
class CostReport:
    """Annual cost decomposition and the resulting levelised cost."""

    c_pem: float
    c_comp: float
    c_ic: float
    c_elec: float
    c_total: float
    lcoh_per_kg: float
    lcoh_per_mwh_hhv: float
    shares: dict[str, float]
    export_revenue: float

    def to_dict(self) -> dict:
        return {
            "c_pem_gbp": self.c_pem,
            "c_comp_gbp": self.c_comp,
            "c_ic_gbp": self.c_ic,
            "c_elec_gbp": self.c_elec,
            "c_total_gbp": self.c_total,
            "lcoh_gbp_per_kg": self.lcoh_per_kg,
            "lcoh_gbp_per_mwh_hhv": self.lcoh_per_mwh_hhv,
            "shares": dict(self.shares),
            "export_revenue_gbp": self.export_revenue,
        }


def cost_report(
    plant: PlantSpec,
    prices: EconParams,
    ledger: FlowLedger,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> CostReport:
    """Assemble the annual cost decomposition for a simulated year."""
    life = stack_life_years(ledger.pem_mwh, plant.electrolyser)
    c_pem = pem_annual_cost(
        plant.electrolyser, life, prices.discount_rate, prices.multi_stack_replacement
    )
    c_comp = comp_annual_cost(plant.compressor, ledger.annual_mass_kg, prices.discount_rate)
    c_ic = ic_annual_cost(plant.grid, prices.discount_rate)
    c_elec = elec_annual_cost(ledger, prices)
    c_total = c_pem + c_comp + c_ic + c_elec
    per_kg, per_mwh = lcoh(c_total, ledger.annual_mass_kg, consts)
    if c_total > 0:
        shares = {
            "electrolyser": c_pem / c_total,
            "compressor": c_comp / c_total,
            "interconnection": c_ic / c_total,
            "electricity": c_elec / c_total,
        }
    else:
        shares = {k: 0.0 for k in ("electrolyser", "compressor", "interconnection", "electricity")}
    return CostReport(
        c_pem=c_pem,
        c_comp=c_comp,
        c_ic=c_ic,
        c_elec=c_elec,
        c_total=c_total,
        lcoh_per_kg=per_kg,
        lcoh_per_mwh_hhv=per_mwh,
        shares=shares,
        export_revenue=export_revenue(ledger, prices),
    )


@dataclass(frozen=True)
class AnnualReport:
    """One scenario's annual outcome: production, duty, costs, levelised cost."""

    scenario_id: str
    annual_mass_kg: float
    eflh_hours: float
    stack_life_years: float
    load_factor: float        # intake energy / (rated power x hours)
    load_factor_pem: float    # electrolysis energy / (rated power x hours)
    wind_to_h2_mwh: float
    import_mwh: float
    export_mwh: float
    curtailed_mwh: float
    cost: CostReport
    lcoh_free_per_mwh_hhv: float | None = None

    @property
    def annual_mass_t(self) -> float:
        return self.annual_mass_kg / 1000.0

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "annual_mass_kg": self.annual_mass_kg,
            "annual_mass_t": self.annual_mass_t,
            "eflh_hours": self.eflh_hours,
            "stack_life_years": self.stack_life_years,
            "load_factor": self.load_factor,
            "load_factor_pem": self.load_factor_pem,
            "wind_to_h2_mwh": self.wind_to_h2_mwh,
            "import_mwh": self.import_mwh,
            "export_mwh": self.export_mwh,
            "curtailed_mwh": self.curtailed_mwh,
            "cost": self.cost.to_dict(),
            "lcoh_free_gbp_per_mwh": self.lcoh_free_per_mwh_hhv,
        }

    def table_row(self) -> tuple[str, ...]:
        """Summary row in the comparison table's column order."""
        free = "" if self.lcoh_free_per_mwh_hhv is None else f"{self.lcoh_free_per_mwh_hhv:.2f}"
        return (
            self.scenario_id,
            f"{self.cost.lcoh_per_mwh_hhv:.2f}",
            f"{self.cost.lcoh_per_kg:.2f}",
            free,
            f"{self.annual_mass_t:.2f}",
            f"{self.stack_life_years:.2f}",
            f"{self.load_factor * 100.0:.2f}",
        )


def annual_report(
    scenario: "ScenarioConfig",
    ledger: FlowLedger,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> AnnualReport:
    """Join the simulated ledger with the cost model into one annual report."""
    el = scenario.plant.electrolyser
    eflh = equivalent_full_load_hours(ledger.pem_mwh, el.rated_mw)
    life = stack_life_years(ledger.pem_mwh, el)
    cost = cost_report(scenario.plant, scenario.econ, ledger, consts)
    hours = ledger.total_hours
    free = None
    if scenario.rule.variant in _FREE_VARIANTS:
        free_prices = replace(scenario.econ, p_ppa=0.0)
        free = cost_report(scenario.plant, free_prices, ledger, consts).lcoh_per_mwh_hhv
    return AnnualReport(
        scenario_id=scenario.id,
        annual_mass_kg=ledger.annual_mass_kg,
        eflh_hours=eflh,
        stack_life_years=life,
        load_factor=ledger.intake_mwh / (el.rated_mw * hours),
        load_factor_pem=eflh / hours,
        wind_to_h2_mwh=ledger.wind_to_h2_mwh,
        import_mwh=ledger.import_mwh,
        export_mwh=ledger.export_mwh,
        curtailed_mwh=ledger.curtailed_mwh,
        cost=cost,
        lcoh_free_per_mwh_hhv=free,
    )
