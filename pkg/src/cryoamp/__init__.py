"""Circuit simulator and measuring-cell physics for a deeply cooled HEMT amplifier."""

from cryoamp.netlist import Netlist, NetlistError, parse, validate
from cryoamp.device import StatzParams, drain_current, small_signal, fit_statz
from cryoamp.dc import solve_op, sweep_supply, derive_bias_resistor
from cryoamp.ac import linearize, sweep_ac, design_l_match, tank_equivalent, TankSource

__all__ = [
    "Netlist",
    "NetlistError",
    "parse",
    "validate",
    "StatzParams",
    "drain_current",
    "small_signal",
    "fit_statz",
    "solve_op",
    "sweep_supply",
    "derive_bias_resistor",
    "linearize",
    "sweep_ac",
    "design_l_match",
    "tank_equivalent",
    "TankSource",
]

__version__ = "0.1.0"
