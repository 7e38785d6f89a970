"""Physical-layer models: modulation formats, slot sizing and inter-core crosstalk.

Crosstalk between cores of a multicore fiber is estimated from four fiber
constants (coupling coefficient, bend radius, propagation constant, core
pitch). All core pairs are assumed equidistant, so a single mean coupling
value h applies to every adjacent pair.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

SLOT_WIDTH_GHZ = 12.5


@dataclass(frozen=True)
class ModulationFormat:
    name: str
    bits_per_symbol: int
    max_reach_km: float
    xt_threshold_db: float


# Reach limits (km) and crosstalk tolerance (dB) per format. Higher-order
# formats reach shorter and tolerate less crosstalk.
MODULATION_TABLE = (
    ModulationFormat("BPSK", 1, 8000.0, -14.0),
    ModulationFormat("QPSK", 2, 4000.0, -18.0),
    ModulationFormat("8QAM", 3, 2000.0, -21.0),
    ModulationFormat("16QAM", 4, 1000.0, -25.0),
    ModulationFormat("32QAM", 5, 500.0, -27.0),
    ModulationFormat("64QAM", 6, 250.0, -34.0),
)

MODULATIONS_BY_NAME = {m.name: m for m in MODULATION_TABLE}

# Default experiment set; 32QAM/64QAM stay available through configuration.
DEFAULT_ENABLED = ("BPSK", "QPSK", "8QAM", "16QAM")


def formats_by_name(names: Sequence[str]) -> tuple:
    """Resolve format names to table entries, sorted by spectral efficiency."""
    try:
        formats = [MODULATIONS_BY_NAME[n] for n in names]
    except KeyError as exc:
        raise ValueError(
            f"unknown modulation format {exc.args[0]!r}; "
            f"known: {', '.join(MODULATIONS_BY_NAME)}"
        ) from None
    if not formats:
        raise ValueError("modulation.enabled must list at least one format")
    return tuple(sorted(formats, key=lambda m: m.bits_per_symbol))


@dataclass(frozen=True)
class XtParams:
    """Fiber constants driving inter-core coupling.

    Units: coupling_coefficient and propagation_constant in 1/m, bend_radius
    and core_pitch in m. Defaults follow common multicore-fiber lab values
    and are meant to be overridden from configuration; reports must echo
    whichever values a run used.
    """

    coupling_coefficient: float = 4.0e-4
    bend_radius: float = 0.05
    propagation_constant: float = 4.0e6
    core_pitch: float = 4.0e-5
    occupancy_aware: bool = False

    def validate(self) -> None:
        for field_name in (
            "coupling_coefficient",
            "bend_radius",
            "propagation_constant",
            "core_pitch",
        ):
            value = getattr(self, field_name)
            if not (value > 0):
                raise ValueError(f"xt parameter {field_name} must be > 0, got {value}")


@dataclass(frozen=True)
class SlotDemand:
    data_slots: int
    guard_slots: int

    @property
    def total(self) -> int:
        return self.data_slots + self.guard_slots


def mean_xt_per_length(params: XtParams) -> float:
    """Mean crosstalk per metre between one pair of adjacent cores, 2k^2 r / (beta * pitch)."""
    params.validate()
    k = params.coupling_coefficient
    return 2.0 * k * k * params.bend_radius / (
        params.propagation_constant * params.core_pitch
    )


def xt_generic(h: float, adjacent_lengths_m: Sequence[float]) -> float:
    """Accumulated mean crosstalk (linear power ratio): h * L summed over adjacent cores."""
    if h <= 0:
        raise ValueError(f"h must be > 0, got {h}")
    total = 0.0
    for length in adjacent_lengths_m:
        if length < 0:
            raise ValueError(f"adjacent core length must be >= 0, got {length}")
        total += h * length
    return total


def xt_closed_form(n: int, h: float, length_m: float) -> float:
    """Crosstalk power ratio for n equidistant adjacent cores over one link.

    Saturating closed form for triangular/hexagonal core layouts:
    (n - n*exp(-(n+1)*h*L)) / (1 + n*exp(-(n+1)*h*L)). Returns 0 at L=0 and
    approaches n as L grows; reduces to n*h*L for small h*L.
    """
    if n < 0:
        raise ValueError(f"adjacent core count must be >= 0, got {n}")
    if h <= 0:
        raise ValueError(f"h must be > 0, got {h}")
    if length_m < 0:
        raise ValueError(f"length must be >= 0, got {length_m}")
    if n == 0:
        return 0.0
    decay = math.exp(-(n + 1) * h * length_m)
    return (n - n * decay) / (1.0 + n * decay)


def route_xt_db(
    link_lengths_km: Sequence[float],
    params: XtParams,
    n: Union[int, Sequence[int]],
) -> float:
    """Crosstalk of a whole route in dB.

    Evaluates the closed form per link and sums the linear contributions
    before converting to dB. `n` is either one adjacent-core count applied
    to every link or a per-link sequence (used when only cores carrying
    overlapping traffic are counted). Returns -inf when the total is zero.
    """
    if not link_lengths_km:
        raise ValueError("route must contain at least one link")
    h = mean_xt_per_length(params)
    if isinstance(n, int):
        per_link_n = [n] * len(link_lengths_km)
    else:
        per_link_n = list(n)
        if len(per_link_n) != len(link_lengths_km):
            raise ValueError("per-link adjacent-core counts must match link count")
    total = 0.0
    for length_km, link_n in zip(link_lengths_km, per_link_n):
        total += xt_closed_form(link_n, h, length_km * 1000.0)
    if total == 0.0:
        return float("-inf")
    return 10.0 * math.log10(total)


def select_modulation(
    route_length_km: float, enabled: Sequence[ModulationFormat]
) -> Optional[ModulationFormat]:
    """Most spectrally efficient enabled format whose reach covers the route.

    Returns None when the route is longer than every enabled reach, which
    the caller accounts as reach blocking.
    """
    best = None
    for fmt in enabled:
        if fmt.max_reach_km >= route_length_km:
            if best is None or fmt.bits_per_symbol > best.bits_per_symbol:
                best = fmt
    return best


def required_slots(
    bitrate_gbps: float,
    modulation: ModulationFormat,
    guard_slots: int = 1,
    slot_ghz: float = SLOT_WIDTH_GHZ,
) -> SlotDemand:
    """Frequency slots needed for a bitrate: ceil over the slot capacity, plus guard."""
    if bitrate_gbps <= 0:
        raise ValueError(f"bitrate must be > 0, got {bitrate_gbps}")
    if guard_slots < 0:
        raise ValueError(f"guard_slots must be >= 0, got {guard_slots}")
    capacity = slot_ghz * modulation.bits_per_symbol
    data = math.ceil(bitrate_gbps / capacity)
    return SlotDemand(data_slots=max(data, 1), guard_slots=guard_slots)


def xt_feasible(xt_db: float, modulation: ModulationFormat) -> bool:
    """True when the signal's crosstalk stays within the format's tolerance."""
    return xt_db <= modulation.xt_threshold_db
