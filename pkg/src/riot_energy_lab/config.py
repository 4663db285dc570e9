"""Key-value configuration files for model constants.

Format (one ``key = value`` pair per line, ``#`` comments)::

    # riot-energy-lab constants v1
    boot_current_ma = 405        # mA
    scan_slope_ma_per_unit_duty = 9.3

Unknown keys are rejected so typos cannot silently fall back to defaults.
All defaults are compiled in; a file only overrides what it names.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

from .errors import ValidationError
from .gateway import ApBaseConstants, MiniLampConstants

# Supply voltages used to convert model currents/powers; the AP value is
# derived from its measured P/I ratios, the others are configurable
# assumptions (same USB-class supply for the mini-lamp, 3 V node rail).
DEFAULT_SUPPLY_VOLTAGES_V = {
    "ap_supply_voltage_v": 5.0,
    "minilamp_supply_voltage_v": 5.0,
    "node_supply_voltage_v": 3.0,
}


def parse_key_values(text: str) -> dict[str, float]:
    out: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            out[key] = float(value)
        except ValueError:
            raise ValidationError(f"line {lineno}: non-numeric value {value!r}") from None
    return out


@dataclasses.dataclass(frozen=True)
class Constants:
    """All tunable model constants, with compiled-in defaults."""

    ap: ApBaseConstants = dataclasses.field(default_factory=ApBaseConstants)
    minilamp: MiniLampConstants = dataclasses.field(default_factory=MiniLampConstants)
    minilamp_supply_voltage_v: float = DEFAULT_SUPPLY_VOLTAGES_V["minilamp_supply_voltage_v"]
    node_supply_voltage_v: float = DEFAULT_SUPPLY_VOLTAGES_V["node_supply_voltage_v"]


def load_constants(path: str | Path | None = None) -> Constants:
    """Constants from a key-value file; defaults when ``path`` is None."""
    if path is None:
        return Constants()
    values = parse_key_values(Path(path).read_text())

    ap_fields = {f.name for f in dataclasses.fields(ApBaseConstants)}
    ml_fields = {f.name for f in dataclasses.fields(MiniLampConstants)}
    extra_fields = {"minilamp_supply_voltage_v", "node_supply_voltage_v", "ap_supply_voltage_v"}

    unknown = set(values) - ap_fields - ml_fields - extra_fields
    if unknown:
        raise ValidationError(f"unknown constant key(s): {', '.join(sorted(unknown))}")

    ap_kwargs = {k: v for k, v in values.items() if k in ap_fields}
    if "ap_supply_voltage_v" in values:
        ap_kwargs["supply_voltage_v"] = values["ap_supply_voltage_v"]
    ml_kwargs = {k: v for k, v in values.items() if k in ml_fields}
    return Constants(
        ap=ApBaseConstants(**ap_kwargs),
        minilamp=MiniLampConstants(**ml_kwargs),
        minilamp_supply_voltage_v=values.get(
            "minilamp_supply_voltage_v", DEFAULT_SUPPLY_VOLTAGES_V["minilamp_supply_voltage_v"]
        ),
        node_supply_voltage_v=values.get(
            "node_supply_voltage_v", DEFAULT_SUPPLY_VOLTAGES_V["node_supply_voltage_v"]
        ),
    )


def write_default_constants(path: str | Path) -> None:
    """Write a fully commented constants file with the compiled defaults."""
    c = Constants()
    lines = ["# riot-energy-lab constants v1", "# access point (currents mA)"]
    for f in dataclasses.fields(ApBaseConstants):
        lines.append(f"{f.name} = {getattr(c.ap, f.name):g}")
    lines.append("# mini-lamp gateway")
    for f in dataclasses.fields(MiniLampConstants):
        lines.append(f"{f.name} = {getattr(c.minilamp, f.name):g}")
    lines.append("# supply voltages (V)")
    lines.append(f"minilamp_supply_voltage_v = {c.minilamp_supply_voltage_v:g}")
    lines.append(f"node_supply_voltage_v = {c.node_supply_voltage_v:g}")
    Path(path).write_text("\n".join(lines) + "\n")
