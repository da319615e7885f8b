"""Pull temperatures and pressures out of free-text reaction conditions."""

from __future__ import annotations

import re
from dataclasses import dataclass

_NUM = r"[-−]?\d+(?:\.\d+)?"
_RANGE_SEP = r"\s*(?:-|–|—|to)\s*"
_TEMP_UNIT = r"(°\s*C|º\s*C|deg\s*C|degC|C\b|°\s*F|F\b|K\b)"
_PRES_UNIT = r"(atm|bar|psi|MPa|kPa|mbar|torr|Torr|mmHg)\b"

_TEMP_RANGE = re.compile(rf"({_NUM}){_RANGE_SEP}({_NUM})\s*{_TEMP_UNIT}")
_TEMP = re.compile(rf"(?<![\w.])({_NUM})\s*{_TEMP_UNIT}")
_PRES_RANGE = re.compile(rf"({_NUM}){_RANGE_SEP}({_NUM})\s*{_PRES_UNIT}")
_PRES = re.compile(rf"(?<![\w.])({_NUM})\s*{_PRES_UNIT}")
_ROOM = re.compile(r"\b(rt|r\.t\.|room temperature|ambient temperature)\b", re.IGNORECASE)

_TO_ATM = {
    "atm": 1.0,
    "bar": 1 / 1.01325,
    "mbar": 1 / 1013.25,
    "psi": 1 / 14.6959,
    "mpa": 9.86923,
    "kpa": 1 / 101.325,
    "torr": 1 / 760,
    "mmhg": 1 / 760,
}


def _num(s: str) -> float:
    return float(s.replace("−", "-"))


def _to_celsius(value: float, unit: str) -> float:
    u = unit.replace(" ", "").replace("º", "°").lower()
    if u.endswith("f"):
        return (value - 32) * 5 / 9
    if u == "k":
        return value - 273.15
    return value


@dataclass(frozen=True)
class ConditionBounds:
    t_min: float = -100.0
    t_max: float = 300.0
    p_max: float = 100.0

    def __post_init__(self):
        if self.t_min >= self.t_max or self.p_max <= 0:
            raise ValueError("condition bounds are empty")


@dataclass(frozen=True)
class Conditions:
    temperatures_c: tuple[float, ...]
    pressures_atm: tuple[float, ...]

    def violations(self, bounds: ConditionBounds) -> list[str]:
        out = []
        for t in self.temperatures_c:
            if not bounds.t_min <= t <= bounds.t_max:
                out.append(f"temperature {t:g} °C outside [{bounds.t_min:g}, {bounds.t_max:g}]")
        for p in self.pressures_atm:
            if not 0 < p <= bounds.p_max:
                out.append(f"pressure {p:g} atm outside (0, {bounds.p_max:g}]")
        return out


def parse_conditions(text: str) -> Conditions:
    """Temperatures in °C and pressures in atm found in ``text``.

    >>> parse_conditions("NaOH, H2O, 0-25 °C then reflux at 2 bar").temperatures_c
    (0.0, 25.0)
    """
    temps: list[float] = []
    pres: list[float] = []
    text = text or ""
    used = []
    for m in _TEMP_RANGE.finditer(text):
        temps += [_to_celsius(_num(m.group(1)), m.group(3)), _to_celsius(_num(m.group(2)), m.group(3))]
        used.append(m.span())
    for m in _TEMP.finditer(text):
        if any(a <= m.start() < b for a, b in used):
            continue
        temps.append(_to_celsius(_num(m.group(1)), m.group(2)))
    if _ROOM.search(text):
        temps.append(25.0)
    used = []
    for m in _PRES_RANGE.finditer(text):
        f = _TO_ATM[m.group(3).lower()]
        pres += [_num(m.group(1)) * f, _num(m.group(2)) * f]
        used.append(m.span())
    for m in _PRES.finditer(text):
        if any(a <= m.start() < b for a, b in used):
            continue
        pres.append(_num(m.group(1)) * _TO_ATM[m.group(2).lower()])
    return Conditions(tuple(temps), tuple(pres))
