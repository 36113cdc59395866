"""Typographic parameter set resolved from a configuration program.

Defaults follow the standard unit scheme: a 1000-unit em divided into ten
basic units, with every vertical metric and stroke weight expressed in those
units. Configuration files override any subset; derived defaults (xheight
from ascent, bearings from u) recompute from whatever was given.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TypographicConfig:
    em: float = 1000.0
    u: float = 100.0
    ascent: float = 800.0
    descent: float = 200.0
    xheight: float = 800.0 * 2.0 / 3.0
    mheight: float = 600.0
    Xheight: float = 800.0
    thick: float = 100.0
    thin: float = 0.7          # ratio of thick
    subthick: float = 66.6
    xthick: float = 1.0
    slant: float = 0.0         # degrees
    condense: float = 1.0
    terminalround: float = 0.5
    lbearing: float = 40.0
    rbearing: float = 40.0

    def __post_init__(self) -> None:
        for name in self.__dataclass_fields__:
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} is not finite")
        if self.em <= 0:
            raise ConfigError(f"em must be positive, got {self.em:g}")
        if abs(self.u - self.em / 10.0) > 1e-9:
            raise ConfigError(
                f"u must equal em/10 ({self.em / 10.0:g}), got {self.u:g}")
        if self.condense <= 0:
            raise ConfigError(f"condense must be positive, got {self.condense:g}")
        if not 0.0 < self.thin <= 1.0:
            raise ConfigError(f"thin is a ratio of thick in (0, 1], "
                              f"got {self.thin:g}")

    @classmethod
    def from_params(cls, params: dict[str, float]) -> "TypographicConfig":
        em = params.get("em", 1000.0)
        u = params.get("u", em / 10.0)
        ascent = params.get("ascent", 8 * u)
        return cls(
            em=em,
            u=u,
            ascent=ascent,
            descent=params.get("descent", 2 * u),
            xheight=params.get("xheight", 2.0 / 3.0 * ascent),
            mheight=params.get("mheight", 3.0 / 4.0 * ascent),
            Xheight=params.get("Xheight", 8 * u),
            thick=params.get("thick", 1 * u),
            thin=params.get("thin", 0.7),
            subthick=params.get("subthick", 0.666 * u),
            xthick=params.get("xthick", 1.0),
            slant=params.get("slant", 0.0),
            condense=params.get("condense", 1.0),
            terminalround=params.get("terminalround", 0.5),
            lbearing=params.get("lbearing", 0.4 * u),
            rbearing=params.get("rbearing", 0.4 * u),
        )

    def as_params(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in self.__dataclass_fields__}
