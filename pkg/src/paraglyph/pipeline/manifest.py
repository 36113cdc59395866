"""Project manifest: glyph sources, design axes, masters, named instances.

The manifest is a YAML document; all paths inside it are relative to the
manifest file itself.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import yaml


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class AxisDef:
    name: str
    tag: str
    minimum: float
    default: float
    maximum: float
    parameter: str | None = None
    # Axis value -> parameter expression (data, evaluated against configs).
    mapping: dict[float, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.minimum <= self.default <= self.maximum:
            raise ManifestError(
                f"axis {self.tag}: need min <= default <= max, got "
                f"{self.minimum}/{self.default}/{self.maximum}")
        if len(self.tag) != 4:
            raise ManifestError(f"axis tag must be 4 characters: {self.tag!r}")

    def normalize(self, value: float) -> float:
        """Designspace-style per-axis coordinate in [-1, 1]."""
        if not self.minimum <= value <= self.maximum:
            raise ManifestError(
                f"axis {self.tag}: value {value:g} outside "
                f"[{self.minimum:g}, {self.maximum:g}]")
        if value == self.default:
            return 0.0
        if value < self.default:
            return (value - self.default) / (self.default - self.minimum)
        return (value - self.default) / (self.maximum - self.default)


DEFAULT_AXES = (
    AxisDef("Weight", "wght", 100, 400, 900, "thick",
            {100: "0.5u", 400: "0.90u", 900: "1.25u"}),
    AxisDef("Slant", "slnt", -15, 0, 0, "slant",
            {-15: "15", 0: "0"}),
    AxisDef("Width", "wdth", 75, 100, 125, "condense",
            {75: "0.8", 100: "1", 125: "1.2"}),
    AxisDef("Soft", "SOFT", 0, 50, 100, "terminalround",
            {0: "0.15", 50: "0.5", 100: "1.0"}),
)

_WEIGHT_INSTANCES = (
    ("Thin", 100), ("ExtraLight", 200), ("Light", 300), ("Regular", 400),
    ("Medium", 500), ("SemiBold", 600), ("Bold", 700), ("Black", 900),
)


def default_instance_grid() -> list["InstanceSpec"]:
    """The stock 8 weights x 2 widths x 2 softs = 32 named instances."""
    instances = []
    for width_name, wdth in (("", 100.0), ("Condensed", 75.0)):
        for soft_name, soft in (("", 50.0), ("Sharp", 0.0)):
            for weight_name, wght in _WEIGHT_INSTANCES:
                parts = [p for p in (width_name, soft_name, weight_name) if p]
                location = {"wght": float(wght)}
                if wdth != 100.0:
                    location["wdth"] = wdth
                if soft != 50.0:
                    location["SOFT"] = soft
                instances.append(InstanceSpec(" ".join(parts), location))
    return instances


@dataclass(frozen=True)
class GlyphEntry:
    file: str
    name: str | None = None
    unicode: int | None = None
    advance: str | None = None  # expression in the glyph's parameter scope


@dataclass(frozen=True)
class MasterSpec:
    name: str
    config: str
    location: dict[str, float]
    overrides: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class InstanceSpec:
    name: str
    location: dict[str, float]


@dataclass(frozen=True)
class Project:
    family: str
    version: str
    glyphs: tuple[GlyphEntry, ...]
    axes: tuple[AxisDef, ...]
    masters: tuple[MasterSpec, ...]
    instances: tuple[InstanceSpec, ...]
    base_dir: str

    def axis(self, tag: str) -> AxisDef:
        for axis in self.axes:
            if axis.tag == tag:
                return axis
        raise ManifestError(f"unknown axis tag {tag!r}")

    def resolve(self, relpath: str) -> str:
        return os.path.normpath(os.path.join(self.base_dir, relpath))

    def full_location(self, location: dict[str, float]) -> dict[str, float]:
        """Fill unspecified axes with their defaults; validate tags/ranges."""
        full = {axis.tag: axis.default for axis in self.axes}
        for tag, value in location.items():
            if tag not in full:
                raise ManifestError(f"unknown axis tag {tag!r}")
            self.axis(tag).normalize(float(value))  # range check
            full[tag] = float(value)
        return full


def _parse_unicode(value) -> int | None:
    if value is None:
        return None
    if isinstance(value, int):
        return value
    text = str(value).strip()
    if text.upper().startswith("U+"):
        text = text[2:]
    return int(text, 16)


def load_project(path: str) -> Project:
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ManifestError("manifest must be a mapping")
    base_dir = os.path.dirname(os.path.abspath(path))

    glyphs = []
    for item in data.get("glyphs", []):
        if isinstance(item, str):
            glyphs.append(GlyphEntry(file=item))
            continue
        glyphs.append(GlyphEntry(
            file=item["file"],
            name=item.get("name"),
            unicode=_parse_unicode(item.get("unicode")),
            advance=item.get("advance"),
        ))
    if not glyphs:
        raise ManifestError("manifest declares no glyphs")

    axes: tuple[AxisDef, ...]
    if "axes" in data:
        axes = tuple(AxisDef(
            name=a["name"],
            tag=a["tag"],
            minimum=float(a["minimum"]),
            default=float(a["default"]),
            maximum=float(a["maximum"]),
            parameter=a.get("parameter"),
            mapping={float(k): str(v) for k, v in (a.get("mapping") or {}).items()},
        ) for a in data["axes"])
    else:
        axes = DEFAULT_AXES

    masters = []
    for m in data.get("masters", []):
        masters.append(MasterSpec(
            name=m["name"],
            config=m["config"],
            location={k: float(v) for k, v in (m.get("location") or {}).items()},
            overrides={k: float(v) for k, v in (m.get("overrides") or {}).items()},
        ))
    if not masters:
        raise ManifestError("manifest declares no masters")

    raw_instances = data.get("instances", "default")
    if raw_instances == "default":
        instances = default_instance_grid()
    else:
        instances = [InstanceSpec(i["name"],
                                  {k: float(v) for k, v in i["location"].items()})
                     for i in (raw_instances or [])]

    tags = [axis.tag for axis in axes]
    if len(set(tags)) != len(tags):
        raise ManifestError(f"duplicate axis tags: {tags}")

    project = Project(
        family=data.get("family", "Untitled"),
        version=str(data.get("version", "0.1")),
        glyphs=tuple(glyphs),
        axes=axes,
        masters=tuple(masters),
        instances=tuple(instances),
        base_dir=base_dir,
    )
    for master in project.masters:
        project.full_location(master.location)  # validates tags and ranges
    return project
