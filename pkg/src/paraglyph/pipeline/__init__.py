"""Font pipeline: masters, compatibility, interpolation, SVG/UFO/designspace."""

from .build import (
    BuildError,
    BuiltGlyph,
    CompatReport,
    InterpolationError,
    Master,
    MasterSet,
    build_glyph,
    build_master,
    build_master_set,
    check_compatibility,
    interpolate,
    load_config_params,
)
from .config import ConfigError, TypographicConfig
from .designspace import designspace_document, write_designspace
from .education import EducationMode, derive_education_variant
from .manifest import (
    AxisDef,
    GlyphEntry,
    InstanceSpec,
    ManifestError,
    MasterSpec,
    Project,
    default_instance_grid,
    load_project,
)
from .svg import glyph_to_svg, write_svg_dir
from .ufo import FontMetadata, read_glif, read_ufo, write_ufo

__all__ = [
    "AxisDef",
    "BuildError",
    "BuiltGlyph",
    "CompatReport",
    "ConfigError",
    "EducationMode",
    "FontMetadata",
    "GlyphEntry",
    "InstanceSpec",
    "InterpolationError",
    "ManifestError",
    "Master",
    "MasterSet",
    "MasterSpec",
    "Project",
    "TypographicConfig",
    "build_glyph",
    "build_master",
    "build_master_set",
    "check_compatibility",
    "default_instance_grid",
    "derive_education_variant",
    "designspace_document",
    "glyph_to_svg",
    "interpolate",
    "load_config_params",
    "load_project",
    "read_glif",
    "read_ufo",
    "write_designspace",
    "write_svg_dir",
    "write_ufo",
]
