"""Designspace XML emission for variable-font compilers."""

from __future__ import annotations

import os
import xml.etree.ElementTree as ET

from .build import MasterSet
from .fsutil import write_atomic


def _num(value: float) -> str:
    return str(int(value)) if value == int(value) else f"{value:g}"


def designspace_document(master_set: MasterSet, family: str,
                         ufo_filenames: dict[str, str]) -> str:
    """Build the designspace XML; ufo_filenames maps master name -> path."""
    root = ET.Element("designspace", {"format": "4.1"})
    axes_el = ET.SubElement(root, "axes")
    for axis in master_set.axes:
        ET.SubElement(axes_el, "axis", {
            "tag": axis.tag,
            "name": axis.name,
            "minimum": _num(axis.minimum),
            "default": _num(axis.default),
            "maximum": _num(axis.maximum),
        })

    def location_el(parent, location: dict[str, float]) -> None:
        loc = ET.SubElement(parent, "location")
        for axis in master_set.axes:
            ET.SubElement(loc, "dimension", {
                "name": axis.name,
                "xvalue": _num(location.get(axis.tag, axis.default)),
            })

    sources = ET.SubElement(root, "sources")
    for master in master_set.masters:
        name = master.spec.name
        source = ET.SubElement(sources, "source", {
            "filename": ufo_filenames[name],
            "name": name,
            "familyname": family,
            "stylename": name,
        })
        if master is master_set.default_master:
            ET.SubElement(source, "info", {"copy": "1"})
        location_el(source, master.location)

    instances = ET.SubElement(root, "instances")
    for inst in master_set.named_instances:
        el = ET.SubElement(instances, "instance", {
            "name": f"{family} {inst.name}",
            "familyname": family,
            "stylename": inst.name,
        })
        full = {axis.tag: axis.default for axis in master_set.axes}
        full.update(inst.location)
        location_el(el, full)

    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"


def write_designspace(master_set: MasterSet, family: str,
                      ufo_filenames: dict[str, str], out_path: str) -> str:
    missing = [name for name in ufo_filenames
               if not os.path.isdir(os.path.join(os.path.dirname(out_path),
                                                 ufo_filenames[name]))]
    if missing:
        raise FileNotFoundError(
            f"master UFO packages not written yet: {', '.join(missing)}")
    write_atomic(out_path, designspace_document(master_set, family,
                                                ufo_filenames))
    return out_path
