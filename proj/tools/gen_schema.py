#!/usr/bin/env python3
"""Regenerates core/data/*.schema from the EXPRESS schemas bundled with ifcopenshell.

Usage: python3 tools/gen_schema.py core/data
"""
import os
import sys

import ifcopenshell.ifcopenshell_wrapper as w

LABEL_ALIASES = {
    "IFC2X3": [("IfcQuantitySet", "IfcElementQuantity"),
               ("IfcSpatialStructure", "IfcSpatialStructureElement")],
    "IFC4": [("IfcSpatialStructure", "IfcSpatialStructureElement")],
}


def emit(schema_name, out_dir):
    schema = w.schema_by_name(schema_name)
    entities = sorted(schema.entities(), key=lambda e: e.name())
    # parents before children so the file reads top-down
    ordered, seen = [], set()

    def visit(e):
        if e.name() in seen:
            return
        st = e.supertype()
        if st is not None:
            visit(st)
        seen.add(e.name())
        ordered.append(e)

    for e in entities:
        visit(e)

    path = os.path.join(out_dir, schema_name.lower() + ".schema")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# Generated by tools/gen_schema.py from the %s EXPRESS schema.\n" % schema_name)
        fh.write("# entity <name> [parent <name>] [abstract] attrs <own explicit attrs|-> "
                 "[inverses <Name=Entity.Attr,...>]\n")
        fh.write("schema %s\n" % schema_name)
        for e in ordered:
            parts = ["entity", e.name()]
            if e.supertype() is not None:
                parts += ["parent", e.supertype().name()]
            if e.is_abstract():
                parts.append("abstract")
            attrs = [a.name() for a in e.attributes()]
            parts += ["attrs", ",".join(attrs) if attrs else "-"]
            inv = ["%s=%s.%s" % (i.name(), i.entity_reference().name(), i.attribute_reference().name())
                   for i in e.inverse_attributes()]
            if inv:
                parts += ["inverses", ",".join(inv)]
            fh.write(" ".join(parts) + "\n")
        for src, dst in LABEL_ALIASES[schema_name]:
            fh.write("alias %s %s\n" % (src, dst))
    print("wrote", path, len(ordered), "entities")


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "core/data"
    for name in ("IFC2X3", "IFC4"):
        emit(name, out)
