#!/usr/bin/env python3
"""Writes the hand-built IFC fixtures used by the tests.

Attribute positions come from core/data/*.schema, so every argument lands in the
slot its keyword names. Run from the repository root:

    python3 tests/fixtures/gen_fixtures.py tests/fixtures
"""
import hashlib
import os
import sys

ROOT = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))


def load_schema(path):
    parents, own = {}, {}
    for line in open(path, encoding="utf-8"):
        line = line.split("#", 1)[0].strip()
        if not line.startswith("entity "):
            continue
        tok = line.split()
        name = tok[1]
        i = 2
        parent = None
        if tok[i] == "parent":
            parent = tok[i + 1]
            i += 2
        if tok[i] == "abstract":
            i += 1
        assert tok[i] == "attrs"
        attrs = [] if tok[i + 1] == "-" else tok[i + 1].split(",")
        parents[name] = parent
        own[name] = attrs
    full = {}

    def attrs_of(name):
        if name not in full:
            p = parents[name]
            full[name] = (attrs_of(p) if p else []) + own[name]
        return full[name]

    for name in parents:
        attrs_of(name)
    return full


class Ref:
    def __init__(self, n):
        self.n = n


class Enum:
    def __init__(self, v):
        self.v = v


class Typed:
    def __init__(self, t, v):
        self.t, self.v = t, v


DERIVED = object()


def encode_text(s):
    out = []
    run = []

    def flush():
        if run:
            out.append("\\X2\\" + "".join("%04X" % ord(c) for c in run) + "\\X0\\")
            run.clear()

    for c in s:
        if ord(c) > 126:
            run.append(c)
            continue
        flush()
        if c == "'":
            out.append("''")
        elif c == "\\":
            out.append("\\\\")
        else:
            out.append(c)
    flush()
    return "'" + "".join(out) + "'"


def fmt(v):
    if v is None:
        return "$"
    if v is DERIVED:
        return "*"
    if isinstance(v, Ref):
        return "#%d" % v.n
    if isinstance(v, Enum):
        return "." + v.v + "."
    if isinstance(v, Typed):
        return "%s(%s)" % (v.t.upper(), fmt(v.v))
    if isinstance(v, bool):
        return ".T." if v else ".F."
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        r = repr(v).upper()
        if "E" in r:
            mant, exp = r.split("E")
            if "." not in mant:
                mant += "."
            return mant + "E" + exp
        return r if "." in r else r + "."
    if isinstance(v, str):
        return encode_text(v)
    if isinstance(v, (list, tuple)):
        return "(" + ",".join(fmt(x) for x in v) + ")"
    raise TypeError(v)


class Model:
    def __init__(self, schema_name, schema_file, description):
        self.schema_name = schema_name
        self.attrs = load_schema(schema_file)
        self.description = description
        self.lines = {}
        self.guid = 0

    def next_guid(self):
        self.guid += 1
        alphabet = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz_$"
        digest = int(hashlib.sha1(("%s-%d" % (self.description, self.guid)).encode()).hexdigest(), 16)
        s = alphabet[digest % 4]
        for _ in range(21):
            digest //= 64
            s += alphabet[digest % 64]
        return s

    def add(self, n, entity, **kw):
        if n in self.lines:
            raise ValueError("duplicate id %d" % n)
        names = self.attrs[entity]
        for k in kw:
            if k not in names:
                raise KeyError("%s has no attribute %s" % (entity, k))
        if "GlobalId" in names and "GlobalId" not in kw:
            kw["GlobalId"] = self.next_guid()
        if "OwnerHistory" in names and "OwnerHistory" not in kw:
            kw["OwnerHistory"] = Ref(12)
        args = ",".join(fmt(kw.get(a)) for a in names)
        self.lines[n] = "#%d=%s(%s);" % (n, entity.upper(), args)
        return Ref(n)

    def add_raw(self, n, text):
        self.lines[n] = "#%d=%s;" % (n, text)

    def write(self, path, name):
        with open(path, "w", encoding="ascii", newline="\n") as f:
            f.write("ISO-10303-21;\nHEADER;\n")
            f.write("FILE_DESCRIPTION(('%s'),'2;1');\n" % self.description)
            f.write("FILE_NAME('%s','2024-01-01T00:00:00',(''),(''),'fixture generator','','');\n" % name)
            f.write("FILE_SCHEMA(('%s'));\nENDSEC;\n\nDATA;\n" % self.schema_name)
            for n in sorted(self.lines):
                f.write(self.lines[n] + "\n")
            f.write("ENDSEC;\nEND-ISO-10303-21;\n")


def common_header(m, ifc4):
    m.add(8, "IfcPerson", Identification="jdoe", FamilyName="Doe", GivenName="Jane") if ifc4 else \
        m.add(8, "IfcPerson", Id="jdoe", FamilyName="Doe", GivenName="Jane")
    m.add(9, "IfcOrganization", Name="Fixture Works")
    m.add(10, "IfcPersonAndOrganization", ThePerson=Ref(8), TheOrganization=Ref(9))
    m.add(11, "IfcApplication", ApplicationDeveloper=Ref(9), Version="1.0",
          ApplicationFullName="fixture generator", ApplicationIdentifier="fixgen")
    m.add(12, "IfcOwnerHistory", OwningUser=Ref(10), OwningApplication=Ref(11),
          ChangeAction=Enum("ADDED"), CreationDate=1700000000)
    m.add(13, "IfcCartesianPoint", Coordinates=[0.0, 0.0, 0.0])
    m.add(14, "IfcAxis2Placement3D", Location=Ref(13))
    m.add(15, "IfcGeometricRepresentationContext", ContextIdentifier="Model", ContextType="Model",
          CoordinateSpaceDimension=3, Precision=1e-05, WorldCoordinateSystem=Ref(14))
    m.add(16, "IfcSIUnit", Dimensions=DERIVED, UnitType=Enum("LENGTHUNIT"), Name=Enum("METRE"))
    m.add(17, "IfcUnitAssignment", Units=[Ref(16)])
    m.add(18, "IfcLocalPlacement", RelativePlacement=Ref(14))


def aggregate(m, n, whole, parts):
    m.add(n, "IfcRelAggregates", RelatingObject=Ref(whole), RelatedObjects=[Ref(p) for p in parts])


def boundary(m, n, space, element, kind="PHYSICAL", side="INTERNAL"):
    m.add(n, "IfcRelSpaceBoundary", RelatingSpace=Ref(space), RelatedBuildingElement=Ref(element),
          PhysicalOrVirtualBoundary=Enum(kind), InternalOrExternalBoundary=Enum(side))


def house(out):
    """IFC4 detached house: two storeys, eight spaces, seven of them on the facade."""
    m = Model("IFC4", os.path.join(ROOT, "core/data/ifc4.schema"), "ViewDefinition [DesignTransferView]")
    common_header(m, True)
    m.add(100, "IfcProject", Name="Projekt-FZK-Haus", LongName="Projekt FZK-House", Phase="fixture",
          RepresentationContexts=[Ref(15)], UnitsInContext=Ref(17))
    m.add(200, "IfcSite", Name="Gelaende", ObjectPlacement=Ref(18), CompositionType=Enum("ELEMENT"),
          RefLatitude=[49, 1, 51, 0], RefLongitude=[8, 25, 50, 0], RefElevation=110.0)
    m.add(300, "IfcBuilding", Name="FZK-Haus", ObjectPlacement=Ref(18), CompositionType=Enum("ELEMENT"))
    m.add(400, "IfcBuildingStorey", Name="Erdgeschoss", ObjectPlacement=Ref(18),
          CompositionType=Enum("ELEMENT"), Elevation=0.0)
    m.add(500, "IfcBuildingStorey", Name="Dachgeschoss", ObjectPlacement=Ref(18),
          CompositionType=Enum("ELEMENT"), Elevation=2.7)
    aggregate(m, 110, 100, [200])
    aggregate(m, 210, 200, [300])
    aggregate(m, 310, 300, [400, 500])

    spaces = {
        20909: ("4", "Schlafzimmer", 500),
        21283: ("5", "Bad", 500),
        21640: ("6", "Kinderzimmer", 500),
        33774: ("1", "Wohnen", 400),
        34191: ("2", "Küche", 400),
        34763: ("3", "Buero", 400),
        76214: ("7", "Galerie", 500),
        30000: ("8", "Flur", 400),
    }
    for sid, (name, long_name, _) in sorted(spaces.items()):
        m.add(sid, "IfcSpace", Name=name, LongName=long_name, ObjectPlacement=Ref(18),
              CompositionType=Enum("ELEMENT"), PredefinedType=Enum("INTERNAL"))
    aggregate(m, 410, 400, [s for s, v in sorted(spaces.items()) if v[2] == 400])
    aggregate(m, 510, 500, [s for s, v in sorted(spaces.items()) if v[2] == 500])

    walls = [18698, 18700, 18702, 18704, 18706, 18708]
    for i, w in enumerate(walls):
        m.add(w, "IfcWall" if i % 2 == 0 else "IfcWallStandardCase", Name="Wand-%03d" % (i + 1),
              ObjectPlacement=Ref(18), Tag=str(1000 + i), PredefinedType=Enum("SOLIDWALL") if i % 2 == 0 else None)
    slabs = [59290, 59300, 59310]
    for i, s in enumerate(slabs):
        m.add(s, "IfcSlab", Name="Decke-%03d" % (i + 1), ObjectPlacement=Ref(18),
              PredefinedType=Enum("FLOOR"))
    doors = {40001: 0.885, 40002: 1.01, 40003: 0.76, 40004: 0.885}
    for d, width in doors.items():
        m.add(d, "IfcDoor", Name="Tuer-%d" % d, ObjectPlacement=Ref(18), OverallHeight=2.01,
              OverallWidth=width, PredefinedType=Enum("DOOR"), OperationType=Enum("SINGLE_SWING_LEFT"))
    windows = [41001, 41002, 41003]
    for i, w in enumerate(windows):
        m.add(w, "IfcWindow", Name="Fenster-%d" % (i + 1), ObjectPlacement=Ref(18),
              OverallHeight=1.25, OverallWidth=1.0 + i / 4, PredefinedType=Enum("WINDOW"))
    m.add(42001, "IfcColumn", Name="Stuetze-1", ObjectPlacement=Ref(18), PredefinedType=Enum("COLUMN"))
    m.add(43001, "IfcVirtualElement", Name="Luftraum", ObjectPlacement=Ref(18))

    m.add(600, "IfcRelContainedInSpatialStructure", Name="EG",
          RelatedElements=[Ref(x) for x in walls[:4] + [59300, 40001, 40002, 41001, 42001]],
          RelatingStructure=Ref(400))
    m.add(610, "IfcRelContainedInSpatialStructure", Name="DG",
          RelatedElements=[Ref(x) for x in walls[4:] + [59290, 59310, 40003, 40004, 41002, 41003, 43001]],
          RelatingStructure=Ref(500))

    # Wall-to-wall connectivity with empty priority lists.
    for n, (a, b) in enumerate([(18698, 18700), (18700, 18702), (18702, 18704), (18706, 18708)]):
        m.add(700 + n, "IfcRelConnectsPathElements", RelatingElement=Ref(a), RelatedElement=Ref(b),
              RelatingPriorities=[], RelatedPriorities=[], RelatedConnectionType=Enum("ATSTART"),
              RelatingConnectionType=Enum("ATEND"))

    # Space boundaries. Slab 59290 bounds Galerie eight times (second-level split faces),
    # wall 18698 bounds the kitchen twice.
    rid = 80000
    plan = []
    plan += [(76214, 59290, "PHYSICAL", "EXTERNAL")] * 8
    plan += [(34191, 18698, "PHYSICAL", "EXTERNAL")] * 2
    plan += [
        (20909, 18706, "PHYSICAL", "EXTERNAL"), (20909, 41002, "PHYSICAL", "EXTERNAL"),
        (20909, 40003, "PHYSICAL", "INTERNAL"), (20909, 59310, "PHYSICAL", "INTERNAL"),
        (21283, 18708, "PHYSICAL", "EXTERNAL"), (21283, 40004, "PHYSICAL", "INTERNAL"),
        (21640, 41003, "PHYSICAL", "EXTERNAL"), (21640, 18706, "PHYSICAL", "INTERNAL"),
        (33774, 18700, "PHYSICAL", "EXTERNAL"), (33774, 41001, "PHYSICAL", "EXTERNAL"),
        (33774, 40001, "PHYSICAL", "INTERNAL"), (33774, 42001, "PHYSICAL", "INTERNAL"),
        (34191, 40002, "PHYSICAL", "INTERNAL"), (34191, 59300, "PHYSICAL", "INTERNAL"),
        (34763, 18702, "PHYSICAL", "EXTERNAL"), (34763, 18704, "PHYSICAL", "INTERNAL"),
        (30000, 40001, "PHYSICAL", "INTERNAL"), (30000, 40002, "PHYSICAL", "INTERNAL"),
        (30000, 18704, "PHYSICAL", "INTERNAL"), (30000, 59300, "PHYSICAL", "INTERNAL"),
        (76214, 40003, "PHYSICAL", "INTERNAL"), (76214, 40004, "PHYSICAL", "INTERNAL"),
        (76214, 43001, "VIRTUAL", "INTERNAL"), (21640, 43001, "VIRTUAL", "INTERNAL"),
    ]
    for space, element, kind, side in plan:
        boundary(m, rid, space, element, kind, side)
        rid += 1

    # Property and quantity sets.
    m.add(90001, "IfcPropertySingleValue", Name="IsExternal", NominalValue=Typed("IfcBoolean", True))
    m.add(90002, "IfcPropertySingleValue", Name="LoadBearing", NominalValue=Typed("IfcBoolean", False))
    m.add(90003, "IfcPropertySingleValue", Name="Reference", NominalValue=Typed("IfcIdentifier", "WT-24"))
    m.add(90004, "IfcPropertySingleValue", Name="ThermalTransmittance",
          NominalValue=Typed("IfcThermalTransmittanceMeasure", 0.24))
    m.add(90010, "IfcPropertySet", Name="Pset_WallCommon", HasProperties=[Ref(90001), Ref(90002), Ref(90003)])
    m.add(90011, "IfcPropertySet", Name="Pset_DoorCommon", HasProperties=[Ref(90004)])
    m.add(90012, "IfcPropertySingleValue", Name="Author", NominalValue=Typed("IfcLabel", "Fixture Works"))
    m.add(90013, "IfcPropertySet", Name="Pset_ProjectCommon", HasProperties=[Ref(90012)])
    m.add(90020, "IfcRelDefinesByProperties", RelatedObjects=[Ref(w) for w in walls],
          RelatingPropertyDefinition=Ref(90010))
    m.add(90021, "IfcRelDefinesByProperties", RelatedObjects=[Ref(d) for d in doors],
          RelatingPropertyDefinition=Ref(90011))
    m.add(90022, "IfcRelDefinesByProperties", RelatedObjects=[Ref(100)], RelatingPropertyDefinition=Ref(90013))
    m.add(90030, "IfcQuantityLength", Name="Width", LengthValue=0.3)
    m.add(90031, "IfcQuantityLength", Name="Height", LengthValue=2.5)
    m.add(90032, "IfcElementQuantity", Name="BaseQuantities", MethodOfMeasurement="fixture",
          Quantities=[Ref(90030), Ref(90031)])
    m.add(90033, "IfcRelDefinesByProperties", RelatedObjects=[Ref(18698), Ref(18700)],
          RelatingPropertyDefinition=Ref(90032))
    m.write(out, "house_ifc4.ifc")


def duplex(out, fixed):
    """IFC2X3 duplex storey. Door 125 sits on the junction of three spaces (two boundaries
    each) unless `fixed`, where it joins 152 and 118 only."""
    m = Model("IFC2X3", os.path.join(ROOT, "core/data/ifc2x3.schema"), "ViewDefinition [CoordinationView_V2.0]")
    common_header(m, False)
    m.add(20, "IfcProject", Name="Duplex Apartment", LongName="Duplex", Phase="fixture",
          RepresentationContexts=[Ref(15)], UnitsInContext=Ref(17))
    m.add(30, "IfcSite", Name="Default", ObjectPlacement=Ref(18), CompositionType=Enum("ELEMENT"))
    m.add(40, "IfcBuilding", Name="Duplex", ObjectPlacement=Ref(18), CompositionType=Enum("ELEMENT"))
    m.add(50, "IfcBuildingStorey", Name="Level 1", ObjectPlacement=Ref(18),
          CompositionType=Enum("ELEMENT"), Elevation=0.0)
    aggregate(m, 21, 20, [30])
    aggregate(m, 31, 30, [40])
    aggregate(m, 41, 40, [50])
    spaces = {84: "Living A", 116: "Hall A", 118: "Kitchen A", 152: "Bedroom A", 186: "Bath A"}
    for sid, long_name in spaces.items():
        m.add(sid, "IfcSpace", Name=str(sid), LongName=long_name, ObjectPlacement=Ref(18),
              CompositionType=Enum("ELEMENT"), InteriorOrExteriorSpace=Enum("INTERNAL"))
    aggregate(m, 51, 50, sorted(spaces))
    m.add(125, "IfcDoor", Name="M_Single-Flush:0915 x 2134mm", ObjectPlacement=Ref(18), Tag="125",
          OverallHeight=2.134, OverallWidth=0.915)
    m.add(127, "IfcDoor", Name="M_Single-Flush:0813 x 2134mm", ObjectPlacement=Ref(18), Tag="127",
          OverallHeight=2.134, OverallWidth=0.813)
    m.add(129, "IfcVirtualElement", Name="Opening", ObjectPlacement=Ref(18))
    walls = [300, 302, 304, 306]
    for i, w in enumerate(walls):
        m.add(w, "IfcWallStandardCase", Name="Basic Wall:Interior %d" % i, ObjectPlacement=Ref(18), Tag=str(w))
    m.add(310, "IfcSlab", Name="Floor:Slab", ObjectPlacement=Ref(18), PredefinedType=Enum("FLOOR"))
    m.add(60, "IfcRelContainedInSpatialStructure", RelatedElements=[Ref(x) for x in [125, 127, 129] + walls + [310]],
          RelatingStructure=Ref(50))
    m.add(70, "IfcRelConnectsPathElements", RelatingElement=Ref(300), RelatedElement=Ref(302),
          RelatingPriorities=[], RelatedPriorities=[], RelatedConnectionType=Enum("ATEND"),
          RelatingConnectionType=Enum("ATSTART"))
    plan = []
    if fixed:
        plan += [(152, 125), (118, 125)]
    else:
        plan += [(84, 125), (84, 125), (152, 125), (152, 125), (116, 125), (116, 125)]
    plan += [(84, 127), (186, 127), (116, 129), (118, 129)]
    plan += [(84, 300), (116, 302), (118, 304), (152, 306), (186, 310)]
    rid = 1000
    for space, element in plan:
        kind = "VIRTUAL" if element == 129 else "PHYSICAL"
        boundary(m, rid, space, element, kind, "INTERNAL")
        rid += 1
    m.add(2000, "IfcPropertySingleValue", Name="FireRating", NominalValue=Typed("IfcLabel", "EI30"))
    m.add(2001, "IfcPropertySet", Name="Pset_DoorCommon", HasProperties=[Ref(2000)])
    m.add(2002, "IfcRelDefinesByProperties", RelatedObjects=[Ref(125), Ref(127)], RelatingPropertyDefinition=Ref(2001))
    m.add(2010, "IfcQuantityArea", Name="Area", AreaValue=1.95)
    m.add(2011, "IfcElementQuantity", Name="BaseQuantities", Quantities=[Ref(2010)])
    m.add(2012, "IfcRelDefinesByProperties", RelatedObjects=[Ref(125)], RelatingPropertyDefinition=Ref(2011))
    # An extension entity outside the schema, kept verbatim by the parser.
    m.add_raw(2100, "IFCXEXTENSIONRECORD('x',#125,(1,2.5,#127))")
    m.write(out, "duplex_fixed_ifc2x3.ifc" if fixed else "duplex_ifc2x3.ifc")


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.join(ROOT, "tests/fixtures")
    house(os.path.join(out_dir, "house_ifc4.ifc"))
    duplex(os.path.join(out_dir, "duplex_ifc2x3.ifc"), fixed=False)
    duplex(os.path.join(out_dir, "duplex_fixed_ifc2x3.ifc"), fixed=True)


if __name__ == "__main__":
    main()
