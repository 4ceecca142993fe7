"""Reading and writing ``.cfuse.json`` scenario files.

A scenario holds a measure space, a frame ``F`` and optionally a second
frame ``G``, an operator ``Q`` (dense or per-atom blocks) and local frame
families. Scalars are plain numbers when ``field`` is ``"real"`` and
``[re, im]`` pairs when it is ``"complex"``. Numbers are written with 17
significant digits, so writing and re-reading reproduces every double.

Fibers are given by spanning vectors. A set that is already orthonormal is
used verbatim as the fiber basis (Q coordinates refer to it); any other set
is orthonormalized by Gram-Schmidt in the order given.
"""

import json
import math
from dataclasses import dataclass

import jsonschema
import numpy as np

from .errors import (
    AllVectorsNumericallyZero,
    CFusionError,
    InvariantError,
    ParseError,
    SchemaError,
)
from .frame import CFusionFrame
from .localglue import LocalFrameFamily
from .numerics import DEFAULT_TOL, orthonormalize
from .qdual import QOperator
from .space import MeasureSpace, Subspace, WeightMap

VERSION = "cfuse/1"
EXTENSION = ".cfuse.json"
VERBATIM_TOL = 1e-12

_SCALAR = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_VECTOR = {"type": "array", "items": _SCALAR, "minItems": 1}
_MATRIX = {"type": "array", "items": _VECTOR, "minItems": 1}
_ATOMS = {
    "type": "object",
    "additionalProperties": False,
    "required": ["atoms"],
    "properties": {
        "atoms": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "mass"],
                "properties": {"id": {"type": "string"}, "mass": {"type": "number"}},
            },
        }
    },
}
_FRAME = {
    "type": "object",
    "additionalProperties": False,
    "required": ["fibers", "weights"],
    "properties": {
        "fibers": {"type": "array", "minItems": 1, "items": _MATRIX},
        "weights": {"type": "array", "minItems": 1, "items": {"type": "number"}},
    },
}
SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["version", "field", "ambient_dim", "measure_space", "frame_f"],
    "properties": {
        "version": {"const": VERSION},
        "name": {"type": "string"},
        "field": {"enum": ["real", "complex"]},
        "ambient_dim": {"type": "integer", "minimum": 1},
        "measure_space": _ATOMS,
        "frame_f": _FRAME,
        "frame_g": _FRAME,
        "q": {
            "type": "object",
            "additionalProperties": False,
            "minProperties": 1,
            "maxProperties": 1,
            "properties": {
                "dense": _MATRIX,
                "blocks": {"type": "array", "minItems": 1, "items": _MATRIX},
            },
        },
        "local_families": {
            "type": "object",
            "additionalProperties": False,
            "required": ["inner", "f"],
            "properties": {
                "inner": _ATOMS,
                "f": {"type": "array", "minItems": 1, "items": _MATRIX},
                "g": {"type": "array", "minItems": 1, "items": _MATRIX},
            },
        },
    },
}


@dataclass(frozen=True)
class FrameData:
    fibers: tuple  # per atom: tuple of spanning vectors (tuples of complex)
    weights: tuple


@dataclass(frozen=True)
class QData:
    kind: str  # "dense" or "blocks"
    matrices: tuple  # one matrix for dense, one per atom for blocks


@dataclass(frozen=True)
class LocalData:
    inner: tuple  # (id, mass) pairs
    f: tuple  # per base atom: tuple of vectors, one per inner atom
    g: tuple | None = None


@dataclass(frozen=True)
class ScenarioFile:
    field: str
    ambient_dim: int
    atoms: tuple
    frame_f: FrameData
    frame_g: FrameData | None = None
    q: QData | None = None
    local: LocalData | None = None
    name: str | None = None
    version: str = VERSION

    @property
    def space(self):
        return MeasureSpace(self.atoms)

    def frames(self, tol=DEFAULT_TOL):
        """Domain objects ``(F, G, Q)``; G and Q are None when absent."""
        F = _build_frame(self, self.frame_f, "frame_f", tol)
        G = _build_frame(self, self.frame_g, "frame_g", tol) if self.frame_g else None
        Q = None
        if self.q is not None:
            if G is None:
                raise SchemaError("q requires frame_g", "q")
            Q = _build_q(F, G, self.q)
        return F, G, Q

    def local_families(self, tol=DEFAULT_TOL):
        """``(LF, LG)`` built on the fibers of frame_f / frame_g."""
        if self.local is None:
            raise SchemaError("scenario has no local_families", "local_families")
        F, G, _ = self.frames(tol)
        inner = MeasureSpace(self.local.inner)
        LF = _build_local(F, inner, self.local.f, "local_families.f")
        LG = None
        if self.local.g is not None:
            if G is None:
                raise SchemaError("local_families.g requires frame_g", "local_families.g")
            LG = _build_local(G, inner, self.local.g, "local_families.g")
        return LF, LG


def _vec(v):
    return tuple(complex(x) for x in np.asarray(v).ravel())


def _mat(M):
    return tuple(_vec(row) for row in np.asarray(M))


def _basis_columns(S):
    return tuple(_vec(S.basis[:, j]) for j in range(S.dim))


def _frame_data(F):
    return FrameData(tuple(_basis_columns(S) for S in F.fibers), tuple(F.weights.values))


def _all_real(values):
    return all(z.imag == 0.0 for z in values)


def scenario_from(F, G=None, Q=None, LF=None, LG=None, name=None, field=None):
    """Scenario holding the given domain objects (fiber bases kept verbatim)."""
    fd = _frame_data(F)
    gd = _frame_data(G) if G is not None else None
    qd = None
    if Q is not None:
        blocks = Q.blocks()
        qd = QData("blocks", tuple(_mat(b) for b in blocks)) if blocks is not None \
            else QData("dense", (_mat(Q.matrix),))
    ld = None
    if LF is not None:
        ld = LocalData(
            LF.inner.atoms,
            tuple(tuple(_vec(v) for v in LF.vectors[i]) for i in range(len(LF.base))),
            None if LG is None else
            tuple(tuple(_vec(v) for v in LG.vectors[i]) for i in range(len(LG.base))),
        )
    sf = ScenarioFile("complex", F.ambient_dim, F.space.atoms, fd, gd, qd, ld, name)
    if field is None:
        field = "real" if _all_real(_scalars(sf)) else "complex"
    return ScenarioFile(field, F.ambient_dim, F.space.atoms, fd, gd, qd, ld, name)


def _scalars(sf):
    for fr in (sf.frame_f, sf.frame_g):
        if fr is not None:
            for vecs in fr.fibers:
                for v in vecs:
                    yield from v
    if sf.q is not None:
        for M in sf.q.matrices:
            for row in M:
                yield from row
    if sf.local is not None:
        for fam in (sf.local.f, sf.local.g):
            if fam is not None:
                for vecs in fam:
                    for v in vecs:
                        yield from v


# -- writing ----------------------------------------------------------------

def _num(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("cannot serialize non-finite number")
    return "%.17g" % x


def _scalar_out(z, field):
    if field == "real":
        if z.imag != 0.0:
            raise ValueError("complex entry in a real scenario")
        return z.real
    return [z.real, z.imag]


def _render(obj, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        if not any(isinstance(v, (dict, list)) for v in obj.values()):
            return "{" + ", ".join(f"{json.dumps(k)}: {_render(v)}" for k, v in obj.items()) + "}"
        items = [f'{pad}  {json.dumps(k)}: {_render(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, list):
        if _depth(obj) <= 2 and not any(isinstance(x, dict) for x in obj):
            return "[" + ", ".join(_render(x, indent + 1) for x in obj) + "]"
        items = [f"{pad}  {_render(x, indent + 1)}" for x in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    return _num(obj)


def _depth(obj):
    if isinstance(obj, list):
        return 1 + max((_depth(x) for x in obj), default=0)
    return 0


def _atoms_out(atoms):
    return {"atoms": [{"id": a, "mass": m} for a, m in atoms]}


def _frame_out(fd, field):
    return {
        "fibers": [[[_scalar_out(z, field) for z in v] for v in vecs] for vecs in fd.fibers],
        "weights": list(fd.weights),
    }


def _matrix_out(M, field):
    return [[_scalar_out(z, field) for z in row] for row in M]


def to_document(sf):
    doc = {"version": sf.version}
    if sf.name is not None:
        doc["name"] = sf.name
    doc["field"] = sf.field
    doc["ambient_dim"] = sf.ambient_dim
    doc["measure_space"] = _atoms_out(sf.atoms)
    doc["frame_f"] = _frame_out(sf.frame_f, sf.field)
    if sf.frame_g is not None:
        doc["frame_g"] = _frame_out(sf.frame_g, sf.field)
    if sf.q is not None:
        if sf.q.kind == "dense":
            doc["q"] = {"dense": _matrix_out(sf.q.matrices[0], sf.field)}
        else:
            doc["q"] = {"blocks": [_matrix_out(M, sf.field) for M in sf.q.matrices]}
    if sf.local is not None:
        loc = {"inner": _atoms_out(sf.local.inner), "f": _matrix_out_list(sf.local.f, sf.field)}
        if sf.local.g is not None:
            loc["g"] = _matrix_out_list(sf.local.g, sf.field)
        doc["local_families"] = loc
    return doc


def _matrix_out_list(mats, field):
    return [_matrix_out(M, field) for M in mats]


def render_document(doc):
    return _render(doc) + "\n"


def serialize_scenario(sf):
    return render_document(to_document(sf))


def write_scenario(path, sf):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_scenario(sf))


# -- reading ----------------------------------------------------------------

def _path(parts):
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def _scalar_in(x, field, where):
    if field == "real":
        if isinstance(x, list):
            raise SchemaError("real scenario expects plain numbers", where)
        return complex(float(x), 0.0)
    if not isinstance(x, list):
        raise SchemaError("complex scenario expects [re, im] pairs", where)
    return complex(float(x[0]), float(x[1]))


def _vector_in(v, field, n, where):
    if len(v) != n:
        raise InvariantError(f"vector has length {len(v)}, expected {n}", where)
    return tuple(_scalar_in(x, field, f"{where}[{i}]") for i, x in enumerate(v))


def _atoms_in(doc, where):
    atoms = []
    seen = set()
    for i, a in enumerate(doc["atoms"]):
        if not (math.isfinite(a["mass"]) and a["mass"] > 0):
            raise InvariantError(f"mass must be > 0, got {a['mass']}", f"{where}.atoms[{i}].mass")
        if a["id"] in seen:
            raise InvariantError(f"duplicate atom id {a['id']!r}", f"{where}.atoms[{i}].id")
        seen.add(a["id"])
        atoms.append((a["id"], float(a["mass"])))
    return tuple(atoms)


def _frame_in(doc, field, n, m, where):
    if len(doc["fibers"]) != m:
        raise InvariantError(f"{len(doc['fibers'])} fibers for {m} atoms", f"{where}.fibers")
    if len(doc["weights"]) != m:
        raise InvariantError(f"{len(doc['weights'])} weights for {m} atoms", f"{where}.weights")
    for i, w in enumerate(doc["weights"]):
        if not (math.isfinite(w) and w > 0):
            raise InvariantError(f"weight must be > 0 at every atom, got {w}",
                                 f"{where}.weights[{i}]")
    fibers = tuple(
        tuple(_vector_in(v, field, n, f"{where}.fibers[{i}][{j}]") for j, v in enumerate(vecs))
        for i, vecs in enumerate(doc["fibers"])
    )
    return FrameData(fibers, tuple(float(w) for w in doc["weights"]))


def _matrix_in(M, field, where):
    width = len(M[0])
    rows = []
    for i, row in enumerate(M):
        if len(row) != width:
            raise InvariantError("ragged matrix", f"{where}[{i}]")
        rows.append(tuple(_scalar_in(x, field, f"{where}[{i}][{j}]") for j, x in enumerate(row)))
    return tuple(rows)


def from_document(doc):
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(exc.message, _path(exc.absolute_path)) from None
    field = doc["field"]
    n = doc["ambient_dim"]
    atoms = _atoms_in(doc["measure_space"], "measure_space")
    m = len(atoms)
    fd = _frame_in(doc["frame_f"], field, n, m, "frame_f")
    gd = _frame_in(doc["frame_g"], field, n, m, "frame_g") if "frame_g" in doc else None
    qd = None
    if "q" in doc:
        if gd is None:
            raise SchemaError("q requires frame_g", "q")
        if "dense" in doc["q"]:
            qd = QData("dense", (_matrix_in(doc["q"]["dense"], field, "q.dense"),))
        else:
            blocks = doc["q"]["blocks"]
            if len(blocks) != m:
                raise InvariantError(f"{len(blocks)} blocks for {m} atoms", "q.blocks")
            qd = QData("blocks", tuple(_matrix_in(B, field, f"q.blocks[{i}]")
                                       for i, B in enumerate(blocks)))
    ld = None
    if "local_families" in doc:
        loc = doc["local_families"]
        inner = _atoms_in(loc["inner"], "local_families.inner")

        def fam(key):
            vecs = loc[key]
            if len(vecs) != m:
                raise InvariantError(f"{len(vecs)} local families for {m} atoms",
                                     f"local_families.{key}")
            out = []
            for i, vs in enumerate(vecs):
                if len(vs) != len(inner):
                    raise InvariantError(f"{len(vs)} vectors for {len(inner)} inner atoms",
                                         f"local_families.{key}[{i}]")
                out.append(tuple(_vector_in(v, field, n, f"local_families.{key}[{i}][{j}]")
                                 for j, v in enumerate(vs)))
            return tuple(out)

        ld = LocalData(inner, fam("f"), fam("g") if "g" in loc else None)
    return ScenarioFile(field, n, atoms, fd, gd, qd, ld, doc.get("name"), doc["version"])


def parse_scenario(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return from_document(doc)


def read_scenario(path):
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


# -- domain construction -------------------------------------------------------

def _fiber(vectors, where, tol):
    A = np.array(vectors, dtype=np.complex128).T
    k = A.shape[1]
    if k <= A.shape[0] and np.linalg.norm(A.conj().T @ A - np.eye(k), 2) <= VERBATIM_TOL:
        return Subspace(A)
    try:
        return Subspace(orthonormalize(A, tol))
    except AllVectorsNumericallyZero as exc:
        raise InvariantError(str(exc), where) from None


def _build_frame(sf, fd, where, tol):
    fibers = tuple(_fiber(v, f"{where}.fibers[{i}]", tol) for i, v in enumerate(fd.fibers))
    try:
        return CFusionFrame(sf.space, fibers, WeightMap(fd.weights))
    except (CFusionError, ValueError) as exc:
        raise InvariantError(str(exc), where) from None


def _build_q(F, G, qd):
    # ShapeMismatch propagates: callers distinguish it from malformed input.
    if qd.kind == "dense":
        return QOperator(F, G, np.array(qd.matrices[0], dtype=np.complex128))
    return QOperator.from_blocks(F, G, [np.array(b, dtype=np.complex128) for b in qd.matrices])


def _build_local(frame, inner, vectors, where):
    V = np.array(vectors, dtype=np.complex128)
    try:
        return LocalFrameFamily(frame.space, inner, frame.fibers, V)
    except CFusionError as exc:
        raise InvariantError(str(exc), where) from None
