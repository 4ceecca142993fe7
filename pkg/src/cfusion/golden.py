"""Checked-in scenario fixtures, rebuilt from code.

``golden_files()`` returns ``{filename: text}``; the files under
``tests/data`` must equal it byte for byte.
"""

import numpy as np

from .frame import CFusionFrame
from .generators import (
    build_disk_example,
    degenerate_e1_pair,
    line_two_atoms,
    skew_pair_example,
)
from .localglue import LocalFrameFamily
from .qdual import QOperator
from .scenario import EXTENSION, scenario_from, render_document, serialize_scenario, to_document
from .space import MeasureSpace, WeightMap

DISK_MASSES = (1.5, np.pi - 1.5)


def disk_scenario():
    F, G, Q = build_disk_example(*DISK_MASSES)
    return scenario_from(F, G, Q, name="unit disk split into B1, B2")


def disk_scaled_q(factor):
    F, G, Q = build_disk_example(*DISK_MASSES)
    return scenario_from(F, G, QOperator(F, G, factor * Q.matrix),
                         name=f"unit disk, Q = {factor:g} x swap")


def disk_perturbed():
    """G = F with the weight on B1 scaled by 0.9; Q = identity coordinates."""
    F, _, _ = build_disk_example(*DISK_MASSES)
    w = F.weights.array.copy()
    w[0] *= 0.9
    G = CFusionFrame(F.space, F.fibers, WeightMap(tuple(w)))
    return scenario_from(F, G, QOperator(F, G, np.eye(2)), name="unit disk vs scaled weight")


def disk_glue():
    """Singleton inner space; each local frame is the fiber's unit vector."""
    F, _, _ = build_disk_example(*DISK_MASSES)
    inner = MeasureSpace((("y0", 1.0),))
    vecs = np.array([[F.fibers[0].basis[:, 0]], [F.fibers[1].basis[:, 0]]])
    L = LocalFrameFamily(F.space, inner, F.fibers, vecs)
    return scenario_from(F, F, None, L, L, name="unit disk with singleton local frames")


def golden_files():
    files = {
        "disk": serialize_scenario(disk_scenario()),
        "disk_q2": serialize_scenario(disk_scaled_q(2.0)),
        "disk_perturbed": serialize_scenario(disk_perturbed()),
        "disk_glue": serialize_scenario(disk_glue()),
        "skew_pair": serialize_scenario(scenario_from(skew_pair_example(), name="skew pair")),
        "bessel_only": serialize_scenario(
            scenario_from(degenerate_e1_pair(), degenerate_e1_pair(), name="span e1 twice")),
        "line_two_atoms": serialize_scenario(
            scenario_from(line_two_atoms(), line_two_atoms(), name="R^1, two atoms")),
    }
    doc = to_document(disk_scenario())
    del doc["q"]
    files["disk_missing_q"] = render_document(doc)
    doc = to_document(disk_scenario())
    doc["q"] = {"dense": [[0, 1, 0], [1, 0, 0]]}
    files["disk_bad_shape"] = render_document(doc)
    doc = to_document(disk_scenario())
    doc["frame_f"]["weights"] = [0, 1]
    files["zero_weight"] = render_document(doc)
    files["malformed"] = serialize_scenario(disk_scenario())[:-40] + "\n"
    return {name + EXTENSION: text for name, text in files.items()}
