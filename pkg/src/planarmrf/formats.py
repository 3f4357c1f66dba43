"""JSON file formats and atomic writes.

Model files: {"num_vertices", "num_labels", "edges": [[u, v], ...],
"phi": [[L reals] x n], "psi": [[L*L reals, row-major] x m]} with
0-based vertex ids. Assignment files: {"labels": [...]} with 1-based
labels. Clustering inputs: {"num_vertices", "edges": [{"u", "v", "p",
"w"}, ...]}; clustering outputs: {"clusters": [...]}. Integer-valued
scores survive a round trip exactly.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .errors import ParseError
from .graph import Graph
from .mrf import MRFInstance
from .reductions import CCEdge, CCInstance


def atomic_write_text(path, text):
    """Write via a sibling temp file and rename, so readers never see
    a half-written file."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_bytes(path, data):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_json(path):
    try:
        with open(path, "r") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at byte {exc.pos}", offset=exc.pos)


def model_to_dict(instance):
    phi = instance.phi_mat
    psi = instance.psi_mat
    return {
        "num_vertices": instance.graph.num_vertices,
        "num_labels": instance.num_labels,
        "edges": [[int(u), int(v)] for u, v in instance.graph.edges],
        "phi": [[float(x) for x in row] for row in phi],
        "psi": [[float(x) for x in tab.reshape(-1)] for tab in psi],
    }


def model_from_dict(doc):
    try:
        n = int(doc["num_vertices"])
        L = int(doc["num_labels"])
        edges = [(int(u), int(v)) for u, v in doc["edges"]]
        phi = np.asarray(doc["phi"], dtype=np.float64) if doc["phi"] else np.zeros((0, L))
        psi = (
            np.asarray(doc["psi"], dtype=np.float64).reshape(len(edges), L, L)
            if edges
            else np.zeros((0, L, L))
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed model document: {exc}")
    graph = Graph(n, edges)
    if phi.shape != (n, L):
        raise ParseError(f"phi has shape {phi.shape}, expected ({n}, {L})")
    return MRFInstance(graph, L, phi, psi)


def save_model(instance, path):
    atomic_write_text(path, json.dumps(model_to_dict(instance)) + "\n")


def load_model(path):
    return model_from_dict(_load_json(path))


def save_labels(labels, path):
    doc = {"labels": [int(x) for x in np.asarray(labels).reshape(-1)]}
    atomic_write_text(path, json.dumps(doc) + "\n")


def load_labels(path):
    doc = _load_json(path)
    try:
        return np.asarray([int(x) for x in doc["labels"]], dtype=np.int64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed assignment document: {exc}")


def cc_to_dict(cc):
    return {
        "num_vertices": cc.num_vertices,
        "edges": [
            {"u": e.u, "v": e.v, "p": e.p, "w": float(e.w)} for e in cc.edges
        ],
    }


def cc_from_dict(doc):
    try:
        n = int(doc["num_vertices"])
        edges = [
            CCEdge(u=int(e["u"]), v=int(e["v"]), p=int(e["p"]), w=float(e["w"]))
            for e in doc["edges"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed clustering document: {exc}")
    return CCInstance(num_vertices=n, edges=edges)


def save_cc(cc, path):
    atomic_write_text(path, json.dumps(cc_to_dict(cc)) + "\n")


def load_cc(path):
    return cc_from_dict(_load_json(path))


def save_clusters(clusters, path):
    doc = {"clusters": [int(x) for x in np.asarray(clusters).reshape(-1)]}
    atomic_write_text(path, json.dumps(doc) + "\n")


def load_clusters(path):
    doc = _load_json(path)
    try:
        return np.asarray([int(x) for x in doc["clusters"]], dtype=np.int64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed clusters document: {exc}")
