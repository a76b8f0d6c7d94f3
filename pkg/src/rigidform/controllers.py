"""Formation controllers as coupled node/edge vector fields.

Each controller evaluates, at a configuration p with measurement m = F(p), a
node velocity u and the matching edge velocity v = 2 R(p) u, both linear in
the edge error m* - m:

* gradient: u = R^T (m* - m); the classical distributed law where every
  agent reacts to all its incident edges.
* model:    u = (1/2) R^+ Pi (m* - m); projected steepest descent of the
  edge error realized by the minimum-norm node velocity.  Centralized, and
  defined only at regular points.
* directed: u = Rdir^T (m* - m); only the tail agent of each edge reacts,
  so information flow is one-way and the flow is no longer a gradient.

The edge error dynamics of all three are v = eta (m* - m) with the matrix
eta given by :func:`eta_matrix`; its restriction to the achievable edge
velocities is what the certificates module analyzes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from rigidform.graphs import Configuration, Graph, Measurement, Orientation
from rigidform.rigidity import (
    RankDeficiencyError,
    _svd,
    directed_rigidity_matrix,
    distance_map,
    generic_rank,
    rigidity_matrix,
    tangent_basis,
)

CONTROLLER_KINDS = ("gradient", "model", "directed")


@dataclass(frozen=True, eq=False)
class ControllerSpec:
    """A controller choice bound to a graph and a target measurement."""

    graph: Graph
    kind: str
    m_star: Measurement
    orientation: Orientation | None = None

    def __post_init__(self):
        if self.kind not in CONTROLLER_KINDS:
            raise ValueError(f"unknown controller kind {self.kind!r}")
        if self.kind == "directed":
            if self.orientation is None:
                raise ValueError("directed controller requires an orientation")
            if self.orientation.graph != self.graph:
                raise ValueError("orientation is over a different graph")
        elif self.orientation is not None:
            raise ValueError(f"{self.kind} controller takes no orientation")
        if len(self.m_star) != self.graph.num_edges:
            raise ValueError(
                f"target has {len(self.m_star)} entries, graph has "
                f"{self.graph.num_edges} edges"
            )


@dataclass(frozen=True, eq=False)
class FieldEvaluation:
    """One controller evaluation: node velocity u, edge velocity v, and an
    operator-norm estimate of the edge-to-node map at this state."""

    u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    nu_norm: float


def gradient_field(graph: Graph, p: Configuration, m_star: Measurement) -> FieldEvaluation:
    """Distributed gradient-descent field of the squared-length error."""
    R = rigidity_matrix(graph, p)
    u = R.T @ (m_star.values - distance_map(graph, p).values)
    sv = np.linalg.svd(R, compute_uv=False)
    return FieldEvaluation(u, 2.0 * (R @ u), float(sv[0]) if sv.size else 0.0)


def model_field(
    graph: Graph, p: Configuration, m_star: Measurement, seed: int = 0
) -> FieldEvaluation:
    """Minimum-norm node velocity realizing projected edge-error descent.

    Raises :class:`RankDeficiencyError` when R(p) has dropped below the
    graph's generic rank, where the projector stops tracking the feasible
    set and integration should abort.
    """
    U, s, Vt, r = _svd(graph, p)
    expected = generic_rank(graph, p.d, seed)
    if r < expected:
        raise RankDeficiencyError(
            f"rigidity matrix rank {r} below generic rank {expected}; "
            "configuration is not a regular point"
        )
    err = m_star.values - distance_map(graph, p).values
    coeffs = U[:, :r].T @ err
    u = 0.5 * (Vt[:r].T @ (coeffs / s[:r]))
    v = U[:, :r] @ coeffs
    return FieldEvaluation(u, v, 0.5 / float(s[r - 1]))


def directed_field(
    orientation: Orientation, p: Configuration, m_star: Measurement
) -> FieldEvaluation:
    """One-way variant of the gradient field: per edge, only the tail moves."""
    graph = orientation.graph
    Rdir = directed_rigidity_matrix(orientation, p)
    R = rigidity_matrix(graph, p)
    u = Rdir.T @ (m_star.values - distance_map(graph, p).values)
    sv = np.linalg.svd(Rdir, compute_uv=False)
    return FieldEvaluation(u, 2.0 * (R @ u), float(sv[0]) if sv.size else 0.0)


def evaluate_field(spec: ControllerSpec, p: Configuration, seed: int = 0) -> FieldEvaluation:
    """Evaluate the controller named by ``spec`` at configuration p."""
    if spec.kind == "gradient":
        return gradient_field(spec.graph, p, spec.m_star)
    if spec.kind == "model":
        return model_field(spec.graph, p, spec.m_star, seed)
    return directed_field(spec.orientation, p, spec.m_star)


def eta_matrix(spec: ControllerSpec, p: Configuration, seed: int = 0) -> np.ndarray:
    """The |E| x |E| edge-error response matrix of the controller at p.

    gradient -> 2 R R^T, model -> the orthogonal projector onto Im R,
    directed -> 2 R Rdir^T.  In every case the edge velocity of the matching
    field evaluation is eta @ (m* - m).
    """
    if spec.kind == "gradient":
        R = rigidity_matrix(spec.graph, p)
        return 2.0 * (R @ R.T)
    if spec.kind == "model":
        U, _, _, r = _svd(spec.graph, p)
        expected = generic_rank(spec.graph, p.d, seed)
        if r < expected:
            raise RankDeficiencyError(
                f"rigidity matrix rank {r} below generic rank {expected}; "
                "projector undefined off the regular set"
            )
        P = U[:, :r]
        return P @ P.T
    R = rigidity_matrix(spec.graph, p)
    Rdir = directed_rigidity_matrix(spec.orientation, p)
    return 2.0 * (R @ Rdir.T)


def node_potential(graph: Graph, p: Configuration, m_star: Measurement) -> float:
    """Quarter squared norm of the edge error at p; the gradient field is
    its negative node-space gradient."""
    err = distance_map(graph, p).values - m_star.values
    return 0.25 * float(err @ err)


def edge_potential(m: Measurement, m_star: Measurement) -> float:
    """Half squared distance of a measurement from the target."""
    err = m.values - m_star.values
    return 0.5 * float(err @ err)
