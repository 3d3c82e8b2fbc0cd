"""Estimator-style facade over the structure pipeline.

``fit`` decomposes one labeled graph, ``transform`` applies the fitted shift
and ``predict`` maps vertices to their bag's tree node.  Requires scikit-learn
(the ``estimator`` extra) for parameter handling and fitted-state checks.
"""
from __future__ import annotations

from typing import Iterable, Optional

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .conn import is_two_edge_connected
from .decomp import structure_decompose
from .errors import InvalidParameter, PreconditionError
from .lgraph import LabeledGraph, shift_by


def check_labeled_graph(g, require_two_edge_connected: bool = False) -> LabeledGraph:
    """Validate the estimator input: a ``LabeledGraph``, optionally 2-edge-connected."""
    if not isinstance(g, LabeledGraph):
        raise TypeError(f"expected a LabeledGraph, got {type(g).__name__}")
    if not g.vertices:
        raise InvalidParameter("graph has no vertices")
    if require_two_edge_connected and not is_two_edge_connected(g):
        raise PreconditionError("graph is not 2-edge-connected")
    return g


def check_positive(value, name: str, allow_none: bool = False):
    if value is None and allow_none:
        return None
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise InvalidParameter(f"{name} must be a positive integer, got {value!r}")
    return value


class TreeCutDecomposer(TransformerMixin, BaseEstimator):
    """Fits a shift and a tree-cut decomposition whose bags pass the structure check.

    After ``fit``: ``result_`` (the full pipeline result), ``t_``, ``shift_``,
    ``decomposition_`` and ``report_``; the last three are ``None`` when a rich
    flower was found instead (``witness_`` then holds it).
    """

    def __init__(self, k: int = 1, n: int = 1, override_t: Optional[int] = None,
                 high_degree_bound: Optional[int] = None, budget: Optional[int] = None):
        self.k = k
        self.n = n
        self.override_t = override_t
        self.high_degree_bound = high_degree_bound
        self.budget = budget

    def fit(self, X: LabeledGraph, y=None):
        g = check_labeled_graph(X, require_two_edge_connected=True)
        check_positive(self.k, "k")
        check_positive(self.n, "n")
        check_positive(self.override_t, "override_t", allow_none=True)
        check_positive(self.high_degree_bound, "high_degree_bound", allow_none=True)
        res = structure_decompose(g, self.k, self.n, self.override_t, self.high_degree_bound, self.budget)
        self.result_ = res
        self.t_ = res.t
        self.vertices_ = frozenset(g.vertices)
        self.witness_ = res.witness
        self.shift_ = res.shift if res.kind == "decomposition" else None
        self.decomposition_ = res.decomposition
        self.report_ = res.report
        return self

    def _check_decomposed(self):
        check_is_fitted(self, "result_")
        if self.decomposition_ is None:
            raise PreconditionError("fit found a rich flower; there is no decomposition")

    def transform(self, X: LabeledGraph) -> LabeledGraph:
        """``X`` relabeled by the fitted shift."""
        self._check_decomposed()
        g = check_labeled_graph(X)
        if frozenset(g.vertices) != self.vertices_:
            raise InvalidParameter("graph has a different vertex set from the fitted one")
        return shift_by(g, self.shift_)

    def predict(self, X: Iterable) -> list:
        """Tree node of the bag holding each vertex in ``X``."""
        self._check_decomposed()
        return [self.decomposition_.bag_of(v) for v in X]
