"""
Base symbol interface for all self-maps of the unit ball.

This module defines the abstract base class that every symbol in the zoo must implement.
"""
from abc import ABC, abstractmethod

import numpy as np

from .exceptions import SpaceError
from .spaces import L2, SpaceKind, Vector, norm, row_norms


class BaseSymbol(ABC):
    """Abstract base class for holomorphic self-maps of the unit ball.

    Subclasses describe a map by a closed formula; ``apply`` checks that the
    argument lies in the open ball and delegates to ``_map``.
    """

    def apply(self, x: Vector) -> Vector:
        """Return the image of ``x``, which must lie in the open unit ball."""
        size = norm(x)
        if size >= 1.0:
            raise SpaceError(f"{self.type_name} can only be applied inside the open ball, got norm {size}")
        return self._map(x)

    def apply_rows(self, matrix: np.ndarray, space: SpaceKind) -> np.ndarray:
        """Image of every row of a zero-padded coordinate matrix; rows must lie in the open ball."""
        largest = float(row_norms(matrix, space).max(initial=0.0))
        if largest >= 1.0:
            raise SpaceError(f"{self.type_name} can only be applied inside the open ball, got norm {largest}")
        return self._map_rows(matrix, space)

    @abstractmethod
    def _map(self, x: Vector) -> Vector:
        """Evaluate the closed formula at ``x``."""
        pass

    def _map_rows(self, matrix: np.ndarray, space: SpaceKind) -> np.ndarray:
        """Row-wise ``_map``; subclasses with a closed vectorized form override this."""
        images = [self._map(Vector(row, space)) for row in matrix]
        width = max((v.dim for v in images), default=matrix.shape[1])
        result = np.zeros((matrix.shape[0], width), dtype=np.complex128)
        for i, v in enumerate(images):
            result[i, : v.dim] = v.coords
        return result

    @property
    @abstractmethod
    def type_name(self) -> str:
        """Return the tag used for this symbol in JSON configs."""
        pass

    @property
    @abstractmethod
    def is_polynomial(self) -> bool:
        """Return True if every coordinate of the map is a polynomial."""
        pass

    @property
    def preferred_space(self) -> SpaceKind:
        """Return the ambient space points should live in when none is given."""
        return L2

    def __call__(self, x: Vector) -> Vector:
        return self.apply(x)
