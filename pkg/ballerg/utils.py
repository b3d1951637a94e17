"""Utility functions shared by the dynamics code and the experiment runner."""

import re

import numpy as np


def slugify(text: str) -> str:
    """Convert text to a filesystem-safe string.

    Converts to lowercase, removes special characters, and replaces spaces with hyphens.

    Args:
        text: The text to convert to a slug

    Returns:
        A filesystem-safe string with no spaces or special characters
    """
    if not text:
        return ""

    text = str(text).lower()
    text = re.sub(r"[\s_]+", "-", text)
    text = re.sub(r"[^\w-]", "", text)
    text = re.sub(r"-+", "-", text)
    return text.strip("-")


class CompensatedSum:
    """Element-wise Neumaier summation of equally shaped complex arrays."""

    def __init__(self, shape):
        self._sum = np.zeros(shape, dtype=np.complex128)
        self._comp = np.zeros(shape, dtype=np.complex128)
        self.count = 0

    def add(self, values: np.ndarray) -> None:
        self._sum, self._comp = _neumaier_step(self._sum, self._comp, values.real, values.imag)
        self.count += 1

    @property
    def total(self) -> np.ndarray:
        return self._sum + self._comp

    def mean(self, n: int = None) -> np.ndarray:
        """Total divided by ``n`` (default: the number of added arrays)."""
        return self.total / (self.count if n is None else n)


def _neumaier_step(total, comp, re, im):
    new_re, comp_re = _neumaier_real(total.real, comp.real, re)
    new_im, comp_im = _neumaier_real(total.imag, comp.imag, im)
    return new_re + 1j * new_im, comp_re + 1j * comp_im


def _neumaier_real(total, comp, values):
    t = total + values
    big = np.abs(total) >= np.abs(values)
    comp = comp + np.where(big, (total - t) + values, (values - t) + total)
    return t, comp
