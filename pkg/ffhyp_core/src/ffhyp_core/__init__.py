"""Exact algebra over finite fields: fields, matrices, forms and PGL representatives."""

from __future__ import annotations

__version__ = "0.1.0"
