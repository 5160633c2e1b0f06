"""Tensor-grid solution container and its CSV form."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np


@dataclass
class SolutionField:
    """Values on the grid ``t x x``; ``u[i, j]`` is u(x[j], t[i]).

    ``provenance`` is one of operational / short-time / series / fd.
    ``meta`` holds method parameters and any per-point failures.
    """

    x: np.ndarray
    t: np.ndarray
    u: np.ndarray
    ux: np.ndarray | None = None
    provenance: str = "unknown"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.t = np.asarray(self.t, dtype=float)
        self.u = np.asarray(self.u, dtype=float).reshape(len(self.t), len(self.x))
        if self.ux is not None:
            self.ux = np.asarray(self.ux, dtype=float).reshape(self.u.shape)

    @property
    def failures(self) -> list:
        return self.meta.setdefault("failures", [])

    def at_time(self, i):
        return self.u[i]

    def to_csv(self, path_or_buf=None) -> str:
        """Write ``x,t,u[,ux]`` rows with 17 significant digits; returns the text."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["x", "t", "u"] + (["ux"] if self.ux is not None else [])
        w.writerow(header)
        for i, tv in enumerate(self.t):
            for j, xv in enumerate(self.x):
                row = [xv, tv, self.u[i, j]]
                if self.ux is not None:
                    row.append(self.ux[i, j])
                w.writerow(["%.17g" % v for v in row])
        text = buf.getvalue()
        if path_or_buf is not None:
            if hasattr(path_or_buf, "write"):
                path_or_buf.write(text)
            else:
                with open(path_or_buf, "w", newline="") as fh:
                    fh.write(text)
        return text

    @classmethod
    def from_csv(cls, path_or_text, provenance="csv") -> SolutionField:
        if "\n" in str(path_or_text):
            rows = list(csv.reader(io.StringIO(path_or_text)))
        else:
            with open(path_or_text, newline="") as fh:
                rows = list(csv.reader(fh))
        header, body = rows[0], np.array(rows[1:], dtype=float)
        xs = np.unique(body[:, 0])
        ts = np.unique(body[:, 1])
        # rows are t-major with x varying fastest
        shape = (len(ts), len(xs))
        u = body[:, header.index("u")].reshape(shape)
        ux = body[:, header.index("ux")].reshape(shape) if "ux" in header else None
        return cls(body[: len(xs), 0], body[:: len(xs), 1], u, ux, provenance)
