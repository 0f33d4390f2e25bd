"""Thick triangulations of Riemannian surfaces and Alexander maps."""

import json
import os
import tempfile

from . import _fatlas
from ._fatlas import (
    ConfigError,
    FatlasError,
    IoError,
    affine_dilatation,
    load_mesh,
    outer_dilatation,
    regular_simplex,
    simplex_volume,
    thickness,
    worker_count,
)

__all__ = [
    "ConfigError",
    "FatlasError",
    "IoError",
    "Result",
    "affine_dilatation",
    "load_mesh",
    "outer_dilatation",
    "regular_simplex",
    "run",
    "simplex_volume",
    "thickness",
    "worker_count",
]


class Result:
    """Exit code, parsed report and log of one command."""

    def __init__(self, code, report, log, out):
        self.code = code
        self.report = report
        self.log = log
        self.out = out

    @property
    def ok(self):
        return self.code == 0

    def __repr__(self):
        stage = self.report.get("stage") if isinstance(self.report, dict) else None
        return f"Result(code={self.code}, stage={stage!r}, out={self.out!r})"


def run(command, config, out=None, timestamp=False):
    """Run triangulate, qmmap, bounds, verify or exhaust.

    `config` is a dict in the JSON config layout. Artifacts go to `out`
    (a fresh temporary directory when omitted).
    """
    if out is None:
        out = tempfile.mkdtemp(prefix="fatlas_")
    code, report, log = _fatlas.run(command, json.dumps(config), os.fspath(out), timestamp)
    return Result(code, json.loads(report), log, out)

