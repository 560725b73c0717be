"""Batch evaluation helpers shared by the CLI and the test suites.

One loaded model drives both evaluators, so a comparison can never pit two
different parameter copies against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import fixedpoint as fx
from .bits import BitVec
from .emulate import predict_fpga_batch
from .model import ScmModel, predict_float_batch

MODES = ("pc", "fpga", "both")


@dataclass
class EvalReport:
    n_samples: int
    rmse_pc: float | None = None
    rmse_fpga: float | None = None
    outputs_pc: np.ndarray | None = None  # (N, m) float64
    outputs_fpga_raw: np.ndarray | None = None  # (N, m) int32

    @property
    def outputs_fpga(self) -> np.ndarray | None:
        if self.outputs_fpga_raw is None:
            return None
        return fx.dequantize_array(self.outputs_fpga_raw)

    @property
    def rmse_difference(self) -> float | None:
        if self.rmse_pc is None or self.rmse_fpga is None:
            return None
        return abs(self.rmse_fpga - self.rmse_pc)

    @property
    def max_output_delta(self) -> float | None:
        """Largest per-sample |emulated - reference| over all outputs."""
        if self.outputs_pc is None or self.outputs_fpga_raw is None:
            return None
        if self.outputs_pc.size == 0:
            return 0.0
        return float(np.max(np.abs(self.outputs_fpga - self.outputs_pc)))


def _rmse(pred: np.ndarray, y: np.ndarray) -> float:
    err = pred - y
    return float(np.sqrt(np.mean(err * err)))


def evaluate_bits(
    model: ScmModel, bits: Sequence[BitVec], y: np.ndarray, mode: str = "both"
) -> EvalReport:
    """Evaluate encoded samples against targets in the requested mode(s)."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    if y.shape[0] != len(bits):
        raise ValueError("target row count does not match the sample count")
    rep = EvalReport(n_samples=len(bits))
    if mode in ("pc", "both"):
        rep.outputs_pc = predict_float_batch(model, list(bits))
        rep.rmse_pc = _rmse(rep.outputs_pc, y)
    if mode in ("fpga", "both"):
        rep.outputs_fpga_raw = predict_fpga_batch(model, list(bits))
        rep.rmse_fpga = _rmse(rep.outputs_fpga, y)
    return rep
