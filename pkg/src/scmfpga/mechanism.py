"""Linear mechanism model over encoded +-1 inputs.

The model keeps two synchronized copies of its parameters: float64 values used
by training and the reference ("PC") evaluation path, and raw Q7.25 integers
used by the emulated datapath. The emulated evaluation adds the stored weight
when the input bit is 1 and its two's complement when the bit is 0, then adds
the intercept, all in the wide accumulator, saturating once at the end.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import fixedpoint as fx
from .bits import BitVec
from .linalg import lasso_fit

SOURCE_LASSO = "lasso"
SOURCE_EXTERNAL = "external"


@dataclass(frozen=True)
class MechanismModel:
    weights: np.ndarray  # (d_enc, m) float64
    intercepts: np.ndarray  # (m,) float64
    weights_raw: np.ndarray  # (d_enc, m) int32
    intercepts_raw: np.ndarray  # (m,) int32
    source: str = SOURCE_LASSO
    alpha: float = 0.0

    def __post_init__(self):
        if self.weights.ndim != 2 or self.intercepts.ndim != 1:
            raise ValueError("weights must be (d_enc, m), intercepts (m,)")
        if self.weights.shape[1] != self.intercepts.shape[0]:
            raise ValueError("output count mismatch between weights and intercepts")
        if self.weights_raw.shape != self.weights.shape:
            raise ValueError("quantized weights shape mismatch")

    @property
    def d_enc(self) -> int:
        return self.weights.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.weights.shape[1]

    @classmethod
    def from_real(
        cls, weights: np.ndarray, intercepts: np.ndarray, source: str, alpha: float = 0.0
    ) -> "MechanismModel":
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim == 1:
            w = w[:, None]
        u = np.atleast_1d(np.asarray(intercepts, dtype=np.float64))
        w_raw, _ = fx.quantize_array(w)
        u_raw, _ = fx.quantize_array(u)
        return cls(w, u, w_raw, u_raw, source, alpha)

    @classmethod
    def zero(cls, d_enc: int, m: int) -> "MechanismModel":
        return cls.from_real(np.zeros((d_enc, m)), np.zeros(m), SOURCE_EXTERNAL)


def signals_pm1(bits: Sequence[BitVec]) -> np.ndarray:
    """Stack bit vectors into an (N, d_enc) float64 matrix of -1/+1."""
    if not bits:
        return np.zeros((0, 0))
    return np.stack([b.to_pm1() for b in bits]).astype(np.float64)


def fit_mechanism(
    bits: Sequence[BitVec] | np.ndarray, y: np.ndarray, alpha: float
) -> MechanismModel:
    """L1-fit the linear term on the +-1 view of encoded inputs.

    `bits` may be the encoded vectors or an already-built (N, d_enc) +-1
    matrix. Intercepts are the target column means.
    """
    s = bits if isinstance(bits, np.ndarray) else signals_pm1(bits)
    p, u = lasso_fit(s, y, alpha)
    return MechanismModel.from_real(p, u, SOURCE_LASSO, alpha)


def external_mechanism(weights: np.ndarray, intercepts: np.ndarray) -> MechanismModel:
    """Wrap user-supplied linear weights (e.g. a plant model) unchanged."""
    return MechanismModel.from_real(weights, intercepts, SOURCE_EXTERNAL)


def mech_eval_float(x_bits: BitVec, mech: MechanismModel) -> np.ndarray:
    if x_bits.n != mech.d_enc:
        raise ValueError(f"input width {x_bits.n} != mechanism width {mech.d_enc}")
    s = x_bits.to_pm1().astype(np.float64)
    return s @ mech.weights + mech.intercepts


def mech_eval_float_batch(s: np.ndarray, mech: MechanismModel) -> np.ndarray:
    """Evaluate on an (N, d_enc) +-1 matrix; returns (N, m)."""
    if s.shape[1] != mech.d_enc:
        raise ValueError(f"input width {s.shape[1]} != mechanism width {mech.d_enc}")
    return s @ mech.weights + mech.intercepts


def mech_eval_fpga(x_bits: BitVec, mech: MechanismModel) -> np.ndarray:
    """Emulated evaluation; returns raw Q7.25 values, one per output.

    Adds the raw weight for set bits and its two's complement for clear bits,
    then the intercept, in input index order; saturates once at the end.
    """
    if x_bits.n != mech.d_enc:
        raise ValueError(f"input width {x_bits.n} != mechanism width {mech.d_enc}")
    if np.any(mech.weights_raw == fx.RAW_MIN):
        # negation saturates at the minimum raw, so take the scalar path
        out = np.zeros(mech.n_outputs, dtype=np.int64)
        for q in range(mech.n_outputs):
            col = mech.weights_raw[:, q]
            acc = 0
            for i in range(mech.d_enc):
                w = int(col[i])
                acc += w if x_bits.get(i) else fx.fx_neg(w)
            acc += int(mech.intercepts_raw[q])
            out[q] = fx.saturate_to_fx(acc)
        return out.astype(np.int32)
    # otherwise the conditional negation is exactly a +-1 dot product
    s = x_bits.to_pm1().astype(np.int64)
    acc = s @ mech.weights_raw.astype(np.int64) + mech.intercepts_raw.astype(np.int64)
    return np.array([fx.saturate_to_fx(int(a)) for a in acc], dtype=np.int32)
