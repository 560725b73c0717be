"""Bit-exact emulation of the hardware datapath, plus cycle and memory models.

The datapath never multiplies: +-1 dot products are an XNOR and two
popcounts, {0,1}-input dot products are two masked popcounts, the per-node
scale is a left shift, and the output path sums raw Q7.25 integers in a wide
accumulator that saturates once at the end. Given the same model file, the
reference float path and this emulation produce identical activation bits;
outputs differ only by the stored-parameter rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import fixedpoint as fx
from .bits import BitVec
from .mechanism import mech_eval_fpga
from .model import Activation, InDomain, ScmModel, ScmNode, feed_domain


def xnor_count(a: BitVec, b: BitVec) -> int:
    """Dot product of two {-1,+1} vectors stored as bits.

    popcount(XNOR) counts agreeing positions; disagreements count -1 each.
    """
    if a.n != b.n:
        raise ValueError(f"length mismatch: {a.n} vs {b.n}")
    agree = (a ^ b).invert().popcount()
    return 2 * agree - a.n


def ones_count_dot(a01: BitVec, w: BitVec) -> int:
    """Dot product of a literal {0,1} vector with a {-1,+1} weight vector.

    Only positions with a set input bit contribute: +1 where the weight bit
    is set, -1 where it is clear.
    """
    if a01.n != w.n:
        raise ValueError(f"length mismatch: {a01.n} vs {w.n}")
    plus = (a01 & w).popcount()
    minus = (a01 & w.invert()).popcount()
    return plus - minus


def node_forward_fpga(
    in_bits: BitVec,
    node: ScmNode,
    act: Activation,
    in_domain: InDomain = InDomain.PM1,
) -> tuple[int, np.ndarray]:
    """One node in the emulated pipeline: (forwarded bit, raw contributions).

    dot -> left shift by the scale code -> promote to the 25-fraction scale
    -> add the quantized bias -> strict threshold at zero. The contribution
    per output is the raw readout (SIGN: beta or 0; STEP: beta or its two's
    complement).
    """
    if in_bits.n != node.fan_in:
        raise ValueError(f"input width {in_bits.n} != node fan-in {node.fan_in}")
    if in_domain == InDomain.PM1:
        dot = xnor_count(in_bits, node.w)
    else:
        dot = ones_count_dot(in_bits, node.w)
    pre = ((dot << node.shift) << fx.FRAC_BITS) + node.bias_raw
    bit = 1 if pre > 0 else 0
    if act == Activation.SIGN:
        contrib = node.beta_raw if bit else np.zeros_like(node.beta_raw)
    else:
        if bit:
            contrib = node.beta_raw
        else:
            contrib = np.array([fx.fx_neg(int(v)) for v in node.beta_raw], dtype=np.int32)
    return bit, contrib


def predict_fpga(model: ScmModel, x_bits: BitVec) -> np.ndarray:
    """Emulated prediction for one encoded sample; returns raw Q7.25 per output.

    The mechanism part and every node contribution accumulate in the wide
    integer in a fixed order (layer-major, then node index), with a single
    saturation at the end, so results are bit-reproducible.
    """
    if x_bits.n != model.d_enc:
        raise ValueError(f"input width {x_bits.n} != model width {model.d_enc}")
    acc = [int(v) for v in mech_eval_fpga(x_bits, model.mechanism)]
    bits_in = x_bits
    domain = InDomain.PM1
    for layer in model.layers:
        next_bits = 0
        for i, node in enumerate(layer.nodes):
            bit, contrib = node_forward_fpga(bits_in, node, layer.activation, domain)
            next_bits |= bit << i
            for q in range(model.n_outputs):
                acc[q] += int(contrib[q])
        bits_in = BitVec(len(layer.nodes), next_bits)
        domain = feed_domain(layer.activation)
    return np.array([fx.saturate_to_fx(a) for a in acc], dtype=np.int32)


def predict_fpga_batch(model: ScmModel, bits: Sequence[BitVec]) -> np.ndarray:
    """Emulated prediction over a batch; returns an (N, m) int32 raw matrix."""
    return np.stack([predict_fpga(model, b) for b in bits]) if bits else np.zeros(
        (0, model.n_outputs), dtype=np.int32
    )


# -- cycle model ---------------------------------------------------------


@dataclass(frozen=True)
class CycleCosts:
    """Per-stage clock-cycle costs of the pipelined evaluator.

    The first layer runs dot/count/shift/bias/threshold stages; wide input
    vectors need one extra cycle because their adder tree is two levels deep.
    Later layers overlap with the running summation and cost a flat amount
    each. The output summation is two cycles for a single-layer model and
    six when layer sums have to merge.
    """

    load: int = 1
    first_layer_narrow: int = 6
    first_layer_wide: int = 7
    wide_input_threshold: int = 32  # encoded widths above this use the wide path
    extra_layer: int = 5
    output_sum_single: int = 2
    output_sum_deep: int = 6
    mech_only: int = 2


def cycle_estimate(model: ScmModel, costs: CycleCosts = CycleCosts()) -> int:
    """Clock cycles to evaluate one input."""
    n_layers = len(model.layers)
    if n_layers == 0:
        return costs.load + costs.mech_only + costs.output_sum_single
    first = (
        costs.first_layer_narrow
        if model.d_enc <= costs.wide_input_threshold
        else costs.first_layer_wide
    )
    out = costs.output_sum_single if n_layers == 1 else costs.output_sum_deep
    return costs.load + first + (n_layers - 1) * costs.extra_layer + out


# -- memory model --------------------------------------------------------

REAL_VALUE_BITS = 64  # software baseline stores everything as float64
FX_VALUE_BITS = 32
LAMBDA_CODE_BITS = 3


@dataclass(frozen=True)
class ResourceReport:
    inputs_real_bits: int
    inputs_fpga_bits: int
    weight_real_bits: int
    weight_fpga_bits: int
    beta_real_bits: int
    beta_fpga_bits: int
    lambda_fpga_bits: int
    input_reduction: float  # fractions in [0, 1]
    weight_reduction: float
    beta_reduction: float
    cycles: int
    clock_hz: float

    @property
    def eval_seconds(self) -> float:
        return self.cycles / self.clock_hz

    def text(self) -> str:
        ns = self.eval_seconds * 1e9
        pct = lambda f: f"{f * 100:.6g}%"  # noqa: E731
        return "\n".join(
            [
                f"inputs:  {self.inputs_real_bits} bits real -> "
                f"{self.inputs_fpga_bits} bits packed   (reduction {pct(self.input_reduction)})",
                f"weights: {self.weight_real_bits} bits real -> "
                f"{self.weight_fpga_bits} bits packed   (reduction {pct(self.weight_reduction)})",
                f"readout: {self.beta_real_bits} bits real -> "
                f"{self.beta_fpga_bits} bits fixed   (reduction {pct(self.beta_reduction)})",
                f"scale codes: {self.lambda_fpga_bits} bits",
                f"cycles per evaluation: {self.cycles}",
                f"time per evaluation at {self.clock_hz / 1e6:g} MHz: {ns:g} ns",
            ]
        )


def memory_report(
    model: ScmModel,
    clock_hz: float = 100e6,
    costs: CycleCosts = CycleCosts(),
) -> ResourceReport:
    """Bit counts and reductions versus a float64 software model.

    The software side stores one 64-bit value per raw feature and per
    raw-feature x node weight; the packed side stores one bit per encoded
    input and per encoded-input x node weight, 32-bit readouts, and a 3-bit
    scale code per node.
    """
    d = model.n_features
    d_enc = model.d_enc

    weight_real = 0
    weight_fpga = 0
    fan_real = d
    fan_fpga = d_enc
    for layer in model.layers:
        n = len(layer.nodes)
        weight_real += REAL_VALUE_BITS * fan_real * n
        weight_fpga += fan_fpga * n
        fan_real = n
        fan_fpga = n

    n_beta = model.total_nodes * model.n_outputs
    inputs_real = REAL_VALUE_BITS * d
    reduction = lambda real, fpga: 1.0 - fpga / real if real else 0.0  # noqa: E731
    return ResourceReport(
        inputs_real_bits=inputs_real,
        inputs_fpga_bits=d_enc,
        weight_real_bits=weight_real,
        weight_fpga_bits=weight_fpga,
        beta_real_bits=REAL_VALUE_BITS * n_beta,
        beta_fpga_bits=FX_VALUE_BITS * n_beta,
        lambda_fpga_bits=LAMBDA_CODE_BITS * model.total_nodes,
        input_reduction=reduction(inputs_real, d_enc),
        weight_reduction=reduction(weight_real, weight_fpga),
        beta_reduction=reduction(REAL_VALUE_BITS * n_beta, FX_VALUE_BITS * n_beta),
        cycles=cycle_estimate(model, costs),
        clock_hz=clock_hz,
    )
