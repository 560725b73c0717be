import numpy as np
import pytest

from scmfpga import fixedpoint as fx
from scmfpga.bits import BitVec
from scmfpga.emulate import (
    CycleCosts,
    cycle_estimate,
    memory_report,
    node_forward_fpga,
    ones_count_dot,
    predict_fpga,
    xnor_count,
)
from scmfpga.encoding import parse_encoding
from scmfpga.mechanism import external_mechanism, mech_eval_fpga
from scmfpga.model import Activation, InDomain, ScmLayer, ScmModel, ScmNode


# -- bit-level dot products -------------------------------------------------


def test_xnor_count_known_vectors():
    a = BitVec.from_pm1([-1, 1, 1, -1])
    b = BitVec.from_pm1([-1, 1, -1, -1])
    assert xnor_count(a, b) == 2


def test_xnor_count_identical():
    for n in (1, 5, 64, 130):
        v = BitVec.from01(np.random.default_rng(n).integers(0, 2, size=n))
        assert xnor_count(v, v) == n


def test_xnor_count_random_oracle():
    rng = np.random.default_rng(0)
    for _ in range(500):
        n = int(rng.integers(1, 256))
        a = rng.integers(0, 2, size=n)
        b = rng.integers(0, 2, size=n)
        oracle = int(((2 * a - 1) * (2 * b - 1)).sum())
        assert xnor_count(BitVec.from01(a), BitVec.from01(b)) == oracle


def test_ones_count_dot_known_vectors():
    a = BitVec.from01([1, 0, 1, 1])
    w = BitVec.from_pm1([-1, 1, -1, 1])
    assert ones_count_dot(a, w) == -1


def test_ones_count_dot_zero_input():
    w = BitVec.from_pm1([1, -1, 1])
    assert ones_count_dot(BitVec(3), w) == 0


def test_ones_count_dot_random_oracle():
    rng = np.random.default_rng(1)
    for _ in range(500):
        n = int(rng.integers(1, 256))
        a = rng.integers(0, 2, size=n)
        w = rng.integers(0, 2, size=n)
        oracle = int((a * (2 * w - 1)).sum())
        assert ones_count_dot(BitVec.from01(a), BitVec.from01(w)) == oracle


def test_dot_length_mismatch():
    with pytest.raises(ValueError):
        xnor_count(BitVec(3), BitVec(4))
    with pytest.raises(ValueError):
        ones_count_dot(BitVec(3), BitVec(4))


# -- node pipeline ------------------------------------------------------------


def _node(w_pm1, shift=0, bias=0.0, beta=(1.0,)):
    beta = np.asarray(beta, dtype=np.float64)
    return ScmNode(
        w=BitVec.from_pm1(w_pm1),
        shift=shift,
        bias=bias,
        bias_raw=fx.fx_from_real(bias),
        beta=beta,
        beta_raw=fx.quantize_array(beta)[0],
    )


def test_node_forward_shift_semantics():
    # dot = 2, shift 3 -> pre is 16.0 at wide scale, bit set
    node = _node([1, 1, 1, 1], shift=3)
    bit, contrib = node_forward_fpga(BitVec.from_pm1([1, 1, 1, -1]), node, Activation.STEP)
    assert bit == 1
    assert contrib[0] == fx.fx_from_real(1.0)


def test_node_forward_pre_is_exact_wide_value():
    # dot=2 with shift 3 must give pre exactly 16.0 at the wide scale:
    # a bias of -16.0 cancels it to 0 (bit clear under the strict threshold)
    # and one raw step above tips it positive
    eps = fx.RESOLUTION
    at_zero = _node([1, 1, 1, 1], shift=3, bias=-16.0)
    just_over = _node([1, 1, 1, 1], shift=3, bias=-16.0 + eps)
    x = BitVec.from_pm1([1, 1, 1, -1])
    assert node_forward_fpga(x, at_zero, Activation.STEP)[0] == 0
    assert node_forward_fpga(x, just_over, Activation.STEP)[0] == 1


def test_node_forward_zero_pre_gives_zero_bit():
    node = _node([1, 1], shift=0, bias=0.0)
    bit, contrib = node_forward_fpga(BitVec.from_pm1([1, -1]), node, Activation.STEP)
    assert bit == 0
    assert contrib[0] == -fx.fx_from_real(1.0)  # two's complement of beta


def test_node_forward_sign_gates_contribution():
    node = _node([1, 1], shift=0, bias=-10.0, beta=(0.5,))
    bit, contrib = node_forward_fpga(BitVec.from_pm1([1, 1]), node, Activation.SIGN)
    assert bit == 0
    assert contrib[0] == 0


def test_node_forward_conditional_domain():
    node = _node([-1, 1, -1, 1], bias=1.5)
    # {0,1} input (1,0,1,1): dot -1, pre = -1 + 1.5 > 0
    bit, _ = node_forward_fpga(
        BitVec.from01([1, 0, 1, 1]), node, Activation.SIGN, InDomain.ZO1
    )
    assert bit == 1


# -- whole-model emulation ----------------------------------------------------


def test_mechanism_only_model_matches_mech_eval():
    rng = np.random.default_rng(2)
    mech = external_mechanism(rng.normal(scale=0.2, size=(10, 2)), rng.normal(size=2))
    model = ScmModel(parse_encoding("density:10"), mech, [], 2)
    for _ in range(20):
        b = BitVec.from01(rng.integers(0, 2, size=10))
        assert np.array_equal(predict_fpga(model, b), mech_eval_fpga(b, mech))


def _deep_model(acts, d_enc=12, sizes=(4, 3), seed=0, m=2):
    rng = np.random.default_rng(seed)
    mech = external_mechanism(rng.normal(scale=0.1, size=(d_enc, m)), rng.normal(size=m))
    layers = []
    fan_in = d_enc
    for n, act in zip(sizes, acts):
        nodes = []
        for _ in range(n):
            beta = rng.normal(scale=0.4, size=m)
            bias = fx.fx_to_real(fx.fx_from_real(rng.uniform(-3, 3)))
            nodes.append(
                ScmNode(
                    w=BitVec.from01(rng.integers(0, 2, size=fan_in)),
                    shift=int(rng.integers(0, 4)),
                    bias=bias,
                    bias_raw=fx.fx_from_real(bias),
                    beta=beta,
                    beta_raw=fx.quantize_array(beta)[0],
                )
            )
        layers.append(ScmLayer(act, nodes))
        fan_in = n
    model = ScmModel(parse_encoding("density:12"), mech, layers, m)
    model.validate()
    return model


@pytest.mark.parametrize(
    "acts",
    [
        (Activation.STEP, Activation.STEP),
        (Activation.SIGN, Activation.SIGN),
        (Activation.STEP, Activation.SIGN),
        (Activation.SIGN, Activation.STEP),
    ],
)
def test_emulated_bits_match_float_path(acts):
    from scmfpga.model import predict_float

    model = _deep_model(acts)
    rng = np.random.default_rng(3)
    for _ in range(100):
        b = BitVec.from01(rng.integers(0, 2, size=model.d_enc))
        f = predict_float(model, b)
        g = fx.dequantize_array(predict_fpga(model, b))
        # biases sit on the grid, so only readout rounding separates the paths
        assert np.max(np.abs(f - g)) <= (model.total_nodes + model.d_enc + 3) * fx.RESOLUTION


def test_predict_fpga_deterministic():
    model = _deep_model((Activation.STEP, Activation.SIGN))
    b = BitVec.from01(np.random.default_rng(4).integers(0, 2, size=model.d_enc))
    first = predict_fpga(model, b)
    for _ in range(5):
        assert np.array_equal(predict_fpga(model, b), first)


def test_predict_fpga_saturates_output():
    mech = external_mechanism(np.zeros((2, 1)), np.array([63.0]))
    nodes = [_node([1, 1], bias=1.0, beta=(50.0,))]
    model = ScmModel(
        parse_encoding("density:2"), mech, [ScmLayer(Activation.STEP, nodes)], 1
    )
    out = predict_fpga(model, BitVec.from_pm1([1, 1]))
    assert out[0] == fx.RAW_MAX  # 63 + 50 clamps at the format maximum


# -- cycle model ----------------------------------------------------------


def _shape_stub(d_enc, sizes, acts=None, m=1):
    """Model with the right widths/shapes; parameter values are irrelevant."""
    acts = acts or [Activation.STEP] * len(sizes)
    mech = external_mechanism(np.zeros((d_enc, m)), np.zeros(m))
    layers = []
    fan_in = d_enc
    for n, act in zip(sizes, acts):
        nodes = [_node([1] * fan_in, beta=[0.0] * m) for _ in range(n)]
        layers.append(ScmLayer(act, nodes))
        fan_in = n
    enc = parse_encoding(f"density:{d_enc}") if d_enc <= 255 else parse_encoding("s2v1")
    model = ScmModel(enc, mech, layers, m)
    return model


# reference hardware rows: (encoded width, layer sizes, expected cycles)
CYCLE_ROWS = [
    (25, (60,), 9),
    (25, (60,), 9),
    (25, (40, 40, 40), 23),
    (25, (60, 60), 18),
    (56, (60,), 10),
    (56, (60,), 10),
    (56, (40, 40, 40), 24),
    (56, (40, 40, 40), 24),
    (576, (20,), 10),
    (576, (20,), 10),
    (576, (20, 20, 20), 24),
    (576, (20, 20), 19),
    (224, (25,), 10),
    (224, (25,), 10),
    (224, (20, 8), 19),
    (224, (20, 18), 19),
]


@pytest.mark.parametrize("d_enc,sizes,expected", CYCLE_ROWS)
def test_cycle_table_rows(d_enc, sizes, expected):
    assert cycle_estimate(_shape_stub(d_enc, sizes)) == expected


def test_cycle_costs_overridable():
    model = _shape_stub(25, (60,))
    slow = CycleCosts(load=2, output_sum_single=4)
    assert cycle_estimate(model, slow) == 2 + 6 + 4


def test_cycle_mechanism_only():
    model = _shape_stub(25, ())
    assert cycle_estimate(model) == 1 + 2 + 2


# -- memory model -----------------------------------------------------------


def _half_up_1dp(x: float) -> float:
    from decimal import ROUND_HALF_UP, Decimal

    return float(Decimal(repr(x)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def test_memory_inputs_table():
    rows = [  # d_enc, d, reference one-decimal display
        (25, 1, 60.9),
        (56, 2, 56.3),
        (576, 36, 75.0),
        (224, 14, 75.0),
    ]
    for d_enc, d, pct in rows:
        spec = {25: "s2v2", 56: "s1:3", 576: "s2v1", 224: "s2v1"}[d_enc]
        mech = external_mechanism(np.zeros((d_enc, 1)), np.zeros(1))
        model = ScmModel(parse_encoding(spec), mech, [], 1)
        assert model.n_features == d
        rep = memory_report(model)
        assert rep.inputs_real_bits == 64 * d
        assert rep.inputs_fpga_bits == d_enc
        assert rep.input_reduction == 1 - d_enc / (64 * d)  # exact fraction
        assert _half_up_1dp(rep.input_reduction * 100) == pct


def test_memory_weights_table():
    rows = [  # spec, d, nodes, real bits, fpga bits, pct
        ("s2v2", 1, 60, 3840, 1500, 60.9375),
        ("s1:3", 2, 60, 7680, 3360, 56.25),
        ("s2v1", 36, 20, 46080, 11520, 75.0),
        ("s2v1", 14, 25, 22400, 5600, 75.0),
    ]
    for spec_text, d, n, real_bits, fpga_bits, pct in rows:
        spec = parse_encoding(spec_text)
        d_enc = d * spec.bits_per_input
        mech = external_mechanism(np.zeros((d_enc, 1)), np.zeros(1))
        model = ScmModel(spec, mech, [ScmLayer(Activation.STEP, [
            _node([1] * d_enc) for _ in range(n)
        ])], 1)
        rep = memory_report(model)
        assert rep.weight_real_bits == real_bits
        assert rep.weight_fpga_bits == fpga_bits
        assert round(rep.weight_reduction * 100, 4) == pct


def test_memory_deep_weight_bits_match_power_table():
    # reference per-model binary weight counts for the deep configurations
    cases = [
        (25, (40, 40, 40), 4200),
        (25, (60, 60), 5100),
        (56, (40, 40, 40), 5440),
        (576, (20, 20, 20), 12320),
        (576, (20, 20), 11920),
        (224, (20, 8), 4640),
        (224, (20, 18), 4840),
    ]
    for d_enc, sizes, expected in cases:
        spec = {25: "s2v2", 56: "s1:3", 576: "s2v1", 224: "s2v1"}[d_enc]
        mech = external_mechanism(np.zeros((d_enc, 1)), np.zeros(1))
        layers = []
        fan_in = d_enc
        for n in sizes:
            layers.append(ScmLayer(Activation.SIGN, [_node([1] * fan_in) for _ in range(n)]))
            fan_in = n
        model = ScmModel(parse_encoding(spec), mech, layers, 1)
        assert memory_report(model).weight_fpga_bits == expected


def test_memory_beta_reduction_is_half():
    model = _shape_stub(25, (60,))
    rep = memory_report(model)
    assert rep.beta_real_bits == 64 * 60
    assert rep.beta_fpga_bits == 32 * 60
    assert rep.beta_reduction == 0.5
    assert rep.lambda_fpga_bits == 3 * 60


def test_report_text_and_time():
    model = _shape_stub(25, (60,))
    rep = memory_report(model, clock_hz=100e6)
    assert rep.cycles == 9
    assert abs(rep.eval_seconds - 90e-9) < 1e-15
    text = rep.text()
    assert "9" in text and "90 ns" in text
