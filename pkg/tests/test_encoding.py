import re

import numpy as np
import pytest
from hypothesis import given, strategies as st

from scmfpga.encoding import (
    EncodingKind,
    EncodingSpec,
    decimal_digit,
    encode_density,
    encode_matrix,
    encode_scheme1,
    encode_scheme2,
    parse_encoding,
)
from scmfpga.errors import DataError

UNARY_FIELD = re.compile(r"^0*1*$")


# -- density -----------------------------------------------------------


def test_density_buckets_n3():
    assert encode_density(0.3, 3).to_string() == "100"
    assert encode_density(0.0, 3).to_string() == "000"
    assert encode_density(0.2499, 3).to_string() == "000"
    assert encode_density(0.25, 3).to_string() == "100"
    assert encode_density(0.5, 3).to_string() == "110"
    assert encode_density(0.75, 3).to_string() == "111"
    assert encode_density(1.0, 3).to_string() == "111"


def test_density_top_clamps():
    assert encode_density(1.0, 10).to_string() == "1111111111"


def test_density_matches_bucket_enumeration():
    # oracle: explicit bucket boundaries k/(N+1)
    n = 7
    edges = [k / (n + 1) for k in range(1, n + 1)]
    for x in np.linspace(0, 1, 1001):
        level = sum(x >= e for e in edges)
        expected = "1" * level + "0" * (n - level)
        assert encode_density(float(x), n).to_string() == expected


def test_density_errors():
    with pytest.raises(ValueError):
        encode_density(-0.01, 3)
    with pytest.raises(ValueError):
        encode_density(1.01, 3)
    with pytest.raises(ValueError):
        encode_density(0.5, 0)


# -- digit extraction ----------------------------------------------------


def test_digits_of_0867():
    assert decimal_digit(0.867, 1) == 8
    assert decimal_digit(0.867, 2) == 6
    assert decimal_digit(0.867, 3) == 7


def test_digit_zero_and_one():
    for k in (1, 2, 5):
        assert decimal_digit(0.0, k) == 0
        assert decimal_digit(1.0, k) == 0


def test_digit_truncates_not_rounds():
    assert decimal_digit(0.9999999, 3) == 9
    assert decimal_digit(0.129, 2) == 2
    assert decimal_digit(0.1999, 1) == 1


@given(st.floats(min_value=0.0, max_value=1.0, allow_nan=False), st.integers(1, 6))
def test_digit_matches_string_format_oracle(x, k):
    # oracle: print the shortest repr and read the k-th character after the dot
    s = repr(float(x))
    if "e" in s or "E" in s:  # tiny magnitudes format exponentially; digits are 0
        expected = 0
        if abs(x) >= 1e-7:
            return
    elif s.startswith("1"):
        expected = 0
    else:
        frac = s.split(".", 1)[1] if "." in s else ""
        expected = int(frac[k - 1]) if k <= len(frac) else 0
    assert decimal_digit(x, k) == expected


# -- scheme 1 ------------------------------------------------------------


def test_scheme1_golden_0867():
    v = encode_scheme1(0.867, 3)
    assert v.n == 28
    assert v.to_string() == "0" + "011111111" + "000111111" + "001111111"


def test_scheme1_zero_and_one():
    assert encode_scheme1(0.0, 3).to_string() == "0" * 28
    v = encode_scheme1(1.0, 3)
    assert v.to_string() == "1" + "0" * 27
    # cross-check: after the ones bit every digit is zero
    assert all(decimal_digit(1.0, k) == 0 for k in (1, 2, 3))


def test_scheme1_widths():
    for u in (1, 2, 3, 4, 7):
        assert encode_scheme1(0.5, u).n == 1 + 9 * u


# -- scheme 2 ------------------------------------------------------------


def test_scheme2_v2_golden_08674():
    v = encode_scheme2(0.8674, "V2")
    assert v.n == 25
    assert v.to_string() == "0" + "011111111" + "000111111" + "0111" + "01"


def test_scheme2_v1_golden_025():
    v = encode_scheme2(0.25, "V1")
    assert v.n == 16
    assert v.to_string() == "0" + "000000011" + "0011" + "00"


def test_scheme2_v1_zero():
    assert encode_scheme2(0.0, "V1").to_string() == "0" * 16


def test_scheme2_quant_tables():
    # 4-bit field over the hundredths digit (V1 bits 10..13)
    four_bit = {0: "0000", 1: "0000", 2: "0001", 3: "0001", 4: "0011", 5: "0011",
                6: "0111", 7: "0111", 8: "1111", 9: "1111"}
    two_bit = {0: "00", 1: "00", 2: "00", 3: "00", 4: "01", 5: "01", 6: "01",
               7: "11", 8: "11", 9: "11"}
    for d, code in four_bit.items():
        s = encode_scheme2(d / 100, "V1").to_string()
        assert s[10:14] == code, f"digit {d}"
    for d, code in two_bit.items():
        s = encode_scheme2(d / 1000, "V1").to_string()
        assert s[14:16] == code, f"digit {d}"


def test_scheme2_bad_variant():
    with pytest.raises(ValueError):
        encode_scheme2(0.5, "V3")


# -- spec + matrix -------------------------------------------------------


def test_spec_bits_per_input_table():
    assert EncodingSpec(EncodingKind.DENSITY, 10).bits_per_input == 10
    assert EncodingSpec(EncodingKind.SCHEME1, 3).bits_per_input == 28
    assert EncodingSpec(EncodingKind.SCHEME1, 4).bits_per_input == 37
    assert EncodingSpec(EncodingKind.SCHEME2_V1).bits_per_input == 16
    assert EncodingSpec(EncodingKind.SCHEME2_V2).bits_per_input == 25


def test_parse_roundtrip():
    for text in ("density:10", "s1:3", "s2v1", "s2v2"):
        spec = parse_encoding(text)
        assert str(spec) == text
        assert EncodingSpec.from_bytes(spec.to_bytes()) == spec
    with pytest.raises(ValueError):
        parse_encoding("thermometer")


def test_encoded_input_counts_match_dataset_shapes():
    cases = [
        (1, parse_encoding("s2v2"), 25),  # db1
        (2, parse_encoding("s1:3"), 56),  # db2
        (36, parse_encoding("s2v1"), 576),  # db3-shaped
        (14, parse_encoding("s2v1"), 224),  # db4-shaped
        (1, parse_encoding("density:10"), 10),
    ]
    rng = np.random.default_rng(0)
    for d, spec, expected in cases:
        bits, d_enc = encode_matrix(rng.uniform(size=(3, d)), spec)
        assert d_enc == expected
        assert all(b.n == expected for b in bits)


def test_encode_matrix_feature_order():
    spec = parse_encoding("density:3")
    bits, d_enc = encode_matrix(np.array([[0.3, 0.8]]), spec)
    assert d_enc == 6
    assert bits[0].to_string() == "100" + "111"


def test_encode_matrix_clamps_with_warning():
    spec = parse_encoding("s2v1")
    with pytest.warns(UserWarning, match="clamped 2"):
        bits, _ = encode_matrix(np.array([[-0.01], [1.2], [0.5]]), spec)
    assert bits[0] == spec.encode_value(0.0)
    assert bits[1] == spec.encode_value(1.0)


def test_encode_matrix_nonfinite_reports_position():
    spec = parse_encoding("s2v1")
    with pytest.raises(DataError, match="row 1, column 0"):
        encode_matrix(np.array([[0.1], [np.nan]]), spec)


# -- properties ----------------------------------------------------------

unit_floats = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@given(unit_floats)
def test_width_always_matches_spec(x):
    for spec in (
        EncodingSpec(EncodingKind.DENSITY, 10),
        EncodingSpec(EncodingKind.SCHEME1, 3),
        EncodingSpec(EncodingKind.SCHEME2_V1),
        EncodingSpec(EncodingKind.SCHEME2_V2),
    ):
        assert spec.encode_value(x).n == spec.bits_per_input


@given(unit_floats)
def test_unary_fields_are_right_aligned(x):
    s = encode_scheme1(x, 3).to_string()
    for k in range(3):
        field = s[1 + 9 * k : 10 + 9 * k]
        assert UNARY_FIELD.match(field)
    s2 = encode_scheme2(x, "V2").to_string()
    for field in (s2[1:10], s2[10:19], s2[19:23], s2[23:25]):
        assert UNARY_FIELD.match(field)


@given(unit_floats, unit_floats)
def test_same_digits_same_encoding(a, b):
    da = [int(a), *(decimal_digit(a, k) for k in (1, 2, 3))]
    db = [int(b), *(decimal_digit(b, k) for k in (1, 2, 3))]
    if da == db:
        assert encode_scheme1(a, 3) == encode_scheme1(b, 3)
        assert encode_scheme2(a, "V1") == encode_scheme2(b, "V1")


def test_monotone_ones_within_place():
    # larger digit in one place never yields fewer ones in that field
    for k in range(10):
        for j in range(k, 10):
            lo = encode_scheme1(k / 10, 1)
            hi = encode_scheme1(j / 10, 1)
            assert hi.popcount() >= lo.popcount()
            lo4 = encode_scheme2(k / 100, "V1")
            hi4 = encode_scheme2(j / 100, "V1")
            assert hi4.popcount() >= lo4.popcount()
