"""Tests for variable encodings.

The decode oracle is the operator spectrum itself: for every basis state,
the decoded value must equal the diagonal entry of the dense encoding
operator on that state.
"""

import numpy as np
import pytest

from aqtrain.encodings import (
    Binary01,
    EncodingTable,
    FractionalBinary,
    SpinPM1,
    bin_centers,
    decode_all,
    decode_bits,
    encode_variable,
    index_of_report_bitstring,
    qubits_of,
    report_bitstring,
)
from aqtrain.state import basis_bits


class TestFractionalBinary:
    def test_two_qubit_operator(self):
        # w = (T0 + 2 T1)/4 = 3/8 I + 1/8 Z0 + 1/4 Z1
        op = encode_variable(FractionalBinary(2, 0), 2)
        assert op.coefficient(()) == pytest.approx(3 / 8)
        assert op.coefficient([(0, "Z")]) == pytest.approx(1 / 8)
        assert op.coefficient([(1, "Z")]) == pytest.approx(1 / 4)
        assert op.num_terms == 3

    def test_decode_matches_operator_spectrum(self):
        for n in (1, 2, 3):
            enc = FractionalBinary(n, 0)
            diag = encode_variable(enc, n).diagonal()
            for index in range(2**n):
                assert decode_bits(enc, basis_bits(index, n)) == pytest.approx(diag[index])

    def test_decode_example(self):
        # projector eigenvalues (t2, t1, t0) = (1, 0, 1) decode to 5/8;
        # eigenvalue 1 corresponds to raw bit 0
        bits = [0, 1, 0]  # (t0, t1, t2) = (1, 0, 1)
        assert decode_bits(FractionalBinary(3, 0), bits) == pytest.approx(5 / 8)

    def test_all_ones_decode(self):
        bits = [0, 0]  # both projector eigenvalues 1
        assert decode_bits(FractionalBinary(2, 0), bits) == pytest.approx(3 / 4)

    def test_bin_grid(self):
        centers = bin_centers(FractionalBinary(3, 0))
        assert centers[0] == 0.0
        assert centers[-1] == pytest.approx(1 - 1 / 8)
        assert np.allclose(np.diff(centers), 1 / 8)

    def test_spectrum_covers_all_bins(self):
        diag = encode_variable(FractionalBinary(3, 0), 3).diagonal()
        assert sorted(diag) == pytest.approx(bin_centers(FractionalBinary(3, 0)))

    def test_offset_register(self):
        enc = FractionalBinary(2, 1)
        assert qubits_of(enc) == (1, 2)
        diag = encode_variable(enc, 3).diagonal()
        for index in range(8):
            assert decode_bits(enc, basis_bits(index, 3)) == pytest.approx(diag[index])


class TestSingleQubitEncodings:
    def test_spin_values(self):
        enc = SpinPM1(0)
        assert decode_bits(enc, [0]) == 1.0
        assert decode_bits(enc, [1]) == -1.0
        assert bin_centers(enc) == [-1.0, 1.0]
        assert np.allclose(encode_variable(enc, 1).diagonal(), [1.0, -1.0])

    def test_binary01_values(self):
        enc = Binary01(0)
        assert decode_bits(enc, [0]) == 1.0
        assert decode_bits(enc, [1]) == 0.0
        assert np.allclose(encode_variable(enc, 1).diagonal(), [1.0, 0.0])

    def test_decode_all_vectorized(self):
        for enc in (SpinPM1(1), Binary01(0), FractionalBinary(2, 1)):
            values = decode_all(enc, 3)
            for index in range(8):
                assert values[index] == decode_bits(enc, basis_bits(index, 3))


class TestReportBitstrings:
    def test_projector_convention(self):
        # basis index 0 = all |0> = all projector eigenvalues 1
        assert report_bitstring(0, 4) == "1111"
        assert report_bitstring(0b0001, 4) == "0111"  # qubit 0 first
        assert report_bitstring(0b1000, 4) == "1110"

    def test_round_trip(self):
        for index in range(16):
            assert index_of_report_bitstring(report_bitstring(index, 4)) == index


class TestEncodingTable:
    def test_uniform_builders(self):
        table = EncodingTable.uniform(["a", "b", "c"], "spin-pm1")
        assert table.total_qubits == 3
        assert table.names == ["a", "b", "c"]
        assert table["b"] == SpinPM1(1)

    def test_decode_index(self):
        table = EncodingTable(
            [("w", FractionalBinary(2, 0)), ("s", SpinPM1(2)), ("b", Binary01(3))], 4
        )
        # index 0b0110: qubit0=0, qubit1=1, qubit2=1, qubit3=0
        assignment = table.decode_index(0b0110)
        assert assignment["w"] == pytest.approx(1 / 4)  # t = (1, 0) -> 1/4
        assert assignment["s"] == -1.0
        assert assignment["b"] == 1.0

    def test_overlap_rejected(self):
        with pytest.raises(ValueError, match="overlaps"):
            EncodingTable([("a", SpinPM1(0)), ("b", FractionalBinary(2, 0))], 3)

    def test_gap_rejected(self):
        with pytest.raises(ValueError, match="cover"):
            EncodingTable([("a", SpinPM1(0)), ("b", SpinPM1(2))], 3)

    def test_duplicate_name_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            EncodingTable([("a", SpinPM1(0)), ("a", SpinPM1(1))], 2)

    def test_json_round_trip_preserves_order(self):
        table = EncodingTable(
            [("w", FractionalBinary(3, 0)), ("u", Binary01(3)), ("v", SpinPM1(4))], 5
        )
        recovered = EncodingTable.from_json(table.to_json())
        assert recovered.names == ["w", "u", "v"]
        assert recovered["w"] == FractionalBinary(3, 0)
        assert recovered["u"] == Binary01(3)
        assert recovered.to_json_dict() == table.to_json_dict()

    def test_decode_columns_match_decode_index(self):
        table = EncodingTable([("w", FractionalBinary(2, 0)), ("s", SpinPM1(2))], 3)
        columns = table.decode_columns()
        for index in range(8):
            assignment = table.decode_index(index)
            for name, values in columns.items():
                assert values[index] == assignment[name]
