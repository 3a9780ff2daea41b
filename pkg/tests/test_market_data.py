# tests/test_market_data.py
import os
import json
import tempfile
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from portfolio_system.config import ReturnsKind
from portfolio_system.errors import (
    AsymmetricCovariance, DimensionMismatch, DuplicateAssetName, EmptyInput,
    InputError, MalformedDocument, NegativeVariance, NonNumericCell,
    NonPositivePrice, RaggedRows, TooFewRows
)
from portfolio_system.market_data import (
    ParameterSet, PriceTable, compute_returns, load_parameter_file, load_price_file,
    load_sample_prices, parse_parameter_file, parse_price_table
)


class TestPriceTable(unittest.TestCase):
    """Test cases for price table parsing."""

    def setUp(self):
        """Set up test fixtures before each test."""
        self.text = "A,B\n100,50\n110,55\n121,44\n"

    def test_parse_basic_table(self):
        """Test parsing a header row and numeric rows."""
        table = parse_price_table(self.text)
        self.assertEqual(table.asset_names, ("A", "B"))
        self.assertEqual(table.n_periods, 3)
        self.assertIsNone(table.period_labels)
        assert_array_equal(table.prices[:, 0], [100.0, 110.0, 121.0])

    def test_label_column(self):
        """Test that a label column is kept apart from the assets."""
        text = "Date,A,B\n2021-01-04,1,2\n2021-01-05,1.5,2.5\n2021-01-06,2,3\n"
        table = parse_price_table(text, has_label_column=True)
        self.assertEqual(table.asset_names, ("A", "B"))
        self.assertEqual(table.period_labels, ("2021-01-04", "2021-01-05", "2021-01-06"))

    def test_scientific_notation_and_bom(self):
        """Test that exponents parse and a leading byte order mark is ignored."""
        table = parse_price_table("\ufeffA\n1e2\n1.1E2\n.5\n")
        self.assertEqual(table.asset_names, ("A",))
        assert_array_equal(table.prices[:, 0], [100.0, 110.0, 0.5])

    def test_non_numeric_cell_reports_position(self):
        """Test that a non-numeric cell names its row and column."""
        with self.assertRaises(NonNumericCell) as ctx:
            parse_price_table("A,B\n1,2\n3,x\n4,5\n")
        self.assertEqual(ctx.exception.row, 3)
        self.assertEqual(ctx.exception.column, "B")

    def test_thousands_separator_rejected(self):
        """Test that locale formatted numbers are rejected."""
        with self.assertRaises(NonNumericCell):
            parse_price_table('A\n"1,000"\n2\n3\n')

    def test_non_positive_price(self):
        """Test that zero and negative prices are rejected."""
        with self.assertRaises(NonPositivePrice) as ctx:
            parse_price_table("A,B\n1,2\n3,0\n4,5\n")
        self.assertEqual(ctx.exception.row, 3)
        with self.assertRaises(NonPositivePrice):
            parse_price_table("A\n1\n-2\n3\n")

    def test_ragged_rows(self):
        """Test that a short row is reported."""
        with self.assertRaises(RaggedRows) as ctx:
            parse_price_table("A,B\n1,2\n3\n4,5\n")
        self.assertEqual(ctx.exception.expected, 2)
        self.assertEqual(ctx.exception.found, 1)

    def test_too_few_rows(self):
        """Test that two price rows are not enough."""
        with self.assertRaises(TooFewRows):
            parse_price_table("A,B\n1,2\n3,4\n")

    def test_empty_input(self):
        """Test empty text and a header without rows."""
        with self.assertRaises(EmptyInput):
            parse_price_table("")
        with self.assertRaises(EmptyInput):
            parse_price_table("A,B\n")

    def test_duplicate_asset_names(self):
        """Test that duplicate column names are rejected."""
        with self.assertRaises(DuplicateAssetName):
            parse_price_table("A,A\n1,2\n3,4\n5,6\n")

    def test_errors_are_input_errors(self):
        """Test that every parse failure exits with the input error code."""
        with self.assertRaises(InputError) as ctx:
            parse_price_table("A\n1\n")
        self.assertEqual(ctx.exception.exit_code, 1)

    def test_csv_text_reparses(self):
        """Test that to_csv_text produces a table that parses back equal."""
        text = "Date,A,B\nd1,1.25,2\nd2,1.5,2.5\nd3,2,3.125\n"
        table = parse_price_table(text, has_label_column=True)
        again = parse_price_table(table.to_csv_text(), has_label_column=True)
        self.assertTrue(table.equals(again))

    def test_price_table_is_read_only(self):
        """Test that the price matrix cannot be modified."""
        table = parse_price_table(self.text)
        with self.assertRaises(ValueError):
            table.prices[0, 0] = 1.0

    def test_price_table_constructor_validates(self):
        """Test that a directly built table checks its shape."""
        with self.assertRaises(DimensionMismatch):
            PriceTable(("A", "B"), np.ones((3, 3)))


class TestReturns(unittest.TestCase):
    """Test cases for return computation."""

    def setUp(self):
        """Set up test fixtures before each test."""
        self.table = parse_price_table("A,B\n100,50\n110,55\n121,44\n")

    def test_simple_returns(self):
        """Test P[t+1]/P[t] - 1."""
        returns = compute_returns(self.table)
        self.assertEqual(returns.n_observations, 2)
        self.assertEqual(returns.kind, ReturnsKind.SIMPLE)
        assert_allclose(returns.returns, [[0.1, 0.1], [0.1, -0.2]], rtol=1e-12)

    def test_log_returns(self):
        """Test ln(P[t+1]/P[t])."""
        returns = compute_returns(self.table, ReturnsKind.LOG)
        assert_allclose(returns.returns, np.log([[1.1, 1.1], [1.1, 0.8]]), rtol=1e-12)

    def test_asset_order_preserved(self):
        """Test that asset names follow the column order."""
        self.assertEqual(compute_returns(self.table).asset_names, ("A", "B"))

    def test_constant_prices_give_zero_returns(self):
        """Test that a flat price column has zero returns."""
        table = parse_price_table("A,B\n50,10\n50,11\n50,12\n")
        for kind in ReturnsKind:
            returns = compute_returns(table, kind)
            assert_array_equal(returns.returns[:, 0], [0.0, 0.0])

    def test_price_scale_invariance(self):
        """Test that rescaling every price leaves the returns unchanged."""
        rng = np.random.default_rng(3)
        prices = 100.0 * np.cumprod(1.0 + rng.normal(0.0, 0.02, (30, 3)), axis=0)
        table = PriceTable(("A", "B", "C"), prices)
        for kind in ReturnsKind:
            base = compute_returns(table, kind).returns
            for c in (0.01, 3.7, 1e4):
                scaled = compute_returns(PriceTable(("A", "B", "C"), prices * c), kind).returns
                assert_allclose(scaled, base, rtol=0, atol=1e-12)


class TestParameterFile(unittest.TestCase):
    """Test cases for parameter document parsing."""

    def setUp(self):
        """Set up test fixtures before each test."""
        self.document = {
            "assets": ["A", "B"],
            "means": [0.001, 0.002],
            "covariance": [[0.0004, 0.0001], [0.0001, 0.0009]]
        }

    def test_parse_valid_document(self):
        """Test a well-formed document."""
        params = parse_parameter_file(json.dumps(self.document))
        self.assertEqual(params.asset_names, ("A", "B"))
        assert_array_equal(params.means, [0.001, 0.002])
        assert_array_equal(params.covariance, [[0.0004, 0.0001], [0.0001, 0.0009]])

    def test_missing_and_extra_fields(self):
        """Test that the document needs exactly three fields."""
        del self.document["means"]
        with self.assertRaises(MalformedDocument):
            parse_parameter_file(json.dumps(self.document))
        self.document["means"] = [0.001, 0.002]
        self.document["note"] = "x"
        with self.assertRaises(MalformedDocument):
            parse_parameter_file(json.dumps(self.document))

    def test_invalid_json(self):
        """Test that broken JSON is a malformed document."""
        with self.assertRaises(MalformedDocument):
            parse_parameter_file("{not json")

    def test_non_finite_constants_rejected(self):
        """Test that NaN and Infinity are not accepted."""
        text = '{"assets": ["A", "B"], "means": [NaN, 0.1], "covariance": [[1, 0], [0, 1]]}'
        with self.assertRaises(MalformedDocument):
            parse_parameter_file(text)

    def test_overflowing_numbers_rejected(self):
        """Test that numbers too large for a float are not read as infinity."""
        for text in (
            '{"assets": ["A", "B"], "means": [1e400, 0.01], "covariance": [[1, 0], [0, 1]]}',
            '{"assets": ["A", "B"], "means": [0.01, 0.02], "covariance": [[1, 0], [0, -1e999]]}',
            '{"assets": ["A", "B"], "means": [' + "9" * 400 + ', 0.01], "covariance": [[1, 0], [0, 1]]}',
        ):
            with self.assertRaises(MalformedDocument):
                parse_parameter_file(text)

    def test_parameter_set_requires_finite_values(self):
        """Test that a directly built parameter set rejects infinite entries."""
        with self.assertRaises(MalformedDocument):
            ParameterSet(("A", "B"), np.array([np.inf, 0.01]), np.eye(2))
        with self.assertRaises(MalformedDocument):
            ParameterSet(("A", "B"), np.array([0.01, 0.02]), np.array([[1.0, np.nan], [np.nan, 1.0]]))

    def test_dimension_mismatch(self):
        """Test means and covariance sizes against the asset count."""
        self.document["means"] = [0.001]
        with self.assertRaises(DimensionMismatch):
            parse_parameter_file(json.dumps(self.document))
        self.document["means"] = [0.001, 0.002]
        self.document["covariance"] = [[0.0004, 0.0001]]
        with self.assertRaises(DimensionMismatch):
            parse_parameter_file(json.dumps(self.document))

    def test_asymmetric_covariance(self):
        """Test that asymmetry beyond tolerance is rejected."""
        self.document["covariance"] = [[0.0004, 0.0001], [0.0002, 0.0009]]
        with self.assertRaises(AsymmetricCovariance):
            parse_parameter_file(json.dumps(self.document))

    def test_tiny_asymmetry_symmetrized(self):
        """Test that asymmetry within tolerance is averaged away."""
        self.document["covariance"] = [[0.0004, 0.0001], [0.0001 + 1e-14, 0.0009]]
        params = parse_parameter_file(json.dumps(self.document))
        assert_array_equal(params.covariance, params.covariance.T)

    def test_negative_variance(self):
        """Test that a negative diagonal entry is rejected."""
        self.document["covariance"] = [[-0.0004, 0.0001], [0.0001, 0.0009]]
        with self.assertRaises(NegativeVariance):
            parse_parameter_file(json.dumps(self.document))


class TestLoaders(unittest.TestCase):
    """Test cases for the file loaders."""

    def test_load_price_file(self):
        """Test reading a price file from disk."""
        with tempfile.NamedTemporaryFile("w", suffix=".csv", delete=False) as fh:
            fh.write("A,B\n1,2\n2,3\n3,4\n")
        try:
            table = load_price_file(fh.name)
            self.assertEqual(table.n_assets, 2)
        finally:
            os.unlink(fh.name)

    def test_missing_file(self):
        """Test that an unreadable path is an input error."""
        with self.assertRaises(InputError):
            load_parameter_file("/nonexistent/params.json")

    def test_sample_prices(self):
        """Test the bundled four-asset dataset."""
        table = load_sample_prices()
        self.assertEqual(table.asset_names, ("USD-JPY", "Brent Oil", "DAX", "Dow Jones"))
        self.assertEqual(table.n_periods, 65)
        self.assertEqual(len(table.period_labels), 65)


if __name__ == '__main__':
    unittest.main()
