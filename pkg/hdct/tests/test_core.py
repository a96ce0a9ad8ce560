from unittest import TestCase

import numpy as np

from hdct.core import ClrMatrix, CompositionMatrix, LogBasisMatrix, close, validate_composition
from hdct.errors import (
    InputError,
    NonFiniteEntry,
    NonPositiveEntry,
    RowSumViolation,
    ShapeError,
)


class TestValidateComposition(TestCase):
    def test_accepts_simplex_rows(self):
        x = validate_composition([[0.5, 0.25, 0.25], [0.2, 0.3, 0.5]])
        self.assertEqual(x.n, 2)
        self.assertEqual(x.p, 3)
        self.assertEqual(x.pseudocount, 0.0)

    def test_values_are_read_only(self):
        x = validate_composition([[0.5, 0.5]])
        with self.assertRaises(ValueError):
            x.values[0, 0] = 1.0

    def test_zero_entry_reports_location(self):
        with self.assertRaises(NonPositiveEntry) as ctx:
            validate_composition([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5]])
        self.assertEqual((ctx.exception.row, ctx.exception.col), (0, 2))
        self.assertEqual(ctx.exception.exit_code, 2)

    def test_negative_entry(self):
        with self.assertRaises(NonPositiveEntry):
            validate_composition([[1.5, -0.5]])

    def test_row_sum_violation(self):
        with self.assertRaises(RowSumViolation) as ctx:
            validate_composition([[0.5, 0.5], [0.5, 0.6]])
        self.assertEqual(ctx.exception.row, 1)
        self.assertAlmostEqual(ctx.exception.total, 1.1)

    def test_row_sum_tolerance(self):
        validate_composition([[0.5, 0.5 + 5e-10]])
        with self.assertRaises(RowSumViolation):
            validate_composition([[0.5, 0.5 + 1e-8]])

    def test_non_finite(self):
        with self.assertRaises(NonFiniteEntry):
            validate_composition([[0.5, np.nan]])

    def test_single_component_rejected(self):
        with self.assertRaises(ShapeError):
            validate_composition([[1.0], [1.0]])

    def test_ragged_rejected(self):
        with self.assertRaises(InputError):
            validate_composition([[0.5, 0.5], [1.0]])


class TestClose(TestCase):
    def test_count_rows(self):
        x = close([[20, 10, 10], [1, 1, 2]])
        np.testing.assert_allclose(x.values, [[0.5, 0.25, 0.25], [0.25, 0.25, 0.5]])

    def test_idempotent(self):
        once = close([[3.0, 1.0, 4.0], [1.0, 5.0, 9.0]])
        twice = close(once.values)
        np.testing.assert_allclose(twice.values, once.values, rtol=0, atol=1e-15)

    def test_scale_invariant(self):
        raw = np.array([[3.0, 1.0, 4.0], [1.0, 5.0, 9.0]])
        # powers of two scale exactly
        np.testing.assert_array_equal(close(raw * 8.0).values, close(raw).values)

    def test_zero_without_pseudocount(self):
        with self.assertRaises(NonPositiveEntry) as ctx:
            close([[1.0, 2.0], [3.0, 0.0]])
        self.assertEqual((ctx.exception.row, ctx.exception.col), (1, 1))

    def test_pseudocount_replaces_zeros(self):
        x = close([[1.0, 0.0, 1.0]], pseudocount=0.5)
        np.testing.assert_allclose(x.values, [[0.4, 0.2, 0.4]])
        self.assertEqual(x.pseudocount, 0.5)


class TestMatrices(TestCase):
    def test_clr_matrix_row_sums(self):
        y = ClrMatrix([[1.0, 0.0, -1.0]])
        self.assertEqual(y.p, 3)
        with self.assertRaises(RowSumViolation) as ctx:
            ClrMatrix([[1.0, 0.0, -1.0], [1.0, 1.0, 1.0]])
        self.assertEqual(ctx.exception.row, 1)
        self.assertEqual(ctx.exception.module, "clr")

    def test_composition_matrix_checks_the_simplex(self):
        x = CompositionMatrix([[0.5, 0.25, 0.25]], pseudocount=0.1)
        self.assertEqual(x.pseudocount, 0.1)
        with self.assertRaises(NonPositiveEntry) as ctx:
            CompositionMatrix(np.array([[0.9, 0.9, -0.8]]))
        self.assertEqual((ctx.exception.row, ctx.exception.col), (0, 2))
        with self.assertRaises(RowSumViolation):
            CompositionMatrix([[0.5, 0.5, 0.5]])
        with self.assertRaises(NonFiniteEntry):
            CompositionMatrix([[np.nan, 1.0]])

    def test_log_basis_needs_finite(self):
        w = LogBasisMatrix([[0.0, 3.0]])
        self.assertEqual(len(w), 1)
        with self.assertRaises(NonFiniteEntry):
            LogBasisMatrix([[0.0, np.inf]])

    def test_error_string_has_module(self):
        try:
            validate_composition([[0.0, 1.0]])
        except NonPositiveEntry as err:
            self.assertTrue(str(err).startswith("core: "))
