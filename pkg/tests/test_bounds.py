import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from krakos.bounds import (
    BLIND_NOTE,
    K_DISTANCE_CNOT_FROBENIUS,
    KNOWN_CNOT_COST,
    SLACK,
    bound_from_values,
    cnot_lower_bound,
)
from krakos.entanglement import Bipartition
from krakos.errors import NotUnitary
from krakos.gates import CNOT, named_gate
from krakos.qmat import haar_local_product, identity
from krakos.strength import Measure, Metric, OptimizerOptions, k_delta

KDIST = Measure("kdist", Metric("frobenius-raw", True))


class TestBoundFromValues:
    @pytest.mark.parametrize(
        "value, k, expected",
        [(1.0, 1.0, 1), (1.0 - 1e-9, 1.0, 1), (1.0 + 1e-9, 1.0, 1), (1.5, 1.0, 2), (2.0, 1.0, 2), (0.0, 1.0, 0)],
    )
    def test_table(self, value, k, expected):
        assert bound_from_values(value, k) == expected

    @given(st.floats(min_value=0.0, max_value=SLACK))
    def test_zero_below_slack(self, value):
        assert bound_from_values(value, 1.0) == 0

    @given(st.floats(min_value=0.0, max_value=10.0), st.floats(min_value=0.1, max_value=3.0))
    def test_formula(self, value, k):
        m = bound_from_values(value, k)
        assert m >= 0
        assert m == max(0, math.ceil(value / k - SLACK))


class TestCnotLowerBound:
    def test_cnot(self):
        b = cnot_lower_bound(CNOT)
        assert b.lower_bound == 1
        assert b.sound
        assert b.k_cnot == 1.0
        assert b.note == ""

    def test_local_product(self):
        b = cnot_lower_bound(haar_local_product(2, 9), opts=OptimizerOptions(8))
        assert b.lower_bound == 0
        assert b.sound

    def test_swap_is_blind(self):
        b = cnot_lower_bound(named_gate("SWAP"), opts=OptimizerOptions(8))
        assert b.lower_bound == 0
        assert b.note == BLIND_NOTE

    def test_two_cnots_across_interleaved_cut(self):
        u = CNOT.tensor(CNOT)
        # CNOT on (0,1) and on (2,3); the cut puts both controls on side A
        b = cnot_lower_bound(u, Bipartition(4, [0, 2]))
        assert b.strength_used.value >= 1.98
        assert b.lower_bound == 2
        assert b.sound

    def test_cut_not_crossed(self):
        u = CNOT.tensor(CNOT)
        b = cnot_lower_bound(u, Bipartition(4, [0, 1]), opts=OptimizerOptions(4))
        assert b.lower_bound == 0

    @pytest.mark.parametrize("name", sorted(KNOWN_CNOT_COST))
    def test_sound_never_exceeds_known_cost(self, name):
        b = cnot_lower_bound(named_gate(name), opts=OptimizerOptions(16))
        assert b.sound
        assert b.lower_bound <= KNOWN_CNOT_COST[name]

    def test_monotone_in_starts(self):
        u = CNOT.tensor(CNOT)
        cut = Bipartition(4, [0, 2])
        few = cnot_lower_bound(u, cut, opts=OptimizerOptions(1, seed=4))
        more = cnot_lower_bound(u, cut, opts=OptimizerOptions(3, seed=4))
        assert more.lower_bound >= few.lower_bound

    def test_metric_bound_is_unsound(self):
        b = cnot_lower_bound(CNOT, measure=KDIST, opts=OptimizerOptions(8))
        assert not b.sound
        assert b.k_cnot == K_DISTANCE_CNOT_FROBENIUS
        assert b.lower_bound == 1
        assert "unsound" in b.note

    def test_metric_bound_numeric_constant(self):
        b = cnot_lower_bound(CNOT.tensor(identity(1)), measure=KDIST, opts=OptimizerOptions(4))
        assert not b.sound
        assert b.k_cnot_source.startswith("numeric")
        assert b.lower_bound == 1

    def test_non_unitary(self):
        with pytest.raises(NotUnitary):
            cnot_lower_bound(np.ones((4, 4)))


def test_kdelta_cnot_constant_is_attained():
    # the denominator is exact: the optimizer reaches the entropy ceiling
    assert k_delta(CNOT).value == pytest.approx(1.0, abs=1e-9)
