"""
Unit tests for the token bucket policer.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lspsim.errors import ConfigError
from lspsim.netshell import Policer, Verdict


@pytest.mark.unit
class TestPolicer:
    """Test cases for the token bucket."""

    def test_bucket_starts_full(self):
        """Test a burst up to the bucket size conforms."""
        policer = Policer(rate=8000, bucket_size=1000)
        assert policer.police_size(600, 0.0) is Verdict.CONFORM
        assert policer.police_size(400, 0.0) is Verdict.CONFORM
        assert policer.police_size(1, 0.0) is Verdict.DROP
        assert policer.conformed == 2
        assert policer.dropped == 1

    def test_refill_at_rate(self):
        """Test credit accrues at rate / 8 bytes per second."""
        policer = Policer(rate=8000, bucket_size=1000)
        policer.police_size(1000, 0.0)
        assert policer.police_size(500, 0.25) is Verdict.DROP
        assert policer.police_size(500, 0.5) is Verdict.CONFORM

    def test_refill_caps_at_bucket(self):
        """Test idle time never fills past the bucket size."""
        policer = Policer(rate=8000, bucket_size=1000)
        policer.refill(100.0)
        assert policer.tokens == 1000

    def test_drop_leaves_bucket_unchanged(self):
        """Test a dropped packet consumes no credit."""
        policer = Policer(rate=8000, bucket_size=100)
        policer.police_size(200, 0.0)
        assert policer.tokens == 100

    @pytest.mark.parametrize("rate, bucket", [(0, 100), (100, 0)])
    def test_invalid_parameters(self, rate, bucket):
        """Test rate and bucket must be positive."""
        with pytest.raises(ConfigError):
            Policer(rate=rate, bucket_size=bucket)

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(
            st.tuples(st.floats(min_value=0.0, max_value=0.1), st.integers(min_value=1, max_value=1500)),
            min_size=1,
            max_size=200,
        )
    )
    def test_admitted_bytes_bounded(self, arrivals):
        """Test admitted bytes never exceed bucket + rate * elapsed / 8."""
        rate, bucket = 64000.0, 2000.0
        policer = Policer(rate=rate, bucket_size=bucket)
        now = 0.0
        for gap, size in arrivals:
            now += gap
            policer.police_size(size, now)
            assert policer.admitted_bytes <= bucket + rate * now / 8 + 1e-6
