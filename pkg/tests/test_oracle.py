"""Brute-force oracle guard and agreement checks."""

import pytest

from corpus import DEEP, GUARD_EDGE, SMALL, corpus, corpus_config
from sleec_workbench.checker import (
    CheckConfig,
    OracleGuardError,
    brute_force_oracle,
    check_consistency,
)
from sleec_workbench.fixtures import fixture_text
from sleec_workbench.language import parse_spec


def verdict_keys(verdicts):
    return sorted((v.kind.value, v.rules) for v in verdicts)


class TestGuard:
    def test_too_many_events(self):
        spec = parse_spec(
            "def_start event A event B event C event D event E def_end rule_start rule_end"
        )
        with pytest.raises(OracleGuardError, match="events"):
            brute_force_oracle(spec)

    def test_too_many_measures(self):
        spec = parse_spec(
            "def_start event A measure m1: boolean measure m2: boolean "
            "measure m3: boolean def_end rule_start rule_end"
        )
        with pytest.raises(OracleGuardError, match="measures"):
            brute_force_oracle(spec)

    def test_horizon_guard(self):
        spec = parse_spec("def_start event A def_end rule_start rule_end")
        with pytest.raises(OracleGuardError, match="horizon"):
            brute_force_oracle(spec, CheckConfig(horizon_ticks=7))


class TestAgreement:
    def test_empty_spec(self):
        spec = parse_spec("def_start def_end rule_start rule_end")
        assert brute_force_oracle(spec, CheckConfig(horizon_ticks=4)) == []

    def test_r1_r2_conflict(self):
        spec = parse_spec(fixture_text("r1r2.sleec"))
        cfg = CheckConfig(horizon_ticks=4)
        oracle = brute_force_oracle(spec, cfg)
        assert verdict_keys(oracle) == [("deadlock", ("R1", "R2"))]
        assert verdict_keys(check_consistency(spec, cfg)) == verdict_keys(oracle)

    @pytest.mark.parametrize("seed,shape", [(11, SMALL), (12, GUARD_EDGE), (13, DEEP)])
    def test_random_sample_agreement(self, seed, shape):
        for text, spec, cfg in corpus(seed, 12, shape):
            checker_keys = verdict_keys(check_consistency(spec, cfg))
            oracle_keys = verdict_keys(brute_force_oracle(spec, cfg))
            assert checker_keys == oracle_keys, f"disagreement on:\n{text}"
