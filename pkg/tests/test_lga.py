import numpy as np
import pytest

from andfeatures import (
    ConfigError,
    InitParams,
    LgaConfig,
    RunReport,
    enumerate_connected_oracle,
    run_lga,
)
from andfeatures.objectives import lex_key
from andfeatures import lga as lga_module

from conftest import random_network


@pytest.fixture(scope="module")
def small():
    return random_network(np.random.default_rng(4), 12, 8, density=0.5)


def config(**kw):
    base = dict(population_size=30, elite_size=6, generations=15, init=InitParams(4, 2), seed=3)
    base.update(kw)
    return LgaConfig(**base)


class TestConfig:
    @pytest.mark.parametrize(
        "kw",
        [
            {"elite_size": 30},
            {"elite_size": -1},
            {"generations": 0},
            {"m_max": 0},
            {"population_size": 1, "elite_size": 0},
        ],
    )
    def test_rejected(self, small, kw):
        with pytest.raises(ConfigError):
            run_lga(small, config(**kw))

    def test_default_m_max(self, small):
        assert LgaConfig().resolved_m_max(small) == 800
        assert run_lga(small, config(generations=1)).config["m_max"] == 800


class TestRun:
    def test_single_generation(self, small, monkeypatch):
        seen = []
        real = lga_module.summarize

        def spy(tracked):
            seen.append(list(tracked))
            return real(tracked)

        monkeypatch.setattr(lga_module, "summarize", spy)
        rep = run_lga(small, config(generations=1))
        assert rep.generations == 1
        assert all(len(v) == 1 for v in rep.history.values())
        (elite,) = seen
        assert len(elite) == 6
        assert [lex_key(s) for s in elite] == sorted(lex_key(s) for s in elite)

    def test_count_monotone(self, small):
        rows = []
        rep = run_lga(small, config(generations=40), on_generation=lambda g, st: rows.append(st))
        assert rep.history["count_max"] == sorted(rep.history["count_max"])
        assert len(rows) == 40

    def test_best_lex_never_worsens(self, small, monkeypatch):
        heads = []
        real = lga_module.summarize

        def spy(tracked):
            heads.append(lex_key(tracked[0]))
            return real(tracked)

        monkeypatch.setattr(lga_module, "summarize", spy)
        run_lga(small, config(generations=30))
        assert all(b <= a for a, b in zip(heads, heads[1:]))

    def test_feasible_and_bounded(self, small):
        m_max = 5
        rep = run_lga(small, config(m_max=m_max, generations=20))
        assert max(rep.history["count_max"]) <= m_max
        assert all(f.count <= m_max for f in rep.final)

    def test_never_above_oracle(self, small):
        oracle = len(enumerate_connected_oracle(small))
        rep = run_lga(small, config(generations=40, init=InitParams(30, 5)))
        assert rep.best().count <= oracle
        assert all(f.disproportion >= 0 for f in rep.final)

    def test_final_deduplicated_and_sorted(self, small):
        rep = run_lga(small, config())
        keys = [tuple(map(tuple, f.features)) for f in rep.final]
        assert len(keys) == len(set(keys))
        assert [tuple(f.objectives) for f in rep.final] == sorted(tuple(f.objectives) for f in rep.final)

    def test_odd_population(self, small):
        rep = run_lga(small, config(population_size=31, elite_size=4))
        assert rep.generations == 15


class TestDeterminism:
    def test_same_seed(self, small):
        assert run_lga(small, config()).to_json() == run_lga(small, config()).to_json()

    def test_seed_matters(self, small):
        assert run_lga(small, config(seed=1)).to_json() != run_lga(small, config(seed=2)).to_json()

    @pytest.mark.parametrize("threads", [2, 4])
    def test_threads(self, small, threads):
        assert run_lga(small, config(), threads=threads).to_json() == run_lga(small, config()).to_json()


class TestReport:
    def test_round_trip(self, small):
        rep = run_lga(small, config())
        back = RunReport.from_json(rep.to_json())
        assert back.to_json() == rep.to_json()
        assert back.best() == rep.best()

    def test_timing_optional(self, small):
        rep = run_lga(small, config(generations=2))
        assert "wall_time" not in rep.to_json()
        assert rep.to_dict(include_timing=True)["wall_time"] > 0

    def test_bad_format(self):
        with pytest.raises(ValueError):
            RunReport.from_json('{"format": "other"}')
