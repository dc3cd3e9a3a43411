import json

import pytest

from laurentnp import cli
from laurentnp.campaign import (
    EXIT_BUDGET,
    EXIT_COUNTEREXAMPLE,
    EXIT_OK,
    EXIT_VALIDATION,
    BudgetError,
    CacheError,
    ExperimentConfig,
    LCache,
    ValidationError,
    instance_vectors,
    run_crosscheck,
    run_verify,
    write_report,
)


class TestConfig:
    def test_file_and_overrides(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"p": 7, "d": 2, "e": 1, "mode": "sample", "count": 4, "seed": 9}))
        cfg = ExperimentConfig.load(path, count=6, seed=None)
        assert (cfg.p, cfg.count, cfg.seed) == (7, 6, 9)

    @pytest.mark.parametrize(
        "kw",
        [
            dict(p=6, d=2, e=1),
            dict(p=3, d=3, e=1),
            dict(p=7, d=2, e=1, mode="sample", count=3),
            dict(p=7, d=2, e=1, mode="single"),
            dict(p=7, d=2, e=1, mode="single", a=[1, 1, 1, 0]),
            dict(p=7, d=2, e=0, engines="dwork"),
            dict(p=7, d=2, e=1, prng="xorshift"),
        ],
    )
    def test_rejects(self, kw):
        with pytest.raises(ValidationError):
            ExperimentConfig.load(**kw)

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"p": 7, "d": 2, "colour": "red"}))
        with pytest.raises(ValidationError, match="colour"):
            ExperimentConfig.load(path)


class TestVectors:
    def test_exhaustive(self):
        vs = instance_vectors(ExperimentConfig.load(p=7, d=2, e=1))
        assert len(vs) == 252 and vs == sorted(vs)
        assert all(v[1] == 1 and v[0] and v[-1] for v in vs)

    def test_sample_is_seeded_and_distinct(self):
        cfg = ExperimentConfig.load(p=11, d=3, e=1, mode="sample", count=40, seed=5)
        a, b = instance_vectors(cfg), instance_vectors(cfg)
        assert a == b and len({tuple(v) for v in a}) == 40
        other = instance_vectors(ExperimentConfig.load(p=11, d=3, e=1, mode="sample", count=40, seed=6))
        assert a != other

    def test_prng_choice_matters(self):
        base = dict(p=11, d=3, e=1, mode="sample", count=10, seed=5)
        assert instance_vectors(ExperimentConfig.load(**base)) != instance_vectors(
            ExperimentConfig.load(**base, prng="philox")
        )

    def test_empty_sample(self):
        assert instance_vectors(ExperimentConfig.load(p=7, d=2, e=1, mode="sample", count=0, seed=1)) == []

    def test_budget(self):
        with pytest.raises(BudgetError):
            instance_vectors(ExperimentConfig.load(p=11, d=3, e=1, max_instances=100))

    def test_extension_sample(self):
        cfg = ExperimentConfig.load(p=3, d=1, e=1, b=2, mode="sample", count=5, seed=2)
        vs = instance_vectors(cfg)
        assert all(len(x) == 2 for v in vs for x in v)


class TestCache:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        cfg = ExperimentConfig.load(p=7, d=2, e=1, mode="sample", count=6, seed=1, cache=str(path))
        first = run_verify(cfg)
        lines = path.read_text().splitlines()
        assert len(lines) == 6
        rec = json.loads(lines[0])
        assert set(rec) == {"p", "b", "d", "e", "a", "L", "np"}
        second = run_verify(cfg)
        assert second.dumps() == first.dumps()
        assert second.timing["cache_hits"] == 6
        assert len(path.read_text().splitlines()) == 6

    def test_spot_check_catches_tampering(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        cfg = ExperimentConfig.load(p=7, d=2, e=1, mode="sample", count=3, seed=1, cache=str(path))
        run_verify(cfg)
        recs = [json.loads(x) for x in path.read_text().splitlines()]
        recs[0]["L"][1][0] += 7
        path.write_text("".join(json.dumps(r) + "\n" for r in recs))
        cache = LCache(path, spot_check=1.0)
        with pytest.raises(CacheError):
            _lookup(cache, cfg)

    def test_corrupt_line(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        path.write_text('{"p": 7}\n')
        with pytest.raises(CacheError):
            LCache(path)


def _lookup(cache, cfg):
    f = cfg.instance(instance_vectors(cfg)[0])
    return cache.get(f)


class TestReports:
    def test_counts_sum(self):
        r = run_verify(ExperimentConfig.load(p=11, d=3, e=1, mode="sample", count=30, seed=3))
        c = r.counts
        classes = ["H_nonzero_generic", "H_nonzero_nongeneric", "H_zero_generic", "H_zero_nongeneric",
                   "hasse_unchecked"]
        assert sum(c[k] for k in classes) == c["instances"] == 30
        assert c["hodge_violations"] == 0

    def test_below_threshold_gating(self):
        r = run_verify(ExperimentConfig.load(p=7, d=3, e=2, mode="sample", count=10, seed=2))
        assert r.counts["threshold_met"] == 0
        assert r.counts["hasse_unchecked"] == 10 and r.ok

    def test_write(self, tmp_path):
        r = run_verify(ExperimentConfig.load(p=7, d=2, e=1, mode="sample", count=3, seed=1))
        path = write_report(r, tmp_path, "verify")
        assert json.loads(path.read_text())["counts"]["instances"] == 3
        assert (tmp_path / "verify.timing.json").exists()

    def test_crosscheck_small(self):
        r = run_crosscheck(ExperimentConfig.load(p=7, d=2, e=1, mode="sample", count=3, seed=1, engines="both"))
        assert r.counts["identical"] == 3 and r.ok

    def test_crosscheck_empty(self):
        r = run_crosscheck(ExperimentConfig.load(p=7, d=2, e=1, mode="sample", count=0, seed=1, engines="both"))
        assert r.ok and r.counts["instances"] == 0


class TestCli:
    def test_polygon(self, tmp_path, capsys):
        assert cli.main(["polygon", "--p", "11", "--d", "3", "--e", "1", "--out", str(tmp_path)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "differ at k = [2]: 2/5 vs 1/3" in out
        doc = json.loads((tmp_path / "polygons.json").read_text())
        assert doc["arithmetic"]["points"][2] == [2, [2, 5]]
        assert (tmp_path / "arithmetic.csv").read_text().startswith("k,num,den,decimal")

    def test_polygon_equal(self, capsys):
        assert cli.main(["polygon", "--p", "7", "--d", "2", "--e", "1"]) == EXIT_OK
        assert "arithmetic = hodge" in capsys.readouterr().out

    def test_not_prime(self, capsys):
        assert cli.main(["polygon", "--p", "6", "--d", "2", "--e", "1"]) == EXIT_VALIDATION
        assert "not prime" in capsys.readouterr().err

    def test_hasse(self, capsys):
        assert cli.main(["hasse", "--p", "7", "--d", "2", "--e", "1"]) == EXIT_OK
        assert "H = 6·x_2²·x_{-1}" in capsys.readouterr().out
        assert cli.main(["hasse", "--p", "7", "--d", "3", "--e", "2"]) == EXIT_OK
        assert "warning: p = 7 < 3D = 18" in capsys.readouterr().err

    def test_oracle(self, capsys):
        assert cli.main(["oracle", "--p", "7", "--d", "2", "--e", "1", "--a", "1,1,1,3", "--engines", "both"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["dwork"]["identical"] and doc["valuations"] == [0, 0, 3, 9]

    def test_counterexample_exit(self, capsys):
        # a_1 = 0 kills H, yet this vector has the arithmetic polygon
        code = cli.main(["verify", "--p", "11", "--d", "3", "--e", "1", "--a", "1,1,0,1,1"])
        assert code == EXIT_COUNTEREXAMPLE
        assert "counterexamples" in capsys.readouterr().out

    def test_budget_exit(self):
        assert cli.main(["verify", "--p", "7", "--d", "2", "--e", "1", "--guard", "100"]) == EXIT_BUDGET

    def test_determinism(self, tmp_path):
        args = ["verify", "--p", "7", "--d", "2", "--e", "1", "--mode", "sample", "--count", "20", "--seed", "4"]
        assert cli.main(args + ["--out", str(tmp_path / "a")]) == EXIT_OK
        assert cli.main(args + ["--out", str(tmp_path / "b")]) == EXIT_OK
        assert (tmp_path / "a" / "verify.json").read_bytes() == (tmp_path / "b" / "verify.json").read_bytes()
