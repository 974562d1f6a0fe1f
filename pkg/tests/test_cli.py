import json

import pytest

from pinched_sphere.cli import (EXIT_CORRUPT, EXIT_DOMAIN, EXIT_OK,
                                load_profile, main, save_profile)
from pinched_sphere.profile import build_profile, validate_profile


@pytest.fixture(scope="module")
def profile_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("prof") / "p.json"
    rc = main(["profile", "build", "--n", "2", "--eta", "0.1", "--S", "4",
               "--grid", "256", "--out", str(path)])
    assert rc == EXIT_OK
    return path


class TestProfileBuild:
    def test_infeasible_eta(self, tmp_path, capsys):
        rc = main(["profile", "build", "--n", "2", "--eta", "0.5", "--S",
                   "4", "--out", str(tmp_path / "x.json")])
        assert rc == EXIT_DOMAIN
        assert "eta" in capsys.readouterr().err

    def test_infeasible_S(self, tmp_path, capsys):
        rc = main(["profile", "build", "--n", "2", "--eta", "0.1", "--S",
                   "1.0", "--out", str(tmp_path / "x.json")])
        assert rc == EXIT_DOMAIN
        assert "S>1" in capsys.readouterr().err

    def test_unwritable_path(self, capsys):
        rc = main(["profile", "build", "--n", "2", "--eta", "0.1", "--S",
                   "4", "--out", "/no/such/dir/p.json"])
        assert rc == 3

    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            assert main(["profile", "build", "--n", "2", "--eta", "0.05",
                         "--S", "2", "--grid", "128", "--out",
                         str(path)]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()


class TestRoundTrip:
    def test_load_validates_clean(self, profile_file):
        p = load_profile(str(profile_file))
        assert validate_profile(p) == []

    def test_bit_identical_resave(self, profile_file, tmp_path):
        p = load_profile(str(profile_file))
        again = tmp_path / "again.json"
        save_profile(p, str(again))
        assert again.read_bytes() == profile_file.read_bytes()

    def test_tampered_rejected(self, profile_file, tmp_path, capsys):
        doc = json.loads(profile_file.read_text())
        doc["r"][50] += 1e-3
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        rc = main(["report", "--profile", str(bad), "--kind", "bounds"])
        assert rc == EXIT_CORRUPT
        err = capsys.readouterr().err
        assert "condition" in err


class TestReport:
    def test_curvature_csv(self, profile_file, tmp_path):
        out = tmp_path / "c.csv"
        rc = main(["report", "--profile", str(profile_file), "--kind",
                   "curvature", "--out", str(out)])
        assert rc == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0] == "t,s,kappa_t,kappa_theta,scal,mean"
        # cap rows carry the space-form values
        first = [float(v) for v in lines[1].split(",")]
        assert first[4] == pytest.approx(2.0, abs=1e-9)
        assert first[5] == pytest.approx(1.0, abs=1e-9)

    def test_bounds_csv(self, profile_file, tmp_path):
        out = tmp_path / "b.csv"
        rc = main(["report", "--profile", str(profile_file), "--kind",
                   "bounds", "--out", str(out)])
        assert rc == EXIT_OK
        rows = dict(line.split(",") for line in
                    out.read_text().splitlines()[1:])
        assert float(rows["friedrich"]) == pytest.approx(1.0, abs=1e-6)


class TestSpectrum:
    def test_round_s2_json(self, tmp_path):
        prof = tmp_path / "round.json"
        assert main(["profile", "build", "--n", "2", "--eta", "0", "--S",
                     "2", "--grid", "128", "--out", str(prof)]) == EXIT_OK
        out = tmp_path / "s.json"
        rc = main(["spectrum", "--profile", str(prof), "--modes", "1",
                   "--grid", "256", "--out", str(out)])
        assert rc == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["lambda1_sq"] == pytest.approx(1.0, abs=1e-4)
        assert doc["scale"] == 1.0
        assert doc["certificate"]["lower_bound"] > doc["lambda1_sq"]

    def test_auto_rescale_recorded(self, profile_file, tmp_path):
        out = tmp_path / "s.json"
        rc = main(["spectrum", "--profile", str(profile_file), "--modes",
                   "1", "--grid", "256", "--rescale", "auto", "--out",
                   str(out)])
        assert rc == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["scale"] == pytest.approx(0.96)


class TestSweep:
    def test_feasible_sweep(self, tmp_path):
        out = tmp_path / "sw.csv"
        rc = main(["sweep", "--n", "2", "--S", "2", "--etas", "0.1,0.05",
                   "--grid", "256", "--modes", "1", "--out", str(out)])
        assert rc == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0] == ("eta,delta_equiv,R2,min_scal,lambda1_sq,"
                            "friedrich,extrinsic,bracket_ok")
        rows = [line.split(",") for line in lines[1:3]]
        # descending eta, bracket holds, R2 = eta^2 (1 - 4 eta^2)
        assert float(rows[0][0]) == pytest.approx(0.1)
        assert float(rows[1][0]) == pytest.approx(0.05)
        for row in rows:
            eta = float(row[0])
            assert float(row[2]) == pytest.approx(
                eta * eta * (1 - 4 * eta * eta), rel=1e-14)
            assert float(row[3]) >= 2 - 1e-6
            assert row[7] == "true"
        assert "# monotone_excess,true" in lines

    def test_infeasible_aborts(self, tmp_path, capsys):
        rc = main(["sweep", "--n", "2", "--S", "4", "--etas", "0.2,0.1",
                   "--out", str(tmp_path / "x.csv")])
        assert rc == EXIT_DOMAIN
        assert not (tmp_path / "x.csv").exists()


class TestVerify:
    def test_quick_passes(self, capsys):
        rc = main(["verify", "--quick"])
        assert rc == EXIT_OK
        out = capsys.readouterr().out
        assert "pass" in out and "FAIL" not in out
