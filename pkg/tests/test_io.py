import struct

import numpy as np
import pytest

from hallmhd import diagnostics as dg
from hallmhd.experiments import make_initial
from hallmhd.io import (CSV_COLUMNS, CheckpointError, ConfigError, OutputLockedError,
                        checkpoint, load_checkpoint, output_lock, parse_config,
                        parse_probe_config, read_records, save_checkpoint, write_records)
from hallmhd.model import State


class TestParseConfig:
    def test_defaults(self):
        rc = parse_config("scenario = small_data_global\namplitude = 1e-3")
        sc = rc.scenario
        p = sc.params
        assert (p.nu, p.eta, p.hall, p.eps) == (1.0, 1.0, 1.0, 0.0)
        assert (sc.n, sc.m, sc.amplitude) == (32, 3, 1e-3)
        assert (sc.control.cfl_advective, sc.control.cfl_hall) == (0.5, 0.2)
        assert rc.output_dir is None and rc.checkpoint_every is None

    def test_bogus_scenario_names_key(self):
        with pytest.raises(ConfigError, match="'scenario'"):
            parse_config("scenario = bogus")

    def test_inviscid_accepted(self):
        assert parse_config("nu = 0\nscenario = local_existence").scenario.params.nu == 0

    def test_missing_scenario(self):
        with pytest.raises(ConfigError, match="scenario"):
            parse_config("n = 16")

    @pytest.mark.parametrize("text,key", [
        ("scenario = local_existence\nn = sixteen", "'n'"),
        ("scenario = local_existence\nseed = 1.5", "'seed'"),
        ("scenario = local_existence\nwidth = 3", "'width'"),
        ("scenario = local_existence\nn = 16\nn = 32", "'n'"),
        ("scenario = local_existence\ncheckpoint_every = 0", "'checkpoint_every'"),
        ("scenario = generalized_hall_sweep\nalpha_beta = 0-2", "'alpha_beta'"),
    ])
    def test_key_specific_errors(self, text, key):
        with pytest.raises(ConfigError, match=key):
            parse_config(text)

    @pytest.mark.parametrize("text", [
        "scenario = local_existence\nn = 12",
        "scenario = local_existence\neta = 0",
        "scenario = local_existence\nm = 2",
        "scenario = local_existence\nrecord_every = 0",
        "scenario = local_existence\njust words",
    ])
    def test_invalid_values(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_comments_and_lists(self):
        text = """
        # sweep
        scenario = generalized_hall_sweep   # trailing comment
        alpha_beta = 0:2, 0.5:3, 1:2
        n = 16
        output_dir = out/sweep
        checkpoint_every = 10
        record_every = 5
        """
        rc = parse_config(text)
        assert rc.scenario.alpha_beta == ((0, 2), (0.5, 3), (1, 2))
        assert str(rc.output_dir) == "out/sweep" and rc.checkpoint_every == 10
        assert rc.record_every == 5

    def test_eps_and_seed_lists(self):
        rc = parse_config("scenario = liouville_decay\nseeds = 0, 1, 2\neps_list = 0.2,0.1")
        assert rc.scenario.seeds == (0, 1, 2) and rc.scenario.eps_list == (0.2, 0.1)

    def test_scenario_specific_horizon(self):
        assert parse_config("scenario = liouville_decay").scenario.control.t_end == 20.0
        assert parse_config("scenario = liouville_decay\nt_end = 3").scenario.control.t_end == 3.0

    def test_probe_config(self):
        pc = parse_probe_config("probe = log_sobolev\nensemble_size = 50\nn = 16")
        assert (pc.probe, pc.ensemble_size, pc.n, pc.m) == ("log_sobolev", 50, 16, 3)
        with pytest.raises(ConfigError, match="'probe'"):
            parse_probe_config("probe = ratio")
        with pytest.raises(ConfigError, match="'scenario'"):
            parse_probe_config("probe = lemma_ode\nscenario = x")


class TestRecords:
    def test_zero_record_row(self, g16, tmp_path):
        path = tmp_path / "z.csv"
        write_records([dg.record(State.zeros(g16), 3)], path)
        text = path.read_text()
        assert text == ",".join(CSV_COLUMNS) + "\n" + "0,0,0,0,0,1,1,0,0,0,0,0,0,0,0\n"

    def test_header_exact(self):
        assert ",".join(CSV_COLUMNS) == ("t,energy_u,energy_b,hm_u,hm_b,x,a,besov_omega,linf_u,"
                                         "linf_b,linf_grad_b,div_u_max,div_b_max,diss_u,diss_b")

    def test_empty(self, tmp_path):
        with pytest.raises(ValueError):
            write_records([], tmp_path / "e.csv")

    def test_roundtrip(self, g16, tmp_path):
        s = make_initial("random_band_limited", 0.3, 2, g16)
        recs = [dg.record(s, 3, 0.1234567890123456789, 1e-300), dg.record(s, 4)]
        path = tmp_path / "r.csv"
        write_records(recs, path)
        assert read_records(path) == recs

    def test_bad_header(self, tmp_path):
        path = tmp_path / "b.csv"
        path.write_text("t,x\n0,1\n")
        with pytest.raises(ValueError):
            read_records(path)


class TestCheckpoint:
    def test_roundtrip_bit_identical(self, g16, tmp_path):
        s = make_initial("random_band_limited", 0.3, 2, g16)
        s.t = 0.123456789
        path = tmp_path / "s.ckpt"
        checkpoint(s, path, "save")
        back = checkpoint(None, path, "load", n=16)
        assert back.t == s.t
        assert back.u.tobytes() == s.u.tobytes() and back.b.tobytes() == s.b.tobytes()

    def test_layout(self, g16, tmp_path):
        s = State.zeros(g16, t=2.5)
        s.b[2, -8, -8, -8] = 3.0 - 4.0j  # k = (-8, -8, -8): first in ascending order
        s.u[0, 0, 0, 1] = 7.0
        path = tmp_path / "s.ckpt"
        save_checkpoint(s, path)
        raw = path.read_bytes()
        assert raw[:4] == b"HMHD"
        assert struct.unpack_from("<IId", raw, 4) == (1, 16, 2.5)
        data = np.frombuffer(raw[20:], dtype="<f8").reshape(6, 16, 16, 16, 2)
        assert tuple(data[5, 0, 0, 0]) == (3.0, -4.0)
        assert tuple(data[0, 8, 8, 9]) == (7.0, 0.0)
        assert len(raw) == 20 + 6 * 16**3 * 16

    def test_truncated(self, g16, tmp_path):
        path = tmp_path / "s.ckpt"
        save_checkpoint(State.zeros(g16), path)
        raw = path.read_bytes()
        for cut in (3, 30):
            path.write_bytes(raw[:cut])
            with pytest.raises(CheckpointError, match="short read|bad magic"):
                load_checkpoint(path)

    def test_bad_magic(self, g16, tmp_path):
        path = tmp_path / "s.ckpt"
        save_checkpoint(State.zeros(g16), path)
        path.write_bytes(b"XXXX" + path.read_bytes()[4:])
        with pytest.raises(CheckpointError, match="bad magic"):
            load_checkpoint(path)

    def test_version_mismatch(self, g16, tmp_path):
        path = tmp_path / "s.ckpt"
        save_checkpoint(State.zeros(g16), path)
        raw = bytearray(path.read_bytes())
        raw[4:8] = struct.pack("<I", 9)
        path.write_bytes(bytes(raw))
        with pytest.raises(CheckpointError, match="version"):
            load_checkpoint(path)

    def test_grid_mismatch(self, g16, tmp_path):
        path = tmp_path / "s.ckpt"
        save_checkpoint(State.zeros(g16), path)
        with pytest.raises(CheckpointError, match="grid mismatch"):
            load_checkpoint(path, n=32)


class TestLock:
    def test_exclusive(self, tmp_path):
        with output_lock(tmp_path / "o") as d:
            with pytest.raises(OutputLockedError):
                with output_lock(d):
                    pass
        with output_lock(tmp_path / "o"):
            pass
