"""Exercises the echo-motion CLI through main(argv): exit codes, output
lines, and the files each subcommand writes."""

import socket
import time

import numpy as np
import pytest

from echo_motion import clip_io
from echo_motion.cli import main
from echo_motion.joints import joint_limits
from echo_motion.metrics import EmbeddingSet, save_embeddings
from echo_motion.motion import MotionClip
from echo_motion.stream import client_run

IDENTITY_ROT6 = np.array([1.0, 0.0, 0.0, 0.0, 1.0, 0.0])


def make_clip(n_frames=20, joint_fill=0.0, vel=(0.0, 0.0), fps=50.0, centered=False):
    # frames pass through float32 so disk and wire round trips stay exact
    frames = np.zeros((n_frames, 38))
    if centered:
        frames[:, :29] = joint_limits().mean(axis=1)
    else:
        frames[:, :29] = joint_fill
    frames[1:, 29] = vel[0]
    frames[1:, 30] = vel[1]
    frames[:, 31] = 0.8
    frames[:, 32:38] = IDENTITY_ROT6
    return MotionClip(frames=frames.astype("<f4").astype(np.float64), fps=fps)


@pytest.fixture
def clip_file(tmp_path):
    path = tmp_path / "clip.emc"
    clip_io.save_clip(path, make_clip(centered=True))
    return str(path)


class TestConvert:
    def test_emc_csv_round_trip(self, tmp_path, capsys):
        rng = np.random.default_rng(3)
        frames = rng.standard_normal((15, 38)).astype("<f4").astype(np.float64)
        src = tmp_path / "a.emc"
        clip_io.save_clip(src, MotionClip(frames=frames))

        csv = tmp_path / "a.csv"
        assert main(["convert", str(src), "--out", str(csv)]) == 0
        assert f"wrote {csv}" in capsys.readouterr().out

        back = tmp_path / "b.emc"
        assert main(["convert", str(csv), "--out", str(back), "--fps", "50"]) == 0
        clip, _ = clip_io.load_clip(back)
        assert np.array_equal(clip.frames, frames)
        assert clip.fps == 50.0

    def test_unsupported_direction_fails(self, tmp_path, capsys):
        src = tmp_path / "a.emc"
        clip_io.save_clip(src, make_clip())
        rc = main(["convert", str(src), "--out", str(tmp_path / "a.emc2")])
        assert rc == 1
        assert capsys.readouterr().err.startswith("error:")

    def test_missing_input_fails(self, tmp_path, capsys):
        rc = main(["convert", str(tmp_path / "nope.emc"), "--out", str(tmp_path / "x.csv")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestEval:
    def test_mss_in_limit_clip_scores_one(self, clip_file, capsys):
        assert main(["eval", "mss", clip_file]) == 0
        out = capsys.readouterr().out
        assert "mss 1.000000" in out
        assert "s_pos 1.000000" in out
        assert "vbar_pos" in out

    def test_mss_with_limits_file_and_max_aggregate(self, clip_file, tmp_path, capsys):
        from echo_motion.joints import save_limits_file
        limits = tmp_path / "custom.limits"
        save_limits_file(limits, joint_limits())
        rc = main(["eval", "mss", clip_file, "--limits", str(limits), "--aggregate", "max"])
        assert rc == 0
        assert "mss 1.000000" in capsys.readouterr().out

    def test_rtc_identical_paths(self, tmp_path, capsys):
        a = tmp_path / "a.emc"
        clip_io.save_clip(a, make_clip(n_frames=101, vel=(0.01, 0.0)))
        assert main(["eval", "rtc", str(a), str(a), "--waypoints", "40"]) == 0
        out = capsys.readouterr().out
        assert "rtc 1.000000" in out
        assert "s_shape 1.000000" in out

    def test_fid_identical_sets(self, tmp_path, capsys):
        rng = np.random.default_rng(5)
        emb = EmbeddingSet(vectors=rng.standard_normal((64, 8)))
        p = tmp_path / "e.emb"
        save_embeddings(p, emb)
        assert main(["eval", "fid", str(p), str(p)]) == 0
        assert "fid 0.000000" in capsys.readouterr().out

    def test_rprec_aligned_sets(self, tmp_path, capsys):
        rng = np.random.default_rng(6)
        vec = rng.standard_normal((8, 4))
        m = tmp_path / "m.emb"
        t = tmp_path / "t.emb"
        save_embeddings(m, EmbeddingSet(vectors=vec, role="motion"))
        save_embeddings(t, EmbeddingSet(vectors=vec, role="text"))
        assert main(["eval", "rprec", str(m), str(t), "--pool", "8"]) == 0
        assert "top1 1.0000" in capsys.readouterr().out

    def test_div_and_mmdist(self, tmp_path, capsys):
        rng = np.random.default_rng(7)
        vec = rng.standard_normal((40, 6))
        p = tmp_path / "d.emb"
        save_embeddings(p, EmbeddingSet(vectors=vec))
        assert main(["eval", "div", str(p), "--pairs", "50", "--seed", "1"]) == 0
        div_out = capsys.readouterr().out
        assert div_out.startswith("diversity ")
        assert float(div_out.split()[1]) > 0.0

        assert main(["eval", "mmdist", str(p), str(p)]) == 0
        assert "mm_dist 0.000000" in capsys.readouterr().out

    def test_mpjpe_from_npy(self, tmp_path, capsys):
        rng = np.random.default_rng(8)
        ref = rng.standard_normal((10, 5, 3))
        act = ref.copy()
        act[:, :, 0] += 0.25  # pure translation: global error only
        a, r = tmp_path / "act.npy", tmp_path / "ref.npy"
        np.save(a, act)
        np.save(r, ref)
        assert main(["eval", "mpjpe", str(a), str(r), "--root-index", "0"]) == 0
        out = capsys.readouterr().out
        g, local = float(out.split()[1]), float(out.split()[3])
        assert abs(g - 0.25) < 1e-6
        assert abs(local) < 1e-9


class TestSample:
    @pytest.fixture
    def oracle_csvs(self, tmp_path):
        mean = tmp_path / "mean.csv"
        var = tmp_path / "var.csv"
        np.savetxt(mean, np.linspace(-0.2, 0.2, 38)[None], delimiter=",")
        np.savetxt(var, np.full((1, 38), 0.09), delimiter=",")
        return f"{mean},{var}"

    def test_writes_clip(self, oracle_csvs, tmp_path, capsys):
        out = tmp_path / "sampled.emc"
        rc = main(["sample", "--oracle", oracle_csvs, "--out", str(out),
                   "--frames", "16", "--steps", "5", "--seed", "3"])
        assert rc == 0
        assert "wrote" in capsys.readouterr().out
        clip, _ = clip_io.load_clip(out)
        assert clip.frames.shape == (16, 38)
        assert np.all(np.isfinite(clip.frames))

    def test_seed_reproducible(self, oracle_csvs, tmp_path):
        a, b = tmp_path / "a.emc", tmp_path / "b.emc"
        argv = ["sample", "--oracle", oracle_csvs, "--frames", "8", "--seed", "11"]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_single_value_oracle_broadcast(self, tmp_path):
        mean = tmp_path / "m.csv"
        var = tmp_path / "v.csv"
        mean.write_text("0.0\n")
        var.write_text("1.0\n")
        out = tmp_path / "c.emc"
        rc = main(["sample", "--oracle", f"{mean},{var}", "--out", str(out), "--frames", "4"])
        assert rc == 0
        clip, _ = clip_io.load_clip(out)
        assert clip.frames.shape == (4, 38)

    def test_oracle_needs_two_files(self, tmp_path, capsys):
        rc = main(["sample", "--oracle", "only_mean.csv", "--out", str(tmp_path / "x.emc")])
        assert rc == 1
        assert "mean.csv,var.csv" in capsys.readouterr().err

    def test_dpm_solver_reserved(self, oracle_csvs, tmp_path, capsys):
        rc = main(["sample", "--oracle", oracle_csvs, "--out", str(tmp_path / "x.emc"),
                   "--scheduler", "dpm-solver"])
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestServeAndClient:
    def test_serve_then_client_round_trip(self, tmp_path, capsys, monkeypatch):
        libdir = tmp_path / "lib"
        libdir.mkdir()
        clip = make_clip(n_frames=30, joint_fill=0.1)
        clip_io.save_clip(libdir / "wave_hello.emc", clip)

        probe = socket.socket()
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
        probe.close()

        # serve blocks in a sleep loop; hijack sleep to act as the client
        # and then stop the server the supported way
        holder = {}

        def fake_sleep(_):
            holder["result"] = client_run(f"tcp://127.0.0.1:{port}", "wave hello")
            raise KeyboardInterrupt

        monkeypatch.setattr(time, "sleep", fake_sleep)
        rc = main(["serve", "--bind", f"127.0.0.1:{port}", "--library", str(libdir)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "library prompts: wave hello" in out
        assert f"serving on tcp://127.0.0.1:{port}" in out
        assert "stopping" in out
        assert np.array_equal(holder["result"].clip.frames, clip.frames)

    def test_client_command_writes_clip(self, tmp_path, capsys):
        from echo_motion.stream import LibraryBackend, MotionServer

        clip = make_clip(n_frames=12, centered=True)
        with MotionServer(LibraryBackend({"bow": clip}), transport="tcp", port=0) as srv:
            out = tmp_path / "received.emc"
            rc = main(["client", "--url", srv.url, "--prompt", "bow", "--out", str(out)])
            assert rc == 0
            printed = capsys.readouterr().out
            assert "motion 1: 12 frames" in printed
            assert "first_chunk_latency_ms" in printed
            assert "online_mss 1.000000" in printed
            received, _ = clip_io.load_clip(out)
            assert np.array_equal(received.frames, clip.frames)

    def test_client_unknown_prompt_fails(self, capsys):
        from echo_motion.stream import LibraryBackend, MotionServer

        with MotionServer(LibraryBackend({"bow": make_clip()}), transport="tcp", port=0) as srv:
            rc = main(["client", "--url", srv.url, "--prompt", "moonwalk"])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_serve_needs_a_backend(self, capsys):
        rc = main(["serve"])
        assert rc == 1
        assert "--library or --oracle" in capsys.readouterr().err

    def test_serve_bad_bind(self, tmp_path, capsys):
        libdir = tmp_path / "lib"
        libdir.mkdir()
        clip_io.save_clip(libdir / "a.emc", make_clip())
        rc = main(["serve", "--bind", "9999", "--library", str(libdir)])
        assert rc == 1
        assert "HOST:PORT" in capsys.readouterr().err


class TestRecover:
    @pytest.fixture
    def clip_dir(self, tmp_path):
        d = tmp_path / "clips"
        d.mkdir()
        for i, fill in enumerate([0.0, 0.3, -0.2]):
            clip_io.save_clip(d / f"rec_{i}.emc", make_clip(joint_fill=fill))
        return d

    def test_build_index_then_query(self, clip_dir, capsys):
        index = clip_dir / "index.txt"
        rc = main(["recover", "build-index", str(clip_dir), "--out", str(index)])
        assert rc == 0
        assert "indexed 3 clips" in capsys.readouterr().out

        joints = clip_dir / "pose.csv"
        joints.write_text(",".join(["0.28"] * 29) + "\n")
        rc = main(["recover", "query", "--index", str(index),
                   "--gravity", "0,0,-1", "--joints", str(joints)])
        assert rc == 0
        out = capsys.readouterr().out
        assert out.startswith("best 1 rec_1.emc")
        assert "gravity_filtered True" in out
        assert "candidate" in out

    def test_query_with_explicit_clip_dir(self, clip_dir, tmp_path, capsys):
        index = tmp_path / "elsewhere.txt"
        assert main(["recover", "build-index", str(clip_dir), "--out", str(index)]) == 0
        capsys.readouterr()
        joints = tmp_path / "pose.csv"
        joints.write_text(",".join(["0.0"] * 29) + "\n")
        rc = main(["recover", "query", "--index", str(index), "--clips", str(clip_dir),
                   "--gravity", "0,0,-1", "--joints", str(joints)])
        assert rc == 0
        assert capsys.readouterr().out.startswith("best 0 rec_0.emc")

    def test_build_index_default_output_name(self, clip_dir, monkeypatch, capsys):
        monkeypatch.chdir(clip_dir)
        assert main(["recover", "build-index", str(clip_dir)]) == 0
        assert "recovery_index.txt" in capsys.readouterr().out
        assert (clip_dir / "recovery_index.txt").exists()

    def test_build_index_empty_dir_fails(self, tmp_path, capsys):
        empty = tmp_path / "empty"
        empty.mkdir()
        rc = main(["recover", "build-index", str(empty)])
        assert rc == 1
        assert "no .emc clips" in capsys.readouterr().err


class TestUsageErrors:
    def test_no_command_exits_2(self):
        with pytest.raises(SystemExit) as exc_info:
            main([])
        assert exc_info.value.code == 2

    def test_unknown_metric_exits_2(self, clip_file):
        with pytest.raises(SystemExit) as exc_info:
            main(["eval", "sparkle", clip_file])
        assert exc_info.value.code == 2

    def test_recover_query_missing_args_exits_2(self):
        with pytest.raises(SystemExit) as exc_info:
            main(["recover", "query", "--index", "x.txt"])
        assert exc_info.value.code == 2

    def test_recover_build_index_missing_path_exits_2(self):
        with pytest.raises(SystemExit) as exc_info:
            main(["recover", "build-index"])
        assert exc_info.value.code == 2
