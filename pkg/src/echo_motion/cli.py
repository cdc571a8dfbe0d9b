"""Unified command-line interface.

Exit codes: 0 on success, 2 on usage errors, 1 on runtime failures with
a machine-readable `error: ...` line on stderr.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import clip_io
from .joints import load_limits_file
from .metrics import (
    EmbeddingSet,
    RTCConfig,
    SafetyLimits,
    default_safety_limits,
    diversity,
    fid,
    load_embeddings,
    mm_dist,
    motion_safety_score,
    mpjpe,
    r_precision,
    root_trajectory_consistency,
)
from .motion import MotionClip


def _load_vector(path, dim: int = 38) -> np.ndarray:
    vec = np.loadtxt(path, delimiter=",", dtype=np.float64).reshape(-1)
    if vec.shape[0] == 1:
        vec = np.full(dim, vec[0])
    if vec.shape[0] != dim:
        raise ValueError(f"{path}: expected {dim} values (or a single shared one), got {vec.shape[0]}")
    return vec


def _limits_from_args(args) -> SafetyLimits:
    if getattr(args, "limits", None):
        return SafetyLimits(joint_range=load_limits_file(args.limits))
    return default_safety_limits()


def _cmd_convert(args) -> int:
    src, dst = args.input, args.out
    if src.endswith(".emc") and dst.endswith(".csv"):
        clip, _ = clip_io.load_clip(src)
        clip_io.clip_to_csv(dst, clip)
    elif src.endswith(".csv") and dst.endswith(".emc"):
        clip = clip_io.clip_from_csv(src, fps=args.fps)
        clip_io.save_clip(dst, clip)
    else:
        raise ValueError("convert handles .emc -> .csv and .csv -> .emc")
    print(f"wrote {dst}")
    return 0


def _cmd_eval(args) -> int:
    kind = args.metric
    if kind == "mss":
        clip, _ = clip_io.load_clip(args.inputs[0])
        res = motion_safety_score(clip, _limits_from_args(args), aggregate=args.aggregate)
        print(f"mss {res.mss:.6f}")
        print(f"s_pos {res.s_pos:.6f} s_vel {res.s_vel:.6f} s_acc {res.s_acc:.6f}")
        print(f"vbar_pos {res.vbar_pos:.6e} vbar_vel {res.vbar_vel:.6e} vbar_acc {res.vbar_acc:.6e}")
    elif kind == "rtc":
        gen, _ = clip_io.load_clip(args.inputs[0])
        gt, _ = clip_io.load_clip(args.inputs[1])
        cfg = RTCConfig(num_waypoints=args.waypoints)
        res = root_trajectory_consistency(gen, gt, cfg)
        print(f"rtc {res.rtc:.6f}")
        print(f"s_shape {res.s_shape:.6f} s_extent {res.s_extent:.6f}")
        print(f"gen_length {res.gen_length:.6f} gt_length {res.gt_length:.6f}")
    elif kind == "fid":
        a = load_embeddings(args.inputs[0])
        b = load_embeddings(args.inputs[1])
        print(f"fid {fid(a, b):.6f}")
    elif kind == "rprec":
        m = load_embeddings(args.inputs[0])
        t = load_embeddings(args.inputs[1])
        res = r_precision(m, t, pool_size=args.pool, seed=args.seed)
        print(f"top1 {res.top1:.4f} top2 {res.top2:.4f} top3 {res.top3:.4f}")
    elif kind == "div":
        emb = load_embeddings(args.inputs[0])
        print(f"diversity {diversity(emb, num_pairs=args.pairs, seed=args.seed):.6f}")
    elif kind == "mmdist":
        m = load_embeddings(args.inputs[0])
        t = load_embeddings(args.inputs[1])
        print(f"mm_dist {mm_dist(m, t):.6f}")
    elif kind == "mpjpe":
        actual = np.load(args.inputs[0])
        reference = np.load(args.inputs[1])
        g, local = mpjpe(actual, reference, root_index=args.root_index)
        print(f"g_mpjpe {g:.6f} mpjpe {local:.6f}")
    else:
        raise ValueError(f"unknown metric {kind!r}")
    return 0


def _cmd_sample(args) -> int:
    from .diffusion import NoiseSchedule, SamplerConfig, gaussian_oracle_denoiser, sample

    mean_path, _, var_path = args.oracle.partition(",")
    if not var_path:
        raise ValueError("--oracle needs mean.csv,var.csv")
    mean = _load_vector(mean_path)
    var = _load_vector(var_path)
    sched = NoiseSchedule.linear(args.timesteps)
    config = SamplerConfig(scheduler=args.scheduler, num_steps=args.steps,
                           cfg_scale=args.cfg, eta=args.eta, seed=args.seed)
    denoiser = gaussian_oracle_denoiser(mean, var, sched)
    result = sample(denoiser, args.prompt, args.frames, config, sched, fps=args.fps)
    clip_io.save_clip(args.out, result.clip)
    print(f"wrote {args.out} ({args.frames} frames) in {result.duration_s:.3f} s")
    return 0


def _cmd_serve(args) -> int:
    import time

    from .diffusion import NoiseSchedule
    from .stream import ChunkPolicy, LibraryBackend, MotionServer, OracleBackend

    if args.library:
        backend = LibraryBackend.from_dir(args.library)
        print(f"library prompts: {', '.join(backend.prompts())}")
    elif args.oracle:
        mean_path, _, var_path = args.oracle.partition(",")
        if not var_path:
            raise ValueError("--oracle needs mean.csv,var.csv")
        backend = OracleBackend(_load_vector(mean_path), _load_vector(var_path),
                                NoiseSchedule.linear())
    else:
        raise ValueError("serve needs --library or --oracle")

    host, port = None, None
    if args.bind:
        host, _, port_s = args.bind.rpartition(":")
        if not host:
            raise ValueError("--bind needs HOST:PORT")
        port = int(port_s)
    policy = ChunkPolicy(chunk_frames=args.chunk, pacing=args.pace)
    server = MotionServer(backend, policy, transport=args.transport, host=host, port=port)
    with server:
        print(f"serving on {server.url} (pacing={args.pace}, chunk={args.chunk})")
        try:
            while True:
                time.sleep(1.0)
        except KeyboardInterrupt:
            print("stopping")
    return 0


def _cmd_client(args) -> int:
    from .stream import client_run

    result = client_run(args.url, args.prompt, cfg_scale=args.cfg, num_steps=args.steps,
                        requested_frames=args.frames, timeout=args.timeout)
    log = result.log
    print(f"motion {log.motion_id}: {log.frames_received} frames "
          f"in {log.total_time_s:.3f} s")
    if log.first_chunk_latency_ms is not None:
        print(f"first_chunk_latency_ms {log.first_chunk_latency_ms:.2f} "
              f"jitter_ms {log.jitter_ms:.2f}")
    if log.online_mss:
        print(f"online_mss {log.online_mss[-1]:.6f}")
    if args.out:
        clip_io.save_clip(args.out, result.clip)
        print(f"wrote {args.out}")
    return 0


def _cmd_recover(args) -> int:
    from . import recovery

    if args.action == "build-index":
        lib = recovery.build_library(args.path)
        out = args.out or "recovery_index.txt"
        recovery.save_index(out, lib)
        print(f"indexed {len(lib)} clips -> {out}")
        return 0
    if args.action == "query":
        lib = recovery.load_index(args.index, clip_dir=args.clips)
        gravity = np.array([float(v) for v in args.gravity.split(",")])
        joints = np.loadtxt(args.joints, delimiter=",", dtype=np.float64).reshape(-1)
        res = recovery.retrieve_recovery(gravity, joints, lib)
        print(f"best {res.best_index} {res.best_entry.source} "
              f"joint_distance {res.candidates[0][1]:.6f} "
              f"gravity_filtered {res.gravity_filtered}")
        for idx, dist in res.candidates[1:4]:
            print(f"candidate {idx} joint_distance {dist:.6f}")
        return 0
    raise ValueError(f"unknown recover action {args.action!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="echo-motion",
                                     description="humanoid motion toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert between .emc and .csv")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--fps", type=float, default=50.0, help="fps for csv -> emc (csv carries none)")
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("eval", help="evaluation metrics")
    p.add_argument("metric", choices=["mss", "rtc", "fid", "rprec", "div", "mmdist", "mpjpe"])
    p.add_argument("inputs", nargs="+")
    p.add_argument("--limits", help="joint limits table (mss)")
    p.add_argument("--aggregate", choices=["mean", "max"], default="mean")
    p.add_argument("--waypoints", type=int, default=50)
    p.add_argument("--pool", type=int, default=32)
    p.add_argument("--pairs", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--root-index", type=int, default=0)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sample", help="sample a clip from the Gaussian oracle denoiser")
    p.add_argument("--oracle", required=True, metavar="MEAN.CSV,VAR.CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--frames", type=int, default=100)
    p.add_argument("--scheduler", choices=["ddim", "ddpm", "dpm-solver"], default="ddim")
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--cfg", type=float, default=2.5)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fps", type=float, default=50.0)
    p.add_argument("--timesteps", type=int, default=1000)
    p.add_argument("--prompt", default="oracle sample")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("serve", help="run the motion streaming server")
    p.add_argument("--bind", metavar="HOST:PORT", help="default from ECHO_BIND or 127.0.0.1:0")
    p.add_argument("--transport", choices=["tcp", "ws"], default="tcp")
    p.add_argument("--library", help="directory of .emc clips")
    p.add_argument("--oracle", metavar="MEAN.CSV,VAR.CSV")
    p.add_argument("--pace", choices=["burst", "realtime"], default="burst")
    p.add_argument("--chunk", type=int, default=25)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("client", help="request one motion from a server")
    p.add_argument("--url", required=True, help="tcp://host:port or ws://host:port")
    p.add_argument("--prompt", required=True)
    p.add_argument("--out")
    p.add_argument("--cfg", type=float, default=2.5)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--frames", type=int, default=0)
    p.add_argument("--timeout", type=float, default=30.0)
    p.set_defaults(func=_cmd_client)

    p = sub.add_parser("recover", help="fall-recovery library tools")
    p.add_argument("action", choices=["build-index", "query"])
    p.add_argument("path", nargs="?", help="clip directory (build-index)")
    p.add_argument("--out")
    p.add_argument("--index", help="index file (query)")
    p.add_argument("--clips", help="clip directory override (query)")
    p.add_argument("--gravity", help="gx,gy,gz (query)")
    p.add_argument("--joints", help="csv file with 29 joint angles (query)")
    p.set_defaults(func=_cmd_recover)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "recover":
        if args.action == "build-index" and not args.path:
            parser.error("recover build-index needs a clip directory")
        if args.action == "query" and not (args.index and args.gravity and args.joints):
            parser.error("recover query needs --index, --gravity and --joints")
    from .stream import ConnectionClosed, ProtocolError, ServerError

    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, NotImplementedError,
            ConnectionClosed, ProtocolError, ServerError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
