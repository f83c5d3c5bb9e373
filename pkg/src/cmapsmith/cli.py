"""Batch command-line front end.

Subcommands: quantize, train, rank, search, benchmark, profile, serve.
Every command is deterministic given explicit rng seeds. Exit codes:
0 success, 1 validation, 2 I/O, 3 invariant failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import colormap as cmod
from . import planner as pl
from . import preference as pref
from .colorspace import hex_to_lab
from .corpus import CorpusError, load_corpus, load_starter_corpus
from .environment import build_graph, get_state_space, quantize_gamut
from .reward import N_FEATURES, RewardContext

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_INVARIANT = 3


def _load_corpus_arg(path: str | None):
    return load_corpus(path) if path else load_starter_corpus()


def _write_json(path: str, doc: dict) -> None:
    try:
        Path(path).write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    except OSError as e:
        raise SystemExit(_fail(EXIT_IO, f"cannot write {path}: {e}"))


def _fail(code: int, message: str) -> int:
    print(message, file=sys.stderr)
    return code


def _build_session(corpus, seed_hex: str, state_rng: int):
    seed = hex_to_lab(seed_hex)
    space = get_state_space(state_rng)
    graph, candidates = build_graph(corpus, seed, space)
    ctx = RewardContext.for_candidates(candidates)
    return seed, graph, candidates, ctx


def _load_model(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as e:
        raise SystemExit(_fail(EXIT_IO, f"cannot read model {path}: {e}"))
    except json.JSONDecodeError as e:
        raise SystemExit(_fail(EXIT_VALIDATION, f"model {path} is not valid JSON: {e}"))
    samples = np.asarray(doc.get("samples", []), dtype=float)
    if samples.ndim != 2 or samples.shape[1] != N_FEATURES:
        raise SystemExit(
            _fail(EXIT_VALIDATION, f"model {path}: samples must be Mx{N_FEATURES}")
        )
    doc["samples"] = samples
    return doc


def cmd_quantize(args) -> int:
    space = quantize_gamut(args.seed_rng)
    _write_json(args.out, space.to_doc())
    if args.json:
        print(json.dumps({"states": len(space.quantized), "out": args.out}))
    else:
        print(f"wrote {len(space.quantized)} states to {args.out}")
        print(f"mean nearest-neighbor distance: {space.mean_nn_distance():.3f} dE2000")
    return EXIT_OK


def cmd_train(args) -> int:
    corpus = _load_corpus_arg(args.corpus)
    rng = np.random.default_rng(args.rng)
    if args.oracle == "random":
        theta_star = rng.normal(size=N_FEATURES)
        theta_star /= np.linalg.norm(theta_star)
    else:
        try:
            raw = json.loads(Path(args.oracle).read_text())
        except OSError as e:
            return _fail(EXIT_IO, f"cannot read oracle file: {e}")
        except json.JSONDecodeError as e:
            return _fail(EXIT_VALIDATION, f"oracle file is not valid JSON: {e}")
        theta_star = np.asarray(raw.get("theta", raw) if isinstance(raw, dict) else raw, float)
        if theta_star.shape != (N_FEATURES,):
            return _fail(
                EXIT_VALIDATION,
                f"oracle theta must have {N_FEATURES} entries, got {theta_star.shape}",
            )

    seed, graph, candidates, ctx = _build_session(corpus, args.seed_color, args.state_rng)
    model = pref.PreferenceModel.prior(rng=rng)
    oracle = pref.simulated_oracle(theta_star, ctx, noiseless=args.noiseless, rng=rng)
    model = pref.teach_loop(model, candidates, ctx, args.n, oracle, rng=rng)

    doc = model.to_doc()
    doc.update(
        {
            "seed_color": args.seed_color,
            "state_rng": args.state_rng,
            "n_queries": args.n,
            "oracle_theta": [float(v) for v in theta_star],
            "mean": [float(v) for v in model.mean],
        }
    )
    _write_json(args.out, doc)
    mean = model.mean
    cos = float(mean @ theta_star / max(np.linalg.norm(mean), 1e-12))
    if args.json:
        print(json.dumps({"out": args.out, "responses": len(model.history), "cosine": cos}))
    else:
        print(f"trained on {len(model.history)} responses; cos(mean, theta*) = {cos:.3f}")
    return EXIT_OK


def cmd_rank(args) -> int:
    corpus = _load_corpus_arg(args.corpus)
    doc = _load_model(args.model)
    seed, graph, candidates, ctx = _build_session(
        corpus, args.seed_color, doc.get("state_rng", args.state_rng)
    )
    model = pref.PreferenceModel(samples=doc["samples"])
    ranked = pref.rank_corpus(model, candidates, ctx)[: args.top]
    if args.json:
        print(json.dumps([{"id": t.id, "score": s} for t, s in ranked]))
    else:
        for i, (t, s) in enumerate(ranked, 1):
            print(f"{i:3d}. {t.id:32s} {s:+.4f}")
    return EXIT_OK


def cmd_search(args) -> int:
    corpus = _load_corpus_arg(args.corpus)
    doc = _load_model(args.model)
    seed, graph, candidates, ctx = _build_session(
        corpus, args.seed_color, doc.get("state_rng", args.state_rng)
    )
    theta = np.asarray(doc["samples"], float).mean(axis=0)
    config = pl.QLearningConfig(episodes=args.episodes)
    result = pl.search(graph, theta, ctx, candidates, config, rng_seed=args.rng)
    if not result.found:
        print("no qualifying novel trajectory found", file=sys.stderr)
        return EXIT_OK
    problems = pl.verify_result(result, graph, candidates, ctx, theta)
    cm = cmod.finalize(result.best, seed.to_array())
    out_doc = cm.to_doc(seed_hex=args.seed_color, reward=result.best_reward)
    _write_json(args.out, out_doc)
    if args.csv:
        try:
            Path(args.csv).write_text(cmod.to_csv(cm))
        except OSError as e:
            return _fail(EXIT_IO, f"cannot write {args.csv}: {e}")
    if args.json:
        print(
            json.dumps(
                {
                    "reward": result.best_reward,
                    "states": len(result.best.state_ids),
                    "criteria_ok": not problems,
                    "out": args.out,
                }
            )
        )
    else:
        print(f"best reward: {result.best_reward:.4f} over {args.episodes} episodes")
        print(f"trajectory states: {len(result.best.state_ids)}")
        print("acceptance re-check: " + ("all criteria pass" if not problems else "; ".join(problems)))
        print(f"wrote colormap to {args.out}")
    return EXIT_INVARIANT if problems else EXIT_OK


def cmd_benchmark(args) -> int:
    corpus = _load_corpus_arg(args.corpus)
    model_files = sorted(Path(args.models).glob("*.json"))
    if not model_files:
        return _fail(EXIT_VALIDATION, f"no model files in {args.models}")

    rows_all = []
    trace_dir = Path(args.out).with_name(Path(args.out).name + "_traces")
    trace_dir.mkdir(parents=True, exist_ok=True)
    for mf in model_files:
        doc = _load_model(str(mf))
        seed_hex = doc.get("seed_color")
        if not seed_hex:
            return _fail(EXIT_VALIDATION, f"model {mf} lacks seed_color")
        seed, graph, candidates, ctx = _build_session(
            corpus, seed_hex, doc.get("state_rng", args.state_rng)
        )
        theta = np.asarray(doc["samples"], float).mean(axis=0)
        rows, traces = pl.benchmark_variants(
            graph,
            {mf.stem: theta},
            ctx,
            candidates,
            reps=args.reps,
            episodes=args.episodes,
            base_seed=args.rng,
        )
        rows_all.extend(rows)
        for (variant, tid, rep), trace in traces.items():
            tf = trace_dir / f"{variant}__{tid}__{rep}.csv"
            tf.write_text("\n".join(f"{v:.6f}" for v in trace) + "\n")

    lines = ["variant,theta_id,rep,best_reward"]
    for variant, tid, rep, best in rows_all:
        lines.append(f"{variant},{tid},{rep},{best:.6f}")
    try:
        Path(args.out).write_text("\n".join(lines) + "\n")
    except OSError as e:
        return _fail(EXIT_IO, f"cannot write {args.out}: {e}")
    if args.json:
        print(json.dumps({"rows": len(rows_all), "out": args.out, "traces": str(trace_dir)}))
    else:
        print(f"wrote {len(rows_all)} rows to {args.out}; traces in {trace_dir}/")
    return EXIT_OK


def cmd_profile(args) -> int:
    try:
        doc = json.loads(Path(args.cmap).read_text())
    except OSError as e:
        return _fail(EXIT_IO, f"cannot read {args.cmap}: {e}")
    except json.JSONDecodeError as e:
        return _fail(EXIT_VALIDATION, f"{args.cmap} is not valid JSON: {e}")
    labs = np.asarray(doc.get("lab", []), dtype=float)
    if labs.ndim != 2 or labs.shape[1] != 3:
        return _fail(EXIT_VALIDATION, "colormap document lacks a lab array")
    prof = cmod.profile(labs)
    dL = np.diff(labs[:, 0])
    inversions = np.nonzero(dL >= 0)[0]
    monotone = len(inversions) == 0
    stats = {
        "flatness": prof.flatness,
        "total_length": prof.total_length,
        "gap_mean": float(prof.gaps.mean()),
        "gap_std": float(prof.gaps.std()),
        "lightness_monotone": monotone,
        "samples": len(labs),
    }
    if args.json:
        print(json.dumps(stats, sort_keys=True))
    else:
        print(f"samples: {len(labs)}")
        print(f"flatness: {prof.flatness:.6f}")
        print(f"total arc length: {prof.total_length:.3f} dE2000")
        print(f"adjacent gaps: mean {prof.gaps.mean():.4f}, std {prof.gaps.std():.6f}")
        print(
            "lightness: strictly decreasing"
            if monotone
            else f"lightness: INVERSION at sample {int(inversions[0])}"
        )
    if not monotone:
        print(f"invariant failure: lightness inversion at sample {int(inversions[0])}", file=sys.stderr)
        return EXIT_INVARIANT
    if prof.flatness < 0.99:
        print(f"invariant failure: flatness {prof.flatness:.4f} < 0.99", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        corpus_path=args.corpus,
        rng_seed=args.state_rng,
        n_default=args.n_default,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cmapsmith", description=__doc__)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("quantize", help="write the 512-state quantization document")
    q.add_argument("--seed-rng", type=int, default=0)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_quantize)

    t = sub.add_parser("train", help="train a model against a simulated oracle")
    t.add_argument("--seed-color", required=True)
    t.add_argument("--oracle", required=True, help="theta JSON file or 'random'")
    t.add_argument("--n", type=int, default=15)
    t.add_argument("--rng", type=int, default=0)
    t.add_argument("--state-rng", type=int, default=0)
    t.add_argument("--noiseless", action="store_true")
    t.add_argument("--corpus")
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_train)

    r = sub.add_parser("rank", help="rank the corpus under a trained model")
    r.add_argument("--model", required=True)
    r.add_argument("--seed-color", required=True)
    r.add_argument("--top", type=int, default=10)
    r.add_argument("--state-rng", type=int, default=0)
    r.add_argument("--corpus")
    r.set_defaults(func=cmd_rank)

    s = sub.add_parser("search", help="search for a novel colormap")
    s.add_argument("--model", required=True)
    s.add_argument("--seed-color", required=True)
    s.add_argument("--episodes", type=int, default=10000)
    s.add_argument("--rng", type=int, default=0)
    s.add_argument("--state-rng", type=int, default=0)
    s.add_argument("--corpus")
    s.add_argument("--out", required=True)
    s.add_argument("--csv", help="also write an (index, L, a, b, r, g, b) CSV")
    s.set_defaults(func=cmd_search)

    b = sub.add_parser("benchmark", help="compare agent variants (table + traces)")
    b.add_argument("--models", required=True, help="directory of model JSON files")
    b.add_argument("--reps", type=int, default=10)
    b.add_argument("--episodes", type=int, default=10000)
    b.add_argument("--rng", type=int, default=0)
    b.add_argument("--state-rng", type=int, default=0)
    b.add_argument("--corpus")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_benchmark)

    f = sub.add_parser("profile", help="validate and profile a colormap document")
    f.add_argument("--cmap", required=True)
    f.set_defaults(func=cmd_profile)

    v = sub.add_parser("serve", help="run the HTTP service")
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--port", type=int, default=8000)
    v.add_argument("--corpus")
    v.add_argument("--state-rng", type=int, default=0)
    v.add_argument("--n-default", type=int, default=15)
    v.set_defaults(func=cmd_serve)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_VALIDATION
    except CorpusError as e:
        return _fail(EXIT_VALIDATION, str(e))
    except ValueError as e:
        return _fail(EXIT_VALIDATION, str(e))
    except OSError as e:
        return _fail(EXIT_IO, str(e))


if __name__ == "__main__":
    sys.exit(main())
