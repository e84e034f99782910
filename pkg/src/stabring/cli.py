"""Command-line interface: run the full pipeline, enumerate orbits, or query
the homology oracles.

Exit codes for ``run``: 0 all verdicts pass, 2 some inconclusive, 1 any
failure or error.  STABRING_CACHE overrides the cache directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .groups import load_group
from .oracle import bar_homology, sp_orbit_oracle, stable_count_prediction
from .orbits import enumerate_orbits
from .pipeline import PipelineConfig, emit_report, render_summary, run_pipeline
from .words import compile_moves, moveset_manifest


def _load_spec(arg: str) -> dict:
    """Group spec from inline JSON or a path to a JSON file."""
    text = arg
    if not arg.lstrip().startswith("{"):
        with open(arg) as fh:
            text = fh.read()
    return json.loads(text)


def _cmd_run(args) -> int:
    with open(args.config) as fh:
        data = json.load(fh)
    if args.threads is not None:
        data["threads"] = args.threads
    cache = args.cache or os.environ.get("STABRING_CACHE") or data.get("cache_dir")
    if cache:
        data["cache_dir"] = cache
    if args.out is not None:
        data["out_dir"] = args.out
    if args.backend is not None:
        data["backend"] = args.backend
    if args.dump_matrices:
        data["dump_matrices"] = True
    config = PipelineConfig.from_dict(data)
    report = run_pipeline(config)
    print(render_summary(report), end="")
    if config.out_dir:
        written = emit_report(report, config.out_dir)
        if args.dump_moves:
            G = load_group(config.group)
            for n in range(1, config.n_max + 1):
                moves = compile_moves(n, G, config.depth)
                path = os.path.join(config.out_dir, f"moves_n{n}.json")
                with open(path, "w") as fh:
                    json.dump(moveset_manifest(n, moves), fh, indent=2, sort_keys=True)
                written.append(path)
        print("wrote: " + ", ".join(written))
    return report.exit_code


def _cmd_orbits(args) -> int:
    G = load_group(_load_spec(args.group))
    moves = compile_moves(args.n, G, args.depth)
    table = enumerate_orbits(G, args.n, moves, backend=args.backend)
    sizes = table.orbit_sizes()
    print(f"group {G.name} (order {G.order}), n = {args.n}: {table.count} orbits")
    for o in range(table.count):
        print(f"  orbit {o}: size {int(sizes[o])}, representative {table.rep_tuple(o)}")
    return 0


def _cmd_oracle(args) -> int:
    G = load_group(_load_spec(args.group))
    bh = bar_homology(G)
    print(f"group {G.name} (order {G.order})")
    print(f"  H1 = {bh['H1']}")
    print(f"  H2 = {bh['H2']}")
    print(f"  stable orbit-count prediction (sum of |H2| over subgroups): "
          f"{stable_count_prediction(G)}")
    if G.is_abelian and args.n:
        for n in range(1, args.n + 1):
            print(f"  symplectic orbit count at n = {n}: {sp_orbit_oracle(G, n)}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="stabring",
        description="Hurwitz-orbit rings, Koszul-type complexes and their "
                    "stabilization invariants for a finite group")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the full pipeline from a config file")
    p_run.add_argument("--config", required=True, help="path to a JSON config")
    p_run.add_argument("--threads", type=int, default=None)
    p_run.add_argument("--cache", default=None, help="orbit cache directory")
    p_run.add_argument("--out", default=None, help="report output directory")
    p_run.add_argument("--backend", choices=["auto", "numba", "numpy"], default=None)
    p_run.add_argument("--dump-moves", action="store_true",
                       help="also write the move-set manifests")
    p_run.add_argument("--dump-matrices", action="store_true",
                       help="write the differential matrices as text triplets")
    p_run.set_defaults(fn=_cmd_run)

    p_orb = sub.add_parser("orbits", help="enumerate orbits of G^(2n)")
    p_orb.add_argument("--group", required=True, help="group spec JSON (inline or path)")
    p_orb.add_argument("--n", type=int, required=True)
    p_orb.add_argument("--depth", type=int, default=2, choices=[1, 2])
    p_orb.add_argument("--backend", choices=["auto", "numba", "numpy"], default=None)
    p_orb.set_defaults(fn=_cmd_orbits)

    p_or = sub.add_parser("oracle", help="bar homology and stable-count oracles")
    p_or.add_argument("--group", required=True, help="group spec JSON (inline or path)")
    p_or.add_argument("--n", type=int, default=0,
                      help="also print symplectic orbit counts up to this genus (abelian)")
    p_or.set_defaults(fn=_cmd_oracle)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
