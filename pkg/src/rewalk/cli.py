"""Command-line client for the service.

The CLI never runs the engine itself: it builds a request, posts it to the
FastAPI app (in-process by default, or a remote ``--server``), writes any
returned file artifacts under ``--out`` and prints a short summary.  A flat
``key=value`` config file can pre-fill any flag; explicit flags win.
"""
from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys

import httpx


def _post(server: str | None, route: str, payload: dict) -> dict:
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            resp = client.post(route, json=payload)
    else:
        from .service.app import create_app

        async def _go() -> httpx.Response:
            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(transport=transport, base_url="http://rewalk", timeout=None) as client:
                return await client.post(route, json=payload)

        resp = asyncio.run(_go())
    if resp.status_code >= 400:
        try:
            detail = resp.json()
        except ValueError:
            detail = {"detail": resp.text}
        print(f"error ({resp.status_code}): {json.dumps(detail)}", file=sys.stderr)
        raise SystemExit(2)
    return resp.json()


def _write_files(out_dir: str | None, files: dict[str, str]) -> None:
    if out_dir is None:
        return
    os.makedirs(out_dir, exist_ok=True)
    for name, content in files.items():
        with open(os.path.join(out_dir, name), "w", encoding="utf-8", newline="") as fh:
            fh.write(content)


def _parse_latent(text: str) -> dict:
    out: dict = {}
    for part in text.split(","):
        if not part:
            continue
        key, _, value = part.partition("=")
        key = key.strip()
        value = value.strip()
        if key in ("n", "seed"):
            out[key] = int(value)
        elif key == "alpha":
            out[key] = None if value.lower() in ("inf", "infinite") else float(value)
        else:
            out[key] = float(value)
    return out


def graph_payload(args: argparse.Namespace) -> dict:
    """Build the graph-source body from --graph plus its modifier flags."""
    spec: str = args.graph
    payload: dict = {
        "mode": args.graph_mode,
        "giant_component": bool(args.giant_component),
        "attributes_path": args.attributes,
    }
    if spec.startswith("barbell:"):
        payload["barbell"] = int(spec.split(":", 1)[1])
    elif spec.startswith("latent:"):
        payload["latent"] = _parse_latent(spec.split(":", 1)[1])
    else:
        payload["path"] = spec
    return payload


def _add_graph_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", required=True,
                   help="edge-list path, 'barbell:M', or 'latent:n=..,a=..,b=..,r=..[,alpha=..][,seed=..]'")
    p.add_argument("--graph-mode", default="undirected", choices=["undirected", "reciprocal-directed"])
    p.add_argument("--giant-component", action="store_true")
    p.add_argument("--attributes", default=None, help="sidecar attribute file (node_id name value)")


def _add_walk_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", default="srw")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-size", type=int, default=100)
    p.add_argument("--geweke-threshold", default="0.1")
    p.add_argument("--jump-prob", type=float, default=0.5)
    p.add_argument("--replace-prob", type=float, default=0.5)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--start", type=int, default=None)
    p.add_argument("--attribute", default="degree")
    p.add_argument("--step-cap", type=int, default=1_000_000)


def _add_common_flags(p: argparse.ArgumentParser, suppress: bool = False) -> None:
    # Also attached to every subcommand (with SUPPRESS defaults) so the
    # flags work on either side of the subcommand word.
    default = argparse.SUPPRESS if suppress else None
    p.add_argument("--server", default=default, help="remote service URL; default runs in-process")
    p.add_argument("--config", default=default, help="flat key=value file pre-filling flags")
    p.add_argument("--out", default=default, help="directory for returned file artifacts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rewalk", description=__doc__)
    _add_common_flags(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name: str, **kwargs) -> argparse.ArgumentParser:
        p = sub.add_parser(name, **kwargs)
        _add_common_flags(p, suppress=True)
        return p

    g = add_parser("generate", help="emit a synthetic graph as an edge list")
    g.add_argument("--barbell", type=int, default=None, help="clique size m")
    g.add_argument("--latent", default=None, help="latent-space params, e.g. n=100,a=4,b=5,r=0.7")
    g.add_argument("--giant-component", action="store_true")

    s = add_parser("sample", help="run one walk and export its samples")
    _add_graph_flags(s)
    _add_walk_flags(s)

    e = add_parser("estimate", help="estimate an attribute mean from one walk")
    _add_graph_flags(e)
    _add_walk_flags(e)

    sp = add_parser("spectral", help="conductance / SLEM / mixing report for a graph")
    _add_graph_flags(sp)
    sp.add_argument("--delta-t", type=int, default=0, help="also report the deviation series up to t")
    sp.add_argument("--conductance", dest="conductance", action="store_true", default=None)
    sp.add_argument("--no-conductance", dest="conductance", action="store_false")

    x = add_parser("experiment", help="scheme comparison over repeated runs")
    _add_graph_flags(x)
    x.add_argument("--scheme", default="srw,mto", help="comma-separated scheme list")
    x.add_argument("--attribute", default="degree")
    x.add_argument("--runs", type=int, default=20)
    x.add_argument("--seed", type=int, default=0)
    x.add_argument("--sample-size", type=int, default=100)
    x.add_argument("--geweke-threshold", default="0.1", help="comma-separated threshold list")
    x.add_argument("--jump-prob", type=float, default=0.5)
    x.add_argument("--replace-prob", type=float, default=0.5)
    x.add_argument("--budget", type=int, default=None)
    x.add_argument("--step-cap", type=int, default=1_000_000)
    x.add_argument("--presumptive-truth", action="store_true")

    v = add_parser("verify-overlay", help="run a rewiring walk to coverage and compare spectra")
    _add_graph_flags(v)
    v.add_argument("--scheme", default="mto")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--replace-prob", type=float, default=0.5)
    v.add_argument("--step-cap", type=int, default=1_000_000)

    srv = add_parser("serve", help="run the HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)

    return parser


_SUBCOMMANDS = ("generate", "sample", "estimate", "spectral", "experiment", "verify-overlay", "serve")


def _inject_config(argv: list[str]) -> list[str]:
    """Splice config-file entries in as flags, before the user's own flags."""
    if "--config" not in argv:
        return argv
    path = argv[argv.index("--config") + 1]
    injected: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            flag = "--" + key.strip().replace("_", "-")
            value = value.strip()
            if value.lower() in ("true", "false"):
                if value.lower() == "true":
                    injected.append(flag)
            else:
                injected.extend([flag, value])
    # insert right after the subcommand so explicit flags (later) win
    for i, token in enumerate(argv):
        if token in _SUBCOMMANDS:
            return argv[: i + 1] + injected + argv[i + 1 :]
    return argv + injected


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    argv = _inject_config(argv)
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service.app import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0

    if args.command == "generate":
        if (args.barbell is None) == (args.latent is None):
            print("generate: need exactly one of --barbell / --latent", file=sys.stderr)
            return 2
        payload = {"giant_component": bool(args.giant_component)}
        if args.barbell is not None:
            payload["barbell"] = args.barbell
        else:
            payload["latent"] = _parse_latent(args.latent)
        body = _post(args.server, "/generate", payload)
        if args.out is None:
            sys.stdout.write(body["files"]["graph.edgelist"])
        else:
            _write_files(args.out, body["files"])
        print(f"generated graph: {body['nodes']} nodes, {body['edges']} edges", file=sys.stderr)
        return 0

    if args.command in ("sample", "estimate"):
        payload = {
            "graph": graph_payload(args),
            "scheme": args.scheme,
            "seed": args.seed,
            "sample_size": args.sample_size,
            "geweke_threshold": float(args.geweke_threshold),
            "jump_prob": args.jump_prob,
            "replace_prob": args.replace_prob,
            "budget": args.budget,
            "start": args.start,
            "attribute": args.attribute,
            "step_cap": args.step_cap,
        }
        body = _post(args.server, f"/{args.command}", payload)
        _write_files(args.out, body.pop("files"))
        print(json.dumps(body, indent=2, sort_keys=True))
        return 0

    if args.command == "spectral":
        payload = {
            "graph": graph_payload(args),
            "delta_t_max": args.delta_t,
            "conductance": args.conductance,
        }
        body = _post(args.server, "/spectral", payload)
        _write_files(args.out, body.pop("files"))
        print(json.dumps(body, indent=2, sort_keys=True))
        return 0

    if args.command == "experiment":
        payload = {
            "graph": graph_payload(args),
            "schemes": [s for s in args.scheme.split(",") if s],
            "attribute": args.attribute,
            "geweke_thresholds": [float(t) for t in str(args.geweke_threshold).split(",") if t],
            "runs": args.runs,
            "seed": args.seed,
            "sample_size": args.sample_size,
            "jump_prob": args.jump_prob,
            "replace_prob": args.replace_prob,
            "budget": args.budget,
            "step_cap": args.step_cap,
            "presumptive_truth": bool(args.presumptive_truth),
        }
        body = _post(args.server, "/experiment", payload)
        _write_files(args.out, body["files"])
        print(json.dumps(body["summary"], indent=2, sort_keys=True))
        if body["failures"]:
            print(f"{body['failures']} run(s) failed", file=sys.stderr)
            return 1
        return 0

    if args.command == "verify-overlay":
        payload = {
            "graph": graph_payload(args),
            "scheme": args.scheme,
            "seed": args.seed,
            "replace_prob": args.replace_prob,
            "step_cap": args.step_cap,
        }
        body = _post(args.server, "/verify-overlay", payload)
        _write_files(args.out, body["files"])
        print(json.dumps(body["summary"], indent=2, sort_keys=True))
        return 0

    return 2


if __name__ == "__main__":
    raise SystemExit(main())
