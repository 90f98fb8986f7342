"""Thin command-line client for the classifier service.

Each subcommand builds a request, sends it to the service, and renders
the response. By default the service runs in-process (no server needed);
pass --server URL to talk to a running instance instead, or use the
`serve` subcommand to start one.

Exit codes: 2 bad arguments, 3 data errors, 4 numeric failures.
"""

from __future__ import annotations

import argparse
import json
import sys

import httpx

EXIT_BY_KIND = {"args": 2, "data": 3, "numeric": 4}

BENCH_FIELDS = ("dataset", "method", "split", "zero_one_loss", "log_loss",
                "fit_seconds", "n", "p", "k")
CURVE_FIELDS = ("method", "n_train", "p", "zero_one_loss", "log_loss", "fit_seconds")


def _client(args: argparse.Namespace) -> httpx.Client:
    if args.server:
        return httpx.Client(base_url=args.server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        # starlette deprecation about its httpx test backend; in-process
        # transport is a supported production path for this CLI
        warnings.filterwarnings(
            "ignore", message="Using `httpx` with `starlette.testclient`"
        )
        from fastapi.testclient import TestClient

        from .service.app import app

        return TestClient(app)


def _post(args: argparse.Namespace, path: str, payload: dict) -> dict:
    with _client(args) as client:
        resp = client.post(path, json=payload)
    if resp.status_code >= 400:
        try:
            detail = resp.json()["detail"]
        except Exception:
            print(f"error: {resp.text}", file=sys.stderr)
            sys.exit(1)
        if isinstance(detail, dict) and "kind" in detail:
            print(f"error: {detail['message']}", file=sys.stderr)
            sys.exit(EXIT_BY_KIND.get(detail["kind"], 1))
        # request validation failures are bad arguments
        print(f"error: {detail}", file=sys.stderr)
        sys.exit(2)
    return resp.json()


def _parse_grid(text: str | None) -> dict | None:
    if text is None:
        return None
    parts = text.split(",")
    if len(parts) != 3:
        print("error: --lambda-grid expects LO,HI,COUNT", file=sys.stderr)
        sys.exit(2)
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        print(f"error: malformed --lambda-grid {text!r}", file=sys.stderr)
        sys.exit(2)
    return {"lo": lo, "hi": hi, "count": count}


def _jsonl(record: dict, fields: tuple[str, ...]) -> str:
    return json.dumps({f: record[f] for f in fields}, separators=(",", ":"))


def cmd_fit(args: argparse.Namespace) -> None:
    payload = {
        "data": args.data,
        "label": args.label,
        "method": args.method,
        "out": args.out,
        "lambda_grid": _parse_grid(args.lambda_grid),
        "normalize": args.normalize,
        "seed": args.seed,
        "categorical_columns": args.categorical or [],
    }
    out = _post(args, "/fit", payload)
    report = out["report"]
    print(f"fitted {out['method']} on {out['n']} rows, {out['p']} features, {out['k']} classes")
    print(f"  {'lambda':>12}  {'scale':>12}  {'log_loss':>12}  {'press':>12}")
    for entry in report["entries"]:
        scale = "-" if entry["scale"] is None else f"{entry['scale']:12.6g}"
        press = "-" if entry["press"] is None else f"{entry['press']:12.6g}"
        print(f"  {entry['lam']:12.6g}  {scale:>12}  {entry['log_loss']:12.6g}  {press:>12}")
    chosen = report["entries"][report["chosen"]]
    line = (
        f"selected lambda={report['lambda_star']:.6g} by {report['criterion']}"
        f" (log_loss={chosen['log_loss']:.6g})"
    )
    if report["c_star"] is not None:
        line += f", scale c={report['c_star']:.6g}"
    print(line)
    print(f"fit took {report['fit_seconds']:.3f}s; model written to {out['model_path']}")


def cmd_eval(args: argparse.Namespace) -> None:
    payload = {"model": args.model, "data": args.data, "label": args.label}
    out = _post(args, "/eval", payload)
    print(_jsonl(out, BENCH_FIELDS))


def cmd_benchmark(args: argparse.Namespace) -> None:
    payload = {
        "data": args.data,
        "label": args.label,
        "methods": args.methods.split(","),
        "folds": args.folds,
        "seed": args.seed,
        "lambda_grid": _parse_grid(args.lambda_grid),
        "normalize": args.normalize,
        "include_timing": not args.no_timing,
        "categorical_columns": args.categorical or [],
    }
    out = _post(args, "/benchmark", payload)
    for report in out["reports"]:
        print(_jsonl(report, BENCH_FIELDS))


def cmd_learning_curve(args: argparse.Namespace) -> None:
    try:
        sizes = [int(s) for s in args.sizes.split(",")]
    except ValueError:
        print(f"error: malformed --sizes {args.sizes!r}", file=sys.stderr)
        sys.exit(2)
    payload = {
        "data": args.data,
        "label": args.label,
        "sizes": sizes,
        "method": args.method,
        "seed": args.seed,
        "eval_frac": args.eval_frac,
        "lambda_grid": _parse_grid(args.lambda_grid),
        "normalize": args.normalize,
        "categorical_columns": args.categorical or [],
    }
    out = _post(args, "/learning-curve", payload)
    lines = [",".join(CURVE_FIELDS)]
    for row in out["rows"]:
        lines.append(",".join(_csv_cell(row[f]) for f in CURVE_FIELDS))
    text = "\n".join(lines)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print(f"wrote {len(out['rows'])} rows to {args.out}")
    else:
        print(text)


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def cmd_serve(args: argparse.Namespace) -> None:
    import uvicorn

    uvicorn.run("preval.service.app:app", host=args.host, port=args.port)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="preval", description="Prevalidated ridge classifier toolkit"
    )
    parser.add_argument("--server", default=None, help="Service URL (default: in-process)")
    sub = parser.add_subparsers(dest="cmd", required=True)

    common_fit = dict(
        normalize=("--normalize", dict(choices=["zscore", "median", "none"], default="zscore")),
        grid=("--lambda-grid", dict(default=None, metavar="LO,HI,COUNT")),
        seed=("--seed", dict(type=int, default=0)),
        categorical=("--categorical", dict(action="append", metavar="COL",
                                           help="Force a numeric column to one-hot")),
    )

    p_fit = sub.add_parser("fit", help="Fit a model on a CSV and write it to JSON")
    p_fit.add_argument("--data", required=True)
    p_fit.add_argument("--label", required=True)
    p_fit.add_argument("--method", choices=["preval", "lr", "ridge_raw", "ridge_naive"],
                       default="preval")
    p_fit.add_argument("--out", required=True)
    for flag, kwargs in common_fit.values():
        p_fit.add_argument(flag, **kwargs)
    p_fit.set_defaults(func=cmd_fit)

    p_eval = sub.add_parser("eval", help="Evaluate a saved model on a CSV")
    p_eval.add_argument("--model", required=True)
    p_eval.add_argument("--data", required=True)
    p_eval.add_argument("--label", default=None,
                        help="Label column (default: recorded in the model)")
    p_eval.set_defaults(func=cmd_eval)

    p_bench = sub.add_parser("benchmark", help="Stratified k-fold benchmark, JSON lines out")
    p_bench.add_argument("--data", required=True)
    p_bench.add_argument("--label", required=True)
    p_bench.add_argument("--methods", default="preval,lr,ridge_raw,ridge_naive")
    p_bench.add_argument("--folds", type=int, default=5)
    p_bench.add_argument("--no-timing", action="store_true",
                         help="Emit fit_seconds as null for byte-reproducible output")
    for flag, kwargs in common_fit.values():
        p_bench.add_argument(flag, **kwargs)
    p_bench.set_defaults(func=cmd_benchmark)

    p_curve = sub.add_parser("learning-curve", help="Nested-subset learning curve, CSV out")
    p_curve.add_argument("--data", required=True)
    p_curve.add_argument("--label", required=True)
    p_curve.add_argument("--sizes", required=True, metavar="N1,N2,...")
    p_curve.add_argument("--method", choices=["preval", "lr", "ridge_raw", "ridge_naive"],
                         default="preval")
    p_curve.add_argument("--eval-frac", type=float, default=0.25)
    p_curve.add_argument("--out", default=None, help="Write the CSV here instead of stdout")
    for flag, kwargs in common_fit.values():
        p_curve.add_argument(flag, **kwargs)
    p_curve.set_defaults(func=cmd_learning_curve)

    p_serve = sub.add_parser("serve", help="Run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> None:
    args = build_parser().parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()
