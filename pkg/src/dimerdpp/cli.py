"""Command-line front end.

    dimerdpp sample --model aztec --n 32 --a 1 --count 4 --svg
    dimerdpp kernel --limit extended-airy --grid "-2:2:0.5"
    dimerdpp fredholm --s 0
    dimerdpp verify --suite tiling-counts --n-max 8
    dimerdpp export-graph --model two-periodic --m 2 --a 0.5

Every flag can also come from a JSON file given with --config (keys are the
flag names with dashes replaced by underscores); explicit flags win.  Exit
codes: 0 success, 1 verification failure, 2 usage or configuration error,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from .quadrature import NonConvergenceError

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

SUITES = (
    "tiling-counts",
    "face-signs",
    "bo-identity",
    "toeplitz-inverse",
    "airy-limit",
    "tracy-widom",
    "gas-limit",
    "sampler",
)
LIMITS = ("airy", "extended-airy", "tracy-widom", "pearcey", "tacnode", "gue-minor", "cusp-airy", "gas")

DEFAULTS = {
    "sample": {
        "model": "aztec", "n": None, "m": None, "a": 1.0, "count": 1, "seed": 0,
        "svg": False, "height_svg": False, "out": "samples", "engine": "auto",
    },
    "kernel": {
        "model": None, "limit": None, "n": None, "a": 1.0, "points": None, "grid": None, "s": None,
        "rho1": 0.0, "rho2": 0.0, "lam": 1.0, "sigma": 0.0, "tol": 1e-11, "out": None,
    },
    "fredholm": {"kernel": "airy", "s": None, "grid": None, "nodes": None, "tol": 1e-11, "out": None},
    "verify": {
        "suite": "tiling-counts", "n_max": None, "n": None, "trials": None, "seed": 0, "a": None,
        "count": None, "out": None,
    },
    "export-graph": {"model": "aztec", "n": None, "m": None, "a": 1.0, "out": None},
}


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------- formatting


def fmt(x) -> str:
    """17 significant digits, lowercase scientific; integers verbatim."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.16e}"


def write_csv(path, header: list[str], rows, config: dict) -> str:
    lines = ["# config: " + json.dumps(config, sort_keys=True), ",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return text


def write_json(path, data: dict) -> None:
    text = json.dumps(data, indent=2, sort_keys=True, default=_json_default) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, Fraction):
        return str(o)
    raise TypeError(f"not serializable: {type(o)}")


def parse_grid(text: str) -> np.ndarray:
    """"lo:hi:step" (hi included), or a comma list."""
    try:
        if ":" in text:
            lo, hi, step = (float(t) for t in text.split(":"))
            if step <= 0 or hi < lo:
                raise ValueError
            k = int(math.floor((hi - lo) / step + 1e-9))
            return lo + step * np.arange(k + 1)
        return np.array([float(t) for t in text.split(",") if t.strip()])
    except ValueError:
        raise ConfigError(f"bad grid {text!r}; expected lo:hi:step or a comma list") from None


def parse_int_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    try:
        return [int(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"bad integer list {text!r}") from None


# ---------------------------------------------------------------- config


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dimerdpp", description="Determinantal point processes of dimer models.")
    sub = p.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS

    def common(sp):
        sp.add_argument("--config", default=S, help="JSON file with flag values")
        sp.add_argument("--out", default=S, help="output path (stdout if omitted)")

    sp = sub.add_parser("sample", help="exact samples of a tiling model", argument_default=S)
    common(sp)
    sp.add_argument("--model", choices=("aztec", "two-periodic"))
    sp.add_argument("--n", type=int, help="Aztec diamond size")
    sp.add_argument("--m", type=int, help="two-periodic size parameter (n = 4m)")
    sp.add_argument("--a", type=float, help="vertical weight / two-periodic parameter")
    sp.add_argument("--count", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--svg", action="store_true", help="one SVG tiling per sample")
    sp.add_argument("--height-svg", action="store_true", help="one SVG height map per sample")
    sp.add_argument("--engine", choices=("auto", "batch", "sequential"))

    sp = sub.add_parser("kernel", help="kernel values as CSV", argument_default=S)
    common(sp)
    sp.add_argument("--model", choices=("aztec",))
    sp.add_argument("--limit", choices=LIMITS)
    sp.add_argument("--n", type=int)
    sp.add_argument("--a", type=float)
    sp.add_argument("--points", help="JSON file with a list of points")
    sp.add_argument("--grid", help="lo:hi:step or comma list of positions")
    sp.add_argument("--s", type=float, help="Tracy-Widom argument")
    sp.add_argument("--rho1", type=float)
    sp.add_argument("--rho2", type=float)
    sp.add_argument("--lam", type=float)
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--tol", type=float)

    sp = sub.add_parser("fredholm", help="Fredholm determinants (Tracy-Widom F2)", argument_default=S)
    common(sp)
    sp.add_argument("--kernel", choices=("airy",))
    sp.add_argument("--s", type=float)
    sp.add_argument("--grid")
    sp.add_argument("--nodes", type=int)
    sp.add_argument("--tol", type=float)

    sp = sub.add_parser("verify", help="run verification suites", argument_default=S)
    common(sp)
    sp.add_argument("--suite", choices=SUITES + ("all",))
    sp.add_argument("--n-max", type=int)
    sp.add_argument("--n", help="comma list of sizes")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--a", type=float)
    sp.add_argument("--count", type=int)

    sp = sub.add_parser("export-graph", help="graph and Kasteleyn signs as JSON", argument_default=S)
    common(sp)
    sp.add_argument("--model", choices=("aztec", "two-periodic"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--a", type=float)
    return p


def resolve_config(command: str, explicit: dict) -> dict:
    """Defaults, then the --config file, then explicit flags."""
    cfg = dict(DEFAULTS[command])
    path = explicit.pop("config", None)
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        data = dict(data)
        if data.pop("command", command) != command:
            raise ConfigError("config is for another command")
        unknown = sorted(set(data) - set(cfg))
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
        cfg.update(data)
    cfg.update(explicit)
    cfg["command"] = command
    return cfg


# ---------------------------------------------------------------- models


def _build_model(cfg: dict):
    from .kasteleyn import build_aztec, build_two_periodic_aztec

    a = cfg.get("a")
    if a is None or not a > 0:
        raise ConfigError("--a must be positive")
    if cfg["model"] == "aztec":
        if cfg.get("n") is None:
            raise ConfigError("--n is required for the aztec model")
        if cfg["n"] < 1:
            raise ConfigError("--n must be positive")
        return build_aztec(cfg["n"], Fraction(str(a)))
    if cfg["model"] == "two-periodic":
        if cfg.get("m") is None:
            raise ConfigError("--m is required for the two-periodic model")
        if cfg["m"] < 1:
            raise ConfigError("--m must be positive")
        return build_two_periodic_aztec(m=cfg["m"], a=Fraction(str(a)))
    raise ConfigError(f"unknown model {cfg['model']!r}")


# ---------------------------------------------------------------- commands


def cmd_sample(cfg: dict) -> int:
    from .kasteleyn import height_function, height_svg, tiling_svg
    from .sampler import sample_many, sample_record, write_jsonl

    if cfg["count"] < 1:
        raise ConfigError("--count must be positive")
    g, K = _build_model(cfg)
    samples = sample_many(g, K, cfg["count"], cfg["seed"], engine=cfg["engine"])
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    records = [sample_record(g, c, cfg["seed"], j, cfg) for j, c in enumerate(samples)]
    write_jsonl(out / "samples.jsonl", records)
    tag = json.dumps(cfg, sort_keys=True)
    for j, c in enumerate(samples):
        if cfg["svg"]:
            (out / f"tiling_{j:04d}.svg").write_text(tiling_svg(g, c, comment=f"sample {j}; config {tag}"))
        if cfg["height_svg"]:
            (out / f"height_{j:04d}.svg").write_text(
                height_svg(height_function(g, c), comment=f"sample {j}; config {tag}")
            )
    print(f"wrote {len(samples)} sample(s) to {out}")
    return EXIT_OK


def _load_points(path) -> list:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read points {path}: {exc}") from None
    if isinstance(data, dict):
        data = data.get("points")
    if not isinstance(data, list) or not data:
        raise ConfigError("points file must hold a non-empty list (or {\"points\": [...]})")
    return data


def _kernel_model(cfg: dict) -> int:
    from .models.aztec import AztecEnsembleSpec, aztec_kernel

    if cfg["model"] != "aztec":
        raise ConfigError(f"unknown model {cfg['model']!r}")
    if cfg.get("n") is None:
        raise ConfigError("--n is required for the aztec model")
    if cfg.get("points") is None:
        raise ConfigError("--points is required for model kernels")
    pts = [tuple(int(v) for v in p) for p in _load_points(cfg["points"])]
    if any(len(p) != 2 for p in pts):
        raise ConfigError("points are (line, position) pairs")
    ev = aztec_kernel(AztecEnsembleSpec(cfg["n"], cfg["a"]), tol=min(cfg["tol"], 1e-12))
    fk = ev.on(pts)
    rows = []
    for i, x in enumerate(pts):
        for j, y in enumerate(pts):
            v = complex(fk.matrix[i, j])
            rows.append([x[0], x[1], y[0], y[1], v.real, v.imag])
    corr = complex(np.linalg.det(fk.matrix))
    rows.append(["det", "", "", "", corr.real, corr.imag])
    header = ["line_x", "pos_x", "line_y", "pos_y", "re", "im"]
    _write_mixed_csv(cfg["out"], header, rows, cfg)
    return EXIT_OK


def _write_mixed_csv(path, header, rows, cfg):
    lines = ["# config: " + json.dumps(cfg, sort_keys=True), ",".join(header)]
    lines += [",".join(v if isinstance(v, str) else fmt(v) for v in r) for r in rows]
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _tracy_widom_rows(values, cfg) -> list:
    from .limits import tracy_widom_f2

    rows = []
    for s in values:
        if cfg.get("nodes"):
            v = tracy_widom_f2(s, nodes=cfg["nodes"])
            err = abs(tracy_widom_f2(s, nodes=4 * cfg["nodes"]) - v)
        else:
            v, info = tracy_widom_f2(s, tol=cfg["tol"], return_info=True)
            err = info["error"]
        rows.append([s, v, err])
    return rows


def _kernel_limit(cfg: dict) -> int:
    from . import limits as L

    lim = cfg["limit"]
    if lim == "tracy-widom":
        if cfg.get("s") is None and cfg.get("grid") is None:
            raise ConfigError("--s or --grid is required for tracy-widom")
        vals = [cfg["s"]] if cfg.get("s") is not None else list(parse_grid(cfg["grid"]))
        write_csv(cfg["out"], ["s", "F2", "error_bound"], _tracy_widom_rows(vals, {"tol": cfg["tol"]}), cfg)
        return EXIT_OK
    if lim == "gas":
        if cfg.get("points") is None:
            raise ConfigError("--points (pairs of [white, black] vertices) is required for the gas kernel")
        G = L.GasKernel(cfg["a"])
        rows = []
        for pair in _load_points(cfg["points"]):
            try:
                (w1, w2), (b1, b2) = pair
            except (TypeError, ValueError):
                raise ConfigError("gas points are [[x1, x2], [y1, y2]] pairs") from None
            v = G((int(w1), int(w2)), (int(b1), int(b2)))
            rows.append([int(w1), int(w2), int(b1), int(b2), v.real, v.imag])
        write_csv(cfg["out"], ["w1", "w2", "b1", "b2", "re", "im"], rows, cfg)
        return EXIT_OK
    if cfg.get("grid") is None:
        raise ConfigError("--grid is required for kernel tables")
    xs = parse_grid(cfg["grid"])
    r1, r2 = cfg["rho1"], cfg["rho2"]
    if lim == "airy":
        f = lambda x, y: float(L.airy_kernel(x, y))  # noqa: E731
    elif lim == "extended-airy":
        f = lambda x, y: L.extended_airy_kernel(r1, x, r2, y)  # noqa: E731
    elif lim == "pearcey":
        f = lambda x, y: L.pearcey_kernel(r1, x, r2, y)  # noqa: E731
    elif lim == "tacnode":
        f = lambda x, y: L.tacnode_kernel(cfg["lam"], cfg["sigma"], r1, x, r2, y)  # noqa: E731
    elif lim in ("gue-minor", "cusp-airy"):
        if r1 != int(r1) or r2 != int(r2):
            raise ConfigError(f"{lim} needs integer line indices --rho1/--rho2")
        if lim == "gue-minor":
            if r1 < 1 or r2 < 1:
                raise ConfigError("gue-minor lines start at 1")
            f = lambda x, y: L.gue_minor_kernel(int(r1), x, int(r2), y)  # noqa: E731
        else:
            f = lambda x, y: L.cusp_airy_kernel(int(r1), x, int(r2), y)  # noqa: E731
    else:
        raise ConfigError(f"unknown limit {lim!r}")
    rows = [[x, y, f(float(x), float(y))] for x in xs for y in xs]
    write_csv(cfg["out"], ["x", "y", "K"], rows, cfg)
    return EXIT_OK


def cmd_kernel(cfg: dict) -> int:
    if (cfg.get("model") is None) == (cfg.get("limit") is None):
        raise ConfigError("give exactly one of --model and --limit")
    return _kernel_model(cfg) if cfg.get("model") else _kernel_limit(cfg)


def cmd_fredholm(cfg: dict) -> int:
    if cfg.get("s") is None and cfg.get("grid") is None:
        raise ConfigError("--s or --grid is required")
    vals = [cfg["s"]] if cfg.get("s") is not None else list(parse_grid(cfg["grid"]))
    write_csv(cfg["out"], ["s", "F2", "error_bound"], _tracy_widom_rows(vals, cfg), cfg)
    return EXIT_OK


def cmd_export_graph(cfg: dict) -> int:
    from .kasteleyn import graph_to_json

    g, K = _build_model(cfg)
    data = json.loads(graph_to_json(g, K))
    data["config"] = cfg
    write_json(cfg["out"], data)
    return EXIT_OK


# ---------------------------------------------------------------- verification suites


def suite_tiling_counts(n_max: int = 8) -> dict:
    from .kasteleyn import build_aztec, exact_partition_function

    t = time.perf_counter()
    rows = []
    for n in range(1, n_max + 1):
        _, K = build_aztec(n, 1)
        z = exact_partition_function(K)
        rows.append({"n": n, "det": str(z), "expected": str(2 ** (n * (n + 1) // 2)), "ok": z == 2 ** (n * (n + 1) // 2)})
    return {"passed": all(r["ok"] for r in rows), "seconds": time.perf_counter() - t, "rows": rows}


def suite_face_signs(n_max: int = 6) -> dict:
    from .kasteleyn import build_aztec, build_two_periodic_aztec, check_face_signs

    rows = [{"model": "aztec", "n": n, "ok": check_face_signs(build_aztec(n, Fraction(1, 2))[1])} for n in range(1, n_max + 1)]
    rows.append({"model": "two-periodic", "m": 1, "ok": check_face_signs(build_two_periodic_aztec(1)[1])})
    return {"passed": all(r["ok"] for r in rows), "rows": rows}


def suite_bo_identity(trials: int = 50, n_max: int = 20, seed: int = 0, tol: float = 1e-9) -> dict:
    from .toeplitz import borodin_okounkov, random_symbol

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        g = random_symbol(rng)
        for n in sorted({1, max(1, n_max // 3), max(1, 2 * n_max // 3), n_max}):
            lhs, rhs = borodin_okounkov(g, n)
            worst = max(worst, abs(lhs - rhs) / max(abs(lhs), 1e-300))
    return {"passed": worst <= tol, "max_relative_error": worst, "trials": trials, "n_max": n_max}


def suite_toeplitz_inverse(trials: int = 25, n_max: int = 12, seed: int = 0, tol: float = 1e-10) -> dict:
    from .toeplitz import finite_toeplitz_bilinear, random_symbol

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        f = random_symbol(rng)
        n = int(rng.integers(1, n_max + 1))
        z = complex(*rng.uniform(-1, 1, 2))
        w = complex(*rng.uniform(-1, 1, 2)) + 0.1
        lhs, rhs = finite_toeplitz_bilinear(f, n, z, w)
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    return {"passed": worst <= tol, "max_relative_error": worst, "trials": trials, "n_max": n_max}


def suite_airy_limit(sizes=(100, 200, 400, 800)) -> dict:
    from .limits import verify_airy_limit

    rep = verify_airy_limit(1.0, tuple(sizes))
    d = rep.to_dict()
    d["passed"] = bool(rep.monotone and 0.2 <= rep.exponent <= 0.5 and not rep.flagged)
    return d


def suite_tracy_widom(nodes: int = 24) -> dict:
    from .limits import tracy_widom_f2

    grid = np.arange(-6, 6.0001, 0.25)
    vals = [tracy_widom_f2(s) for s in grid]
    mono = all(b > a for a, b in zip(vals, vals[1:]))
    self_err = max(abs(tracy_widom_f2(s, nodes=nodes) - tracy_widom_f2(s, nodes=4 * nodes)) for s in (-6, -3, 0, 3, 6))
    tail = abs(tracy_widom_f2(8.0) - 1)
    return {
        "passed": bool(mono and self_err <= 1e-8 and tail <= 1e-10),
        "monotone": mono, "self_oracle_error": self_err, "one_minus_F2_at_8": tail,
    }


def suite_gas_limit(a: float = 0.5, sizes=(8, 16, 24)) -> dict:
    from .limits import gas_decay_rate, verify_gas_limit

    rep = verify_gas_limit(a, tuple(sizes))
    rate = gas_decay_rate(a)
    return {"passed": bool(rep.monotone and rate > 0), "sizes": rep.sizes, "max_errors": rep.max_errors,
            "decay_rate": rate}


def suite_sampler(n: int = 8, count: int = 100000, seed: int = 0) -> dict:
    from .kasteleyn import build_aztec, dimer_correlation_kernel
    from .sampler import sample_many

    g, K = build_aztec(n, 1)
    E = sample_many(g, K, count, seed, as_edges=True)
    freq = np.bincount(E.ravel(), minlength=len(g.edges)) / count
    q = np.real(np.diag(dimer_correlation_kernel(K).matrix))
    se = np.sqrt(np.clip(q * (1 - q), 0, None) / count)
    z = np.abs(freq - q) / np.where(se > 0, se, 1)
    return {"passed": bool(np.max(z) < 4), "max_z": float(np.max(z)), "edges": len(g.edges), "count": count}


def cmd_verify(cfg: dict) -> int:
    names = SUITES if cfg["suite"] == "all" else (cfg["suite"],)
    results = {}
    for name in names:
        if name == "tiling-counts":
            results[name] = suite_tiling_counts(cfg["n_max"] or 8)
        elif name == "face-signs":
            results[name] = suite_face_signs(cfg["n_max"] or 6)
        elif name == "bo-identity":
            results[name] = suite_bo_identity(cfg["trials"] or 50, cfg["n_max"] or 20, cfg["seed"])
        elif name == "toeplitz-inverse":
            results[name] = suite_toeplitz_inverse(cfg["trials"] or 25, cfg["n_max"] or 12, cfg["seed"])
        elif name == "airy-limit":
            sizes = parse_int_list(cfg["n"]) if cfg["n"] else [100, 200, 400, 800]
            if len(sizes) < 2 or any(k < 10 for k in sizes):
                raise ConfigError("airy-limit needs at least two sizes >= 10")
            results[name] = suite_airy_limit(sizes)
        elif name == "tracy-widom":
            results[name] = suite_tracy_widom()
        elif name == "gas-limit":
            sizes = parse_int_list(cfg["n"]) if cfg["n"] else [8, 16, 24]
            if len(sizes) < 2 or any(k % 4 for k in sizes):
                raise ConfigError("gas-limit needs at least two sizes divisible by 4")
            results[name] = suite_gas_limit(cfg["a"] or 0.5, sizes)
        elif name == "sampler":
            results[name] = suite_sampler(cfg["n_max"] or 8, cfg["count"] or 100000, cfg["seed"])
        else:
            raise ConfigError(f"unknown suite {name!r}")
    ok = all(r["passed"] for r in results.values())
    write_json(cfg["out"], {"config": cfg, "passed": ok, "suites": results})
    return EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {
    "sample": cmd_sample,
    "kernel": cmd_kernel,
    "fredholm": cmd_fredholm,
    "verify": cmd_verify,
    "export-graph": cmd_export_graph,
}


def _attach_negative_values(argv: list[str]) -> list[str]:
    """--grid -2:2:0.5 -> --grid=-2:2:0.5 (argparse reads a leading '-' as an option)."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if tok.startswith("--") and "=" not in tok and nxt is not None and re.match(r"^-[\d.]", nxt):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = _build_parser()
    argv = _attach_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    explicit = {k: v for k, v in vars(ns).items() if k != "command"}
    try:
        cfg = resolve_config(ns.command, explicit)
        return COMMANDS[ns.command](cfg)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"dimerdpp {ns.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergenceError as exc:
        print(f"dimerdpp {ns.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError) as exc:
        print(f"dimerdpp {ns.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
