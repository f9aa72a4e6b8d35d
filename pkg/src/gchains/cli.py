"""Command-line front end.

    gchains check    --config kernel.json --K 2 [--seed S]
    gchains simulate --config kernel.json --past "0^inf 11" --length 1000 --seed S
    gchains diagnose --config kernel.json --x "1^inf" --y "(01)^inf" --horizon 40 --seed S
    gchains classify-renewal --q '{"kind": "constant", "params": {"c": "0.5"}}'
    gchains tv       --config kernel.json --x "0^inf" --y "1^inf" --n 3 --k 1 [--mode mc --seed S]
    gchains replay   manifest.json --out DIR

Every run writes ``report.json`` (a ``header`` with the timestamp and a
deterministic ``body``) and ``manifest.json`` with everything needed to
reproduce the body byte for byte.  Exit codes: 0 conditions hold (or the
command succeeded), 2 violated, 3 undecided, 1 malformed input.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .errors import GChainsError, SpecError
from .models.renewal import classify_renewal
from .models.specs import _q_rule, kernel_from_spec
from .simulation import (
    MonteCarloTV,
    SimConfig,
    acs_dk_series,
    simulate_path,
    tv_window,
)
from .structure import (
    MonteCarloHitting,
    build_bound_matrices,
    check_assumption_B,
    check_assumption_C,
    check_eri,
    probe_pasts,
)
from .words import PastSpec, format_past, format_word, parse_past

SCHEMA_VERSION = 1
EXIT = {"conditions_hold": 0, "ok": 0, "violated": 2, "undecided": 3}


class UsageError(Exception):
    pass


@dataclass
class Outcome:
    status: str
    body: dict
    files: dict = field(default_factory=dict)  # name -> text


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=True) + "\n"


def _clean(x):
    """JSON-friendly copy: NaN becomes null, tuples become lists."""
    if isinstance(x, float) and math.isnan(x):
        return None
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def _need_seed(seed):
    if seed is None:
        raise UsageError("this command is randomized; pass --seed")
    return seed


# -- commands -----------------------------------------------------------------


def cmd_check(doc: dict, params: dict, seed) -> Outcome:
    kernel = kernel_from_spec(doc)
    K = int(params["K"])
    labels = kernel.labels
    under, over = build_bound_matrices(kernel, K)
    hitting = MonteCarloHitting(trials=int(params.get("trials") or 10**4), seed=seed) if seed is not None else "analytic_markov"
    eri = check_eri(under, over, kernel, hitting)
    if eri.verdict == "Undecided" and eri.reason.startswith("analytic hitting"):
        raise UsageError("Monte-Carlo hitting evidence is needed for this kernel; pass --seed")
    labels = under.labels or labels
    # (B) and (C) are checked against the class found even when (A) fails
    p_k = eri.p_k or (eri.candidates[0] if len(eri.candidates) == 1 else [])
    b = check_assumption_B(kernel, K, p_k)
    probes = probe_pasts(kernel, K, p_k)
    c = check_assumption_C(kernel, K, p_k, probes, int(params.get("max_len") or 6))
    verdicts = {
        "A": {"ERI": "holds", "NotERI": "violated"}.get(eri.verdict, "undecided"),
        "B": b.verdict,
        "C": c.verdict,
    }
    if all(v == "holds" for v in verdicts.values()):
        status = "conditions_hold"
    elif any(v == "violated" for v in verdicts.values()):
        status = "violated"
    else:
        status = "undecided"
    c_json = c.to_json(labels)
    if "witnesses" in c_json:
        c_json["witnesses"] = {format_past(x, labels): format_word(v, labels) for x, v in c_json["witnesses"].items()}
    if isinstance(c.witness, PastSpec):
        c_json["witness"] = format_past(c.witness, labels)
    body = {
        "command": "check",
        "kernel": kernel.tag,
        "K": K,
        "verdict": status,
        "assumptions": verdicts,
        "eri": eri.to_json(),
        "assumption_B": b.to_json(labels),
        "assumption_C": c_json,
        "matrices": {"under": under.to_json(), "over": over.to_json()},
        "corollaries": {
            "finite_alphabet_continuous": bool(kernel.alphabet.is_finite and kernel.continuous),
            "no_isolated_zeros": not kernel.zeros.isolated_zeros,
        },
    }
    return Outcome(status, _clean(body))


def cmd_simulate(doc: dict, params: dict, seed) -> Outcome:
    seed = _need_seed(seed)
    kernel = kernel_from_spec(doc)
    past = parse_past(params["past"], kernel.labels)
    length = int(params["length"])
    path = simulate_path(kernel, past, length, seed, burn_in=int(params.get("burn_in") or 0), tol=params["tol"])
    counts: dict = {}
    for a in path.symbols:
        counts[kernel.label(a)] = counts.get(kernel.label(a), 0) + 1
    body = {
        "command": "simulate",
        "kernel": kernel.tag,
        "past": format_past(past, kernel.labels),
        "length": length,
        "frequencies": {k: v / length for k, v in sorted(counts.items())},
        "max_step_defect": path.defect,
        "output": "path.txt",
    }
    text = "".join(kernel.label(a) + "\n" for a in path.symbols)
    return Outcome("ok", _clean(body), {"path.txt": text})


def cmd_diagnose(doc: dict, params: dict, seed) -> Outcome:
    seed = _need_seed(seed)
    kernel = kernel_from_spec(doc)
    x = parse_past(params["x"], kernel.labels)
    y = parse_past(params["y"], kernel.labels)
    cfg = SimConfig(seed=seed, replicas=int(params["replicas"]), tol=params["tol"])
    n = params.get("n")
    series = acs_dk_series(
        kernel, x, y, None if n is None else int(n), int(params["horizon"]), not params.get("plain"), cfg
    )
    body = {"command": "diagnose", "kernel": kernel.tag, "x": format_past(x, kernel.labels), "y": format_past(y, kernel.labels)}
    body.update(series.to_json())
    body["sim_config"] = cfg.to_json()
    body["note"] = "verdict is heuristic evidence from a finite horizon"
    return Outcome("ok", _clean(body), {"dk.csv": series.to_csv()})


def cmd_classify_renewal(doc, params: dict, seed) -> Outcome:
    q_doc = params["q"]
    if isinstance(q_doc, str):
        q_doc = json.loads(q_doc)
    rule = _q_rule(q_doc, params.get("q_inf"))
    res = classify_renewal(rule, int(params.get("terms") or 10**6))
    body = {"command": "classify-renewal", "q": rule.spec()}
    body.update(res.to_json())
    return Outcome("ok", _clean(body))


def cmd_tv(doc: dict, params: dict, seed) -> Outcome:
    kernel = kernel_from_spec(doc)
    x = parse_past(params["x"], kernel.labels)
    y = parse_past(params["y"], kernel.labels)
    mode = params.get("mode") or "exact"
    body = {"command": "tv", "kernel": kernel.tag, "x": format_past(x, kernel.labels), "y": format_past(y, kernel.labels)}
    if mode == "exact":
        rep = tv_window(kernel, x, y, int(params["n"]), int(params["k"]), "exact", tol=params["tol"])
    else:
        cfg = SimConfig(seed=_need_seed(seed), replicas=int(params["replicas"]), tol=params["tol"])
        rep = tv_window(kernel, x, y, int(params["n"]), int(params["k"]), MonteCarloTV(cfg))
        body["sim_config"] = cfg.to_json()
        body["note"] = "empirical-histogram TV; standard_error bounds each cell by the triangle inequality"
    body.update({"window_start": int(params["n"]), "window_len": int(params["k"])})
    body.update(rep.to_json())
    return Outcome("ok", _clean(body))


COMMANDS = {
    "check": cmd_check,
    "simulate": cmd_simulate,
    "diagnose": cmd_diagnose,
    "classify-renewal": cmd_classify_renewal,
    "tv": cmd_tv,
}


# -- plumbing -------------------------------------------------------------------


def run(command: str, doc, params: dict, seed, out: Path | None, fmt: str = "json", stdout=None) -> int:
    outcome = COMMANDS[command](doc, params, seed)
    header = {"timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(), "schema_version": SCHEMA_VERSION}
    report = {"header": header, "body": outcome.body}
    stdout = stdout or sys.stdout
    if out is None:
        if fmt == "csv" and outcome.files:
            stdout.write(next(f for n, f in outcome.files.items() if n.endswith(".csv") or n.endswith(".txt")))
        else:
            stdout.write(dumps(report))
        return EXIT[outcome.status]
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(dumps(report), encoding="utf-8")
    written = ["report.json"]
    for name, text in outcome.files.items():
        (out / name).write_text(text, encoding="utf-8")
        written.append(name)
    manifest = {
        "command": command,
        "kernel_spec": doc,
        "parameters": params,
        "seed": seed,
        "artifact_version": __version__,
        "outputs": written + ["manifest.json"],
    }
    (out / "manifest.json").write_text(dumps(manifest), encoding="utf-8")
    stdout.write(dumps({"verdict": outcome.status, "outputs": [str(out / w) for w in written]}))
    return EXIT[outcome.status]


def _load_doc(path):
    if path is None:
        raise UsageError("--config is required")
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read kernel config {path}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="kernel JSON document")
    common.add_argument("--seed", type=int, help="64-bit seed (required by randomized commands)")
    common.add_argument("--out", type=Path, help="output directory for report, extra files and manifest")
    common.add_argument("--replicas", type=int, default=1000)
    common.add_argument("--tol", type=float, default=1e-12)
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = argparse.ArgumentParser(prog="gchains", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="bound matrices, e.r.i. and assumptions (A)-(C)")
    c.add_argument("--K", type=int, required=True)
    c.add_argument("--max-len", type=int, default=6, dest="max_len")
    c.add_argument("--trials", type=int, default=10**4)

    s = sub.add_parser("simulate", parents=[common], help="sample one path")
    s.add_argument("--past", required=True, help='e.g. "0^inf 11"')
    s.add_argument("--length", type=int, required=True)
    s.add_argument("--burn-in", type=int, default=0, dest="burn_in")

    d = sub.add_parser("diagnose", parents=[common], help="ACS d_k series")
    d.add_argument("--x", required=True)
    d.add_argument("--y", required=True)
    d.add_argument("--horizon", type=int, default=40)
    d.add_argument("--n", type=int, default=None)
    g = d.add_mutually_exclusive_group()
    g.add_argument("--sqrt", action="store_false", dest="plain", help="differences of sqrt(g) (default)")
    g.add_argument("--plain", action="store_true", dest="plain", help="differences of g")
    d.set_defaults(plain=False)

    r = sub.add_parser("classify-renewal", parents=[common], help="four-case renewal classification")
    r.add_argument("--q", required=True, help="q rule as JSON or @file")
    r.add_argument("--q-inf", dest="q_inf", default=None)
    r.add_argument("--terms", type=int, default=10**6)

    t = sub.add_parser("tv", parents=[common], help="total variation on a window")
    t.add_argument("--x", required=True)
    t.add_argument("--y", required=True)
    t.add_argument("--n", type=int, required=True, help="window start")
    t.add_argument("--k", type=int, default=1, help="window length")
    t.add_argument("--mode", choices=("exact", "mc"), default="exact")

    rp = sub.add_parser("replay", help="re-run a manifest")
    rp.add_argument("manifest", type=Path)
    rp.add_argument("--out", type=Path, required=True)
    return p


GLOBAL = {"config", "seed", "out", "format", "command"}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            m = json.loads(args.manifest.read_text(encoding="utf-8"))
            return run(m["command"], m["kernel_spec"], m["parameters"], m["seed"], args.out)
        params = {k: v for k, v in vars(args).items() if k not in GLOBAL}
        if args.command == "classify-renewal":
            q = params["q"]
            params["q"] = json.loads(Path(q[1:]).read_text() if q.startswith("@") else q)
            doc = None
        else:
            doc = _load_doc(args.config)
        return run(args.command, doc, params, args.seed, args.out, args.format)
    except (UsageError, SpecError, json.JSONDecodeError, ValueError, OSError, KeyError) as exc:
        print(f"gchains: error: {exc}", file=sys.stderr)
        return 1
    except GChainsError as exc:
        print(f"gchains: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
