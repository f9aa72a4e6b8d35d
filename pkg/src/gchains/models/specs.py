"""JSON kernel specifications: ``{"kernel": <tag>, "params": {...}}``.

Real parameters are decimal strings parsed to binary64 (plain numbers are
accepted too).
"""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import SpecError
from ..kernel import Kernel
from .autoregressive import make_autoregressive_kernel
from .coefficients import coefficients_from_spec
from .graph_walk import make_graph_walk_kernel
from .markov import make_markov_kernel
from .poisson import make_poisson_kernel
from .renewal import ConstantQ, HarmonicQ, RationalQ, make_renewal_kernel
from .sparse_chain import make_sparse_chain_kernel


def real(value) -> float:
    if isinstance(value, bool):
        raise SpecError("expected a real, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value.strip())
        except ValueError:
            raise SpecError(f"not a decimal string: {value!r}") from None
    raise SpecError(f"expected a real, got {type(value).__name__}")


def _q_rule(doc: dict, q_inf):
    kind = doc.get("kind")
    params = doc.get("params", {})
    extra = {} if q_inf is None else {"q_inf": real(q_inf)}
    if kind == "constant":
        return ConstantQ(real(params["c"]), **extra)
    if kind == "harmonic_shift":
        return HarmonicQ(real(params["a"]), real(params["b"]), real(params.get("offset", 0)), **extra)
    if kind == "custom_rational":
        return RationalQ(tuple(real(c) for c in params["num"]), tuple(real(c) for c in params["den"]), **extra)
    raise SpecError(f"unknown q kind {kind!r}")


def kernel_from_spec(doc: dict) -> Kernel:
    if not isinstance(doc, dict) or "kernel" not in doc:
        raise SpecError("kernel spec needs a 'kernel' tag")
    tag = doc["kernel"]
    p = doc.get("params", {})
    try:
        if tag == "markov":
            rows = [[real(x) for x in r] for r in p["rows"]]
            return make_markov_kernel(int(p["order"]), rows, labels=p.get("labels"))
        if tag == "graph_walk":
            return make_graph_walk_kernel(
                p["edges"],
                bias=real(p.get("bias", 0)),
                decay=real(p.get("decay", "0.5")),
                size=p.get("size"),
                labels=p.get("labels"),
            )
        if tag == "sparse_chain":
            return make_sparse_chain_kernel()
        if tag == "autoregressive":
            return make_autoregressive_kernel(coefficients_from_spec(p["alpha"], start=1), int(p["epsilon"]))
        if tag == "renewal":
            return make_renewal_kernel(_q_rule(p["q"], p.get("q_inf")))
        if tag == "poisson_infinite":
            return make_poisson_kernel(coefficients_from_spec(p["beta"], start=0), real(p["gamma"]))
    except (KeyError, TypeError) as exc:
        raise SpecError(f"malformed {tag} parameters: {exc}") from None
    raise SpecError(f"unknown kernel tag {tag!r}")


def load_kernel(path) -> Kernel:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: {exc}") from None
    return kernel_from_spec(doc)
