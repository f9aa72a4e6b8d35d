"""Chains of infinite order with forbidden transitions.

Kernels over finite or countable alphabets, their zero structure (bound
matrices, e.r.i. decision, assumption checks) and simulation diagnostics.
"""

from .errors import *  # noqa: F401,F403
from .intervals import Interval, ProbInterval
from .kernel import (
    Alphabet,
    Kernel,
    Row,
    Sampled,
    VariationBounds,
    eval_kernel,
    iterate_kernel,
    variation_rate,
    w2_term,
)
from .words import History, PastSpec, format_past, format_word, parse_past, parse_word
from .zeros import CylinderRule, ZeroDeclaration

__version__ = "0.1.0"
