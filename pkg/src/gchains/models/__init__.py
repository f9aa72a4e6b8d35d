"""The six kernel families."""

from .autoregressive import AutoregressiveKernel, make_autoregressive_kernel
from .coefficients import Coefficients, Explicit, Geometric, PowerLaw
from .graph_walk import GraphWalkKernel, make_graph_walk_kernel
from .markov import MarkovKernel, make_markov_kernel
from .poisson import PoissonKernel, make_poisson_kernel
from .renewal import (
    ConstantQ,
    HarmonicQ,
    QRule,
    RationalQ,
    RenewalClassification,
    RenewalKernel,
    classify_renewal,
    make_renewal_kernel,
)
from .sparse_chain import SPARSE_ZEROS, SparseChainKernel, make_sparse_chain_kernel
from .specs import kernel_from_spec, load_kernel, real

__all__ = [
    "AutoregressiveKernel", "Coefficients", "ConstantQ", "Explicit", "Geometric", "GraphWalkKernel",
    "HarmonicQ", "MarkovKernel", "PoissonKernel", "PowerLaw", "QRule", "RationalQ",
    "RenewalClassification", "RenewalKernel", "SPARSE_ZEROS", "SparseChainKernel",
    "classify_renewal", "kernel_from_spec", "load_kernel", "make_autoregressive_kernel",
    "make_graph_walk_kernel", "make_markov_kernel", "make_poisson_kernel", "make_renewal_kernel",
    "make_sparse_chain_kernel", "real",
]
