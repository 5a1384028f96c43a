"""Strong bisimilarity checking for a higher-order pi-calculus with
process and name parameterization."""

from .bisim import (
    BisimOracle,
    DepthBudgetExceeded,
    Distinguisher,
    Step,
    Verdict,
    bounded_ctx_probe,
    hoio_bisimilar,
    prime_factors,
)
from .normalizer import KindError, Node, NodeTable, app_substitute, dump, from_tree, nf, nf_equal, ns1, ns2, ns3, to_tree
from .parser import ParseError, SourceTerm, parse, parse_context, parse_many, parse_raw, print_term
from .semantics import In, Out, Tau, beta_normalize, canonical_key, canonicalize, open_decompositions, struct_congruent, transitions
from .syntax import (
    NIL,
    PROC,
    Input,
    NameAbs,
    NameApp,
    Nil,
    Output,
    Par,
    ProcAbs,
    ProcApp,
    SortContext,
    SortError,
    Var,
    depth,
    free_vars,
    infer_sorts,
    is_guarded,
    par,
    sort_check,
    subst_name,
    subst_proc,
)

__all__ = [name for name in dir() if not name.startswith("_")]
