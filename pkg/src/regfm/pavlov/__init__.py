from .chain import (
    ChainFamily, Hierarchy, build_chain, chain_ascend, chain_descend, chain_step_residual,
    hierarchy_build, reduction_operator,
)
from .gensol import FunctionFamily, generate_block_V, generate_V
from .golden import GOLDEN, golden_specs, golden_text, golden_V

__all__ = [
    "ChainFamily", "Hierarchy", "build_chain", "chain_ascend", "chain_descend",
    "chain_step_residual", "hierarchy_build", "reduction_operator", "FunctionFamily",
    "generate_block_V", "generate_V", "GOLDEN", "golden_specs", "golden_text", "golden_V",
]
