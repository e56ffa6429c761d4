"""Targeted sequential rule mining over SPMF sequence databases."""
from .miner import MinerConfig, MiningResult, MiningStats, Variant, mine
from .rulecore import QueryRule, SequentialRule
from .seqdb import Sequence, SequenceDatabase, parse_spmf, read_spmf_file, write_spmf

__all__ = [
    "MinerConfig", "MiningResult", "MiningStats", "Variant", "mine",
    "QueryRule", "SequentialRule",
    "Sequence", "SequenceDatabase", "parse_spmf", "read_spmf_file", "write_spmf",
]
__version__ = "0.1.0"
