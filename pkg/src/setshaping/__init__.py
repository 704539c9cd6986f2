"""Toolkit for length-increasing string shaping over finite alphabets.

Builds the rank-preserving bijection from length-N strings onto the m^N
lowest-information-content strings of length N+K, analyzes the resulting
mean information content exactly, benchmarks the effect on adaptive entropy
coding, and measures membership-based error detection.
"""

from .analysis import (
    MonteCarloEstimate,
    ShapingTableRow,
    average_info_shaped,
    average_info_shaped_nonuniform,
    average_info_unshaped,
    shaping_table,
)
from .classtable import (
    CapacityExceeded,
    ClassEntry,
    ClassTable,
    RankOutOfRange,
    build_class_table,
    class_weight,
    composition_count,
    enumerate_compositions,
    global_rank,
    global_unrank,
    multinomial_count,
    rank_in_class,
    unrank_in_class,
)
from .codec import (
    ArmStats,
    BenchReport,
    CodecModelConfig,
    EncodedBits,
    MalformedBitstream,
    decode,
    decode_frame,
    encode,
    ideal_code_length,
    pack_frame,
    run_codec_benchmark,
    unpack_frame,
)
from .model import (
    Alphabet,
    Composition,
    InfoBits,
    SourceEnsemble,
    SymbolString,
    ZeroProbabilitySymbol,
    composition_info,
    composition_of,
    empirical_info_content,
    sequence_probability,
    shannon_entropy,
    source_info_content,
)
from .shaping import NotInShapedSet, ShapingParams, is_in_shaped_set, shape, unshape
from .testability import (
    DetectionReport,
    DetectionRow,
    ErrorModel,
    detection_rate_exact_small,
    inject_errors,
    run_detection_experiment,
    wilson_interval,
)

__version__ = "0.1.0"
