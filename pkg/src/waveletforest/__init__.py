"""Succinct rank/select indexes built on Huffman-shaped wavelet trees.

The main structure partitions the text into fixed blocks with one pointerless
wavelet tree per block, hierarchical rank directories, and a six-step select;
a standalone whole-text tree serves as the baseline comparator.
"""

from .bitvector import PlainBitVector, RrrBitVector, build_plain, build_rrr
from .bwt import BwtResult, TextStats, bwt, suffix_array, text_stats
from .forest import ForestParams, SelectTrace, WaveletForest, build_forest
from .huffman import CanonicalHuffmanCode, build_canonical, min_length_for_height
from .oracle import ScanningOracle
from .serialize import IndexFormatError, dumps_index, load_index, loads_index, save_index
from .wavelet_tree import HuffmanWaveletTree, build_wt

__version__ = "0.1.0"

__all__ = [
    "PlainBitVector", "RrrBitVector", "build_plain", "build_rrr",
    "BwtResult", "TextStats", "bwt", "suffix_array", "text_stats",
    "ForestParams", "SelectTrace", "WaveletForest", "build_forest",
    "CanonicalHuffmanCode", "build_canonical", "min_length_for_height",
    "ScanningOracle",
    "IndexFormatError", "dumps_index", "load_index", "loads_index", "save_index",
    "HuffmanWaveletTree", "build_wt",
]
