"""Public-key encryption with masked high-memory convolutional codes."""

from .cipher import Ciphertext, DecryptFailure, crc_append, crc_check, decrypt, encrypt
from .convcode import ConvCodeSpec, HighMemSpec, encode, free_distance, viterbi_decode
from .gf2core import Gf2Poly, Permutation
from .keys import CATALOG, CRC16_CCITT, SystemParams, keygen

__version__ = "0.1.0"
