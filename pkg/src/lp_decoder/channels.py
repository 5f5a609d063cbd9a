# -*- coding: utf-8 -*-
"""
Binary-input channels producing LLR vectors. Positive LLRs favor bit 0.
"""
import logging
import math

import numpy as np

from lp_decoder.codes import as_binary_word
from lp_decoder.exceptions import ChannelError

log = logging.getLogger(__name__)  # pylint: disable=invalid-name

BSC = 'bsc'
BIAWGN = 'biawgn'

MAX_SEED = 2 ** 64 - 1


class ChannelSpec(object):
    """
    Either a binary symmetric channel with crossover probability p or a
    binary-input AWGN channel at E_b/N_0 snr_db for a code of the given rate.
    """
    def __init__(self, kind, p=None, snr_db=None, rate=1.0):
        self.kind = kind
        self.p = p
        self.snr_db = snr_db
        self.rate = rate
        if kind == BSC:
            if p is None or not 0 < p < 0.5:
                raise ChannelError(
                    'crossover probability must lie in (0, 1/2)'
                )
        elif kind == BIAWGN:
            if snr_db is None or not math.isfinite(snr_db):
                raise ChannelError('SNR must be a finite number of dB')
            if not 0 < rate <= 1:
                raise ChannelError('code rate must lie in (0, 1]')
        else:
            raise ChannelError('unknown channel {!r}'.format(kind))

    @classmethod
    def parse(cls, text, default_rate=1.0):
        """
        Parses bsc:P or biawgn:SNR_DB[:RATE].
        :param text: channel description
        :param default_rate: rate used when biawgn gives none
        :return: ChannelSpec
        """
        parts = text.strip().lower().split(':')
        try:
            if parts[0] == BSC and len(parts) == 2:
                return cls(BSC, p=float(parts[1]))
            if parts[0] == BIAWGN and len(parts) in (2, 3):
                rate = float(parts[2]) if len(parts) == 3 else default_rate
                return cls(BIAWGN, snr_db=float(parts[1]), rate=rate)
        except ValueError:
            raise ChannelError('malformed channel {!r}'.format(text))
        raise ChannelError(
            'channel must be bsc:P or biawgn:SNR_DB[:RATE], got {!r}'.format(
                text
            )
        )

    def __str__(self):
        if self.kind == BSC:
            return '{}:{!r}'.format(BSC, self.p)
        return '{}:{!r}:{!r}'.format(BIAWGN, self.snr_db, self.rate)

    def __repr__(self):
        return '<ChannelSpec {}>'.format(self)

    def __eq__(self, other):
        return isinstance(other, ChannelSpec) and str(self) == str(other)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(str(self))

    @property
    def noise_variance(self):
        """
        sigma^2 = 1 / (2 rate 10^(snr_db / 10)) for the AWGN channel.
        """
        if self.kind != BIAWGN:
            raise ChannelError('noise variance is defined for biawgn only')
        return 1.0 / (2.0 * self.rate * 10 ** (self.snr_db / 10.0))

    @property
    def bsc_llr(self):
        if self.kind != BSC:
            raise ChannelError('crossover LLR is defined for bsc only')
        return math.log((1 - self.p) / self.p)


def make_rng(seed, index=0):
    """
    Counter-based generator for one trial: the stream depends only on
    (seed, index), never on scheduling.
    :param seed: non-negative integer below 2**64
    :param index: trial index
    :return: numpy Generator
    """
    if not 0 <= seed <= MAX_SEED or not 0 <= index <= MAX_SEED:
        raise ChannelError('seed and index must fit in 64 unsigned bits')
    sequence = np.random.SeedSequence([int(seed), int(index)])
    return np.random.Generator(np.random.Philox(sequence))


def transmit_and_llr(word, spec, seed, index=0):
    """
    Sends a codeword through the channel and returns the receiver LLRs.
    :param word: binary word
    :param spec: ChannelSpec
    :param seed: base seed
    :param index: trial index
    :return: float array, positive values favor 0
    """
    word = as_binary_word(word)
    rng = make_rng(seed, index)
    if spec.kind == BSC:
        flips = rng.random(word.size) < spec.p
        received = word ^ flips.astype(np.uint8)
        magnitude = spec.bsc_llr
        return np.where(received == 1, -magnitude, magnitude)
    variance = spec.noise_variance
    signal = 1.0 - 2.0 * word
    received = signal + math.sqrt(variance) * rng.standard_normal(word.size)
    return 2.0 * received / variance
