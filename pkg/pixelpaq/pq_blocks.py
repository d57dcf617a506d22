"""
Coding-block partitioning.

The luma plane is tiled with cb_size x cb_size CBs (the last row/column may
overhang the frame edge). Every luma CB has one co-located Cb CB and one Cr
CB whose dimensions follow the chroma format:

    4:4:4  2N x 2N         4:2:2  N x 2N         4:2:0  N x N

Means are taken over the valid (in-frame) samples only; transforms see the
full block with clamp-to-edge replication.
"""

from dataclasses import dataclass, field

import numpy as np

from pixelpaq.pq_errors import ChannelMismatch, UnsupportedBlockSize
from pixelpaq.pq_yuv import CHANNELS, Channel

SUPPORTED_CB_SIZES = (16, 32, 64)
DEFAULT_CB_SIZE = 64


@dataclass(frozen=True)
class CodingBlock:
    channel: Channel
    x: int
    y: int
    w: int
    h: int
    luma_index: int
    valid_w: int
    valid_h: int

    @property
    def is_partial(self):
        return self.valid_w < self.w or self.valid_h < self.h


@dataclass(frozen=True)
class BlockGrid:
    spec: object
    cb_size: int
    cols: int
    rows: int
    luma_blocks: tuple = field(repr=False)
    cb_blocks: tuple = field(repr=False)
    cr_blocks: tuple = field(repr=False)

    def __len__(self):
        return len(self.luma_blocks)

    def blocks(self, channel):
        return {Channel.Y: self.luma_blocks, Channel.CB: self.cb_blocks,
                Channel.CR: self.cr_blocks}[channel]

    def colocated(self, luma_index):
        "(Y, Cb, Cr) blocks of one CB."
        return (self.luma_blocks[luma_index], self.cb_blocks[luma_index],
                self.cr_blocks[luma_index])


def _channel_blocks(channel, spec, cols, rows, bw, bh):
    plane_w, plane_h = spec.plane_dims(channel)
    blocks = []
    for row in range(rows):
        for col in range(cols):
            x, y = col * bw, row * bh
            blocks.append(CodingBlock(channel, x, y, bw, bh, row * cols + col,
                                      min(bw, plane_w - x),
                                      min(bh, plane_h - y)))
    return tuple(blocks)


def partition(spec, cb_size=DEFAULT_CB_SIZE):
    """
    Tile a frame with coding blocks

    Args:
        spec: VideoSpec of the frames
        cb_size: luma CB edge length, one of 16, 32, 64

    Returns:
        BlockGrid with ceil(width/cb_size) x ceil(height/cb_size) luma CBs in
        raster order and their co-located Cb/Cr CBs
    """
    if cb_size not in SUPPORTED_CB_SIZES:
        raise UnsupportedBlockSize(cb_size, SUPPORTED_CB_SIZES)
    cols = -(-spec.width // cb_size)
    rows = -(-spec.height // cb_size)
    sx, sy = spec.chroma_format.subsampling
    luma = _channel_blocks(Channel.Y, spec, cols, rows, cb_size, cb_size)
    cb = _channel_blocks(Channel.CB, spec, cols, rows, cb_size // sx,
                         cb_size // sy)
    cr = _channel_blocks(Channel.CR, spec, cols, rows, cb_size // sx,
                         cb_size // sy)
    return BlockGrid(spec, cb_size, cols, rows, luma, cb, cr)


def _check_channel(plane, block):
    if plane.channel is not block.channel:
        raise ChannelMismatch('%s block applied to a %s plane' %
                              (block.channel.value, plane.channel.value))


def block_samples(plane, block):
    """
    The w x h samples of a block, replicating the last valid row/column
    where the block overhangs the plane.
    """
    _check_channel(plane, block)
    rows = np.clip(np.arange(block.y, block.y + block.h), 0, plane.height - 1)
    cols = np.clip(np.arange(block.x, block.x + block.w), 0, plane.width - 1)
    return plane.samples[np.ix_(rows, cols)]


def valid_samples(plane, block):
    "The in-plane part of a block, without replication."
    _check_channel(plane, block)
    return plane.samples[block.y:block.y + block.valid_h,
                         block.x:block.x + block.valid_w]


def iter_colocated(grid):
    "Yield (luma_index, {channel: block}) in raster order."
    for index in range(len(grid)):
        yield index, dict(zip(CHANNELS, grid.colocated(index)))
