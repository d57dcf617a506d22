#!/usr/bin/python
# -*- coding: UTF-8 -*-
"""
pixelpaq end to end on a generated sequence: QP maps, one simulation, the
pixel-paq vs idsq comparison over the four usual QPs, and the weight curves.
"""

import os

from pixelpaq.pq_synchronizer import PixelPaq
from pixelpaq.pq_synthetic import acceptance_spec, write_synthetic

if __name__ == "__main__":
    out_dir = "./pixelpaq-out"
    input_path = os.path.join(out_dir, "synthetic_416x240_444_10b.yuv")
    os.makedirs(out_dir, exist_ok=True)

    # 416x240, 4:4:4, 10-bit, 32 frames of gradients, noise and patches
    spec = acceptance_spec(32)
    write_synthetic(input_path, spec)

    print('Start pixelpaq.')
    pq = PixelPaq.from_file(None,
                            input=input_path,
                            width=spec.width,
                            height=spec.height,
                            bit_depth=spec.bit_depth,
                            chroma='444',
                            frames='0..8',
                            out=out_dir,
                            workers=4)
    pq.info()

    # per-CB means, weights and QPs of the first 8 frames
    json_path, csv_path = pq.analyze()
    print("QP map: " + json_path)

    # PSNR / SSIM / JND pass rates of the pixel-paq QPs
    report = pq.simulate()
    print("chroma bits: " + str(report['aggregate']['bits_chroma']))

    # chroma-bits reduction against the luma-only baseline
    summaries = pq.compare(sweep=True)
    for summary in summaries:
        reduction = summary.chroma_bits_reduction(summary.anchors[0])
        print("QP %d: chroma bits -%.1f%%" % (summary.base_qp, reduction))

    # (mu, weight) tables for plotting
    pq.curves(bit_depths=(8, 10), n_points=256)
