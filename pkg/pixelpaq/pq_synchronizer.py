#!/usr/bin/python
# -*- coding: UTF-8 -*-
"""
pixelpaq: JND-driven luma and chroma QP derivation with a desk-scale
transform/quantise simulator to measure what the QPs buy.

The PixelPaq class is the API; cli.py is a thin layer over it.
"""
import os

from pixelpaq.log import info, output
from pixelpaq.pq_blocks import partition
from pixelpaq.pq_errors import UsageError
from pixelpaq.pq_jnd import CHROMA, LUMA, curve_table
from pixelpaq.pq_metrics import ssim_pgm_bytes
from pixelpaq.pq_report import (build_comparison, comparison_document,
                                curve_csv, dumps_json, format_info,
                                format_summary, info_document, jnd_table_csv,
                                qp_map_csv, qp_map_document,
                                simulate_document, sweep_document)
from pixelpaq.pq_utils import (format_frames, pq_init_directory,
                               pq_load_config, pq_run_frames, pq_write_atomic,
                               pq_write_group, pq_write_sequence_atomic)
from pixelpaq.pq_yuv import SUPPORTED_BIT_DEPTHS, open_sequence

DEFAULT_CURVE_POINTS = 256


class PixelPaq():

    def __init__(self, config):
        """
        Args:
            config: RunConfig (see pq_utils.pq_load_config)
        """
        self.config = config
        self.spec = config.spec
        self.out_dir = config.out_dir
        self.grid = None
        if self.spec is not None:
            self.grid = partition(self.spec, config.cb_size)

    @classmethod
    def from_file(cls, configuration_file_path=None, **overrides):
        return cls(pq_load_config(configuration_file_path, **overrides))

    def _require_input(self):
        if not self.config.input:
            raise UsageError('--input is required')
        if self.spec is None:
            raise UsageError('--width and --height are required (flags or '
                             'sidecar)')

    def _path(self, name):
        return os.path.join(self.out_dir, name)

    def _run(self, modes, simulate, config=None, with_maps=False):
        self._require_input()
        config = config or self.config
        # the input is validated before anything is created under out_dir
        with open_sequence(config.input, self.spec) as source:
            info('*** %s frames %s, %d CBs of %d per frame, QP %d\n' %
                 (os.path.basename(config.input),
                  format_frames(config.frame_range()), len(self.grid),
                  config.cb_size, config.base_qp))
            return pq_run_frames(source, self.grid, config, modes, simulate,
                                 with_maps)

    def info(self):
        "Geometry, sizes and raw bitrate of the configured sequence."
        if self.spec is None:
            raise UsageError('--width and --height are required')
        doc = info_document(self.spec, self.grid, self.config.fps)
        output(format_info(doc))
        return doc

    def analyze(self):
        """
        Write the QP map of every selected frame.

        Returns:
            (json path, csv path)
        """
        mode = self.config.mode
        results = self._run((mode,), simulate=False)
        frame_maps = [(r[mode].index, r[mode].qp_map) for r in results]
        stem = 'qpmap_%s_qp%d' % (mode.value, self.config.base_qp)
        json_text = dumps_json(qp_map_document(self.spec, frame_maps))
        csv_text = qp_map_csv(frame_maps)
        pq_init_directory(self.out_dir)
        json_path, csv_path = pq_write_group(
            [(self._path(stem + '.json'), json_text),
             (self._path(stem + '.csv'), csv_text)])
        output('QP map (%s, QP %d) of %d frame(s) written to %s\n' %
               (mode.value, self.config.base_qp, len(frame_maps), json_path))
        return json_path, csv_path

    def simulate(self):
        """
        Code the selected frames with the configured mode and report the
        per-frame and aggregate metrics and the JND pass table.

        Returns:
            report document (dict)
        """
        config = self.config
        mode = config.mode
        results = self._run((mode,), simulate=True,
                            with_maps=config.emit_ssim_maps)
        outcomes = [r[mode] for r in results]
        doc = simulate_document(self.spec, config, mode, outcomes)
        stem = '%s_qp%d' % (mode.value, config.base_qp)
        json_text = dumps_json(doc)
        csv_text = jnd_table_csv(outcomes)

        pq_init_directory(self.out_dir)
        pq_write_group([(self._path('simulate_%s.json' % stem), json_text),
                        (self._path('jnd_%s.csv' % stem), csv_text)])
        if config.emit_recon:
            recon_spec = self.spec.with_frame_count(len(outcomes))
            pq_write_sequence_atomic(self._path('recon_%s.yuv' % stem),
                                     recon_spec,
                                     (o.sim.recon for o in outcomes))
        if config.emit_ssim_maps:
            for o in outcomes:
                # channels too small for SSIM carry no map
                for channel, index_map in o.metrics.ssim_maps.items():
                    pq_write_atomic(
                        self._path('ssim_%s_f%d_%s.pgm' %
                                   (stem, o.index, channel.value.lower())),
                        ssim_pgm_bytes(index_map))
        agg = doc['aggregate']
        output('%s QP %d: bits Y %.0f Cb %.0f Cr %.0f, PSNR Y %s, JND pass '
               'Y %.3f Cb %.3f Cr %.3f\n' %
               (mode.value, config.base_qp, agg['bits_y'], agg['bits_cb'],
                agg['bits_cr'], agg['psnr_y'], agg['pass_rate_y'],
                agg['pass_rate_cb'], agg['pass_rate_cr']))
        return doc

    def compare(self, sweep=False):
        """
        Run every configured mode on the same frames and compare them.

        Args:
            sweep: repeat the comparison at each QP of config.qps and average
                   the deltas over the QP data points

        Returns:
            list of ComparisonSummary, one per QP
        """
        config = self.config
        modes = tuple(dict.fromkeys(config.modes))
        if len(modes) < 2:
            raise UsageError('compare needs at least two distinct modes, got '
                             '%s' % ','.join(m.value for m in modes))
        qps = config.qps if sweep else (config.base_qp,)
        summaries = []
        for qp in qps:
            run = config.with_qp(qp)
            results = self._run(modes, simulate=True, config=run)
            summary = build_comparison(qp, modes, results, self.spec,
                                       config.fps)
            output(format_summary(summary))
            summaries.append(summary)

        pq_init_directory(self.out_dir)
        if sweep:
            doc = sweep_document(self.spec, config, summaries)
            name = 'compare_sweep.json'
        else:
            doc = comparison_document(self.spec, config, summaries[0])
            name = 'compare_qp%d.json' % config.base_qp
        path = pq_write_atomic(self._path(name), dumps_json(doc))
        output('comparison written to %s\n' % path)
        return summaries

    def curves(self, bit_depths=SUPPORTED_BIT_DEPTHS,
               n_points=DEFAULT_CURVE_POINTS):
        """
        Write the luma and chroma weight curves as (mu, weight) CSVs.

        Returns:
            list of written paths
        """
        params = self.config.params
        tables = []
        for bit_depth in bit_depths:
            params.validate(bit_depth)
            for which in (LUMA, CHROMA):
                tables.append(('curve_%s_b%d.csv' % (which, bit_depth),
                               curve_table(bit_depth, n_points, which,
                                           params)))
        pq_init_directory(self.out_dir)
        paths = [pq_write_atomic(self._path(name), curve_csv(table))
                 for name, table in tables]
        output('%d curve tables written to %s\n' % (len(paths), self.out_dir))
        return paths
