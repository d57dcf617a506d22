"""
Serialised outputs of the pixelpaq commands.

JSON is the canonical format, CSV mirrors the tables for spreadsheets.
Documents carry no timestamps and keys are emitted in a fixed order, so a
rerun on the same input and configuration is byte-identical.
"""

from dataclasses import dataclass, field
import csv
import io
import json
import math

from pixelpaq.pq_codec import jnd_pass_table
from pixelpaq.pq_metrics import average_reports
from pixelpaq.pq_quant import qp_histogram
from pixelpaq.pq_yuv import CHANNELS, raw_kbps

QPMAP_COLUMNS = ('index', 'x', 'y', 'mu_y', 'mu_cb', 'mu_cr', 'l_y', 'w_cb',
                 'w_cr', 'pqp_y', 'oqp_cb', 'oqp_cr')
CURVE_COLUMNS = ('mu', 'weight')
JND_COLUMNS = ('frame', 'index', 'q_max_y', 'q_max_cb', 'q_max_cr',
               'threshold_y', 'threshold_cb', 'threshold_cr', 'pass_y',
               'pass_cb', 'pass_cr')


def encode_real(value):
    "JSON-safe real: infinities become 'inf' / '-inf'."
    if isinstance(value, float) and math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return value


def dumps_json(document):
    return json.dumps(document, indent=2, allow_nan=False) + '\n'


def dumps_csv(columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([row[c] for c in columns])
    return buf.getvalue()


def _key(channel):
    return channel.name.lower()


# -- analyze -----------------------------------------------------------------

def qp_map_records(qp_map):
    "One record per CB with the columns of QPMAP_COLUMNS."
    return [{
        'index': e.luma_index, 'x': e.x, 'y': e.y,
        'mu_y': e.mu_y, 'mu_cb': e.mu_cb, 'mu_cr': e.mu_cr,
        'l_y': e.l_y, 'w_cb': e.w_cb, 'w_cr': e.w_cr,
        'pqp_y': e.pqp_y, 'oqp_cb': e.oqp_cb, 'oqp_cr': e.oqp_cr,
    } for e in qp_map.entries]


def _histogram_document(qp_map):
    return {name: {str(qp): n for qp, n in counts.items()}
            for name, counts in qp_histogram(qp_map).items()}


def qp_map_document(spec, frame_maps):
    """
    QP-map JSON document

    Args:
        spec: VideoSpec of the input
        frame_maps: list of (frame index, QpMap), in frame order

    Returns:
        {'header': {...}, 'frames': [{'frame', 'histogram', 'cbs'}]}
    """
    header = frame_maps[0][1].header(spec)
    return {
        'header': header,
        'frames': [{
            'frame': index,
            'histogram': _histogram_document(qp_map),
            'cbs': qp_map_records(qp_map),
        } for index, qp_map in frame_maps],
    }


def qp_map_csv(frame_maps):
    "Flat CSV with a leading frame column and the same values as the JSON."
    columns = ('frame',) + QPMAP_COLUMNS
    rows = []
    for index, qp_map in frame_maps:
        for record in qp_map_records(qp_map):
            rows.append(dict(record, frame=index))
    return dumps_csv(columns, rows)


# -- curves ------------------------------------------------------------------

def curve_csv(table):
    return dumps_csv(CURVE_COLUMNS,
                     [{'mu': mu, 'weight': w} for mu, w in table])


# -- simulate ----------------------------------------------------------------

def _sim_counts(sim):
    counts = {}
    for channel in CHANNELS:
        counts['bits_' + _key(channel)] = sim.bits(channel)
    counts['bits_chroma'] = sim.bits_chroma
    counts['bits_proxy'] = sim.bits_proxy
    for channel in CHANNELS:
        counts['nonzero_' + _key(channel)] = sim.nonzero(channel)
    for channel in CHANNELS:
        counts['pass_rate_' + _key(channel)] = sim.pass_rate(channel)
    return counts


def _metrics_document(metrics):
    return {k: encode_real(v) for k, v in metrics.to_dict().items()}


def _aggregate(outcomes, spec, fps):
    "Totals over frames for one mode; outcomes are FrameOutcomes in order."
    sims = [o.sim for o in outcomes]
    totals = {}
    for channel in CHANNELS:
        totals['bits_' + _key(channel)] = math.fsum(s.bits(channel)
                                                    for s in sims)
    totals['bits_chroma'] = math.fsum(s.bits_chroma for s in sims)
    totals['bits_proxy'] = math.fsum(s.bits_proxy for s in sims)
    totals['kbps_proxy'] = totals['bits_proxy'] / len(sims) * fps / 1000.0
    totals['raw_kbps'] = raw_kbps(spec, fps)
    for channel in CHANNELS:
        passed = sum(v.passed(channel) for s in sims for v in s.jnd_pass)
        total = sum(len(s.jnd_pass) for s in sims)
        totals['pass_rate_' + _key(channel)] = (passed / float(total)
                                                if total else 1.0)
    totals.update(_metrics_document(average_reports(o.metrics
                                                    for o in outcomes)))
    return totals


def simulate_document(spec, config, mode, outcomes):
    """
    Per-frame and aggregate simulation report of one mode

    Args:
        spec: VideoSpec of the input
        config: RunConfig the run used
        mode: QpMode simulated
        outcomes: FrameOutcomes of that mode, in frame order
    """
    header = outcomes[0].qp_map.header(spec)
    header['deadzone_theta'] = config.deadzone_theta
    header['fps'] = config.fps
    frames = []
    for o in outcomes:
        record = {'frame': o.index}
        record.update(_sim_counts(o.sim))
        record.update(_metrics_document(o.metrics))
        frames.append(record)
    return {
        'header': header,
        'frames': frames,
        'aggregate': _aggregate(outcomes, spec, config.fps),
    }


def jnd_table_csv(outcomes):
    rows = []
    for o in outcomes:
        for row in jnd_pass_table(o.sim):
            rows.append(dict(row, frame=o.index))
    return dumps_csv(JND_COLUMNS, rows)


# -- compare -----------------------------------------------------------------

def reduction_pct(test_bits, anchor_bits):
    "100 x (1 - test / anchor); 0 when the anchor spends nothing."
    if anchor_bits == 0:
        return 0.0
    return 100.0 * (1.0 - test_bits / anchor_bits)


def db_delta(test, anchor):
    if math.isinf(test) and math.isinf(anchor):
        return 0.0
    return test - anchor


def ssim_delta_pct(test, anchor):
    "None when either side has no SSIM."
    if test is None or anchor is None:
        return None
    if anchor == 0:
        return 0.0
    return 100.0 * (test - anchor) / anchor


def _deltas(test_totals, anchor_totals):
    "Side-by-side deltas of two totals dictionaries (raw, unencoded)."
    deltas = {
        'chroma_bits_reduction_pct': reduction_pct(
            test_totals['bits_chroma'], anchor_totals['bits_chroma']),
        'total_bits_reduction_pct': reduction_pct(
            test_totals['bits_proxy'], anchor_totals['bits_proxy']),
    }
    for channel in CHANNELS:
        k = _key(channel)
        deltas['bits_reduction_pct_' + k] = reduction_pct(
            test_totals['bits_' + k], anchor_totals['bits_' + k])
    for channel in CHANNELS:
        k = _key(channel)
        deltas['psnr_delta_db_' + k] = db_delta(
            test_totals['psnr_' + k], anchor_totals['psnr_' + k])
    for channel in CHANNELS:
        k = _key(channel)
        deltas['ssim_delta_pct_' + k] = ssim_delta_pct(
            test_totals['ssim_' + k], anchor_totals['ssim_' + k])
    return deltas


def _raw_totals(sims, metrics):
    totals = {}
    for channel in CHANNELS:
        k = _key(channel)
        totals['bits_' + k] = math.fsum(s.bits(channel) for s in sims)
        totals['psnr_' + k] = metrics.psnr(channel)
        totals['ssim_' + k] = metrics.ssim(channel)
    totals['bits_chroma'] = math.fsum(s.bits_chroma for s in sims)
    totals['bits_proxy'] = math.fsum(s.bits_proxy for s in sims)
    return totals


def _encode(table):
    return {k: encode_real(v) for k, v in table.items()}


@dataclass
class ComparisonSummary:
    """
    Side-by-side comparison of several QP modes at one base QP.

    The first mode is the one under test; deltas are reported against each
    of the following modes (the anchors).
    """
    base_qp: int
    modes: tuple
    totals: dict = field(default_factory=dict)
    deltas: dict = field(default_factory=dict)
    frames: list = field(default_factory=list)

    @property
    def test_mode(self):
        return self.modes[0]

    @property
    def anchors(self):
        return self.modes[1:]

    def chroma_bits_reduction(self, anchor):
        return self.deltas[anchor]['chroma_bits_reduction_pct']

    def to_dict(self):
        return {
            'base_qp': self.base_qp,
            'modes': [m.value for m in self.modes],
            'totals': {m.value: _encode(self.totals[m]) for m in self.modes},
            'deltas': {'%s_vs_%s' % (self.test_mode.value, a.value):
                       _encode(self.deltas[a]) for a in self.anchors},
            'frames': [{
                'frame': f['frame'],
                'modes': {m.value: _encode(f['modes'][m])
                          for m in self.modes},
                'deltas': {'%s_vs_%s' % (self.test_mode.value, a.value):
                           _encode(f['deltas'][a]) for a in self.anchors},
            } for f in self.frames],
        }


def build_comparison(base_qp, modes, frame_outcomes, spec, fps):
    """
    Gather per-frame outcomes of every mode into a ComparisonSummary

    Args:
        base_qp: base QP of the run
        modes: QpModes, the first being the mode under test
        frame_outcomes: per frame, {mode: FrameOutcome}, in frame order
        spec: VideoSpec of the input
        fps: frame rate for the Kbps proxies
    """
    summary = ComparisonSummary(base_qp, tuple(modes))
    for outcomes in frame_outcomes:
        per_mode = {m: _raw_totals([outcomes[m].sim], outcomes[m].metrics)
                    for m in modes}
        summary.frames.append({
            'frame': outcomes[modes[0]].index,
            'modes': per_mode,
            'deltas': {a: _deltas(per_mode[modes[0]], per_mode[a])
                       for a in modes[1:]},
        })
    for m in modes:
        sims = [o[m].sim for o in frame_outcomes]
        metrics = average_reports(o[m].metrics for o in frame_outcomes)
        totals = _raw_totals(sims, metrics)
        totals['kbps_proxy'] = totals['bits_proxy'] / len(sims) * fps / 1000.0
        totals['raw_kbps'] = raw_kbps(spec, fps)
        for channel in CHANNELS:
            passed = sum(v.passed(channel) for s in sims for v in s.jnd_pass)
            total = sum(len(s.jnd_pass) for s in sims)
            totals['pass_rate_' + _key(channel)] = (passed / float(total)
                                                    if total else 1.0)
        summary.totals[m] = totals
    summary.deltas = {a: _deltas(summary.totals[modes[0]], summary.totals[a])
                      for a in modes[1:]}
    return summary


def comparison_document(spec, config, summary):
    return {
        'header': {
            'spec': spec.to_dict(),
            'cb_size': config.cb_size,
            'params': config.params.to_dict(),
            'exact_weights': config.exact_weights,
            'deadzone_theta': config.deadzone_theta,
            'fps': config.fps,
        },
        'comparison': summary.to_dict(),
    }


def sweep_average(summaries):
    """
    Deltas averaged over the QP data points of a sweep.

    Per anchor: the mean of the per-QP percentages and deltas, plus the
    reduction of the bits summed over all QPs.
    """
    modes = summaries[0].modes
    average = {}
    for anchor in modes[1:]:
        entry = {}
        keys = summaries[0].deltas[anchor].keys()
        for k in keys:
            values = [s.deltas[anchor][k] for s in summaries]
            finite = [v for v in values
                      if v is not None and not math.isinf(v)]
            entry['mean_' + k] = (math.fsum(finite) / len(finite) if finite
                                  else values[0])
        test_totals = [s.totals[modes[0]] for s in summaries]
        anchor_totals = [s.totals[anchor] for s in summaries]
        entry['summed_chroma_bits_reduction_pct'] = reduction_pct(
            math.fsum(t['bits_chroma'] for t in test_totals),
            math.fsum(t['bits_chroma'] for t in anchor_totals))
        entry['summed_total_bits_reduction_pct'] = reduction_pct(
            math.fsum(t['bits_proxy'] for t in test_totals),
            math.fsum(t['bits_proxy'] for t in anchor_totals))
        average['%s_vs_%s' % (modes[0].value, anchor.value)] = _encode(entry)
    return average


def sweep_document(spec, config, summaries):
    doc = comparison_document(spec, config, summaries[0])
    del doc['comparison']
    doc['qps'] = [s.base_qp for s in summaries]
    doc['points'] = [s.to_dict() for s in summaries]
    doc['average'] = sweep_average(summaries)
    return doc


# -- info --------------------------------------------------------------------

GIB = float(1 << 30)


def info_document(spec, grid, fps):
    return {
        'spec': spec.to_dict(),
        'cb_size': grid.cb_size,
        'grid': {'cols': grid.cols, 'rows': grid.rows, 'cbs': len(grid)},
        'chroma_plane': [spec.chroma_width, spec.chroma_height],
        'frame_byte_size': spec.frame_byte_size,
        'sequence_byte_size': spec.sequence_byte_size,
        'sequence_gib': spec.sequence_byte_size / GIB,
        'fps': fps,
        'raw_kbps': raw_kbps(spec, fps),
    }


def format_info(doc):
    spec = doc['spec']
    return ('%dx%d %s %d-bit, %d frame(s)\n'
            '  grid %dx%d = %d CBs of %d\n'
            '  frame %d bytes, sequence %d bytes (%.2f GiB)\n'
            '  raw %.1f Kbps at %g fps\n' %
            (spec['width'], spec['height'], spec['chroma_format'],
             spec['bit_depth'], spec['frame_count'], doc['grid']['cols'],
             doc['grid']['rows'], doc['grid']['cbs'], doc['cb_size'],
             doc['frame_byte_size'], doc['sequence_byte_size'],
             doc['sequence_gib'], doc['raw_kbps'], doc['fps']))


def format_summary(summary):
    "Short human-readable lines of a comparison, for the OUTPUT log level."
    lines = ['QP %d:' % summary.base_qp]
    for m in summary.modes:
        t = summary.totals[m]
        lines.append('  %-9s bits Y %.0f Cb %.0f Cr %.0f  PSNR Y %s Cb %s '
                     'Cr %s' % (m.value, t['bits_y'], t['bits_cb'],
                                t['bits_cr'], _fmt_db(t['psnr_y']),
                                _fmt_db(t['psnr_cb']), _fmt_db(t['psnr_cr'])))
    for a in summary.anchors:
        d = summary.deltas[a]
        lines.append('  vs %-6s chroma bits %+.2f%%  dPSNR Cb %s Cr %s' %
                     (a.value, -d['chroma_bits_reduction_pct'],
                      _fmt_db(d['psnr_delta_db_cb']),
                      _fmt_db(d['psnr_delta_db_cr'])))
    return '\n'.join(lines) + '\n'


def _fmt_db(value):
    return str(encode_real(value)) if math.isinf(value) else '%.2f' % value


