"""figure reproduction: runs the sweep behind a figure and writes its CSV and plot script"""
import logging
import math
import os
from dataclasses import replace
from typing import Dict, List, Sequence, Tuple

from .engine import (TH_LOSS, TH_LOSS_BOUND, ZF_LOSS, ZF_LOSS_BOUND, run_rate_loss, run_scaled_feedback,
                     run_sweep, scaled_feedback_gaps)
from .errors import ConfigError
from .formatters import ResultFormatter
from .log import sim_logger_handler
from .models import ALL_SCHEMES, TH_PERFECT, TH_QUANTIZED, ExperimentConfig, RateRecord

logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)
logger.addHandler(sim_logger_handler)

FIGURES = ('fig2', 'fig3', 'fig4')
SCALED_FEEDBACK_B = (3.0, 4.0)
LOSS_SNR_DB = 25.0
LOSS_BITS = tuple(range(2, 17))


def scaled_scheme_name(b: float) -> str:
    return f"{TH_QUANTIZED}_b{b:g}"


def scaled_feedback_records(config: ExperimentConfig) -> List[RateRecord]:
    """perfect-CSI TH once, then quantized TH for each b with its own scheme name"""
    eps = config.scaling[1] if config.scaling else 0.0
    records = []
    for b in SCALED_FEEDBACK_B:
        run = run_scaled_feedback(replace(config, scaling=(b, eps)))
        if not records:
            records.extend(r for r in run if r.scheme == TH_PERFECT)
        records.extend(replace(r, scheme=scaled_scheme_name(b)) for r in run if r.scheme == TH_QUANTIZED)
    return records


def scaled_feedback_summary(records: Sequence[RateRecord],
                            snr_grid: Sequence[float]) -> Dict[float, Tuple[float, float]]:
    """
    gap to perfect-CSI TH at the highest SNR point for each b

    return:
        b -> (gap in dB, gap in bits per user)
    """
    summary = {}
    for b in SCALED_FEEDBACK_B:
        db_gaps, bit_gaps, _ = scaled_feedback_gaps(records, snr_grid, scaled_scheme_name(b))
        summary[b] = (float(db_gaps[-1]), float(bit_gaps[-1]))
        logger.info(f"scaled feedback b={b:g} at {snr_grid[-1]:g} dB: gap {summary[b][0]:.2f} dB, "
                    f"{summary[b][1]:.3f} bits (target log2 b = {math.log2(b):.3f} bits)")
    return summary


def reproduce(figure: str, config: ExperimentConfig, output_dir: str) -> Tuple[str, str]:
    """
    run the experiment behind a figure

    params:
        figure: one of FIGURES
        config: base configuration (system size, trials, seed, workers)
        output_dir: directory receiving <figure>.csv and <figure>_plot.py

    return:
        (csv path, plot script path)

    exception:
        ConfigError: unknown figure
    """
    if figure == 'fig2':
        records = scaled_feedback_records(config)
        scaled_feedback_summary(records, sorted(config.snr_grid))
        series = [TH_PERFECT] + [scaled_scheme_name(b) for b in SCALED_FEEDBACK_B]
        title, x_column, split = 'TH precoding with scaled feedback', 'P_dB', False
    elif figure == 'fig3':
        records = run_sweep(replace(config, schemes=ALL_SCHEMES))
        series = list(ALL_SCHEMES)
        title, x_column, split = 'average rate per user, TH and ZF precoding', 'P_dB', True
    elif figure == 'fig4':
        records = run_rate_loss(replace(config, snr_grid=(LOSS_SNR_DB,), bits_grid=LOSS_BITS))
        series = [TH_LOSS, ZF_LOSS, TH_LOSS_BOUND, ZF_LOSS_BOUND]
        title, x_column, split = f'rate loss per user at {LOSS_SNR_DB:g} dB', 'B', True
    else:
        raise ConfigError(f"failed to reproduce '{figure}': known figures are {list(FIGURES)}")

    csv_name = f"{figure}.csv"
    csv_path = ResultFormatter.write(ResultFormatter.format_csv(records), os.path.join(output_dir, csv_name))
    script = ResultFormatter.format_plot_script(csv_name, title, x_column, series, split_by_bits=split)
    script_path = ResultFormatter.write(script, os.path.join(output_dir, f"{figure}_plot.py"))
    logger.info(f"wrote {len(records)} rows to {csv_path} and plot script {script_path}")
    return csv_path, script_path
