import logging
import math
import sys
from argparse import Namespace
from typing import Any, Dict, List, Mapping

from commands.base import EXIT_OK, Command
from commands.thp.analysis import (ALTERNATING_SUM_LIMIT, LOG2E, expected_log2_cos2, expected_log2_cos2_alternating,
                                   expected_neg_log2_interference, feedback_scaling_th, feedback_scaling_zf,
                                   kershaw_J_bound, rate_loss_terms, sum_rate_upper_bound, sin2_upper_bound,
                                   zf_rate_loss_upper_bound)
from commands.thp.errors import DomainError
from commands.thp.formatters import ResultFormatter
from commands.thp.log import sim_logger_handler
from commands.thp.models import ExperimentConfig
from commands.thp.parsers import ConfigParser
from commands.thp.quantization import expected_sin2_rvq

logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)
logger.addHandler(sim_logger_handler)

NAN = float('nan')


def bounds_rows(config: ExperimentConfig) -> List[Dict[str, Any]]:
    """closed-form quantities for every (B, P_dB) of the configured grids"""
    n_T, K = config.n_T, config.K
    log_moment = expected_neg_log2_interference(n_T, K) if K > 1 else NAN
    rows = []
    for B in config.bits_grid:
        n = 2 ** B
        angle = -expected_log2_cos2(n_T, n)
        alternating = -expected_log2_cos2_alternating(n_T, n) if n <= ALTERNATING_SUM_LIMIT else NAN
        for P_dB in config.snr_grid:
            params = config.params(B=B, P_dB=P_dB)
            interference, _ = rate_loss_terms(params)
            rows.append({
                'B': B,
                'P_dB': float(P_dB),
                'neg_log2_interference': log_moment,
                'angle_term': angle,
                'angle_term_alternating': alternating,
                'angle_term_kershaw': LOG2E / (n_T - 1) * kershaw_J_bound(n_T, n),
                'interference_term': interference,
                'th_loss_bound': interference + angle,
                'zf_loss_bound': zf_rate_loss_upper_bound(n_T, params.P, B),
                'rate_ceiling': sum_rate_upper_bound(n_T, K, B),
                'mean_sin2': expected_sin2_rvq(n_T, n),
                'sin2_cell_bound': sin2_upper_bound(n_T, B),
            })
    return rows


def scaling_rows(config: ExperimentConfig) -> List[Dict[str, Any]]:
    """feedback bits from both scaling rules along the SNR grid"""
    b, eps = config.scaling
    params = config.params()
    rows = []
    for P_dB in config.snr_grid:
        try:
            th_bits = feedback_scaling_th(params, P_dB, b, eps)
        except DomainError as e:
            logger.warning(f"no TH scaling at P_dB={P_dB:g}: {str(e)}")
            th_bits = NAN
        zf_bits = feedback_scaling_zf(n_T=config.n_T, P_dB=P_dB, b=b) if b > 1 else NAN
        rows.append({
            'P_dB': float(P_dB),
            'th_bits': th_bits,
            'th_bits_used': NAN if math.isnan(th_bits) else float(max(0, math.ceil(th_bits))),
            'zf_bits': zf_bits,
        })
    return rows


class BoundsCommand(Command):
    """tabulates every closed-form bound for the configured system"""
    name = 'bounds'
    help = 'tabulate analytical bounds, writes bounds.csv (and scaling.csv with --b)'

    def _invoke(self, args: Namespace, settings: Mapping[str, Any]) -> int:
        config = ConfigParser.parse(settings)
        table = ResultFormatter.format_table(bounds_rows(config))
        sys.stdout.write(table)
        ResultFormatter.write(table, self.output_path(config.output, 'bounds.csv'))
        if config.scaling is not None:
            scaling = ResultFormatter.format_table(scaling_rows(config))
            sys.stdout.write(scaling)
            path = self.output_path(config.output, 'scaling.csv')
            if config.output.endswith('.csv'):
                path = config.output[:-len('.csv')] + '_scaling.csv'
            ResultFormatter.write(scaling, path)
        return EXIT_OK
