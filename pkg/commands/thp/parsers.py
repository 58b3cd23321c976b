import logging
import math
from typing import Any, Dict, Mapping, Optional, Tuple

from dotenv import dotenv_values

from .errors import ConfigError
from .log import sim_logger_handler
from .models import ALL_SCHEMES, ExperimentConfig

logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)
logger.addHandler(sim_logger_handler)

# default experiment settings
DEFAULT_NT = 4
DEFAULT_K = 4
DEFAULT_M = 4
DEFAULT_BITS = '4,8,15'
DEFAULT_SNR_DB = '0:5:40'
DEFAULT_TRIALS = 10000
DEFAULT_SEED = 42
DEFAULT_SCHEMES = ','.join(ALL_SCHEMES)
DEFAULT_OUT = 'results'
DEFAULT_WORKERS = 1
DEFAULT_MAX_CODEBOOK_BITS = 24
DEFAULT_EXACT_RVQ_BITS = 16
DEFAULT_QUANTIZER = 'auto'
DEFAULT_EPS = 0.0
# workers are clamped into this range
MAX_WORKERS = 64

SETTING_KEYS = ('nt', 'k', 'm', 'bits', 'snr_db', 'trials', 'seed', 'schemes', 'out', 'workers',
                'b', 'eps', 'max_codebook_bits', 'exact_rvq_bits', 'quantizer', 'per_user_codebooks')


class ConfigParser:
    """experiment configuration parser"""

    @staticmethod
    def load_file(path: Optional[str]) -> Dict[str, Any]:
        """
        read a plain key=value settings file

        params:
            path: file path, None for no file

        return:
            settings dictionary with lowercase keys, unknown keys dropped

        exception:
            ConfigError: the file cannot be read
        """
        if not path:
            return {}
        try:
            with open(path, encoding='utf-8') as stream:
                values = dotenv_values(stream=stream)
        except OSError as e:
            raise ConfigError(f"failed to read config file '{path}': {str(e)}")
        settings = {}
        for key, value in values.items():
            key = key.strip().lower()
            if key not in SETTING_KEYS:
                logger.warning(f"ignoring unknown config key '{key}' in {path}")
                continue
            settings[key] = value
        logger.debug(f"loaded {len(settings)} settings from {path}")
        return settings

    @staticmethod
    def merge(file_settings: Mapping[str, Any], overrides: Mapping[str, Any]) -> Dict[str, Any]:
        """command-line values win over file values, None means not given"""
        merged = dict(file_settings)
        merged.update({key: value for key, value in overrides.items() if value is not None})
        return merged

    @staticmethod
    def parse_grid(text: str) -> Tuple[float, ...]:
        """
        parse 'start:step:stop' (stop included) or a comma list

        exception:
            ConfigError: malformed grid
        """
        text = str(text).strip()
        try:
            if ':' in text:
                start, step, stop = (float(part) for part in text.split(':'))
                if step <= 0 or stop < start:
                    raise ConfigError(f"failed to parse grid '{text}': need step > 0 and stop >= start")
                count = int(math.floor((stop - start) / step + 1e-9)) + 1
                return tuple(round(start + i * step, 10) for i in range(count))
            return tuple(float(part) for part in text.split(',') if part.strip())
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"failed to parse grid '{text}': {str(e)}")

    @staticmethod
    def parse_bits(text: str) -> Tuple[int, ...]:
        """comma list or 'start:step:stop' of non-negative integers"""
        values = ConfigParser.parse_grid(text)
        if any(v < 0 or v != int(v) for v in values):
            raise ConfigError(f"failed to parse bits '{text}': values must be non-negative integers")
        return tuple(int(v) for v in values)

    @staticmethod
    def parse_schemes(text: str) -> Tuple[str, ...]:
        schemes = tuple(part.strip() for part in str(text).split(',') if part.strip())
        unknown = [s for s in schemes if s not in ALL_SCHEMES]
        if unknown:
            raise ConfigError(f"failed to parse schemes: unknown {unknown}, known {list(ALL_SCHEMES)}")
        return schemes

    @staticmethod
    def get_int(settings: Mapping[str, Any], key: str, default: int) -> int:
        value = settings.get(key)
        if value is None or value == '':
            return default
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigError(f"failed to parse '{key}': '{value}' is not an integer")

    @staticmethod
    def get_float(settings: Mapping[str, Any], key: str) -> Optional[float]:
        value = settings.get(key)
        if value is None or value == '':
            return None
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"failed to parse '{key}': '{value}' is not a number")

    @staticmethod
    def parse(settings: Mapping[str, Any]) -> ExperimentConfig:
        """
        build a validated ExperimentConfig from a settings mapping

        params:
            settings: raw values keyed by SETTING_KEYS (strings or numbers)

        return:
            ExperimentConfig

        exception:
            ConfigError: any invalid value
        """
        workers = ConfigParser.get_int(settings, 'workers', DEFAULT_WORKERS)
        # keep the worker count in a sane range
        workers = max(1, min(MAX_WORKERS, workers))

        b = ConfigParser.get_float(settings, 'b')
        eps = ConfigParser.get_float(settings, 'eps')
        scaling = None if b is None else (b, DEFAULT_EPS if eps is None else eps)

        per_user = str(settings.get('per_user_codebooks') or 'false').strip().lower() in ('1', 'true', 'yes')
        try:
            config = ExperimentConfig(
                n_T=ConfigParser.get_int(settings, 'nt', DEFAULT_NT),
                K=ConfigParser.get_int(settings, 'k', DEFAULT_K),
                M=ConfigParser.get_int(settings, 'm', DEFAULT_M),
                trials=ConfigParser.get_int(settings, 'trials', DEFAULT_TRIALS),
                seed=ConfigParser.get_int(settings, 'seed', DEFAULT_SEED),
                snr_grid=ConfigParser.parse_grid(settings.get('snr_db') or DEFAULT_SNR_DB),
                bits_grid=ConfigParser.parse_bits(settings.get('bits') or DEFAULT_BITS),
                schemes=ConfigParser.parse_schemes(settings.get('schemes') or DEFAULT_SCHEMES),
                scaling=scaling,
                output=str(settings.get('out') or DEFAULT_OUT),
                workers=workers,
                max_codebook_bits=ConfigParser.get_int(settings, 'max_codebook_bits', DEFAULT_MAX_CODEBOOK_BITS),
                exact_rvq_bits=ConfigParser.get_int(settings, 'exact_rvq_bits', DEFAULT_EXACT_RVQ_BITS),
                quantizer=str(settings.get('quantizer') or DEFAULT_QUANTIZER),
                per_user_codebooks=per_user,
            )
        except ConfigError:
            raise
        except ValueError as e:
            raise ConfigError(f"failed to validate config: {str(e)}")

        side = int(round(math.sqrt(config.M)))
        if config.M < 4 or side * side != config.M:
            raise ConfigError(f"failed to validate config: M={config.M} is not a square integer >= 4")
        if config.seed < 0:
            raise ConfigError(f"failed to validate config: seed={config.seed} must be non-negative")
        if config.quantizer == 'codebook' and max(config.bits_grid) > config.max_codebook_bits:
            raise ConfigError(f"failed to validate config: B={max(config.bits_grid)} exceeds "
                              f"max_codebook_bits={config.max_codebook_bits}")
        logger.debug(f"parsed config: {config}")
        return config
