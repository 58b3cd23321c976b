from typing import Dict, Type

from .errors import ConfigError
from .models import TH_PERFECT, TH_QUANTIZED, ZF_PERFECT, ZF_QUANTIZED
from .schemes.base import PrecodingScheme
from .schemes.th_perfect import THPerfectScheme
from .schemes.th_quantized import THQuantizedScheme
from .schemes.zf_perfect import ZFPerfectScheme
from .schemes.zf_quantized import ZFQuantizedScheme


class SchemeFactory:
    """precoding scheme factory"""
    _schemes: Dict[str, Type[PrecodingScheme]] = {
        TH_PERFECT: THPerfectScheme,
        TH_QUANTIZED: THQuantizedScheme,
        ZF_PERFECT: ZFPerfectScheme,
        ZF_QUANTIZED: ZFQuantizedScheme,
    }

    @classmethod
    def get_scheme(cls, name: str) -> PrecodingScheme:
        """
        get the evaluator for a scheme name

        params:
            name: scheme name, e.g. 'th_quantized'

        return:
            scheme instance

        exception:
            ConfigError: unknown scheme name
        """
        scheme_class = cls._schemes.get(name)
        if scheme_class is None:
            raise ConfigError(f"failed to resolve scheme '{name}': known schemes are {sorted(cls._schemes)}")
        return scheme_class()

    @classmethod
    def register_scheme(cls, name: str, scheme_class: Type[PrecodingScheme]) -> None:
        """
        register a new scheme

        params:
            name: scheme name
            scheme_class: the corresponding evaluator class
        """
        cls._schemes[name] = scheme_class

    @classmethod
    def names(cls):
        return tuple(cls._schemes)
