"""
ABCD 矩阵光学与 Fresnel 算符模块
"""
from .errors import FresnelError
from .fresnel_operator import build_fresnel, fresnel_canonical, fresnel_normal_order
from .matrix_optics import compose, compose_chain, free_space, magnifier, thin_lens
from .models import (FockOperator, FockState, QParam, Ray, RayMatrix, Route, SRPair,
                     VerificationReport)
from .quantum_abcd import abcd_law_apply, descriptor_from_matrix, q_parameter
from .verification import run_verification

__all__ = [
    'FresnelError',
    'RayMatrix',
    'Ray',
    'QParam',
    'SRPair',
    'FockOperator',
    'FockState',
    'Route',
    'VerificationReport',
    'compose',
    'compose_chain',
    'free_space',
    'thin_lens',
    'magnifier',
    'build_fresnel',
    'fresnel_normal_order',
    'fresnel_canonical',
    'q_parameter',
    'descriptor_from_matrix',
    'abcd_law_apply',
    'run_verification'
]
