"""
验证报告分析工具
"""
import math
from collections import Counter
from statistics import median
from typing import Any, Dict, List, Optional

from loguru import logger

from optics.models import VerificationCase, VerificationReport


def _ratio(case: VerificationCase) -> float:
    """残差与容差之比，> 1 即未通过"""
    if not math.isfinite(case.residual):
        return math.inf
    return case.residual / case.tolerance if case.tolerance > 0 else math.inf


def analyze_report(report: VerificationReport) -> Optional[Dict[str, Any]]:
    """统计验证报告"""
    if not report or report.total == 0:
        logger.warning("没有用例可供分析")
        return None

    cases = report.cases
    ratios = [_ratio(case) for case in cases]
    worst_index = max(range(len(cases)), key=lambda i: ratios[i])
    finite = [r for r in ratios if math.isfinite(r)]

    per_suite = {}
    for suite in dict.fromkeys(case.suite for case in cases):
        suite_cases = report.filter_by_suite(suite)
        failed = sum(1 for case in suite_cases if not case.passed)
        per_suite[suite] = {"total": len(suite_cases), "failed": failed}

    analysis_result = {
        "total_cases": report.total,
        "failed_cases": report.failed,
        "pass_rate": (report.total - report.failed) / report.total,
        "worst_case": {
            "suite": cases[worst_index].suite,
            "name": cases[worst_index].name,
            "ratio": ratios[worst_index],
        },
        "median_ratio": median(finite) if finite else math.inf,
        "suites": per_suite,
        "phase_signs": dict(phase_sign_counts(cases)),
    }

    logger.info(f"报告分析完成: {report.total} 个用例, 通过率 {analysis_result['pass_rate']:.1%}")
    return analysis_result


def phase_sign_counts(cases: List[VerificationCase]) -> Counter:
    """按最接近的 ±1 / ±i 统计提取出的全局相位"""
    labels = {1: "+1", -1: "-1", 1j: "+i", -1j: "-i"}
    counts = Counter()
    for case in cases:
        if case.phase is None:
            continue
        nearest = min(labels, key=lambda z: abs(case.phase - z))
        counts[labels[nearest]] += 1
    return counts


def failed_cases(report: VerificationReport) -> List[VerificationCase]:
    """未通过的用例，按残差/容差比从大到小"""
    return sorted((case for case in report.cases if not case.passed), key=_ratio, reverse=True)
