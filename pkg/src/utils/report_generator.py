"""
验证报告生成器

文本报告写到 stdout，HTML 报告写到文件。报告内容只由用例决定，不含生成时间。
"""
import html
from pathlib import Path
from typing import Any, Dict, Optional

from loguru import logger

from optics.models import VerificationCase, VerificationReport


def _format_phase(case: VerificationCase) -> str:
    if case.phase is None:
        return "-"
    return f"{case.phase.real:+.6f}{case.phase.imag:+.6f}i"


def format_text_report(report: VerificationReport,
                       analysis_result: Optional[Dict[str, Any]] = None) -> str:
    """纯文本报告，每个用例一行"""
    lines = [
        f"verification suite={report.suite_name} N={report.dim} seed={report.seed}",
        f"{'suite':<11} {'case':<40} {'residual':>12} {'tolerance':>10}  {'phase':<22} result",
    ]
    for case in report.cases:
        lines.append(
            f"{case.suite:<11} {case.name:<40} {case.residual:>12.3e} {case.tolerance:>10.1e}  "
            f"{_format_phase(case):<22} {'PASS' if case.passed else 'FAIL'}")
    lines.append(f"total={report.total} failed={report.failed}")
    if analysis_result:
        worst = analysis_result["worst_case"]
        lines.append(f"pass_rate={analysis_result['pass_rate']:.4f} "
                     f"worst={worst['suite']}/{worst['name']} ratio={worst['ratio']:.3e}")
    return "\n".join(lines) + "\n"


def generate_html_report(report: VerificationReport,
                         analysis_result: Optional[Dict[str, Any]] = None,
                         output_filename: str = "verification_report.html",
                         output_dir: Optional[Path] = None) -> Optional[str]:
    """生成 HTML 格式的验证报告

    Args:
        report: 验证报告
        analysis_result: analyze_report 的结果
        output_filename: 输出文件名
        output_dir: 输出目录，为 None 时写到当前目录
    """
    if not report or report.total == 0:
        logger.warning("没有用例可供生成报告")
        return None

    if output_dir:
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        output_path = output_dir / output_filename
    else:
        output_path = Path(output_filename)

    try:
        with open(output_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(_generate_html_content(report, analysis_result))
    except OSError as e:
        logger.error(f"生成HTML报告失败: {e}")
        return None

    logger.info(f"HTML报告已生成: {output_path}")
    return str(output_path)


def _generate_html_content(report: VerificationReport,
                           analysis_result: Optional[Dict[str, Any]]) -> str:
    status = "全部通过" if report.all_passed else f"{report.failed} 个用例未通过"
    html_template = f"""<!DOCTYPE html>
<html lang="zh-CN">
<head>
    <meta charset="UTF-8">
    <title>Fresnel 算符验证报告 - {html.escape(report.suite_name)}</title>
    <style>
        body {{
            font-family: 'Segoe UI', 'Microsoft YaHei', Arial, sans-serif;
            color: #2d3436;
            background: #f5f6fa;
        }}
        .container {{ max-width: 1100px; margin: 0 auto; padding: 20px; background: white; }}
        .header {{ text-align: center; padding: 20px 0; border-bottom: 3px solid #0984e3; }}
        .stats-grid {{ display: grid; grid-template-columns: repeat(4, 1fr); gap: 15px; margin: 20px 0; }}
        .stat-card {{ background: #74b9ff; color: white; padding: 15px; border-radius: 10px; text-align: center; }}
        table {{ width: 100%; border-collapse: collapse; font-family: monospace; }}
        th, td {{ padding: 4px 8px; border-bottom: 1px solid #dfe6e9; text-align: left; }}
        tr.fail {{ background: #ffeaa7; }}
        .section {{ margin-bottom: 30px; }}
    </style>
</head>
<body>
    <div class="container">
        <div class="header">
            <h1>Fresnel 算符验证报告</h1>
            <p>套件 {html.escape(report.suite_name)} · N={report.dim} · seed={report.seed} · {status}</p>
        </div>
        <div class="stats-grid">
            <div class="stat-card"><h3>{report.total}</h3><p>用例总数</p></div>
            <div class="stat-card"><h3>{report.failed}</h3><p>未通过</p></div>
"""
    if analysis_result:
        worst = analysis_result["worst_case"]
        html_template += f"""            <div class="stat-card"><h3>{analysis_result['pass_rate']:.1%}</h3><p>通过率</p></div>
            <div class="stat-card"><h3>{worst['ratio']:.2e}</h3><p>最差残差/容差</p></div>
"""
    html_template += """        </div>
"""
    if analysis_result:
        html_template += """        <div class="section">
            <h2>各套件统计</h2>
            <ul>
"""
        for suite, counts in analysis_result["suites"].items():
            html_template += f"                <li>{html.escape(suite)}: {counts['total']} 个用例, {counts['failed']} 个未通过</li>\n"
        html_template += """            </ul>
        </div>
"""
    html_template += """        <div class="section">
            <h2>用例明细</h2>
            <table>
                <tr><th>套件</th><th>用例</th><th>残差</th><th>容差</th><th>相位</th><th>结果</th></tr>
"""
    for case in report.cases:
        row_class = "" if case.passed else " class=\"fail\""
        html_template += (
            f"                <tr{row_class}><td>{html.escape(case.suite)}</td>"
            f"<td>{html.escape(case.name)}</td><td>{case.residual:.3e}</td>"
            f"<td>{case.tolerance:.1e}</td><td>{_format_phase(case)}</td>"
            f"<td>{'PASS' if case.passed else 'FAIL'}</td></tr>\n")
    html_template += """            </table>
        </div>
    </div>
</body>
</html>
"""
    return html_template
