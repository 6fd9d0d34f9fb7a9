"""
数据保存工具

算符/态矢量的文本转储、CSV 结果与 JSON 报告。所有浮点数按 17 位有效数字
写出，可逐位还原；文件中不写入时间戳，相同输入得到字节相同的输出。
"""
import csv
import json
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np
from loguru import logger

try:
    from ..optics.errors import SystemFileError
    from ..optics.models import FockOperator, FockState, VerificationReport
except ImportError:
    # 直接运行时的导入处理
    import sys
    sys.path.append(str(Path(__file__).parent.parent))
    from optics.errors import SystemFileError
    from optics.models import FockOperator, FockState, VerificationReport

OPERATOR_HEADER = "fock-op"
STATE_HEADER = "fock-state"


def format_number(value: float) -> str:
    """17 位有效数字"""
    return format(float(value), ".17g")


def format_complex(value: complex) -> str:
    return f"{format_number(value.real)},{format_number(value.imag)}"


def _parse_complex(token: str, line: int) -> complex:
    try:
        re_part, im_part = token.split(",")
        return complex(float(re_part), float(im_part))
    except ValueError as e:
        raise SystemFileError(f"无法解析复数 {token!r}", line=line) from e


def _parse_header(line: str, expected: str) -> int:
    parts = line.split()
    if len(parts) != 2 or parts[0] != expected or not parts[1].startswith("N="):
        raise SystemFileError(f"文件头应为 '{expected} N=<dim>'，得到 {line!r}", line=1)
    try:
        return int(parts[1][2:])
    except ValueError as e:
        raise SystemFileError(f"无法解析维数 {parts[1]!r}", line=1) from e


def dump_operator(op: FockOperator) -> str:
    lines = [f"{OPERATOR_HEADER} N={op.dim}"]
    for row in op.entries:
        lines.append(" ".join(format_complex(z) for z in row))
    return "\n".join(lines) + "\n"


def parse_operator(text: str) -> FockOperator:
    lines = text.splitlines()
    if not lines:
        raise SystemFileError("空的算符文件")
    dim = _parse_header(lines[0], OPERATOR_HEADER)
    rows = lines[1:]
    if len(rows) != dim:
        raise SystemFileError(f"声明 N={dim}，实际 {len(rows)} 行")
    entries = np.empty((dim, dim), dtype=complex)
    for i, row in enumerate(rows):
        tokens = row.split()
        if len(tokens) != dim:
            raise SystemFileError(f"应有 {dim} 个元素，得到 {len(tokens)} 个", line=i + 2)
        entries[i] = [_parse_complex(token, i + 2) for token in tokens]
    return FockOperator(entries=entries)


def dump_state(state: FockState) -> str:
    lines = [f"{STATE_HEADER} N={state.dim}"]
    lines.extend(format_complex(z) for z in state.amplitudes)
    return "\n".join(lines) + "\n"


def parse_state(text: str) -> FockState:
    lines = text.splitlines()
    if not lines:
        raise SystemFileError("空的态矢量文件")
    dim = _parse_header(lines[0], STATE_HEADER)
    if len(lines) - 1 != dim:
        raise SystemFileError(f"声明 N={dim}，实际 {len(lines) - 1} 行")
    amplitudes = [_parse_complex(token.strip(), i + 2) for i, token in enumerate(lines[1:])]
    return FockState(amplitudes=amplitudes)


class DataSaver:
    """数据保存器"""

    def __init__(self, output_dir: Union[str, Path] = "output"):
        self.output_dir = Path(output_dir)

    def resolve_path(self, filename: Union[str, Path]) -> Path:
        """只给文件名时放到输出目录下，带目录的路径原样使用"""
        path = Path(filename)
        if path.is_absolute() or path.parent != Path("."):
            target = path
        else:
            target = self.output_dir / path
        target.parent.mkdir(parents=True, exist_ok=True)
        return target

    def _write_text(self, text: str, filename: Union[str, Path], label: str) -> str:
        file_path = self.resolve_path(filename)
        try:
            with open(file_path, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
            logger.info(f"{label}已保存: {file_path}")
            return str(file_path)
        except OSError as e:
            logger.error(f"保存{label}失败: {e}")
            raise

    def save_operator(self, op: FockOperator, filename: Union[str, Path]) -> str:
        return self._write_text(dump_operator(op), filename, "算符")

    def save_state(self, state: FockState, filename: Union[str, Path]) -> str:
        return self._write_text(dump_state(state), filename, "态矢量")

    def load_operator(self, filename: Union[str, Path]) -> FockOperator:
        return parse_operator(Path(filename).read_text(encoding="utf-8"))

    def load_state(self, filename: Union[str, Path]) -> FockState:
        return parse_state(Path(filename).read_text(encoding="utf-8"))

    def save_csv(self, header: Sequence[str], rows: Iterable[Sequence[float]],
                 filename: Union[str, Path]) -> str:
        """保存为 CSV：逗号分隔、'.' 小数点、LF 换行、17 位有效数字

        Args:
            header: 表头
            rows: 数值行
            filename: 文件名或路径
        """
        file_path = self.resolve_path(filename)
        try:
            with open(file_path, "w", newline="", encoding="utf-8") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(header)
                for row in rows:
                    writer.writerow([format_number(value) for value in row])
            logger.info(f"CSV 已保存: {file_path}")
            return str(file_path)
        except OSError as e:
            logger.error(f"保存CSV失败: {e}")
            raise

    def save_report_json(self, report: VerificationReport, filename: Union[str, Path],
                         analysis: Optional[dict] = None) -> str:
        """保存验证报告（pass 字段使用别名）"""
        data = report.model_dump(by_alias=True)
        if analysis is not None:
            data["analysis"] = analysis
        text = json.dumps(data, ensure_ascii=False, indent=2) + "\n"
        return self._write_text(text, filename, "JSON 报告")


def read_csv_rows(path: Union[str, Path]) -> List[List[str]]:
    """读取 CSV（含表头）"""
    with open(path, "r", newline="", encoding="utf-8") as f:
        return [row for row in csv.reader(f)]
