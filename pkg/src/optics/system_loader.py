"""
光学系统描述文件加载

文件是 JSON 兼容的结构化文本（YAML 超集亦可），内容为按光束经过顺序
排列的元件列表，或形如 {"elements": [...]} 的映射：

    [{"kind": "free", "params": [1.0]},
     {"kind": "lens", "params": [1.0]}]
"""
from pathlib import Path
from typing import List, Union

import yaml
from loguru import logger
from pydantic import ValidationError

from .errors import DomainError, SystemFileError
from .matrix_optics import compose_chain, free_space, magnifier, thin_lens
from .models import RayMatrix, SystemElement


def _element_lines(text: str, count: int) -> List[int]:
    """每个元件在文件中的起始行号（从 1 开始）"""
    root = yaml.compose(text, Loader=yaml.SafeLoader)
    if root is None:
        return [None] * count
    if isinstance(root, yaml.MappingNode):
        for key, value in root.value:
            if key.value == "elements":
                root = value
                break
    if not isinstance(root, yaml.SequenceNode):
        return [None] * count
    return [node.start_mark.line + 1 for node in root.value]


def parse_system(text: str) -> List[SystemElement]:
    """解析系统描述文本"""
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as e:
        line = e.problem_mark.line + 1 if e.problem_mark is not None else None
        raise SystemFileError(f"无法解析: {e.problem}", line=line) from e
    except yaml.YAMLError as e:
        raise SystemFileError(f"无法解析: {e}") from e

    if data is None:
        return []
    if isinstance(data, dict):
        if "elements" not in data:
            raise SystemFileError("映射形式的系统文件必须包含 elements 字段", line=1)
        data = data["elements"]
    if not isinstance(data, list):
        raise SystemFileError("系统文件必须是元件列表", line=1)

    lines = _element_lines(text, len(data))
    elements = []
    for index, (raw, line) in enumerate(zip(data, lines)):
        if not isinstance(raw, dict):
            raise SystemFileError(f"第 {index + 1} 个元件必须是映射，得到 {raw!r}", line=line)
        try:
            elements.append(SystemElement(**raw, line=line))
        except ValidationError as e:
            details = "; ".join(err["msg"] for err in e.errors())
            raise SystemFileError(f"第 {index + 1} 个元件无效: {details}", line=line) from e
        except TypeError as e:
            raise SystemFileError(f"第 {index + 1} 个元件无效: {e}", line=line) from e
    logger.debug(f"解析得到 {len(elements)} 个元件")
    return elements


def load_system(path: Union[str, Path]) -> List[SystemElement]:
    """读取系统描述文件"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SystemFileError(f"无法读取系统文件 {path}: {e}") from e
    logger.info(f"加载系统文件: {path}")
    return parse_system(text)


def element_matrix(element: SystemElement) -> RayMatrix:
    """元件对应的 ABCD 矩阵"""
    params = element.params
    if element.kind == "free":
        return free_space(params[0])
    if element.kind == "lens":
        return thin_lens(params[0])
    if element.kind == "magnifier":
        return magnifier(params[0])
    a, b, c, d = params
    return RayMatrix(a=a, b=b, c=c, d=d)


def system_matrices(elements: List[SystemElement]) -> List[RayMatrix]:
    """逐个元件转换为矩阵，元件参数无效时给出元件序号与行号"""
    matrices = []
    for index, element in enumerate(elements):
        try:
            matrices.append(element_matrix(element))
        except DomainError as e:
            raise SystemFileError(f"第 {index + 1} 个元件 ({element.kind}) 无效: {e}",
                                  line=element.line) from e
    return matrices


def system_matrix(elements: List[SystemElement]) -> RayMatrix:
    """整个系统的 ABCD 矩阵 Mₙ…M₁"""
    return compose_chain(system_matrices(elements))
