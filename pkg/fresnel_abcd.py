#!/usr/bin/env python3
"""
ABCD 定律与 Fresnel 算符命令行工具

使用方法:
    python fresnel_abcd.py trace system.json --ray 1 0
    python fresnel_abcd.py beam system.json --q0 0 1
    python fresnel_abcd.py --dim 128 operator --A 2 --B 1 --C 1 --D 1 --route canonical
    python fresnel_abcd.py --dim 256 --out kernel.csv kernel --A 1 --B 1 --C 0 --D 1
    python fresnel_abcd.py --seed 7 verify group --trials 100
    python fresnel_abcd.py --out damped.csv damped --gamma 0.3 --t-max 1 --steps 20

退出码: 0 成功, 2 文件格式错误, 3 数值极点, 4 定义域错误, 5 验证未通过
"""
import argparse
import sys
from pathlib import Path

# 添加src目录到Python路径
project_root = Path(__file__).parent
src_path = project_root / "src"
sys.path.insert(0, str(src_path))

from loguru import logger
from pydantic import ValidationError

from optics.errors import (FresnelError, NonNormalizableError, NonUnimodularError, PoleError,
                          VerificationFailure)
from optics.fresnel_operator import build_fresnel, kernel_comparison, unitarity_residual
from optics.matrix_optics import propagate_q, trace_ray, trace_system
from optics.models import DampedOscillatorParams, QParam, Ray, RayMatrix, Route
from optics.quantum_abcd import damped_evolution
from optics.system_loader import load_system, system_matrices, system_matrix
from optics.verification import SUITES, run_verification
from utils.analysis import analyze_report
from utils.config import AppConfig, load_config
from utils.data_saver import DataSaver, format_number
from utils.logger import setup_logger
from utils.report_generator import format_text_report, generate_html_report

# 命令行输入矩阵的行列式容差
CLI_DET_TOLERANCE = 1e-9

KERNEL_COLUMNS = ["x1", "x2", "re_analytic", "im_analytic", "re_fock", "im_fock", "abs_err"]
DAMPED_COLUMNS = ["t", "re_q2", "im_q2", "squeeze_magnitude", "fidelity_vs_operator_route"]
BEAM_COLUMNS = ["element", "re_q", "im_q"]


def matrix_from_args(args) -> RayMatrix:
    """由 --A --B --C --D 构造矩阵，行列式偏离 1 超过 1e-9 时报错（或按 --fix-d 修正）"""
    a, b, c, d = args.A, args.B, args.C, args.D
    det = a * d - b * c
    if abs(det - 1.0) > CLI_DET_TOLERANCE:
        if not args.fix_d:
            raise NonUnimodularError(f"AD - BC = {det!r}，偏离 1 超过 {CLI_DET_TOLERANCE}"
                                     f"（可用 --fix-d 以 D = (1+BC)/A 修正）")
        if a == 0:
            raise NonUnimodularError("A = 0 时无法用 D = (1+BC)/A 修正")
        d = (1.0 + b * c) / a
        logger.warning(f"已修正 D = {d!r}")
    elif a != 0:
        d = (1.0 + b * c) / a
    elif b != 0:
        c = (a * d - 1.0) / b
    return RayMatrix(a=a, b=b, c=c, d=d)


def _fmt(value: float) -> str:
    return format_number(value)


def cmd_trace(args, config: AppConfig, saver: DataSaver) -> int:
    elements = load_system(args.system)
    ray = Ray(height=args.ray[0], direction=args.ray[1])
    matrices = system_matrices(elements)
    rays = trace_system(matrices, ray)
    print(f"input: r={_fmt(ray.height)} alpha={_fmt(ray.direction)}")
    for index, (element, out) in enumerate(zip(elements, rays), start=1):
        params = ",".join(_fmt(p) for p in element.params)
        print(f"{index}: {element.kind}({params}) r={_fmt(out.height)} alpha={_fmt(out.direction)}")
    final = rays[-1] if rays else ray
    print(f"final: r={_fmt(final.height)} alpha={_fmt(final.direction)}")
    check = trace_ray(system_matrix(elements), ray)
    gap = max(abs(check.height - final.height), abs(check.direction - final.direction))
    logger.debug(f"逐元件追迹与复合矩阵追迹的偏差 {gap:.3e}")
    return 0


def cmd_beam(args, config: AppConfig, saver: DataSaver) -> int:
    elements = load_system(args.system)
    q = QParam(q=complex(args.q0[0], args.q0[1]))
    if not q.in_upper_half_plane:
        raise NonNormalizableError(f"Im q0 = {q.q.imag} <= 0，不对应可归一的高斯光束")
    rows = [[0, q.q.real, q.q.imag]]
    print(f"0: input q={_fmt(q.q.real)}{'+' if q.q.imag >= 0 else '-'}{_fmt(abs(q.q.imag))}i")
    for index, (element, m) in enumerate(zip(elements, system_matrices(elements)), start=1):
        try:
            q = propagate_q(m, q)
        except PoleError as e:
            raise PoleError(f"第 {index} 个元件 {element.kind} 处: {e}") from e
        rows.append([index, q.q.real, q.q.imag])
        print(f"{index}: {element.kind} q={_fmt(q.q.real)}{'+' if q.q.imag >= 0 else '-'}"
              f"{_fmt(abs(q.q.imag))}i")
    if args.out:
        saver.save_csv(BEAM_COLUMNS, rows, args.out)
    return 0


def cmd_operator(args, config: AppConfig, saver: DataSaver) -> int:
    m = matrix_from_args(args)
    build = build_fresnel(m, args.dim, Route(args.route))
    residual = unitarity_residual(build.op)
    path = saver.save_operator(build.op, args.out or "fresnel_operator.txt")
    print(f"route={build.route.value} N={build.dim} unitarity_residual={residual:.3e}")
    print(f"operator written to {path}")
    return 0


def cmd_kernel(args, config: AppConfig, saver: DataSaver) -> int:
    m = matrix_from_args(args)
    rows, phase, max_error = kernel_comparison(m, args.dim, args.extent, args.points)
    path = saver.save_csv(KERNEL_COLUMNS, rows, args.out or "kernel_comparison.csv")
    print(f"max_abs_deviation={max_error:.3e} phase={phase.real:+.6f}{phase.imag:+.6f}i")
    print(f"CSV written to {path}")
    return 0


def cmd_verify(args, config: AppConfig, saver: DataSaver) -> int:
    report = run_verification(args.selector, args.dim, args.seed, args.trials,
                              settings=config.verification)
    analysis_result = analyze_report(report)
    sys.stdout.write(format_text_report(report, analysis_result))
    target = args.out or (config.output.report_json if args.save else None)
    if target:
        json_path = saver.save_report_json(report, target, analysis_result)
        if config.output.report_html:
            generate_html_report(report, analysis_result, config.output.report_html,
                                 output_dir=Path(json_path).parent)
    if not report.all_passed:
        raise VerificationFailure(f"{report.failed}/{report.total} 个用例未通过")
    return 0


def cmd_damped(args, config: AppConfig, saver: DataSaver) -> int:
    params = DampedOscillatorParams(gamma=args.gamma, omega0=args.omega0, t=0.0)
    rows = damped_evolution(params, args.t_max, args.steps, args.dim)
    path = saver.save_csv(DAMPED_COLUMNS, rows, args.out or "damped_evolution.csv")
    print(f"{len(rows)} rows written to {path}")
    return 0


def _add_matrix_args(parser: argparse.ArgumentParser):
    for name in ("A", "B", "C", "D"):
        parser.add_argument(f"--{name}", type=float, required=True, help=f"矩阵元 {name}")
    parser.add_argument("--fix-d", action="store_true", help="以 D = (1+BC)/A 修正行列式")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="ABCD 定律与 Fresnel 算符数值工具")
    parser.add_argument("--dim", type=int, default=None, help="Fock 截断维数 N（默认取配置或 FRESNEL_DIM）")
    parser.add_argument("--seed", type=int, default=None, help="随机种子")
    parser.add_argument("--out", default=None, help="输出文件路径")
    parser.add_argument("--config", default=None, help="配置文件路径")
    parser.add_argument("-v", "--verbose", action="store_true", help="输出调试日志")
    sub = parser.add_subparsers(dest="command", required=True)

    trace = sub.add_parser("trace", help="光线追迹")
    trace.add_argument("system", help="系统描述文件")
    trace.add_argument("--ray", type=float, nargs=2, default=[1.0, 0.0], metavar=("R", "ALPHA"))
    trace.set_defaults(handler=cmd_trace)

    beam = sub.add_parser("beam", help="复光束参数 q 的传播")
    beam.add_argument("system", help="系统描述文件")
    beam.add_argument("--q0", type=float, nargs=2, default=[0.0, 1.0], metavar=("RE", "IM"))
    beam.set_defaults(handler=cmd_beam)

    operator = sub.add_parser("operator", help="构造 Fresnel 算符并写出")
    _add_matrix_args(operator)
    operator.add_argument("--route", choices=[r.value for r in Route], default=Route.NORMAL_ORDER.value)
    operator.set_defaults(handler=cmd_operator)

    kernel = sub.add_parser("kernel", help="解析核与 Fock 重建核的对比")
    _add_matrix_args(kernel)
    kernel.add_argument("--extent", type=float, default=2.0, help="网格半宽")
    kernel.add_argument("--points", type=int, default=41, help="每维网格点数")
    kernel.set_defaults(handler=cmd_kernel)

    verify = sub.add_parser("verify", help="运行验证套件")
    verify.add_argument("selector", nargs="?", default="all", choices=["all", *SUITES])
    verify.add_argument("--trials", type=int, default=None, help="随机试验次数")
    verify.add_argument("--save", action="store_true", help="未给 --out 时把报告存到输出目录")
    verify.set_defaults(handler=cmd_verify)

    damped = sub.add_parser("damped", help="阻尼振子演化")
    damped.add_argument("--gamma", type=float, required=True, help="阻尼 γ")
    damped.add_argument("--omega0", type=float, default=1.0, help="固有频率 ω₀")
    damped.add_argument("--t-max", type=float, default=1.0, help="最大时间")
    damped.add_argument("--steps", type=int, default=20, help="时间步数")
    damped.set_defaults(handler=cmd_damped)
    return parser


def main(argv=None) -> int:
    """主函数"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0

    try:
        config = load_config(args.config)
        setup_logger(config.logging, verbose=args.verbose)
        args.dim = args.dim if args.dim is not None else config.fock.default_dim
        args.seed = args.seed if args.seed is not None else config.fock.seed
        saver = DataSaver(config.output.output_dir)
        return args.handler(args, config, saver)
    except FresnelError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        logger.error(f"参数无效: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 4
    except KeyboardInterrupt:
        print("\n⏹️  用户中断操作", file=sys.stderr)
        return 1


if __name__ == "__main__":
    exit(main())
