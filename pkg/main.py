#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
自旋-玻色子精确求解器主程序
命令行入口：解析参数、合并配置文件，分派到各子命令并映射退出码
"""

import argparse
import sys
from typing import Optional, Sequence

from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.text import Text

from cli.command import cmd_preset_list, cmd_roots, cmd_sectors, cmd_spectrum, cmd_verify
from cli.schema import RunConfig
from data_manager import load_json, parse_int_list
from errors import EXIT_OK, EXIT_VERIFY_FAILED, ConfigError, SpinBosonError
from presets import PRESET_NAMES

console = Console(stderr=True)

TOLERANCE_FLAGS = ("eigen", "roots", "newton", "bae", "match", "algebra", "qes")


class ArgumentParser(argparse.ArgumentParser):
    """参数错误抛出 ConfigError，由 main 统一映射为退出码 1"""

    def error(self, message):
        raise ConfigError(f"参数错误: {message}")


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON 配置文件路径")
    common.add_argument("--preset", choices=PRESET_NAMES, help="预设模型名称")
    common.add_argument("--param", action="append", default=[], metavar="KEY=VALUE", help="预设耦合参数，可重复")
    common.add_argument("--j", help="自旋 j，如 3/2")
    common.add_argument("--mu", help="参考态的 J_0 本征值，给出时只计算该扇区")
    common.add_argument("--n", help="参考态各模式玻色子数，逗号分隔")
    common.add_argument("--max-bosons", type=int, help="枚举扇区时的玻色子总数上限")
    common.add_argument("--format", choices=("json", "csv"), help="输出格式")
    common.add_argument("--output", help="输出文件，缺省为标准输出")
    for name in TOLERANCE_FLAGS:
        common.add_argument(f"--tol-{name}", type=float, help=f"{name} 容差")
    common.add_argument("--seed", type=int, help="verify 随机耦合的种子")
    common.add_argument("--draws", type=int, help="verify 每个预设的随机抽样次数")
    common.add_argument("--refine", action="store_true", default=None, help="在 Bethe 方程上做 Newton 精化")
    common.add_argument("--index", type=int, help="roots 命令的本征态序号")

    parser = ArgumentParser(prog="main.py", description="自旋-玻色子哈密顿量的函数 Bethe ansatz 求解与验证")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)
    commands.add_parser("sectors", parents=[common], help="列出扇区")
    commands.add_parser("spectrum", parents=[common], help="计算能谱与 Bethe 根")
    commands.add_parser("roots", parents=[common], help="单个本征态的 Bethe 根")
    commands.add_parser("verify", parents=[common], help="运行验证")
    preset_parser = commands.add_parser("preset", parents=[common], help="预设模型")
    preset_parser.add_argument("action", choices=("list",))
    return parser


def _parse_params(items: Sequence[str]) -> dict[str, float]:
    params = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--param 需要 key=value 形式，实际为 {item!r}")
        try:
            params[key.strip()] = float(value)
        except ValueError as e:
            raise ConfigError(f"--param {key.strip()} 的值不是数字: {value!r}") from e
    return params


def build_config(args: argparse.Namespace) -> RunConfig:
    """命令行参数覆盖配置文件，配置文件覆盖默认值"""
    data = load_json(args.config) if args.config else {}
    if not isinstance(data, dict):
        raise ConfigError(f"{args.config}: 顶层必须是 JSON 对象")

    params = _parse_params(args.param)
    if args.preset:
        data.pop("model", None)
        previous = data.get("preset") or {}
        keep = previous.get("params", {}) if previous.get("name") == args.preset else {}
        data["preset"] = {"name": args.preset, "params": {**keep, **params}}
    elif params:
        if not isinstance(data.get("preset"), dict):
            raise ConfigError("--param 需要与 --preset 一起使用（或配置文件中给出 preset）")
        data["preset"]["params"] = {**data["preset"].get("params", {}), **params}

    if args.mu is not None:
        data["sector"] = {"mu": args.mu, "n": parse_int_list(args.n or "")}
    elif args.n is not None:
        raise ConfigError("--n 需要与 --mu 一起使用")

    overrides = {
        "j": args.j,
        "max_total_bosons": args.max_bosons,
        "index": args.index,
        "refine": args.refine,
        "seed": args.seed,
        "draws": args.draws,
    }
    data.update({key: value for key, value in overrides.items() if value is not None})

    tolerances = {name: getattr(args, f"tol_{name}") for name in TOLERANCE_FLAGS}
    data["tolerances"] = {**data.get("tolerances", {}), **{k: v for k, v in tolerances.items() if v is not None}}
    output = {"format": args.format, "path": args.output}
    data["output"] = {**data.get("output", {}), **{k: v for k, v in output.items() if v is not None}}

    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        details = "; ".join(
            f"{'.'.join(str(x) for x in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"配置无效: {details}") from e


def show_error(error: SpinBosonError):
    """红色错误面板"""
    title = type(error).__name__
    panel = Panel(Text(str(error), style="red"), title=f"✗ {title}", border_style="red", padding=(0, 2))
    console.print(panel)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """主程序入口，返回退出码"""
    try:
        args = build_parser().parse_args(argv)
        config = build_config(args)
        if args.command == "sectors":
            cmd_sectors(config)
        elif args.command == "spectrum":
            cmd_spectrum(config)
        elif args.command == "roots":
            cmd_roots(config)
        elif args.command == "verify":
            report = cmd_verify(config)
            if not report.passed:
                return EXIT_VERIFY_FAILED
        else:
            cmd_preset_list(config)
    except SpinBosonError as e:
        show_error(e)
        return e.exit_code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
