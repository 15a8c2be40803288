from fractions import Fraction
from typing import Optional

from rich.console import Console
from rich.panel import Panel
from rich.text import Text

from bethe_solver import solve_sector
from config import PRESET_DEFAULTS
from data_manager import dumps_json, format_rational
from errors import ConfigError, NumericalError
from model import ModelSpec, SectorLabels, enumerate_sectors, sector_from_reference, validate_model
from presets import PRESET_NAMES, PRESET_TITLES, preset, preset_params
from report_manager import (
    render_sectors,
    render_spectrum,
    render_verification,
    show_presets,
    show_sectors,
    show_spectrum,
    show_verification,
    write_output,
)

from .acceptance import MatricesHook, run_verification
from .schema import RunConfig, SectorReport, SpectrumReport, StateReport, VerificationReport

console = Console(stderr=True)


def show_command_header(title: str, style: str = "cyan"):
    """显示命令头部"""
    title_text = Text(title, style=f"bold {style}")
    title_panel = Panel(title_text, border_style=style, padding=(0, 2))
    console.print(title_panel)


def resolve_model(config: RunConfig) -> tuple[ModelSpec, str]:
    """由配置得到模型与显示名称"""
    if config.preset is not None:
        name = config.preset.name
        return preset(name, preset_params(name, config.preset.params)), PRESET_TITLES[name]
    if config.model is not None:
        return validate_model(config.model), "自定义模型"
    raise ConfigError("需要给出模型：--preset、--config 中的 model 或 preset 字段")


def select_sectors(model: ModelSpec, config: RunConfig) -> list[SectorLabels]:
    """给定参考态时只取其所在扇区，否则按玻色子总数上限枚举"""
    j = config.spin
    if config.sector is not None:
        return [sector_from_reference(model, j, config.sector.to_reference())]
    return enumerate_sectors(model, j, config.max_total_bosons)


def solve_report(model: ModelSpec, j: Fraction, sectors: list[SectorLabels], config: RunConfig) -> SpectrumReport:
    tolerances = config.tolerances
    reports = []
    for sector in sectors:
        try:
            states = solve_sector(
                model,
                sector,
                refine=config.refine,
                root_tol=tolerances.roots,
                bae_tol=tolerances.bae,
                eigen_tol=tolerances.eigen,
                newton_tol=tolerances.newton,
            )
        except NumericalError as e:
            raise type(e)(f"扇区 {sector.to_dict()}: {e}") from e
        for state in states:
            if state.refine_failed:
                kappa = format_rational(sector.kappa)
                console.print(f"[yellow]⚠ 扇区 κ={kappa} 第 {state.eigen_index} 个态精化失败，保留原根[/yellow]")
        reports.append(
            SectorReport(labels=sector.to_dict(), states=[StateReport.model_validate(s.to_dict()) for s in states])
        )
    return SpectrumReport(j=format_rational(j), model=model, sectors=reports)


def cmd_sectors(config: RunConfig) -> list[SectorLabels]:
    """列出扇区及其量子数"""
    model, title = resolve_model(config)
    show_command_header(f"🔢 扇区列表 · {title}")
    sectors = select_sectors(model, config)
    show_sectors(f"j = {format_rational(config.spin)}", sectors)
    write_output(render_sectors(sectors, config.output.format), config.output.path)
    return sectors


def cmd_spectrum(config: RunConfig) -> SpectrumReport:
    """每个扇区的能谱与 Bethe 根"""
    model, title = resolve_model(config)
    show_command_header(f"📈 能谱 · {title}", "green")
    report = solve_report(model, config.spin, select_sectors(model, config), config)
    show_spectrum(report)
    write_output(render_spectrum(report, config.output.format), config.output.path)
    return report


def cmd_roots(config: RunConfig) -> SpectrumReport:
    """单个本征态的 Bethe 根"""
    if config.sector is None:
        raise ConfigError("roots 命令需要用 --mu/--n（或配置文件的 sector 字段）指定扇区")
    model, title = resolve_model(config)
    show_command_header(f"🎯 Bethe 根 · {title}", "green")
    index = config.index or 0
    report = solve_report(model, config.spin, select_sectors(model, config), config)
    sector = report.sectors[0]
    if index >= len(sector.states):
        raise ConfigError(f"--index {index} 超出范围：扇区共有 {len(sector.states)} 个态")
    report.sectors[0] = SectorReport(labels=sector.labels, states=[sector.states[index]])
    show_spectrum(report)
    write_output(render_spectrum(report, config.output.format), config.output.path)
    return report


def cmd_verify(config: RunConfig, hook: Optional[MatricesHook] = None, **options) -> VerificationReport:
    """运行完整验证"""
    show_command_header("🧪 验证", "magenta")
    report = run_verification(config, hook=hook, **options)
    show_verification(report)
    write_output(render_verification(report, config.output.format), config.output.path)
    return report


def cmd_preset_list(config: RunConfig):
    """列出预设模型"""
    show_command_header("📚 预设模型")
    show_presets()
    listing = {name: {"title": PRESET_TITLES[name], "params": PRESET_DEFAULTS[name]} for name in PRESET_NAMES}
    write_output(dumps_json(listing) + "\n", config.output.path)
