#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
报告管理模块
扇区列表、能谱与验证结果的终端表格，以及 JSON / CSV 输出
"""

import csv
import io
from typing import Optional, Sequence

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from cli.schema import SpectrumReport, VerificationReport
from config import PRESET_DEFAULTS
from data_manager import dumps_json, dumps_report
from model import SectorLabels
from presets import PRESET_NAMES, PRESET_TITLES

# 表格写到标准错误，标准输出只留给机器可读结果
console = Console(stderr=True)

SECTOR_COLUMNS = ["j", "p", "lambda", "kappa", "q", "l", "A", "N", "dim"]
STATE_COLUMNS = ["index", "E", "eigenvalue", "roots", "residual", "verified", "degenerate_roots", "refined"]


def _cell(value) -> str:
    if isinstance(value, list):
        return "[" + ", ".join(str(x) for x in value) + "]"
    return str(value)


def _roots_text(roots: Sequence[Sequence[float]]) -> str:
    parts = []
    for re, im in roots:
        parts.append(f"{re:.6g}" if im == 0 else f"{re:.6g}{im:+.6g}i")
    return "; ".join(parts)


def show_sectors(title: str, sectors: Sequence[SectorLabels]):
    """扇区标签表"""
    table = Table(title=title, box=box.MINIMAL_DOUBLE_HEAD)
    for name in SECTOR_COLUMNS:
        table.add_column(name, justify="right")
    for sector in sectors:
        labels = sector.to_dict()
        table.add_row(*(_cell(labels[name]) for name in SECTOR_COLUMNS))
    console.print(table)
    console.print(f"[dim]共 {len(sectors)} 个扇区，维数之和 {sum(s.dim for s in sectors)}[/dim]")


def show_spectrum(report: SpectrumReport):
    """每个扇区一张能谱表"""
    if not report.sectors:
        console.print(Panel(Text("没有可计算的扇区", style="yellow"), border_style="yellow", padding=(1, 2)))
        return

    for sector in report.sectors:
        labels = sector.labels
        title = f"j={labels['j']}  p={labels['p']}  κ={labels['kappa']}  l={_cell(labels['l'])}  𝒩={labels['N']}"
        table = Table(title=title, box=box.MINIMAL_DOUBLE_HEAD)
        table.add_column("序号", justify="right")
        table.add_column("能量 E", justify="right")
        table.add_column("Bethe 根", justify="left")
        table.add_column("BAE 残差", justify="right")
        table.add_column("校验", justify="center")
        for state in sector.states:
            residual = "-" if state.residual is None else f"{state.residual:.2e}"
            mark = "[green]✓[/green]" if state.verified else "[red]✗[/red]"
            if state.degenerate_roots:
                mark += " [yellow]重根[/yellow]"
            table.add_row(str(state.index), f"{state.E:.12g}", _roots_text(state.roots) or "-", residual, mark)
        console.print(table)


def show_verification(report: VerificationReport):
    """验证检查表与勘误表"""
    table = Table(title="验证结果", box=box.MINIMAL_DOUBLE_HEAD)
    table.add_column("检查项", justify="left")
    table.add_column("范围", justify="left")
    table.add_column("最大偏差", justify="right")
    table.add_column("阈值", justify="right")
    table.add_column("结果", justify="center")
    for check in report.checks:
        deviation = "-" if check.max_deviation is None else f"{check.max_deviation:.2e}"
        mark = "[green]通过[/green]" if check.passed else "[red]失败[/red]"
        table.add_row(check.name, check.scope, deviation, f"{check.tolerance:.0e}", mark)
    console.print(table)

    for check in report.checks:
        if not check.passed and check.detail:
            console.print(f"[red]✗ {check.name}（{check.scope}）: {check.detail}[/red]")

    errata = Table(title="公式勘误", box=box.MINIMAL_DOUBLE_HEAD)
    errata.add_column("编号", justify="left")
    errata.add_column("位置", justify="left")
    errata.add_column("印刷形式", justify="left")
    errata.add_column("更正形式", justify="left")
    errata.add_column("确认", justify="center")
    for entry in report.errata:
        mark = "[green]✓[/green]" if entry.confirmed else "[red]✗[/red]"
        errata.add_row(entry.id, entry.location, entry.printed, entry.corrected, mark)
    console.print(errata)

    if report.passed:
        summary = Panel(Text("全部检查通过", style="bold green"), border_style="green", padding=(0, 2))
    else:
        failed = sum(not c.passed for c in report.checks) + sum(not e.confirmed for e in report.errata)
        summary = Panel(Text(f"{failed} 项未通过", style="bold red"), border_style="red", padding=(0, 2))
    console.print(summary)


def show_presets():
    """预设模型及其默认耦合"""
    table = Table(title="预设模型", box=box.MINIMAL_DOUBLE_HEAD)
    table.add_column("名称", justify="left")
    table.add_column("说明", justify="left")
    table.add_column("默认耦合", justify="left")
    for name in PRESET_NAMES:
        params = ", ".join(f"{k}={v}" for k, v in PRESET_DEFAULTS[name].items())
        table.add_row(name, PRESET_TITLES[name], params)
    console.print(table)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def render_sectors(sectors: Sequence[SectorLabels], fmt: str) -> str:
    labels = [s.to_dict() for s in sectors]
    if fmt == "csv":
        return _csv_text(SECTOR_COLUMNS, [[_csv_cell(x[name]) for name in SECTOR_COLUMNS] for x in labels])
    return dumps_json({"sectors": labels}) + "\n"


def _csv_cell(value) -> str:
    if isinstance(value, list):
        return " ".join(str(x) for x in value)
    return str(value)


def render_spectrum(report: SpectrumReport, fmt: str) -> str:
    """JSON 为完整报告；CSV 每行一个态，重复扇区标签"""
    if fmt != "csv":
        return dumps_report(report) + "\n"
    rows = []
    for sector in report.sectors:
        labels = [_csv_cell(sector.labels[name]) for name in SECTOR_COLUMNS]
        for state in sector.states:
            values = state.model_dump()
            values["roots"] = " ".join(f"{re!r}{im:+}j" for re, im in state.roots)
            values["residual"] = "" if state.residual is None else repr(state.residual)
            rows.append(labels + [str(values[name]) for name in STATE_COLUMNS])
    return _csv_text(SECTOR_COLUMNS + STATE_COLUMNS, rows)


def render_verification(report: VerificationReport, fmt: str) -> str:
    if fmt != "csv":
        return dumps_report(report) + "\n"
    rows = [
        [c.name, c.scope, "" if c.max_deviation is None else repr(c.max_deviation), repr(c.tolerance), c.passed]
        for c in report.checks
    ]
    rows.extend([f"勘误 {e.id}", e.location, "", "", e.confirmed] for e in report.errata)
    return _csv_text(["name", "scope", "max_deviation", "tolerance", "passed"], rows)


def write_output(text: str, path: Optional[str] = None):
    """写到文件或标准输出"""
    if path is None:
        print(text, end="")
        return
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    console.print(f"[green]✓ 结果已写入 {path}[/green]")
