#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
数据管理模块
处理JSON文件的读写、有理数的解析与格式化等基础功能
"""

import json
import os
from fractions import Fraction
from typing import Any, Union

from pydantic import BaseModel

from errors import ConfigError

RationalLike = Union[Fraction, int, str]


def load_json(file):
    """加载JSON文件，文件不存在或格式错误时抛出带行列号的 ConfigError"""
    if not os.path.exists(file):
        raise ConfigError(f"配置文件不存在: {file}")
    try:
        with open(file, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{file}: 第 {e.lineno} 行第 {e.colno} 列 JSON 格式错误: {e.msg}") from e


def save_json(file, data):
    """保存数据到JSON文件"""
    with open(file, "w", encoding="utf-8") as f:
        f.write(dumps_json(data))
        f.write("\n")


def dumps_json(data: Any) -> str:
    """确定性的 JSON 序列化，重新解析后再次序列化结果逐字节相同"""
    return json.dumps(data, ensure_ascii=False, indent=2)


def dumps_report(report: BaseModel) -> str:
    """pydantic 报告对象序列化为 JSON 文本"""
    return dumps_json(report.model_dump(mode="json"))


def parse_rational(value: RationalLike) -> Fraction:
    """解析有理数：支持 Fraction、整数以及 "3/2"、"-1/2"、"2" 形式的字符串"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ConfigError(f"无法解析为有理数: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                num, den = text.split("/", 1)
                return Fraction(int(num), int(den))
            return Fraction(int(text))
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"无法解析为有理数: {value!r}") from e
    raise ConfigError(f"无法解析为有理数: {value!r}")


def format_rational(value: Fraction) -> str:
    """格式化有理数为 "num/den"，整数省略分母"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_int_list(text: str) -> list[int]:
    """解析逗号分隔的整数列表，空串返回空列表"""
    text = text.strip()
    if not text:
        return []
    try:
        return [int(part) for part in text.split(",")]
    except ValueError as e:
        raise ConfigError(f"无法解析整数列表: {text!r}") from e
