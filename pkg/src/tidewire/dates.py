"""Date parsing/formatting shared by selection, templates and lexicons."""

from __future__ import annotations

import datetime as dt
import re

MONTH_ABBR_EN = ("Jan", "Feb", "Mar", "Apr", "May", "Jun",
                 "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")
MONTH_FULL_EN = ("January", "February", "March", "April", "May", "June",
                 "July", "August", "September", "October", "November", "December")
# Capitalized month names, matching the house style of the shipped lexicons.
MONTH_PT = ("Janeiro", "Fevereiro", "Março", "Abril", "Maio", "Junho",
            "Julho", "Agosto", "Setembro", "Outubro", "Novembro", "Dezembro")

_EN_DATE = re.compile(r"^\s*([A-Za-z]{3,9})\.?\s+(\d{1,2}),?\s+(\d{4})\s*$")
_ISO_DATE = re.compile(r"^\s*(\d{4})-(\d{2})-(\d{2})\s*$")
_BR_DATE = re.compile(r"^\s*(\d{1,2})/(\d{1,2})/(\d{4})\s*$")


def _month_from_name(name: str) -> int | None:
    low = name.lower()
    for table in (MONTH_ABBR_EN, MONTH_FULL_EN, MONTH_PT):
        for i, month in enumerate(table, start=1):
            if month.lower() == low or month.lower().startswith(low[:3]):
                if low.startswith(month.lower()[:3]):
                    return i
    return None


def parse_flex_date(value: str) -> dt.date | None:
    """Best-effort date parse: 'Jan 15, 2022', ISO, or dd/mm/yyyy. None if unparseable."""
    m = _ISO_DATE.match(value)
    if m:
        try:
            return dt.date(int(m.group(1)), int(m.group(2)), int(m.group(3)))
        except ValueError:
            return None
    m = _EN_DATE.match(value)
    if m:
        month = _month_from_name(m.group(1))
        if month is None:
            return None
        try:
            return dt.date(int(m.group(3)), month, int(m.group(2)))
        except ValueError:
            return None
    m = _BR_DATE.match(value)
    if m:
        try:
            return dt.date(int(m.group(3)), int(m.group(2)), int(m.group(1)))
        except ValueError:
            return None
    return None


def format_date_en(date: dt.date) -> str:
    """'Jan 15, 2022' — the convention used in document headers."""
    return f"{MONTH_ABBR_EN[date.month - 1]} {date.day}, {date.year}"


def format_date_en_long(date: dt.date) -> str:
    return f"{MONTH_FULL_EN[date.month - 1]} {date.day}, {date.year}"


def format_date_pt(date: dt.date) -> str:
    """'15 de Janeiro de 2022' — Portuguese long form."""
    return f"{date.day} de {MONTH_PT[date.month - 1]} de {date.year}"
