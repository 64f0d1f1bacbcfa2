import re
from fractions import Fraction
from typing import Any, Callable, Dict


def snake_to_title(snake_str: str) -> str:
    """
    Converts a snake_case string to title case.

    Example:
        >>> snake_str = "hello_world"
        >>> snake_to_title(snake_str)
        "Hello World"
    """
    return snake_str.replace('_', ' ').title()


def slugify(text: str, replace_specials_with: str = "_", replace_spaces_with: str = "-") -> str:
    return re.sub(r'[^\w\s-]+', replace_specials_with, text).strip().lower().replace(' ', replace_spaces_with)


def format_rational(value: Fraction | int | float, digits: int = 6) -> str:
    """
    Render an exact rational for humans: integers verbatim, small fractions as p/q,
    everything else as a rounded decimal followed by the exact value in brackets.

    Example:
        >>> format_rational(Fraction(1, 3))
        '1/3'
        >>> format_rational(Fraction(12345, 100003))
        '0.123446 [12345/100003]'
    """
    if isinstance(value, float):
        return f"{value:.{digits}g}"
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    if len(str(value.denominator)) <= 3 and len(str(value.numerator)) <= 3:
        return f"{value.numerator}/{value.denominator}"
    return f"{float(value):.{digits}f} [{value.numerator}/{value.denominator}]"


def dict_to_table(
    rows: list[Dict[str, Any]],
    key_converter: Callable[[str], str] = snake_to_title,
) -> str:
    """
    Render a list of flat dicts as a fixed width text table (one header row).

    Args:
        rows (list[Dict[str, Any]]): Rows sharing the same keys. Missing keys render empty.
        key_converter (Callable[[str], str], optional): Header formatter. Defaults to snake_to_title.

    Returns:
        str: The table, or an empty string when there are no rows.
    """
    if not rows:
        return ""
    keys = list(dict.fromkeys(k for row in rows for k in row))
    cells = [[key_converter(k) for k in keys]] + [
        [format_rational(row[k]) if isinstance(row.get(k), Fraction) else str(row.get(k, "")) for k in keys]
        for row in rows
    ]
    widths = [max(len(r[i]) for r in cells) for i in range(len(keys))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)
