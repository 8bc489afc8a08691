# coding=utf-8
import logging
import math

log = logging.getLogger(__name__)


def format_number(value, digits=6):
    """
    >>> format_number(0.206349206)
    '0.206349'
    >>> format_number(None)
    '-'
    >>> format_number(float('inf'))
    'inf'
    >>> format_number(True)
    'yes'
    """
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            return str(value)
        return "{:.{}g}".format(value, digits)
    return str(value)


def text_table_header_row(data, widths):
    """
    >>> text_table_header_row(['p_l', 'large_signal'], [5, 12])
    'P L    Large Signal'
    """
    cells = []
    for title, width in zip(data, widths):
        cells.append(title.replace("_", " ").title().ljust(width))
    return "  ".join(cells).rstrip()


def text_row_with_ordered_headers(data, col_headers, widths):
    """
    >>> text_row_with_ordered_headers({'p_l': 800.0, 'large_signal': True}, ['p_l', 'large_signal'], [5, 12])
    '800    yes'
    """
    cells = []
    for header, width in zip(col_headers, widths):
        cells.append(format_number(data.get(header)).ljust(width))
    return "  ".join(cells).rstrip()


def text_table_from_dict(data, ordering):
    """
    Render a list of dicts as an aligned plain text table.

    >>> print(text_table_from_dict([{'p_l': 800.0, 'ok': True}, {'p_l': 810.0, 'ok': False}], ['p_l', 'ok']))
    P L  Ok
    ---  ---
    800  yes
    810  no
    """
    widths = []
    for header in ordering:
        width = len(header)
        for row in data:
            width = max(width, len(format_number(row.get(header))))
        widths.append(width)
    lines = [text_table_header_row(ordering, widths)]
    lines.append("  ".join("-" * max(w, 3) for w in widths).rstrip())
    for row in data:
        lines.append(text_row_with_ordered_headers(row, ordering, widths))
    return "\n".join(lines)


def linspace_inclusive(start, stop, n):
    """
    Evenly spaced axis values with both ends included.

    >>> linspace_inclusive(0.0, 1.0, 3)
    [0.0, 0.5, 1.0]
    """
    if n < 2:
        raise ValueError("Expected at least two points [{}]".format(n))
    step = (stop - start) / float(n - 1)
    values = [start + k * step for k in range(n)]
    values[-1] = stop
    return values
