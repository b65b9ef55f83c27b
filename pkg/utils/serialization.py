"""Report serialization: JSON with 17 significant digits and CSV tables"""

import csv
import io
import json
import math

import numpy as np

INDENT = '  '


def format_float(value):
    """Lossless repr of a float (17 significant digits)"""
    if not math.isfinite(value):
        return 'null'
    text = format(value, '.17g')
    if text.lstrip('-').isdigit():
        text += '.0'
    return text


def _encode(obj, depth):
    pad, inner = INDENT * depth, INDENT * (depth + 1)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return '{}'
        items = [f"{inner}{json.dumps(str(key))}: {_encode(value, depth + 1)}" for key, value in obj.items()]
        return '{\n' + ',\n'.join(items) + '\n' + pad + '}'
    if isinstance(obj, (list, tuple)):
        if not obj:
            return '[]'
        if all(not isinstance(item, (dict, list, tuple, np.ndarray)) for item in obj):
            return '[' + ', '.join(_encode(item, depth + 1) for item in obj) + ']'
        items = [inner + _encode(item, depth + 1) for item in obj]
        return '[\n' + ',\n'.join(items) + '\n' + pad + ']'
    if isinstance(obj, complex):
        return _encode([obj.real, obj.imag], depth)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj):
    """Deterministic JSON text; key order is insertion order"""
    return _encode(obj, 0) + '\n'


def _cell(value):
    if isinstance(value, (list, tuple)):
        return ';'.join(_cell(v) for v in value)
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    if value is None:
        return ''
    return str(value)


def table_rows(report):
    """Per-trial rows of a report, or one row of scalar results"""
    results = report['results']
    rows = results.get('trials')
    if rows:
        return rows
    return [{k: v for k, v in results.items() if not isinstance(v, (dict, list))}]


def to_csv(report):
    """CSV text of the report's per-trial table"""
    rows = table_rows(report)
    columns = []
    for row in rows:
        columns.extend(key for key in row if key not in columns)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow({key: _cell(row.get(key)) for key in columns})
    return buffer.getvalue()
