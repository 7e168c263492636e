"""Row-oriented reports in an aligned table or a line-delimited machine format.

Machine records are JSON objects, one per line.  Exact rationals are written
as ``"p/q"`` strings and complex numbers as ``"x+yi"`` strings with
round-trip precision; :func:`parse_machine` restores both types.
"""

from __future__ import annotations

import json
import math
import re
from fractions import Fraction
from typing import Mapping, Sequence

_RATIONAL = re.compile(r"^[+-]?\d+/\d+$")
_NUM = r"(?:[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]?(?:inf|nan))"
_MACHINE_COMPLEX = re.compile(rf"^(?:{_NUM})[+-](?:\d+\.?\d*(?:[eE][+-]?\d+)?|inf|nan)i$")


class ComplexLiteralError(ValueError):
    pass


def parse_complex(text: str) -> complex:
    """Parse ``x+yi`` / ``x-yi`` / ``x`` / ``yi`` with decimal x, y."""
    t = text.strip().replace(" ", "")
    if not t:
        raise ComplexLiteralError("empty complex literal")
    if t.endswith("i"):
        m = re.fullmatch(rf"(?P<re>{_NUM}(?=[+-]))?(?P<im>[+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)i", t)
        if m is None:
            raise ComplexLiteralError(f"malformed complex literal {text!r}")
        im = m.group("im")
        if im in ("", "+"):
            im = "1"
        elif im == "-":
            im = "-1"
        try:
            return complex(float(m.group("re") or 0.0), float(im))
        except ValueError:
            raise ComplexLiteralError(f"malformed complex literal {text!r}") from None
    if re.fullmatch(_NUM, t) is None:
        raise ComplexLiteralError(f"malformed complex literal {text!r}")
    return complex(float(t), 0.0)


def format_complex(z: complex) -> str:
    """Round-trip representation ``x+yi``."""
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def _fmt_real(x: float, digits: int) -> str:
    if x != x or math.isinf(x):
        return str(x)
    if x != 0 and abs(x) < 10.0 ** (-digits):
        return f"{x:.{digits - 1}e}"
    s = f"{x:.{digits}f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def format_value(v, digits: int = 6) -> str:
    """Human-readable cell."""
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, complex):
        re_ = _fmt_real(v.real, digits)
        im = _fmt_real(abs(v.imag), digits)
        if im == "0":
            return f"{re_}+0i"
        sign = "-" if v.imag < 0 else "+"
        return f"{re_}{sign}{im}i"
    if isinstance(v, float):
        return _fmt_real(v, digits)
    if isinstance(v, (list, tuple)):
        return ",".join(format_value(x, digits) for x in v)
    if v is None:
        return "-"
    return str(v)


def _encode(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, complex):
        return format_complex(v)
    if isinstance(v, (list, tuple)):
        return [_encode(x) for x in v]
    return v


def _decode(v):
    if isinstance(v, str):
        if _RATIONAL.match(v):
            return Fraction(v)
        if _MACHINE_COMPLEX.match(v):
            return parse_complex(v)
        return v
    if isinstance(v, list):
        return [_decode(x) for x in v]
    return v


def emit_report(
    rows: Sequence[Mapping],
    fmt: str = "table",
    columns: Sequence[str] | None = None,
    digits: int = 6,
) -> str:
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    if fmt == "machine":
        return "".join(json.dumps({k: _encode(r.get(k)) for k in columns}, ensure_ascii=False) + "\n" for r in rows)
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")
    cells = [[format_value(r.get(k), digits) for k in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in cells:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n" if columns else ""


def parse_machine(text: str) -> list[dict]:
    """Inverse of ``emit_report(rows, "machine")``."""
    out = []
    for line in text.splitlines():
        if line.strip():
            out.append({k: _decode(v) for k, v in json.loads(line).items()})
    return out
