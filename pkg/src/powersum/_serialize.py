"""Exact serialization helpers.

Every finite ``mpf`` is a dyadic rational, so it has a finite decimal
expansion; emitting that expansion verbatim makes CSV/JSON output exact:
parsing the string back at the same precision reproduces the value
bit-for-bit.  Exact integers are emitted as decimal strings in JSON so
consumers with 64-bit number types cannot corrupt them.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Iterable, List, Sequence

import mpmath as mp


def mpf_to_fraction(v: mp.mpf) -> Fraction:
    """Exact rational value of a finite mpf (always a dyadic rational)."""
    if not mp.isfinite(v):
        raise ValueError(f"cannot convert non-finite value {v!r}")
    if v == 0:
        return Fraction(0)
    sign, man, exp, _ = v._mpf_
    fr = Fraction(man) * Fraction(2) ** exp
    return -fr if sign else fr


def fraction_to_mpf(fr: Fraction, precision_bits: int) -> mp.mpf:
    """Round an exact rational to mpf at the given precision."""
    with mp.workprec(precision_bits):
        return mp.mpf(fr.numerator) / fr.denominator


def fraction_to_exact_decimal(fr: Fraction) -> str:
    """Finite decimal expansion of a dyadic rational, exact."""
    den = fr.denominator
    e = den.bit_length() - 1
    if den != 1 << e:
        raise ValueError(f"{fr} is not dyadic; no finite decimal expansion")
    num = fr.numerator * 5**e
    digits = str(abs(num)).rjust(e + 1, "0")
    body = f"{digits[:-e]}.{digits[-e:]}" if e else digits
    return f"-{body}" if num < 0 else body


def mpf_to_exact_decimal(v: mp.mpf) -> str:
    """Exact finite decimal string of an mpf value."""
    return fraction_to_exact_decimal(mpf_to_fraction(v))


def exact_decimal_to_mpf(s: str, precision_bits: int) -> mp.mpf:
    """Parse a decimal string back to mpf at the given precision.

    Inverse of :func:`mpf_to_exact_decimal`: a value emitted at
    ``precision_bits`` parses back bit-identically at the same precision.
    """
    return fraction_to_mpf(Fraction(s), precision_bits)


SCAN_COLUMNS = ("x", "exact", "main", "second", "two_term",
                "residual_two", "residual_main_only")


def scan_records_to_rows(records: Iterable) -> List[List[str]]:
    """Render scan records as exact string rows in SCAN_COLUMNS order."""
    rows = []
    for r in records:
        rows.append([
            str(r.x),
            str(r.exact),
            mpf_to_exact_decimal(r.main),
            mpf_to_exact_decimal(r.second),
            mpf_to_exact_decimal(r.two_term),
            mpf_to_exact_decimal(r.residual_two),
            mpf_to_exact_decimal(r.residual_main_only),
        ])
    return rows


def scan_to_delimited(scan, delimiter: str = ",") -> str:
    """CSV/TSV text for a residual scan, header + one exact row per record."""
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    writer.writerow(SCAN_COLUMNS)
    writer.writerows(scan_records_to_rows(scan.records))
    return buf.getvalue()


def scan_to_json(scan) -> str:
    """JSON text for a residual scan; all integers as decimal strings."""
    payload = {
        "k": scan.instance.k,
        "s": scan.instance.s,
        "precision_bits": scan.precision_bits,
        "grid": scan.grid,
        "exploratory": scan.exploratory,
        "records": [
            dict(zip(SCAN_COLUMNS, row)) for row in scan_records_to_rows(scan.records)
        ],
    }
    return json.dumps(payload, indent=2)


def read_scan_rows(text: str, delimiter: str = ","):
    """Parse delimited scan text back to raw string rows (header-checked)."""
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    rows = list(reader)
    if not rows or tuple(rows[0]) != SCAN_COLUMNS:
        raise ValueError(f"expected header {SCAN_COLUMNS}, got {rows[:1]!r}")
    return rows[1:]
