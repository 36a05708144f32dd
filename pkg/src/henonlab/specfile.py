"""JSON map and family files.

A map file lists elementary factors with rational coefficients:

    {"factors": [{"poly": ["-1", "0", "1"], "delta": "1/2"}]}

poly is ascending (c0 ... cd, d >= 2), rationals are "num/den" strings
(plain integers also accepted). A one-parameter family uses a list in
place of any scalar: the list holds coefficients of powers of t,
ascending:

    {"factors": [{"poly": [["0", "1"], "0", "1"], "delta": "1/2"}]}

gives p_t(y) = y^2 + t and delta = 1/2. Errors carry the file path and
the line of the offending key.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .core import ElementaryHenon, HenonMap
from .family import FamilyFactor, HenonFamily
from .poly import UniPoly
from .rationals import parse_rational


class SpecFileError(ValueError):
    """Malformed map/family file; str() is 'path:line: message'."""

    def __init__(self, message: str, path: str = "?", line: int = 0):
        self.message = message
        self.path = path
        self.line = line
        where = f"{path}:{line}" if line else path
        super().__init__(f"{where}: {message}")


def _key_line(text: str, key: str, occurrence: int) -> int:
    """Line (1-based) of the n-th occurrence of a JSON key; 0 if absent."""
    needle = f'"{key}"'
    seen = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        count = line.count(needle)
        if seen + count > occurrence:
            return lineno
        seen += count
    return 0


def _parse_scalar(raw, what: str, err) -> Fraction:
    if isinstance(raw, bool) or not isinstance(raw, (str, int)):
        raise err(f"{what} must be a rational string like '3/4', got {raw!r}")
    try:
        return parse_rational(raw)
    except (ValueError, ZeroDivisionError, TypeError):
        raise err(f"{what} is not a valid rational: {raw!r}") from None


def _parse_coeff_poly(raw, what: str, err) -> UniPoly:
    """A scalar (constant in t) or a list of scalars (ascending in t)."""
    if isinstance(raw, list):
        if not raw:
            raise err(f"{what}: empty coefficient list")
        return UniPoly([_parse_scalar(c, what, err) for c in raw])
    return UniPoly([_parse_scalar(raw, what, err)])


def _load_document(path) -> tuple[dict, str, str]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecFileError(f"cannot read file: {exc}", str(path))
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"invalid JSON: {exc.msg}", str(path), exc.lineno)
    if not isinstance(doc, dict):
        raise SpecFileError("top level must be a JSON object", str(path), 1)
    return doc, text, str(path)


_TOP_KEYS = {"factors", "transposed", "kind", "name", "comment"}
_FACTOR_KEYS = {"poly", "delta"}


def _check_shape(doc: dict, text: str, path: str):
    for key in doc:
        if key not in _TOP_KEYS:
            raise SpecFileError(
                f"unknown top-level key {key!r}", path, _key_line(text, key, 0)
            )
    factors = doc.get("factors")
    if not isinstance(factors, list) or not factors:
        raise SpecFileError(
            "'factors' must be a non-empty list", path, _key_line(text, "factors", 0)
        )
    for i, fac in enumerate(factors):
        if not isinstance(fac, dict):
            raise SpecFileError(
                f"factor {i} must be an object", path, _key_line(text, "factors", 0)
            )
        for key in fac:
            if key not in _FACTOR_KEYS:
                raise SpecFileError(
                    f"factor {i}: unknown key {key!r}", path, _key_line(text, key, 0)
                )
        for key in _FACTOR_KEYS:
            if key not in fac:
                raise SpecFileError(
                    f"factor {i}: missing {key!r}", path, _key_line(text, "poly", i)
                )
    transposed = doc.get("transposed", False)
    if not isinstance(transposed, bool):
        raise SpecFileError(
            "'transposed' must be a boolean", path, _key_line(text, "transposed", 0)
        )


def _is_family_document(doc: dict) -> bool:
    for fac in doc["factors"]:
        if isinstance(fac.get("delta"), list):
            return True
        poly = fac.get("poly")
        if isinstance(poly, list) and any(isinstance(c, list) for c in poly):
            return True
    return False


def load_map(path) -> HenonMap:
    """Read a map file; raises SpecFileError with path:line context."""
    doc, text, pathstr = _load_document(path)
    _check_shape(doc, text, pathstr)
    if _is_family_document(doc):
        raise SpecFileError(
            "file holds a one-parameter family, not a single map "
            "(coefficient lists in t present); use load_family",
            pathstr,
            _key_line(text, "factors", 0),
        )
    factors = []
    for i, fac in enumerate(doc["factors"]):

        def err(msg, _i=i):
            line = _key_line(text, "poly" if "poly" in msg else "delta", _i)
            return SpecFileError(f"factor {_i}: {msg}", pathstr, line)

        poly_raw = fac["poly"]
        if not isinstance(poly_raw, list) or len(poly_raw) < 3:
            raise err("poly must list at least 3 coefficients (degree >= 2)")
        coeffs = [_parse_scalar(c, "poly coefficient", err) for c in poly_raw]
        if coeffs[-1] == 0:
            raise err("poly leading coefficient must be nonzero")
        delta = _parse_scalar(fac["delta"], "delta", err)
        if delta == 0:
            raise err("delta must be nonzero")
        factors.append(ElementaryHenon(UniPoly(coeffs), delta))
    return HenonMap(tuple(factors), transposed=bool(doc.get("transposed", False)))


def load_family(path) -> HenonFamily:
    """Read a one-parameter family file (scalars are constant in t)."""
    doc, text, pathstr = _load_document(path)
    _check_shape(doc, text, pathstr)
    factors = []
    for i, fac in enumerate(doc["factors"]):

        def err(msg, _i=i):
            line = _key_line(text, "poly" if "poly" in msg else "delta", _i)
            return SpecFileError(f"factor {_i}: {msg}", pathstr, line)

        poly_raw = fac["poly"]
        if not isinstance(poly_raw, list) or len(poly_raw) < 3:
            raise err("poly must list at least 3 coefficients (degree >= 2)")
        coeff_polys = [_parse_coeff_poly(c, "poly coefficient", err) for c in poly_raw]
        if coeff_polys[-1].is_zero:
            raise err("poly leading coefficient must not vanish identically")
        delta_poly = _parse_coeff_poly(fac["delta"], "delta", err)
        if delta_poly.is_zero:
            raise err("delta must not vanish identically")
        factors.append(FamilyFactor(tuple(coeff_polys), delta_poly))
    if doc.get("transposed", False):
        raise SpecFileError(
            "families do not support 'transposed'", pathstr, _key_line(text, "transposed", 0)
        )
    return HenonFamily(tuple(factors))


def load_any(path):
    """Map or family, inferred from the presence of coefficient lists in t."""
    doc, text, pathstr = _load_document(path)
    _check_shape(doc, text, pathstr)
    if _is_family_document(doc) or doc.get("kind") == "family":
        return load_family(path)
    return load_map(path)
