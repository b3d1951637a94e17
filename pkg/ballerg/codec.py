"""
JSON encoding of spaces, vectors, symbols, polynomials and dictionary files.

Symbols are tagged unions: {"type": "<snake_name>", ...fields}. Complex numbers
are [re, im] pairs.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Optional

from .base_symbol import BaseSymbol
from .config import DEFAULT_DIM_CAP
from .exceptions import DictionaryError, SymbolError
from .functions import Dictionary, PolyFn, functions_from_terms
from .spaces import C0, L2, P_INF, SpaceKind, Vector
from .symbols import (
    AffineContracted,
    AffineHalf,
    BackwardShift,
    Composite,
    Conjugated,
    Constant,
    CoordinatePower,
    CoordinateSquare,
    DiagonalLinear,
    ForwardShift,
    MoebiusAuto,
)


def space_to_json(space: SpaceKind) -> Any:
    if space.tag == "c0":
        return "c0"
    p = space.p
    return {"lp": p if p == P_INF or p != int(p) else int(p)}


def space_from_json(data: Any) -> SpaceKind:
    if data == "c0":
        return C0
    if isinstance(data, dict) and set(data) == {"lp"}:
        return SpaceKind.lp(data["lp"])
    raise SymbolError(f"Unrecognised space {data!r}")


def complex_to_json(z: complex) -> List[float]:
    return [float(z.real), float(z.imag)]


def complex_from_json(data: Any) -> complex:
    if isinstance(data, (int, float)):
        return complex(data)
    if isinstance(data, list) and len(data) == 2:
        return complex(float(data[0]), float(data[1]))
    raise SymbolError(f"Expected a number or [re, im] pair, got {data!r}")


def vector_to_json(v: Vector) -> List[List[float]]:
    return [complex_to_json(z) for z in v.coords]


def vector_from_json(data: Any, space: SpaceKind = L2) -> Vector:
    if not isinstance(data, list) or not data:
        raise SymbolError(f"Expected a nonempty coordinate list, got {data!r}")
    return Vector([complex_from_json(z) for z in data], space)


def symbol_to_json(s: BaseSymbol) -> Dict[str, Any]:
    """Encode a symbol as its tagged JSON form."""
    data: Dict[str, Any] = {"type": s.type_name}
    if isinstance(s, ForwardShift):
        data["dim_cap"] = s.dim_cap
    elif isinstance(s, AffineHalf):
        pass
    elif isinstance(s, AffineContracted):
        data.update(c=s.c, b=s.b)
    elif isinstance(s, CoordinateSquare):
        pass
    elif isinstance(s, CoordinatePower):
        data["m"] = int(s.m)
    elif isinstance(s, DiagonalLinear):
        data.update(weights=list(s.weights), tail=s.tail)
    elif isinstance(s, Constant):
        data.update(point=vector_to_json(s.point), space=space_to_json(s.point.space))
    elif isinstance(s, MoebiusAuto):
        data["a"] = vector_to_json(s.a)
    elif isinstance(s, Conjugated):
        data.update(a=vector_to_json(s.a), inner=symbol_to_json(s.inner))
    elif isinstance(s, Composite):
        data["parts"] = [symbol_to_json(part) for part in s.parts]
    return data


def _require(data: Dict[str, Any], *keys: str) -> None:
    missing = [key for key in keys if key not in data]
    if missing:
        raise SymbolError(f"Symbol {data.get('type')!r} is missing {', '.join(missing)}")


def symbol_from_json(data: Dict[str, Any], dim_cap: Optional[int] = None) -> BaseSymbol:
    """Decode a tagged symbol; ``dim_cap`` overrides the forward-shift cap when given."""
    if not isinstance(data, dict) or "type" not in data:
        raise SymbolError(f"Symbol must be an object with a 'type' tag, got {data!r}")
    kind = data["type"]
    if kind == "forward_shift":
        return ForwardShift(dim_cap or data.get("dim_cap", DEFAULT_DIM_CAP))
    if kind == "backward_shift":
        return BackwardShift()
    if kind == "affine_half":
        return AffineHalf()
    if kind == "affine_contracted":
        _require(data, "c", "b")
        return AffineContracted(float(data["c"]), float(data["b"]))
    if kind == "coordinate_square":
        return CoordinateSquare()
    if kind == "coordinate_power":
        _require(data, "m")
        return CoordinatePower(data["m"])
    if kind == "diagonal_linear":
        _require(data, "weights")
        return DiagonalLinear(tuple(data["weights"]), data.get("tail"))
    if kind == "constant":
        _require(data, "point")
        return Constant(vector_from_json(data["point"], space_from_json(data.get("space", {"lp": 2}))))
    if kind == "moebius":
        _require(data, "a")
        return MoebiusAuto(vector_from_json(data["a"]))
    if kind == "conjugated":
        _require(data, "a", "inner")
        return Conjugated(vector_from_json(data["a"]), symbol_from_json(data["inner"], dim_cap))
    if kind == "composite":
        _require(data, "parts")
        return Composite(tuple(symbol_from_json(part, dim_cap) for part in data["parts"]))
    raise SymbolError(f"Unknown symbol type {kind!r}")


def polyfn_to_json(f: PolyFn) -> List[Dict[str, Any]]:
    return [
        {"exponents": {str(i): p for i, p in index.exponents}, "coeff": complex_to_json(c)}
        for index, c in f.terms.items()
    ]


def polyfn_from_json(data: Any) -> PolyFn:
    if not isinstance(data, list):
        raise DictionaryError(f"Polynomial must be a list of terms, got {data!r}")
    try:
        return functions_from_terms(
            ({int(i): int(p) for i, p in term.get("exponents", {}).items()}, complex_from_json(term.get("coeff", 1.0)))
            for term in data
        )
    except (AttributeError, ValueError, SymbolError) as e:
        raise DictionaryError(f"Malformed polynomial term: {e}") from e


def dictionary_to_json(dictionary: Dictionary) -> Dict[str, Any]:
    return {"entries": [{"label": label, "terms": polyfn_to_json(f)} for label, f in dictionary]}


def dictionary_from_json(data: Any) -> Dictionary:
    if not isinstance(data, dict) or not isinstance(data.get("entries"), list):
        raise DictionaryError("Dictionary file must hold an object with an 'entries' list")
    entries = []
    for entry in data["entries"]:
        if "label" not in entry or "terms" not in entry:
            raise DictionaryError(f"Dictionary entry needs 'label' and 'terms', got {entry!r}")
        entries.append((entry["label"], polyfn_from_json(entry["terms"])))
    if not entries:
        raise DictionaryError("Dictionary file has no entries")
    return Dictionary(tuple(entries))


def load_dictionary(path: Path) -> Dictionary:
    """Read a dictionary file; normalization against a spec is left to the caller."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (json.JSONDecodeError, OSError) as e:
        raise DictionaryError(f"Could not read dictionary {path}: {e}") from e
    return dictionary_from_json(data)
