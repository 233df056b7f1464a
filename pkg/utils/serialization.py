"""
Codecs JSON exatos para funções racionais e impressão legível.

Nenhum formato usa ponto flutuante: coeficientes são strings "p/q" e
monômios são listas [[variável, expoente], ...].
"""
import hashlib
import json
from typing import Any, Dict, List

from sympy import QQ

from core.errors import AlgebraError
from core.exact_algebra import (
    FIELD,
    RING,
    SYMBOLS,
    MRat,
    format_rational,
    parse_rational,
    to_mrat,
)


def encode_poly(poly) -> List[List[Any]]:
    """Termos do polinômio na ordem do anel (determinística)"""
    terms = []
    for monom, coeff in poly.terms():
        if monom[SYMBOLS.scratch_index]:
            raise AlgebraError("series variable leaked into a stored polynomial")
        powers = [[i + 1, e] for i, e in enumerate(monom) if e]
        terms.append([powers, format_rational(coeff)])
    return terms


def decode_poly(terms: List[List[Any]]):
    acc: Dict[tuple, Any] = {}
    for powers, coeff in terms:
        exps = [0] * SYMBOLS.size
        for var, e in powers:
            exps[SYMBOLS.index(int(var))] += int(e)
        key = tuple(exps)
        acc[key] = acc.get(key, QQ.zero) + parse_rational(coeff)
    return RING.from_dict({k: v for k, v in acc.items() if v})


def encode_mrat(f: Any) -> Dict[str, Any]:
    f = to_mrat(f)
    return {"num": encode_poly(f.numer), "den": encode_poly(f.denom)}


def decode_mrat(payload: Dict[str, Any]) -> MRat:
    numer = decode_poly(payload["num"])
    denom = decode_poly(payload["den"])
    if not denom:
        raise AlgebraError("stored denominator is zero")
    return FIELD.new(numer, denom)


def _format_monomial(monom) -> str:
    parts = []
    for i, e in enumerate(monom):
        if e == 1:
            parts.append(f"z{i + 1}")
        elif e:
            parts.append(f"z{i + 1}^{e}")
    return "*".join(parts)


def format_poly(poly) -> str:
    if not poly:
        return "0"
    out = []
    for monom, coeff in poly.terms():
        mono = _format_monomial(monom)
        c = format_rational(coeff)
        sign = "-" if c.startswith("-") else "+"
        c = c.lstrip("-")
        if mono:
            body = mono if c == "1" else f"{c}*{mono}"
        else:
            body = c
        out.append((sign, body))
    text = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


def format_mrat(f: Any) -> str:
    """Forma legível: (num)/(den), monômios na ordem do anel"""
    f = to_mrat(f)
    num = format_poly(f.numer)
    if f.denom == RING.one:
        return num
    return f"({num})/({format_poly(f.denom)})"


def canonical_json(payload: Any) -> str:
    """JSON com chaves ordenadas e sem espaços; base dos digests e dos arquivos"""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def digest(payload: Any) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()
