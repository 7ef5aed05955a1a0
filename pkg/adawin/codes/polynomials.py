"""
Bivariate polynomial parsing for bivariate-bicycle code specs.

Accepts the notation used in code tables and configs:
- ``x^3 + y + y^2``
- ``1 + x``
- ``x^2*y + x y^3`` (``*`` or whitespace between factors)

Example:
    >>> from adawin.codes.polynomials import parse_polynomial
    >>> parse_polynomial("x^3 + y + y^2")
    [(3, 0), (0, 1), (0, 2)]
"""

import re
from functools import lru_cache
from typing import List, Sequence, Tuple, Union

Term = Tuple[int, int]

# One monomial: optional x power, optional y power, or the constant 1.
_MONOMIAL = re.compile(
    r'^(?:(?P<one>1)|(?:x(?:\^(?P<xe>\d+))?)?\s*\*?\s*(?:y(?:\^(?P<ye>\d+))?)?)$'
)


@lru_cache(maxsize=128)
def parse_polynomial(text: str) -> List[Term]:
    """
    Parse a polynomial in x, y over GF(2) into exponent pairs.

    Repeated monomials are kept; they cancel mod 2 when the code matrix
    is built.

    Args:
        text: Polynomial string, terms separated by ``+``.

    Returns:
        List of (x_exp, y_exp) pairs in input order.

    Raises:
        ValueError: If a term cannot be parsed or the polynomial is empty.

    Examples:
        >>> parse_polynomial("1 + x")
        [(0, 0), (1, 0)]
        >>> parse_polynomial("x^2*y")
        [(2, 1)]
    """
    terms: List[Term] = []
    for raw in text.split('+'):
        token = raw.strip().lower()
        if not token:
            raise ValueError(f"Empty term in polynomial {text!r}")
        match = _MONOMIAL.match(token)
        if not match or token in ('*',):
            raise ValueError(f"Cannot parse term {raw.strip()!r} in polynomial {text!r}")
        if match.group('one'):
            terms.append((0, 0))
            continue
        has_x = 'x' in token
        has_y = 'y' in token
        if not (has_x or has_y):
            raise ValueError(f"Cannot parse term {raw.strip()!r} in polynomial {text!r}")
        xe = int(match.group('xe')) if match.group('xe') else int(has_x)
        ye = int(match.group('ye')) if match.group('ye') else int(has_y)
        terms.append((xe, ye))
    return terms


def as_terms(spec: Union[str, Sequence[Sequence[int]]]) -> List[Term]:
    """Normalise a polynomial given as a string or as exponent pairs."""
    if isinstance(spec, str):
        return list(parse_polynomial(spec))
    terms = []
    for pair in spec:
        if len(pair) != 2:
            raise ValueError(f"Polynomial terms must be (x_exp, y_exp) pairs, got {pair!r}")
        terms.append((int(pair[0]), int(pair[1])))
    return terms


def format_polynomial(terms: Sequence[Term]) -> str:
    """Render exponent pairs back to ``x^a*y^b`` notation."""
    parts = []
    for xe, ye in terms:
        factors = []
        if xe:
            factors.append('x' if xe == 1 else f'x^{xe}')
        if ye:
            factors.append('y' if ye == 1 else f'y^{ye}')
        parts.append('*'.join(factors) or '1')
    return ' + '.join(parts)
