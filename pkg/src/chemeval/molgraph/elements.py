"""Element data and the valence table used for hydrogen assignment and checks."""

from __future__ import annotations

_SYMBOLS = """
H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni Cu
Zn Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I Xe Cs Ba
La Ce Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir Pt Au Hg Tl Pb Bi
Po At Rn Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No Lr Rf Db Sg Bh Hs Mt Ds
Rg Cn Nh Fl Mc Lv Ts Og
""".split()

ATOMIC_NUMBER: dict[str, int] = {sym: i + 1 for i, sym in enumerate(_SYMBOLS)}

# Written without brackets.
ORGANIC_SUBSET = ("B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I")
AROMATIC_ORGANIC = ("b", "c", "n", "o", "p", "s")
# Lowercase symbols accepted inside brackets.
AROMATIC_BRACKET = ("b", "c", "n", "o", "p", "s", "se", "as", "te")

HALOGENS = frozenset({"F", "Cl", "Br", "I"})

_BASE_VALENCE: dict[str, tuple[int, ...]] = {
    "H": (1,),
    "B": (3,),
    "C": (4,),
    "N": (3, 5),
    "O": (2,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "F": (1,),
    "Cl": (1,),
    "Br": (1,),
    "I": (1,),
    "As": (3, 5),
    "Se": (2, 4, 6),
    "Te": (2, 4, 6),
}

_PNICTOGEN_CHALCOGEN = frozenset({"N", "O", "P", "S", "As", "Se", "Te"})
_SECOND_ROW = frozenset({"N", "O"})


def atomic_number(element: str) -> int:
    return ATOMIC_NUMBER[element]


def is_element(symbol: str) -> bool:
    return symbol in ATOMIC_NUMBER


def allowed_valences(element: str, charge: int = 0) -> tuple[int, ...] | None:
    """Allowed total valences (bond orders plus hydrogens) for an element.

    Returns ``None`` for elements outside the table, meaning "unconstrained".
    A formal charge shifts N/O-family valences by its sign (N+ -> 4,
    O- -> 1); second-row N and O keep only their lowest shifted valence.
    Carbon loses one valence per unit of charge either way, boron behaves
    like its isoelectronic neighbour, halogens and hydrogen shift by charge.
    """
    base = _BASE_VALENCE.get(element)
    if base is None:
        return None
    if charge == 0:
        return base
    if element in _PNICTOGEN_CHALCOGEN:
        shifted = tuple(v + charge for v in base if v + charge >= 0)
        if element in _SECOND_ROW:
            shifted = shifted[:1]
    elif element == "C":
        shifted = (4 - abs(charge),)
    elif element == "B":
        shifted = (3 - charge,)
    elif element in HALOGENS:
        shifted = (1 + charge,)
    else:  # H
        shifted = (1 - abs(charge),)
    return tuple(v for v in shifted if v >= 0)


def max_valence(element: str, charge: int = 0) -> int | None:
    allowed = allowed_valences(element, charge)
    if allowed is None:
        return None
    return max(allowed) if allowed else -1


def isotope_in_bounds(element: str, isotope: int) -> bool:
    """Sanity bound on mass numbers: Z <= A <= 3Z + 20."""
    z = ATOMIC_NUMBER[element]
    return z <= isotope <= 3 * z + 20
