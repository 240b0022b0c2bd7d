"""Small named algebras used throughout the demos and tests."""

from __future__ import annotations

from .algebra import FiniteAlgebra, OperationTable


def xor3() -> FiniteAlgebra:
    return FiniteAlgebra(2, {"xor3": OperationTable.from_function(2, 3, lambda a, b, c: a ^ b ^ c)})


def majority() -> FiniteAlgebra:
    return FiniteAlgebra(2, {"maj": OperationTable.from_function(2, 3, lambda a, b, c: int(a + b + c >= 2))})


def median(size: int = 3) -> FiniteAlgebra:
    return FiniteAlgebra(size, {"m": OperationTable.from_function(size, 3, lambda *a: sorted(a)[1])})


def meet(size: int = 2) -> FiniteAlgebra:
    return FiniteAlgebra(size, {"meet": OperationTable.from_function(size, 2, min)})


def projection_only(size: int = 3, arity: int = 3) -> FiniteAlgebra:
    return FiniteAlgebra(size, {"p": OperationTable.projection(size, arity, 0)})


ALGEBRAS = {
    "xor3": xor3,
    "maj": majority,
    "median3": median,
    "meet2": meet,
    "proj3": projection_only,
}


def named_algebra(name: str) -> FiniteAlgebra:
    try:
        return ALGEBRAS[name]()
    except KeyError:
        raise KeyError(f"unknown algebra {name!r}; known: {sorted(ALGEBRAS)}") from None
