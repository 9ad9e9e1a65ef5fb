"""Symbol tables and reduction rules shared by every polynomial."""

from __future__ import annotations

import threading
from dataclasses import dataclass

KINDS = ("coordinate", "time", "parameter", "radical")


class ContextError(ValueError):
    pass


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str = "parameter"
    index: int = -1

    def __str__(self) -> str:
        return self.name


class Context:
    """Ordered set of symbols plus the power-reduction rules ``s**p -> radicand``.

    Symbol order is introduction order; it drives the graded-lex term order.
    Rules are stratified: a radicand may only mention symbols introduced
    before the symbol it defines, so reduction always terminates.
    """

    def __init__(self, name: str = "ctx"):
        self.name = name
        self._symbols: list[Symbol] = []
        self._index: dict[str, int] = {}
        self._rules: dict[int, tuple] = {}
        self._radical_of: dict = {}
        self._power_cache: dict = {}
        self._lock = threading.RLock()

    def __repr__(self) -> str:
        return f"Context({self.name!r}, {len(self._symbols)} symbols)"

    def __len__(self) -> int:
        return len(self._symbols)

    # -- symbols ---------------------------------------------------------
    def declare(self, name: str, kind: str = "parameter") -> Symbol:
        if kind not in KINDS:
            raise ContextError(f"unknown symbol kind {kind!r}")
        with self._lock:
            if name in self._index:
                return self._symbols[self._index[name]]
            sym = Symbol(name, kind, len(self._symbols))
            self._symbols.append(sym)
            self._index[name] = sym.index
            return sym

    def has(self, name: str) -> bool:
        return name in self._index

    def lookup(self, name: str) -> Symbol:
        try:
            return self._symbols[self._index[name]]
        except KeyError:
            raise ContextError(f"unknown symbol {name!r}") from None

    def symbol_at(self, index: int) -> Symbol:
        return self._symbols[index]

    @property
    def symbols(self) -> tuple[Symbol, ...]:
        return tuple(self._symbols)

    def var(self, name: str, kind: str = "parameter"):
        """Declare (if needed) and return ``name`` as a polynomial."""
        from .polynomial import Polynomial

        sym = self.declare(name, kind)
        return Polynomial.monomial(self, ((sym.index, 1),))

    def vars(self, names: str, kind: str = "parameter"):
        return tuple(self.var(n, kind) for n in names.replace(",", " ").split())

    # -- rules -----------------------------------------------------------
    def add_rule(self, name: str, power: int, radicand) -> Symbol:
        """Impose ``name**power == radicand``.

        ``radicand`` is a Polynomial (or number) using only earlier symbols.
        """
        from .polynomial import Polynomial

        if power < 2:
            raise ContextError("rule power must be at least 2")
        with self._lock:
            sym = self.declare(name, "radical" if power == 2 else "parameter")
            if sym.index in self._rules:
                old_p, old_r = self._rules[sym.index]
                rad = Polynomial.coerce(self, radicand)
                if old_p != power or old_r != rad:
                    raise ContextError(f"conflicting rule for {name!r}")
                return sym
            rad = Polynomial.coerce(self, radicand)
            for mono in rad.terms:
                for idx, _ in mono:
                    if idx >= sym.index:
                        raise ContextError(
                            f"rule for {name!r} is not stratified: radicand uses "
                            f"{self._symbols[idx].name!r}"
                        )
            self._rules[sym.index] = (power, rad)
            if power == 2:
                self._radical_of.setdefault(rad, sym.index)
            self._power_cache.clear()
            return sym

    def rule(self, index: int):
        return self._rules.get(index)

    @property
    def has_rules(self) -> bool:
        return bool(self._rules)

    def rules(self):
        return {self._symbols[i].name: r for i, r in self._rules.items()}

    def radical_for(self, radicand) -> int:
        """Index of the square-root symbol whose square is ``radicand``; adjoined on demand."""
        from .printing import format_polynomial

        with self._lock:
            idx = self._radical_of.get(radicand)
            if idx is not None:
                return idx
            name = f"sqrt({format_polynomial(radicand)})"
            if name in self._index:
                raise ContextError(f"symbol {name!r} exists without a matching rule")
            return self.add_rule(name, 2, radicand).index

    def radicand_power(self, index: int, q: int):
        key = (index, q)
        cached = self._power_cache.get(key)
        if cached is None:
            cached = self._rules[index][1] ** q
            self._power_cache[key] = cached
        return cached

    def depends_on(self, index: int, target: int) -> bool:
        """True when symbol ``index`` is ``target`` or a radical whose radicand involves it."""
        if index == target:
            return True
        rule = self._rules.get(index)
        if rule is None:
            return False
        return any(self.depends_on(i, target) for mono in rule[1].terms for i, _ in mono)


_default = Context("default")


def default_context() -> Context:
    return _default
