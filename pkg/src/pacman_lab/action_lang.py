"""Restricted action language: static and dynamic causal laws over finite-domain fluents.

A domain is described by fluent declarations (integer ranges, enumerated sets,
or booleans), action declarations, static laws ``head if body`` and dynamic
laws ``action causes effect if preconditions``. Schematic laws with variables
(single uppercase letters, optionally offset as ``L+1``/``L-1``) are grounded
at parse time over the declared domains; instantiations whose atoms fall
outside a domain produce no ground law.

Transition semantics: applying an action collects the effects of every
dynamic law whose preconditions hold, untouched fluents keep their values
(inertia), and the result is closed under the static laws.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union

Value = Union[bool, int, str]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_VARIABLE = re.compile(r"[A-Z]\Z")
_INT = re.compile(r"-?\d+\Z")


class ActionLanguageError(Exception):
    """Base class for action-language errors."""


class ParseError(ActionLanguageError):
    """Syntax, undeclared-symbol, or domain error with source position."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class InconsistentStateError(ActionLanguageError):
    """A fluent was forced to two different values."""


class ConflictingEffectsError(ActionLanguageError):
    """Two triggered dynamic laws assign different values to one fluent."""


@dataclass(frozen=True)
class FluentAtom:
    """An assignment ``fluent = value``."""

    fluent: str
    value: Value

    def __str__(self) -> str:
        if self.value is True:
            return self.fluent
        if self.value is False:
            return f"~{self.fluent}"
        return f"{self.fluent}={self.value}"


@dataclass(frozen=True)
class StaticLaw:
    """``head if body``: whenever the body holds, the head holds too."""

    head: FluentAtom
    body: tuple[FluentAtom, ...] = ()

    def __str__(self) -> str:
        if not self.body:
            return str(self.head)
        return f"{self.head} if {', '.join(map(str, self.body))}"


@dataclass(frozen=True)
class DynamicLaw:
    """``action causes effect if preconditions``."""

    action: str
    effect: FluentAtom
    preconditions: tuple[FluentAtom, ...] = ()

    def __str__(self) -> str:
        text = f"{self.action} causes {self.effect}"
        if self.preconditions:
            text += f" if {', '.join(map(str, self.preconditions))}"
        return text


@dataclass(frozen=True)
class ActionDescription:
    """A ground action description: signatures plus causal laws.

    ``fluent_signature`` is an ordered tuple of ``(name, domain)`` pairs with
    each domain a tuple of admissible values; ``action_signature`` the action
    names. All laws must reference declared symbols and in-domain values.
    """

    fluent_signature: tuple[tuple[str, tuple[Value, ...]], ...]
    action_signature: tuple[str, ...]
    statics: tuple[StaticLaw, ...] = ()
    dynamics: tuple[DynamicLaw, ...] = ()
    _domains: dict = field(init=False, repr=False, compare=False, hash=False)
    _by_action: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        domains: dict[str, tuple[Value, ...]] = {}
        for name, domain in self.fluent_signature:
            if name in domains:
                raise ActionLanguageError(f"duplicate fluent declaration: {name}")
            if not domain:
                raise ActionLanguageError(f"empty domain for fluent {name}")
            domains[name] = tuple(domain)
        if len(set(self.action_signature)) != len(self.action_signature):
            raise ActionLanguageError("duplicate action declaration")
        object.__setattr__(self, "_domains", domains)
        for law in self.statics:
            for atom in (law.head, *law.body):
                self._check_atom(atom)
        by_action: dict[str, list[DynamicLaw]] = {a: [] for a in self.action_signature}
        for law in self.dynamics:
            if law.action not in by_action:
                raise ActionLanguageError(f"undeclared action in law: {law.action}")
            for atom in (law.effect, *law.preconditions):
                self._check_atom(atom)
            by_action[law.action].append(law)
        object.__setattr__(self, "_by_action", by_action)

    def _check_atom(self, atom: FluentAtom) -> None:
        domain = self._domains.get(atom.fluent)
        if domain is None:
            raise ActionLanguageError(f"undeclared fluent in law: {atom.fluent}")
        if not _in_domain(atom.value, domain):
            raise ActionLanguageError(
                f"value {atom.value!r} outside the domain of {atom.fluent}"
            )

    @property
    def fluents(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.fluent_signature)

    def domain(self, fluent: str) -> tuple[Value, ...]:
        return self._domains[fluent]

    def dynamics_for(self, action: str) -> Sequence[DynamicLaw]:
        try:
            return self._by_action[action]
        except KeyError:
            raise ActionLanguageError(f"unknown action: {action}") from None


class WorldState:
    """A total assignment of fluents to values, hashable and immutable."""

    __slots__ = ("_items", "_map", "_hash")

    def __init__(self, assignment: Mapping[str, Value]):
        items = tuple(sorted(assignment.items()))
        object.__setattr__(self, "_items", items)
        object.__setattr__(self, "_map", dict(items))
        object.__setattr__(self, "_hash", hash(items))

    @property
    def assignment(self) -> dict[str, Value]:
        return dict(self._map)

    def __getitem__(self, fluent: str) -> Value:
        return self._map[fluent]

    def atoms(self) -> Iterator[FluentAtom]:
        return (FluentAtom(f, v) for f, v in self._items)

    def satisfies(self, condition: Iterable[FluentAtom]) -> bool:
        return all(self._map.get(a.fluent) == a.value for a in condition)

    def __eq__(self, other) -> bool:
        return isinstance(other, WorldState) and self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{f}={v}" for f, v in self._items)
        return f"WorldState({inner})"


# ---------------------------------------------------------------------------
# parsing


def _in_domain(value: Value, domain: tuple[Value, ...]) -> bool:
    # bool is an int subclass; keep True distinct from 1
    return any(
        v == value and isinstance(v, bool) == isinstance(value, bool) for v in domain
    )


@dataclass(frozen=True)
class _AtomTemplate:
    """Atom before grounding: value is a constant, or a (variable, offset) pair."""

    fluent: str
    const: Value | None
    var: str | None = None
    offset: int = 0


def _parse_value(token: str) -> Value:
    if _INT.match(token):
        return int(token)
    if token == "true":
        return True
    if token == "false":
        return False
    return token


def _parse_atom_template(text: str, line: int) -> _AtomTemplate:
    text = text.strip()
    if text.startswith("~"):
        name = text[1:].strip()
        if not _IDENT.match(name):
            raise ParseError(f"bad fluent name {name!r}", line)
        return _AtomTemplate(name, False)
    if "=" not in text:
        if not _IDENT.match(text):
            raise ParseError(f"bad atom {text!r}", line)
        return _AtomTemplate(text, True)
    name, _, rhs = text.partition("=")
    name, rhs = name.strip(), rhs.strip()
    if not _IDENT.match(name):
        raise ParseError(f"bad fluent name {name!r}", line)
    m = re.match(r"([A-Z])\s*([+-])\s*(\d+)\Z", rhs)
    if m:
        sign = 1 if m.group(2) == "+" else -1
        return _AtomTemplate(name, None, m.group(1), sign * int(m.group(3)))
    if _VARIABLE.match(rhs):
        return _AtomTemplate(name, None, rhs, 0)
    if not (_INT.match(rhs) or _IDENT.match(rhs)):
        raise ParseError(f"bad atom value {rhs!r}", line)
    return _AtomTemplate(name, _parse_value(rhs))


def _split_atoms(text: str, line: int) -> list[str]:
    parts = [p.strip() for p in text.split(",")]
    if any(not p for p in parts):
        raise ParseError("empty atom in list", line)
    return parts


def _parse_domain(spec: str, line: int) -> tuple[Value, ...]:
    spec = spec.strip()
    if spec == "bool":
        return (False, True)
    m = re.match(r"(-?\d+)\s*\.\.\s*(-?\d+)\Z", spec)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi < lo:
            raise ParseError(f"empty range {spec!r}", line)
        return tuple(range(lo, hi + 1))
    if spec.startswith("{") and spec.endswith("}"):
        values = []
        for token in _split_atoms(spec[1:-1], line):
            if token in ("true", "false"):
                raise ParseError("true/false are reserved; use a bool domain", line)
            if _VARIABLE.match(token):
                raise ParseError(
                    f"{token!r} reads as a schema variable; enum values need 2+ characters",
                    line,
                )
            if not (_INT.match(token) or _IDENT.match(token)):
                raise ParseError(f"bad domain value {token!r}", line)
            values.append(_parse_value(token))
        if len(set(values)) != len(values):
            raise ParseError("duplicate domain value", line)
        return tuple(values)
    raise ParseError(f"bad domain spec {spec!r}", line)


def _strip_clause(raw: str, line: int) -> str | None:
    text = raw.split("%", 1)[0].strip()
    if not text:
        return None
    if not text.endswith("."):
        raise ParseError("clause must end with '.'", line, len(raw.rstrip()) + 1)
    return text[:-1].strip()


def _ground_atoms(
    templates: Sequence[_AtomTemplate],
    binding: Mapping[str, int],
    domains: Mapping[str, tuple[Value, ...]],
    line: int,
) -> list[FluentAtom] | None:
    """Instantiate templates under a variable binding; None if any atom lands
    outside its fluent's domain (the instantiation produces no ground law)."""
    atoms = []
    for t in templates:
        value: Value = t.const if t.var is None else binding[t.var] + t.offset
        domain = domains.get(t.fluent)
        if domain is None:
            raise ParseError(f"undeclared fluent {t.fluent!r}", line)
        if not _in_domain(value, domain):
            if t.var is None:
                raise ParseError(
                    f"value {value!r} outside the domain of {t.fluent}", line
                )
            return None
        atoms.append(FluentAtom(t.fluent, value))
    return atoms


def _ground_law(
    templates: Sequence[_AtomTemplate],
    domains: Mapping[str, tuple[Value, ...]],
    line: int,
) -> Iterator[list[FluentAtom]]:
    """Enumerate ground instantiations of a clause's atom list."""
    seen: set[str] = set()
    bound: dict[str, list[int]] = {}
    for t in templates:
        if t.var is None:
            continue
        seen.add(t.var)
        if t.offset != 0:
            continue
        if t.fluent not in domains:
            raise ParseError(f"undeclared fluent {t.fluent!r}", line)
        candidates = [
            v
            for v in domains[t.fluent]
            if isinstance(v, int) and not isinstance(v, bool)
        ]
        if not candidates:
            raise ParseError(
                f"variable {t.var} needs an integer-domain fluent to range over", line
            )
        prev = bound.get(t.var)
        bound[t.var] = (
            candidates if prev is None else [v for v in prev if v in candidates]
        )
    for var in sorted(seen):
        if var not in bound:
            raise ParseError(
                f"variable {var} never appears in a plain f={var} atom", line
            )
        if not bound[var]:
            raise ParseError(f"variable {var} has no admissible values", line)
    variables = bound

    if not variables:
        atoms = _ground_atoms(templates, {}, domains, line)
        if atoms is not None:
            yield atoms
        return

    names = sorted(variables)

    def rec(i: int, binding: dict[str, int]) -> Iterator[list[FluentAtom]]:
        if i == len(names):
            atoms = _ground_atoms(templates, binding, domains, line)
            if atoms is not None:
                yield atoms
            return
        for v in variables[names[i]]:
            binding[names[i]] = v
            yield from rec(i + 1, binding)
        del binding[names[i]]

    yield from rec(0, {})


def parse_action_description(text: str) -> ActionDescription:
    """Parse the textual action-language format into a ground description.

    One clause per line, terminated by ``.``; ``%`` starts a comment.
    Declarations may appear anywhere in the file.
    """
    clauses: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        clause = _strip_clause(raw, lineno)
        if clause is not None:
            clauses.append((lineno, clause))

    fluent_signature: list[tuple[str, tuple[Value, ...]]] = []
    domains: dict[str, tuple[Value, ...]] = {}
    actions: list[str] = []
    laws: list[tuple[int, str]] = []

    for lineno, clause in clauses:
        head, _, rest = clause.partition(" ")
        if head == "fluent":
            name, sep, spec = rest.partition(":")
            name = name.strip()
            if not sep:
                raise ParseError("fluent declaration needs ': <domain>'", lineno)
            if not _IDENT.match(name):
                raise ParseError(f"bad fluent name {name!r}", lineno)
            if name in domains:
                raise ParseError(f"duplicate fluent {name!r}", lineno)
            domain = _parse_domain(spec, lineno)
            fluent_signature.append((name, domain))
            domains[name] = domain
        elif head == "action":
            name = rest.strip()
            if not _IDENT.match(name):
                raise ParseError(f"bad action name {name!r}", lineno)
            if name in actions:
                raise ParseError(f"duplicate action {name!r}", lineno)
            actions.append(name)
        else:
            laws.append((lineno, clause))

    statics: list[StaticLaw] = []
    dynamics: list[DynamicLaw] = []
    for lineno, clause in laws:
        m = re.match(r"(\S+)\s+causes\s+(.*)\Z", clause)
        if m:
            action, rest = m.group(1), m.group(2)
            if action not in actions:
                raise ParseError(f"undeclared action {action!r}", lineno)
            effect_text, _, cond_text = rest.partition(" if ")
            templates = [_parse_atom_template(effect_text, lineno)]
            if cond_text:
                templates += [
                    _parse_atom_template(p, lineno)
                    for p in _split_atoms(cond_text, lineno)
                ]
            for atoms in _ground_law(templates, domains, lineno):
                law = DynamicLaw(action, atoms[0], tuple(atoms[1:]))
                if law not in dynamics:
                    dynamics.append(law)
        else:
            head_text, sep, body_text = clause.partition(" if ")
            if not sep:
                raise ParseError(f"unrecognized clause {clause!r}", lineno)
            templates = [_parse_atom_template(head_text, lineno)] + [
                _parse_atom_template(p, lineno)
                for p in _split_atoms(body_text, lineno)
            ]
            for atoms in _ground_law(templates, domains, lineno):
                law = StaticLaw(atoms[0], tuple(atoms[1:]))
                if law not in statics:
                    statics.append(law)

    return ActionDescription(
        tuple(fluent_signature), tuple(actions), tuple(statics), tuple(dynamics)
    )


def parse_condition(text: str, description: ActionDescription) -> tuple[FluentAtom, ...]:
    """Parse a comma-separated ground atom list against a description."""
    atoms = []
    for part in _split_atoms(text, 1):
        t = _parse_atom_template(part, 1)
        if t.const is None:
            raise ParseError("conditions must be ground", 1)
        if t.fluent not in description.fluents:
            raise ParseError(f"undeclared fluent {t.fluent!r}", 1)
        if not _in_domain(t.const, description.domain(t.fluent)):
            raise ParseError(
                f"value {t.const!r} outside the domain of {t.fluent}", 1
            )
        atoms.append(FluentAtom(t.fluent, t.const))
    return tuple(atoms)


def print_action_description(description: ActionDescription) -> str:
    """Render a description back to the textual format (ground laws)."""
    lines = []
    for name, domain in description.fluent_signature:
        lines.append(f"fluent {name} : {_format_domain(domain)}.")
    for action in description.action_signature:
        lines.append(f"action {action}.")
    for law in description.statics:
        lines.append(f"{law}.")
    for law in description.dynamics:
        lines.append(f"{law}.")
    return "\n".join(lines) + "\n"


def _format_domain(domain: tuple[Value, ...]) -> str:
    if domain == (False, True):
        return "bool"
    if (
        all(isinstance(v, int) and not isinstance(v, bool) for v in domain)
        and domain == tuple(range(domain[0], domain[-1] + 1))
    ):
        return f"{domain[0]}..{domain[-1]}"
    return "{" + ", ".join(str(v) for v in domain) + "}"


# ---------------------------------------------------------------------------
# semantics


def closure(
    partial: Iterable[FluentAtom], statics: Sequence[StaticLaw]
) -> set[FluentAtom]:
    """Least fixpoint of forward static-law application over a partial state."""
    values: dict[str, Value] = {}
    for atom in partial:
        if values.get(atom.fluent, atom.value) != atom.value:
            raise InconsistentStateError(
                f"{atom.fluent} assigned both {values[atom.fluent]!r} and {atom.value!r}"
            )
        values[atom.fluent] = atom.value
    changed = True
    while changed:
        changed = False
        for law in statics:
            if not all(values.get(a.fluent) == a.value for a in law.body):
                continue
            head = law.head
            current = values.get(head.fluent)
            if current is None:
                values[head.fluent] = head.value
                changed = True
            elif current != head.value:
                raise InconsistentStateError(
                    f"static laws force {head.fluent} to both "
                    f"{current!r} and {head.value!r}"
                )
    return {FluentAtom(f, v) for f, v in values.items()}


def apply(state: WorldState, action: str, description: ActionDescription) -> WorldState:
    """Successor state: triggered effects, inertia for the rest, static closure."""
    effects: dict[str, Value] = {}
    for law in description.dynamics_for(action):
        if not state.satisfies(law.preconditions):
            continue
        eff = law.effect
        if effects.get(eff.fluent, eff.value) != eff.value:
            raise ConflictingEffectsError(
                f"{action} forces {eff.fluent} to both "
                f"{effects[eff.fluent]!r} and {eff.value!r}"
            )
        effects[eff.fluent] = eff.value

    forced = closure(
        (FluentAtom(f, v) for f, v in effects.items()), description.statics
    )
    values = {a.fluent: a.value for a in forced}
    for fluent in description.fluents:
        if fluent not in values:
            values[fluent] = state[fluent]
    # a total state must be a fixpoint of the static laws
    for law in description.statics:
        if all(values.get(a.fluent) == a.value for a in law.body):
            if values.get(law.head.fluent) != law.head.value:
                raise InconsistentStateError(
                    f"result of {action} violates static law {law}"
                )
    return WorldState(values)


def state_from_condition(
    description: ActionDescription, condition: Iterable[FluentAtom]
) -> WorldState:
    """Extend a condition to the unique closed total state it determines."""
    closed = closure(condition, description.statics)
    values = {a.fluent: a.value for a in closed}
    missing = [f for f in description.fluents if f not in values]
    if missing:
        raise ActionLanguageError(
            f"condition does not determine a total state; missing {missing}"
        )
    unknown = [f for f in values if f not in description.fluents]
    if unknown:
        raise ActionLanguageError(f"condition mentions undeclared fluents {unknown}")
    return WorldState(values)
