"""Line-oriented scenario files: VALUES / ADD / DEL / POP / CHECK.

Format (UTF-8, one statement per line, '#' starts a comment):

    VALUES a b c d e
    ADD X1 a b
    DEL X1 a
    POP
    CHECK

Value symbols are declared by VALUES and mapped to dense integer ids in
first-declaration order.  Variable names are bare words; a name may be
reused after the variable was popped.  POP retracts the newest live ADD.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import LifoViolation, ParseError, UnknownSymbol


@dataclass
class Step:
    op: str  # ADD | DEL | POP | CHECK
    var: str = ""
    values: tuple[str, ...] = ()


@dataclass
class Scenario:
    value_names: list[str] = field(default_factory=list)
    steps: list[Step] = field(default_factory=list)

    def value_id(self, symbol: str) -> int:
        return self.value_names.index(symbol)


def parse_scenario(text: str) -> Scenario:
    """Validate and build a Scenario; errors carry the offending line number."""
    scenario = Scenario()
    declared_values: set[str] = set()
    declared_vars: set[str] = set()
    live_vars: list[str] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        op = tokens[0]
        if op == "VALUES":
            for symbol in tokens[1:]:
                if symbol in declared_values:
                    raise ParseError(f"value {symbol} declared twice", line_no)
                declared_values.add(symbol)
                scenario.value_names.append(symbol)
        elif op == "ADD":
            if len(tokens) < 3:
                raise ParseError("ADD needs a variable and a domain", line_no)
            name = tokens[1]
            if name in live_vars:
                raise ParseError(f"variable {name} is already live", line_no)
            domain = tokens[2:]
            for symbol in domain:
                if symbol not in declared_values:
                    raise UnknownSymbol(f"value {symbol} not declared", line_no)
            if len(set(domain)) != len(domain):
                raise ParseError(f"duplicate value in domain of {name}", line_no)
            declared_vars.add(name)
            live_vars.append(name)
            scenario.steps.append(Step("ADD", name, tuple(domain)))
        elif op == "DEL":
            if len(tokens) != 3:
                raise ParseError("DEL needs a variable and one value", line_no)
            name, symbol = tokens[1], tokens[2]
            if name not in declared_vars:
                raise ParseError(f"variable {name} never added", line_no)
            if symbol not in declared_values:
                raise UnknownSymbol(f"value {symbol} not declared", line_no)
            scenario.steps.append(Step("DEL", name, (symbol,)))
        elif op == "POP":
            if len(tokens) != 1:
                raise ParseError("POP takes no arguments", line_no)
            if not live_vars:
                raise LifoViolation("POP without a live ADD", line_no)
            live_vars.pop()
            scenario.steps.append(Step("POP"))
        elif op == "CHECK":
            if len(tokens) != 1:
                raise ParseError("CHECK takes no arguments", line_no)
            scenario.steps.append(Step("CHECK"))
        else:
            raise ParseError(f"unknown statement {op}", line_no)
    return scenario


def format_scenario(scenario: Scenario) -> str:
    """Serialise back to the line format; parse(format(s)) == s."""
    lines = []
    if scenario.value_names:
        lines.append("VALUES " + " ".join(scenario.value_names))
    for step in scenario.steps:
        if step.op == "ADD":
            lines.append(f"ADD {step.var} " + " ".join(step.values))
        elif step.op == "DEL":
            lines.append(f"DEL {step.var} {step.values[0]}")
        else:
            lines.append(step.op)
    return "\n".join(lines) + "\n"


def generate_random_scenario(
    seed: int, p_max: int = 6, d_max: int = 6, del_rate: float = 0.3
) -> Scenario:
    """Deterministic random scenario respecting the LIFO invariant."""
    rng = random.Random(seed)
    names = [f"v{i}" for i in range(d_max)]
    scenario = Scenario(value_names=list(names))
    live: list[str] = []
    next_var = 1
    n_steps = rng.randint(6, 20)
    for _ in range(n_steps):
        moves = []
        if len(live) < p_max:
            moves += ["ADD"] * 4
        if live and del_rate > 0:
            moves += ["DEL"] * max(1, round(4 * del_rate))
        if live:
            moves += ["POP"]
        moves += ["CHECK"]
        op = rng.choice(moves)
        if op == "ADD":
            name = f"X{next_var}"
            next_var += 1
            size = rng.randint(1, d_max)
            domain = tuple(sorted(rng.sample(names, size), key=names.index))
            live.append(name)
            scenario.steps.append(Step("ADD", name, domain))
        elif op == "DEL":
            scenario.steps.append(
                Step("DEL", rng.choice(live), (rng.choice(names),))
            )
        elif op == "POP":
            live.pop()
            scenario.steps.append(Step("POP"))
        else:
            scenario.steps.append(Step("CHECK"))
    scenario.steps.append(Step("CHECK"))
    return scenario
