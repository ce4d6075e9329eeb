"""Seeded random JS snapshot pairs for matcher property tests."""

from __future__ import annotations

import numpy as np


def _body(rng: np.random.Generator) -> list[str]:
    k1, k2 = int(rng.integers(1, 50)), int(rng.integers(1, 50))
    pick = int(rng.integers(0, 4))
    if pick == 0:
        return [f"const sum{k1} = value + {k2};", f"return sum{k1};"]
    if pick == 1:
        return [f"if (value > {k1}) {{ return {k2}; }}", "return 0;"]
    if pick == 2:
        return [f"let acc{k1} = 0;",
                f"for (let i = 0; i < {k2}; i++) {{ acc{k1} += i; }}",
                f"return acc{k1};"]
    return [f"return value % {k1} === 0 ? {k2} : -{k2};"]


class SnapshotSpec:
    """Mutable description of a tiny source tree, rendered on demand."""

    def __init__(self, rng: np.random.Generator, tag: str = "m"):
        self.rng = rng
        self.counter = 0
        self.functions: list[tuple[str, list[str]]] = []
        self.globals_: list[tuple[str, int]] = []
        self.comments: list[str] = []
        self.tag = tag
        for _ in range(int(rng.integers(2, 6))):
            self.add_function()
        for _ in range(int(rng.integers(0, 4))):
            self.add_global()
        for _ in range(int(rng.integers(0, 3))):
            self.comments.append(f"note {int(rng.integers(0, 9999))}")

    def add_function(self):
        self.counter += 1
        self.functions.append((f"{self.tag}Fn{self.counter}",
                               _body(self.rng)))

    def add_global(self):
        self.counter += 1
        self.globals_.append((f"{self.tag.upper()}_G{self.counter}",
                              int(self.rng.integers(0, 1000))))

    def mutate(self):
        """Apply a few random edits in place."""
        rng = self.rng
        for _ in range(int(rng.integers(1, 4))):
            op = int(rng.integers(0, 7))
            if op == 0:
                self.add_function()
            elif op == 1 and len(self.functions) > 1:
                self.functions.pop(int(rng.integers(0, len(self.functions))))
            elif op == 2 and self.functions:
                i = int(rng.integers(0, len(self.functions)))
                name, _ = self.functions[i]
                self.functions[i] = (name, _body(rng))
            elif op == 3 and self.functions:
                i = int(rng.integers(0, len(self.functions)))
                _, body = self.functions[i]
                self.counter += 1
                self.functions[i] = (f"{self.tag}Ren{self.counter}", body)
            elif op == 4:
                self.add_global()
            elif op == 5 and self.globals_:
                self.globals_.pop(int(rng.integers(0, len(self.globals_))))
            else:
                self.comments.append(f"extra {int(rng.integers(0, 9999))}")

    def render(self) -> str:
        parts = [f"// {c}" for c in self.comments]
        parts += [f"const {n} = {v};" for n, v in self.globals_]
        parts.append("")
        for name, body in self.functions:
            inner = "\n".join(f"  {line}" for line in body)
            parts.append(f"function {name}(value) {{\n{inner}\n}}\n")
        return "\n".join(parts)


def random_source(seed: int) -> str:
    return SnapshotSpec(np.random.default_rng(seed)).render()


def random_pair(seed: int) -> tuple[str, str]:
    """A source file and a randomly edited revision of it."""
    spec = SnapshotSpec(np.random.default_rng(seed))
    before = spec.render()
    spec.mutate()
    return before, spec.render()
