"""Technology mapping: cover a logic network with LUTs of at most 6 inputs.

Networks are exchanged in a BLIF subset: ``.model``, ``.inputs``,
``.outputs``, ``.names``, ``.end``, with ``#`` comments, backslash line
continuations and ``-`` don't-cares in cover rows.  A cover's rows must all
carry the same output bit (an on-set or an off-set, not a mix).

Feasibility of a mapping requires fan-in <= 6 on every node, unchanged
primary input/output name sets, acyclicity, and functional equivalence with
the source network.  Equivalence is checked exhaustively up to 14 primary
inputs; above that, 4096 pseudorandom input patterns (64-bit packed words,
fixed seed 0xC0FFEE) are simulated instead, which makes the check
probabilistic rather than complete.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..types import InstanceFormatError, ObjectiveSense, ProblemId, SolutionFormatError
from . import ProblemAdapter, register

LUT_INPUT_LIMIT = 6
EXHAUSTIVE_PI_LIMIT = 14
SAMPLE_WORDS = 64  # 64 words x 64 bits = 4096 patterns
SAMPLE_SEED = 0xC0FFEE


@dataclass(frozen=True)
class LogicNode:
    inputs: tuple[str, ...]
    rows: tuple[str, ...]       # cover rows over {0,1,-}, one per line
    output_bit: str             # '1' (rows are the on-set) or '0' (off-set)
    const: int | None = None    # 0/1 for zero-input constant nodes


@dataclass(frozen=True)
class BlifNetwork:
    name: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    nodes: dict[str, LogicNode] = field(default_factory=dict)

    def signal_defined(self, signal: str) -> bool:
        return signal in self.nodes or signal in self.inputs


def _logical_lines(text: str) -> list[str]:
    """Strip comments, join backslash continuations, drop blank lines."""
    joined: list[str] = []
    pending = ""
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].rstrip()
        if pending:
            line = pending + " " + line.lstrip()
            pending = ""
        if line.endswith("\\"):
            pending = line[:-1].rstrip()
            continue
        if line.strip():
            joined.append(line.strip())
    if pending.strip():
        joined.append(pending.strip())
    return joined


def parse_network(text: str) -> BlifNetwork:
    lines = _logical_lines(text)
    name = ""
    inputs: list[str] = []
    outputs: list[str] = []
    nodes: dict[str, LogicNode] = {}

    i = 0
    ended = False
    while i < len(lines):
        line = lines[i]
        if line.startswith(".model"):
            parts = line.split()
            name = parts[1] if len(parts) > 1 else ""
            i += 1
        elif line.startswith(".inputs"):
            inputs.extend(line.split()[1:])
            i += 1
        elif line.startswith(".outputs"):
            outputs.extend(line.split()[1:])
            i += 1
        elif line.startswith(".names"):
            parts = line.split()
            if len(parts) < 2:
                raise InstanceFormatError(".names with no output signal")
            in_names = tuple(parts[1:-1])
            out_name = parts[-1]
            if out_name in nodes:
                raise InstanceFormatError(f"signal {out_name!r} defined twice")
            rows: list[str] = []
            bits: set[str] = set()
            j = i + 1
            while j < len(lines) and not lines[j].startswith("."):
                tokens = lines[j].split()
                if len(in_names) == 0:
                    if len(tokens) != 1 or tokens[0] not in ("0", "1"):
                        raise InstanceFormatError(f"bad constant row for {out_name!r}: {lines[j]!r}")
                    rows.append(tokens[0])
                    bits.add(tokens[0])
                else:
                    if len(tokens) == 1:
                        pattern, bit = tokens[0], "1"
                    elif len(tokens) == 2:
                        pattern, bit = tokens
                    else:
                        raise InstanceFormatError(f"bad cover row for {out_name!r}: {lines[j]!r}")
                    if len(pattern) != len(in_names) or any(ch not in "01-" for ch in pattern):
                        raise InstanceFormatError(f"bad cover pattern for {out_name!r}: {pattern!r}")
                    if bit not in ("0", "1"):
                        raise InstanceFormatError(f"bad output bit for {out_name!r}: {bit!r}")
                    rows.append(pattern)
                    bits.add(bit)
                j += 1
            if len(bits) > 1:
                raise InstanceFormatError(f"cover of {out_name!r} mixes on-set and off-set rows")
            if len(in_names) == 0:
                const = 1 if rows and rows[0] == "1" else 0
                nodes[out_name] = LogicNode(inputs=(), rows=(), output_bit="1", const=const)
            else:
                bit = bits.pop() if bits else "1"
                nodes[out_name] = LogicNode(inputs=in_names, rows=tuple(rows), output_bit=bit)
            i = j
        elif line.startswith(".end"):
            ended = True
            i += 1
            break
        else:
            raise InstanceFormatError(f"unsupported BLIF directive: {line.split()[0]!r}")

    if not ended:
        raise InstanceFormatError("missing .end")
    if not outputs:
        raise InstanceFormatError("network declares no primary outputs")
    return BlifNetwork(name=name, inputs=tuple(inputs), outputs=tuple(outputs), nodes=nodes)


def structural_violations(net: BlifNetwork) -> list[str]:
    """Undefined signals, undriven outputs, and combinational cycles."""
    violations: list[str] = []
    for out_name, node in sorted(net.nodes.items()):
        for sig in node.inputs:
            if not net.signal_defined(sig):
                violations.append(f"node {out_name!r} reads undefined signal {sig!r}")
    for po in net.outputs:
        if not net.signal_defined(po):
            violations.append(f"primary output {po!r} is not driven")
    if violations:
        return violations
    order = topological_order(net)
    if order is None:
        violations.append("network contains a combinational cycle")
    return violations


def topological_order(net: BlifNetwork) -> list[str] | None:
    """Node names in dependency order, or None if the graph is cyclic."""
    indeg = {n: 0 for n in net.nodes}
    succs: dict[str, list[str]] = {n: [] for n in net.nodes}
    for out_name, node in net.nodes.items():
        for sig in node.inputs:
            if sig in net.nodes:
                indeg[out_name] += 1
                succs[sig].append(out_name)
    stack = sorted((n for n, d in indeg.items() if d == 0), reverse=True)
    order: list[str] = []
    while stack:
        u = stack.pop()
        order.append(u)
        for v in succs[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                stack.append(v)
    if len(order) != len(net.nodes):
        return None
    return order


def simulate(net: BlifNetwork, pi_values: dict[str, int], width: int) -> dict[str, int]:
    """Evaluate every signal as a packed bit-vector of `width` parallel patterns."""
    full = (1 << width) - 1
    values: dict[str, int] = dict(pi_values)
    order = topological_order(net)
    if order is None:
        raise ValueError("cannot simulate a cyclic network")
    for out_name in order:
        node = net.nodes[out_name]
        if node.const is not None:
            values[out_name] = full if node.const == 1 else 0
            continue
        acc = 0
        for pattern in node.rows:
            m = full
            for ch, sig in zip(pattern, node.inputs):
                if ch == "1":
                    m &= values[sig]
                elif ch == "0":
                    m &= ~values[sig] & full
            acc |= m
        values[out_name] = acc if node.output_bit == "1" else ~acc & full
    return values


def _exhaustive_pi_values(pis: list[str]) -> tuple[dict[str, int], int]:
    width = 1 << len(pis)
    values = {}
    for bit, pi in enumerate(pis):
        m = 0
        for p in range(width):
            if (p >> bit) & 1:
                m |= 1 << p
        values[pi] = m
    return values, width


def _sampled_pi_values(pis: list[str]) -> tuple[dict[str, int], int]:
    rng = random.Random(SAMPLE_SEED)
    width = SAMPLE_WORDS * 64
    values = {}
    for pi in sorted(pis):
        v = 0
        for w in range(SAMPLE_WORDS):
            v |= rng.getrandbits(64) << (64 * w)
        values[pi] = v
    return values, width


def verify(src: BlifNetwork, out: BlifNetwork) -> list[str]:
    violations = structural_violations(out)

    for name, node in sorted(out.nodes.items()):
        if len(node.inputs) > LUT_INPUT_LIMIT:
            violations.append(
                f"node {name!r} has {len(node.inputs)} inputs (limit {LUT_INPUT_LIMIT})"
            )

    if set(src.inputs) != set(out.inputs):
        violations.append("primary input set differs from the source network")
    if set(src.outputs) != set(out.outputs):
        violations.append("primary output set differs from the source network")

    if violations:
        return violations

    pis = sorted(set(src.inputs))
    if len(pis) <= EXHAUSTIVE_PI_LIMIT:
        pi_values, width = _exhaustive_pi_values(pis)
        how = "exhaustive"
    else:
        pi_values, width = _sampled_pi_values(pis)
        how = f"probabilistic, {width} sampled patterns"
    src_vals = simulate(src, pi_values, width)
    out_vals = simulate(out, pi_values, width)
    for po in sorted(set(src.outputs)):
        if src_vals[po] != out_vals[po]:
            violations.append(f"functional mismatch at primary output {po!r} ({how})")
    return violations


def evaluate(out: BlifNetwork) -> float:
    """LUT count: every logic node counts, including constants and wires."""
    return float(len(out.nodes))


def format_network(net: BlifNetwork, node_order: list[str] | None = None) -> str:
    lines = [f".model {net.name}".rstrip()]
    lines.append(".inputs " + " ".join(net.inputs))
    lines.append(".outputs " + " ".join(net.outputs))
    order = node_order if node_order is not None else list(net.nodes)
    for name in order:
        node = net.nodes[name]
        if node.const is not None:
            lines.append(f".names {name}")
            if node.const == 1:
                lines.append("1")
        else:
            lines.append(".names " + " ".join(node.inputs) + " " + name)
            for row in node.rows:
                lines.append(f"{row} {node.output_bit}")
    lines.append(".end")
    return "\n".join(lines) + "\n"


def _parse_instance(payload: bytes) -> BlifNetwork:
    net = parse_network(payload.decode("utf-8"))
    problems = structural_violations(net)
    if problems:
        raise InstanceFormatError("; ".join(problems))
    return net


def _parse_solution(inst: BlifNetwork, text: str) -> BlifNetwork:
    try:
        return parse_network(text)
    except InstanceFormatError as exc:
        raise SolutionFormatError(str(exc)) from exc


def _verify(inst: BlifNetwork, out: BlifNetwork) -> list[str]:
    return verify(inst, out)


def _evaluate(inst: BlifNetwork, out: BlifNetwork) -> float:
    return evaluate(out)


ADAPTER = register(
    ProblemAdapter(
        problem=ProblemId.TECHNOLOGY_MAPPING,
        sense=ObjectiveSense.MINIMIZE,
        parse_instance=_parse_instance,
        parse_solution=_parse_solution,
        verify=_verify,
        evaluate=_evaluate,
        solution_suffix=".blif",
    )
)
