"""XOR-AND graphs: a small structurally hashed IR, BLIF/JSON I/O, and ANF analysis.

Signals are AIGER-style literals ``2 * node + complement``.  Node 0 is the
constant false, so literal 1 is constant true.  XOR nodes never store
complemented fanins; the complement is moved to the referencing edge.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

CONST, PI, AND, XOR = "const", "pi", "and", "xor"
MAX_CUT_LEAVES = 16


class XagError(ValueError):
    pass


class BlifError(XagError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class NotACutError(XagError):
    pass


def lit(node: int, compl: int | bool = 0) -> int:
    return 2 * node + int(bool(compl))


def lit_node(literal: int) -> int:
    return literal >> 1


def lit_compl(literal: int) -> int:
    return literal & 1


@dataclass(frozen=True)
class Node:
    kind: str
    fanins: Tuple[int, ...] = ()


class XagNetwork:
    def __init__(self):
        self.nodes: List[Node] = [Node(CONST)]
        self.pi_names: List[str] = []
        self.pi_nodes: List[int] = []
        self.outputs: List[Tuple[str, int]] = []
        self._strash: Dict[Tuple[str, int, int], int] = {}

    # -- construction --------------------------------------------------------

    def add_pi(self, name: Optional[str] = None) -> int:
        node = len(self.nodes)
        self.nodes.append(Node(PI))
        self.pi_nodes.append(node)
        self.pi_names.append(name if name is not None else f"x{len(self.pi_names)}")
        return lit(node)

    def add_and(self, a: int, b: int) -> int:
        if a > b:
            a, b = b, a
        if a == 0:
            return 0
        if a == 1:
            return b
        if a == b:
            return a
        if a ^ 1 == b:
            return 0
        return self._hashed(AND, a, b)

    def add_xor(self, a: int, b: int) -> int:
        compl = (a & 1) ^ (b & 1)
        a, b = a & ~1, b & ~1
        if a > b:
            a, b = b, a
        if a == b:
            return compl
        if a == 0:
            return b ^ compl
        return self._hashed(XOR, a, b) ^ compl

    def add_or(self, a: int, b: int) -> int:
        return self.add_and(a ^ 1, b ^ 1) ^ 1

    def _hashed(self, kind: str, a: int, b: int) -> int:
        key = (kind, a, b)
        node = self._strash.get(key)
        if node is None:
            node = len(self.nodes)
            self.nodes.append(Node(kind, (a, b)))
            self._strash[key] = node
        return lit(node)

    def add_output(self, literal: int, name: Optional[str] = None) -> None:
        if lit_node(literal) >= len(self.nodes):
            raise XagError(f"output literal {literal} references a missing node")
        self.outputs.append((name if name is not None else f"y{len(self.outputs)}", literal))

    # -- queries -------------------------------------------------------------

    @property
    def num_pis(self) -> int:
        return len(self.pi_nodes)

    @property
    def num_pos(self) -> int:
        return len(self.outputs)

    def kind(self, node: int) -> str:
        return self.nodes[node].kind

    def is_gate(self, node: int) -> bool:
        return self.nodes[node].kind in (AND, XOR)

    def gates(self) -> List[int]:
        return [i for i, n in enumerate(self.nodes) if n.kind in (AND, XOR)]

    def num_ands(self) -> int:
        return sum(1 for n in self.nodes if n.kind == AND)

    def num_xors(self) -> int:
        return sum(1 for n in self.nodes if n.kind == XOR)

    def fanout_counts(self) -> List[int]:
        counts = [0] * len(self.nodes)
        for n in self.nodes:
            for f in n.fanins:
                counts[lit_node(f)] += 1
        for _, o in self.outputs:
            counts[lit_node(o)] += 1
        return counts

    def reachable(self) -> List[int]:
        """Gate nodes in the transitive fanin of some output, in topological order."""
        mark = [False] * len(self.nodes)
        stack = [lit_node(o) for _, o in self.outputs]
        while stack:
            v = stack.pop()
            if mark[v]:
                continue
            mark[v] = True
            stack.extend(lit_node(f) for f in self.nodes[v].fanins)
        return [i for i in range(len(self.nodes)) if mark[i] and self.is_gate(i)]

    def simulate(self, assignment: int) -> int:
        """Output bits (little-endian) for PI assignment bits (little-endian)."""
        vals = [0] * len(self.nodes)
        for k, node in enumerate(self.pi_nodes):
            vals[node] = (assignment >> k) & 1
        for i, n in enumerate(self.nodes):
            if n.kind == AND:
                a, b = n.fanins
                vals[i] = (vals[a >> 1] ^ (a & 1)) & (vals[b >> 1] ^ (b & 1))
            elif n.kind == XOR:
                a, b = n.fanins
                vals[i] = vals[a >> 1] ^ vals[b >> 1] ^ (a & 1) ^ (b & 1)
        y = 0
        for j, (_, o) in enumerate(self.outputs):
            y |= (vals[o >> 1] ^ (o & 1)) << j
        return y

    def truth_tables(self) -> List[int]:
        """Per-node truth table over all PIs (bit ``x`` is the value at assignment ``x``)."""
        n = self.num_pis
        if n > MAX_CUT_LEAVES:
            raise XagError(f"{n} inputs is too many for truth tables")
        full = (1 << (1 << n)) - 1
        tts = [0] * len(self.nodes)
        for k, node in enumerate(self.pi_nodes):
            tts[node] = var_table(k, n)
        for i, nd in enumerate(self.nodes):
            if nd.kind in (AND, XOR):
                a, b = nd.fanins
                ta = tts[a >> 1] ^ (full if a & 1 else 0)
                tb = tts[b >> 1] ^ (full if b & 1 else 0)
                tts[i] = ta & tb if nd.kind == AND else ta ^ tb
        return tts

    def output_tables(self) -> List[int]:
        tts = self.truth_tables()
        full = (1 << (1 << self.num_pis)) - 1
        return [tts[o >> 1] ^ (full if o & 1 else 0) for _, o in self.outputs]

    def __repr__(self) -> str:
        return (f"XagNetwork(pis={self.num_pis}, ands={self.num_ands()}, "
                f"xors={self.num_xors()}, pos={self.num_pos})")


# -- truth tables and ANF -----------------------------------------------------

def var_table(k: int, n: int) -> int:
    """Truth table of variable ``k`` among ``n``."""
    block = 1 << k
    pattern = ((1 << block) - 1) << block  # block zeros then block ones
    tt = 0
    period = 2 * block
    for start in range(0, 1 << n, period):
        tt |= pattern << start
    return tt


def moebius(tt: int, n: int) -> int:
    """Truth table <-> ANF coefficient table (the transform is an involution)."""
    for k in range(n):
        shift = 1 << k
        low = ~var_table(k, n) & ((1 << (1 << n)) - 1)
        tt ^= (tt & low) << shift
    return tt


@dataclass(frozen=True)
class Anf:
    """XOR of monomials; each monomial is a bitmask over ``variables`` positions."""

    variables: Tuple[int, ...]
    monomials: FrozenSet[int]

    @classmethod
    def from_table(cls, variables: Sequence[int], tt: int) -> "Anf":
        coeffs = moebius(tt, len(variables))
        monos = []
        m = 0
        while coeffs:
            if coeffs & 1:
                monos.append(m)
            coeffs >>= 1
            m += 1
        return cls(tuple(variables), frozenset(monos))

    def degree(self) -> int:
        return max((bin(m).count("1") for m in self.monomials), default=0)

    def evaluate(self, assignment: int) -> int:
        return sum(1 for m in self.monomials if m & assignment == m) & 1

    def table(self) -> int:
        n = len(self.variables)
        tt = 0
        for m in self.monomials:
            tt |= 1 << m
        return moebius(tt, n)

    def terms(self) -> List[Tuple[int, ...]]:
        """Monomials as sorted tuples of variable ids (empty tuple = constant 1)."""
        out = []
        for m in sorted(self.monomials, key=lambda m: (bin(m).count("1"), m)):
            out.append(tuple(v for i, v in enumerate(self.variables) if (m >> i) & 1))
        return out

    def __str__(self) -> str:
        parts = ["*".join(f"n{v}" for v in t) or "1" for t in self.terms()]
        return " ^ ".join(parts) or "0"


def mc_anf(anf: Anf) -> int:
    return sum(bin(m).count("1") - 1 for m in anf.monomials if m)


def cut_table(net: XagNetwork, root: int, leaves: Sequence[int]) -> int:
    n = len(leaves)
    if n > MAX_CUT_LEAVES:
        raise NotACutError(f"{n} leaves exceeds {MAX_CUT_LEAVES}")
    full = (1 << (1 << n)) - 1
    tts: Dict[int, int] = {0: 0}
    for k, leaf in enumerate(leaves):
        tts[leaf] = var_table(k, n)

    def table(node: int) -> int:
        stack = [node]
        while stack:
            v = stack[-1]
            if v in tts:
                stack.pop()
                continue
            nd = net.nodes[v]
            if nd.kind == PI:
                raise NotACutError(f"input node {v} reaches root {root} without passing a leaf")
            pending = [f >> 1 for f in nd.fanins if (f >> 1) not in tts]
            if pending:
                stack.extend(pending)
                continue
            a, b = nd.fanins
            ta = tts[a >> 1] ^ (full if a & 1 else 0)
            tb = tts[b >> 1] ^ (full if b & 1 else 0)
            tts[v] = ta & tb if nd.kind == AND else ta ^ tb
            stack.pop()
        return tts[node]

    return table(root)


def anf_of_cut(net: XagNetwork, root: int, leaves: Sequence[int]) -> Anf:
    leaves = tuple(leaves)
    return Anf.from_table(leaves, cut_table(net, root, leaves))


def anf_of_output(net: XagNetwork, index: int) -> Anf:
    """ANF of an output over all PIs (as PI node ids), complement included."""
    _, o = net.outputs[index]
    n = net.num_pis
    tt = cut_table(net, o >> 1, net.pi_nodes)
    if o & 1:
        tt ^= (1 << (1 << n)) - 1
    return Anf.from_table(tuple(net.pi_nodes), tt)


# -- BLIF ---------------------------------------------------------------------

def _blif_lines(text: str):
    pending, start = "", None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if start is None:
            start = no
        if line.endswith("\\"):
            pending += line[:-1] + " "
            continue
        line = (pending + line).strip()
        pending = ""
        if line:
            yield start, line
        start = None
    if pending.strip():
        yield start, pending.strip()


def _cover_table(rows: List[Tuple[str, str]], k: int, lineno: int) -> int:
    """Truth table of a single-output SOP cover over ``k`` inputs."""
    if not rows:
        return 0
    outs = {o for _, o in rows}
    if len(outs) != 1 or not outs <= {"0", "1"}:
        raise BlifError("cover mixes on-set and off-set rows", lineno)
    tt = 0
    for pattern, _ in rows:
        if len(pattern) != k or any(c not in "01-" for c in pattern):
            raise BlifError(f"bad cover row {pattern!r}", lineno)
        for x in range(1 << k):
            if all(c == "-" or int(c) == (x >> i) & 1 for i, c in enumerate(pattern)):
                tt |= 1 << x
    if outs == {"0"}:
        tt ^= (1 << (1 << k)) - 1
    return tt


def _literal_from_table(net: XagNetwork, tt: int, ins: List[int], lineno: int) -> int:
    k = len(ins)
    if k == 0:
        return tt & 1
    if k == 1:
        return {0b00: 0, 0b11: 1, 0b10: ins[0], 0b01: ins[0] ^ 1}[tt]
    a, b = ins
    if tt in (0b0000, 0b1111):
        return tt & 1
    if tt in (0b1010, 0b0101):
        return a ^ (tt == 0b0101)
    if tt in (0b1100, 0b0011):
        return b ^ (tt == 0b0011)
    if tt in (0b0110, 0b1001):
        return net.add_xor(a, b) ^ (tt == 0b1001)
    ones = bin(tt).count("1")
    out_compl = 0
    if ones == 3:
        tt ^= 0b1111
        out_compl = 1
    if bin(tt).count("1") != 1:
        raise BlifError("unsupported 2-input cover", lineno)
    x = tt.bit_length() - 1
    la = a ^ (1 - (x & 1))
    lb = b ^ (1 - ((x >> 1) & 1))
    return net.add_and(la, lb) ^ out_compl


def parse_blif(text: str) -> XagNetwork:
    inputs: List[str] = []
    outputs: List[str] = []
    defs: Dict[str, Tuple[List[str], List[Tuple[str, str]], int]] = {}
    current = None
    seen_model = False
    for no, line in _blif_lines(text):
        if line.startswith("."):
            tok = line.split()
            cmd = tok[0]
            current = None
            if cmd == ".model":
                seen_model = True
            elif cmd == ".inputs":
                inputs.extend(tok[1:])
            elif cmd == ".outputs":
                outputs.extend(tok[1:])
            elif cmd == ".names":
                if len(tok) < 2:
                    raise BlifError(".names without an output signal", no)
                ins, out = tok[1:-1], tok[-1]
                if len(ins) > 2:
                    raise BlifError(f"unsupported cover with {len(ins)} inputs for {out!r}", no)
                if out in defs or out in inputs:
                    raise BlifError(f"signal {out!r} defined twice", no)
                defs[out] = (ins, [], no)
                current = out
            elif cmd == ".end":
                break
            else:
                raise BlifError(f"unsupported directive {cmd}", no)
        else:
            if current is None:
                raise BlifError(f"cover row outside .names: {line!r}", no)
            ins, rows, _ = defs[current]
            parts = line.split()
            if len(ins) == 0:
                if len(parts) != 1:
                    raise BlifError(f"bad constant cover row {line!r}", no)
                rows.append(("", parts[0]))
            else:
                if len(parts) != 2:
                    raise BlifError(f"bad cover row {line!r}", no)
                rows.append((parts[0], parts[1]))
    del seen_model

    net = XagNetwork()
    sig: Dict[str, int] = {}
    for name in inputs:
        if name in sig:
            raise BlifError(f"input {name!r} declared twice")
        sig[name] = net.add_pi(name)

    def resolve(name: str, where: Optional[int]) -> int:
        # iterative DFS; a signal seen again while still open closes a cycle
        open_: set = set()
        stack = [(name, False)]
        while stack:
            top, expanded = stack.pop()
            if top in sig:
                continue
            if top not in defs:
                raise BlifError(f"undefined signal {top!r}", where)
            ins, rows, lineno = defs[top]
            if expanded:
                tt = _cover_table(rows, len(ins), lineno)
                sig[top] = _literal_from_table(net, tt, [sig[s] for s in ins], lineno)
                open_.discard(top)
                continue
            if top in open_:
                raise BlifError(f"cyclic definition through {top!r}", lineno)
            open_.add(top)
            stack.append((top, True))
            for s in ins:
                if s in open_:
                    raise BlifError(f"cyclic definition through {s!r}", lineno)
                if s not in sig:
                    stack.append((s, False))
        return sig[name]

    for name in outputs:
        where = defs[name][2] if name in defs else None
        net.add_output(resolve(name, where), name)
    return net


def write_blif(net: XagNetwork, model: str = "top") -> str:
    names = {}
    for node, name in zip(net.pi_nodes, net.pi_names):
        names[node] = name
    lines = [f".model {model}", ".inputs " + " ".join(net.pi_names), ".outputs " + " ".join(n for n, _ in net.outputs)]
    for i in net.gates():
        names[i] = f"n{i}"
        a, b = net.nodes[i].fanins
        ra, rb = names.get(a >> 1, "const0"), names.get(b >> 1, "const0")
        lines.append(f".names {ra} {rb} {names[i]}")
        pa, pb = "0" if a & 1 else "1", "0" if b & 1 else "1"
        if net.kind(i) == AND:
            lines.append(f"{pa}{pb} 1")
        else:
            lines.extend(["01 1", "10 1"] if (a & 1) == (b & 1) else ["00 1", "11 1"])
    for name, o in net.outputs:
        node = o >> 1
        if node == 0:
            lines.append(f".names {name}")
            if o & 1:
                lines.append("1")
            continue
        src = names[node]
        if src == name:
            if o & 1:
                raise XagError(f"output {name!r} shadows a complemented signal")
            continue
        lines.append(f".names {src} {name}")
        lines.append("0 1" if o & 1 else "1 1")
    lines.append(".end")
    return "\n".join(lines) + "\n"


# -- JSON ---------------------------------------------------------------------

JSON_FORMAT = "exact-t-xag"


def write_json(net: XagNetwork) -> str:
    nodes = []
    for i in net.gates():
        nd = net.nodes[i]
        nodes.append({"id": i, "op": nd.kind, "fanins": [[f >> 1, bool(f & 1)] for f in nd.fanins]})
    doc = {
        "format": JSON_FORMAT,
        "version": 1,
        "inputs": [{"id": node, "name": name} for node, name in zip(net.pi_nodes, net.pi_names)],
        "nodes": nodes,
        "outputs": [{"name": name, "node": o >> 1, "compl": bool(o & 1)} for name, o in net.outputs],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def parse_json(text: str) -> XagNetwork:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise XagError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != JSON_FORMAT:
        raise XagError(f"not an {JSON_FORMAT} document")
    if doc.get("version") != 1:
        raise XagError(f"unsupported version {doc.get('version')!r}")
    net = XagNetwork()
    id_map = {0: 0}
    try:
        for item in doc["inputs"]:
            id_map[int(item["id"])] = net.add_pi(str(item["name"])) >> 1
        for item in doc["nodes"]:
            op = item["op"]
            if op not in (AND, XOR) or len(item["fanins"]) != 2:
                raise XagError(f"node {item.get('id')}: bad op or arity")
            fl = []
            for ref, compl in item["fanins"]:
                if int(ref) not in id_map:
                    raise XagError(f"node {item['id']}: fanin {ref} is not an earlier node")
                fl.append(lit(id_map[int(ref)], compl))
            new = net.add_and(*fl) if op == AND else net.add_xor(*fl)
            if new & 1 or (new >> 1) != len(net.nodes) - 1:
                raise XagError(f"node {item['id']}: not in normal form (simplifies or duplicates)")
            id_map[int(item["id"])] = new >> 1
        for item in doc["outputs"]:
            ref = int(item["node"])
            if ref not in id_map:
                raise XagError(f"output {item.get('name')!r} references unknown node {ref}")
            net.add_output(lit(id_map[ref], item.get("compl", False)), str(item["name"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, XagError):
            raise
        raise XagError(f"schema violation: {exc!r}") from None
    return net


# -- generators ---------------------------------------------------------------

def random_network(rng: random.Random, n_pis: int, n_gates: int, n_pos: int = 1,
                   and_prob: float = 0.5) -> XagNetwork:
    """Random strashed XAG; outputs are drawn from the last gates created."""
    net = XagNetwork()
    lits = [net.add_pi(f"x{i}") for i in range(n_pis)]
    attempts = 0
    while len(net.gates()) < n_gates and attempts < 50 * n_gates:
        attempts += 1
        a, b = rng.sample(lits, 2) if len(lits) > 1 else (lits[0], lits[0])
        a ^= rng.randrange(2)
        b ^= rng.randrange(2)
        before = len(net.nodes)
        new = net.add_and(a, b) if rng.random() < and_prob else net.add_xor(a, b)
        if len(net.nodes) > before:
            lits.append(new & ~1)
    gates = net.gates()
    pool = gates[::-1] if gates else list(net.pi_nodes)
    for j in range(min(n_pos, len(pool))):
        net.add_output(lit(pool[j], rng.randrange(2)), f"y{j}")
    return net


def network_stats(net: XagNetwork) -> Dict[str, int]:
    stats = {
        "inputs": net.num_pis,
        "outputs": net.num_pos,
        "nodes": len(net.gates()),
        "ands": net.num_ands(),
        "xors": net.num_xors(),
    }
    if net.num_pis <= MAX_CUT_LEAVES:
        stats["mc_anf"] = sum(mc_anf(anf_of_output(net, j)) for j in range(net.num_pos))
    return stats
