"""Small named graphs and candidate maps used by the tests, the CLI demo and the docs.

Everything is stored in the text formats and parsed on demand, so the
corpus doubles as a fixture for the parsers.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path as FsPath

from .graph import DirectedGraph, parse_graph
from .homcheck import Transducer, parse_transducer


def _tree_text(height: int) -> str:
    n = 2 ** (height + 1) - 1
    lines = [f"vertex t{i}" for i in range(1, n + 1)]
    for i in range(1, 2**height):
        lines += [f"edge l{i} t{i} t{2 * i}", f"edge r{i} t{i} t{2 * i + 1}"]
    return "\n".join(lines) + "\n"


def _grid_text(k: int) -> str:
    lines = [f"vertex g{i}{j}" for i in range(k) for j in range(k)]
    lines += [f"edge h{i}{j} g{i}{j} g{i}{j + 1}" for i in range(k) for j in range(k - 1)]
    lines += [f"edge d{i}{j} g{i}{j} g{i + 1}{j}" for i in range(k - 1) for j in range(k)]
    return "\n".join(lines) + "\n"


GRAPHS: dict[str, str] = {
    # a single vertex and nothing else
    "pt": "vertex v\n",
    "loop": "vertex v\nedge e v v\n",
    "p2": "vertex u\nvertex w\nedge f u w\n",
    "p2_relabeled": "vertex p\nvertex q\nedge g p q\n",
    "p2_twice": "vertex u1\nvertex w1\nvertex u2\nvertex w2\nedge f1 u1 w1\nedge f2 u2 w2\n",
    "o2": "vertex v\nedge a v v\nedge b v v\n",
    "o3": "vertex v\nedge a v v\nedge b v v\nedge c v v\n",
    # out-split of o2: v1 emits the copies of a, v2 the copies of b
    "o2_split": (
        "vertex v1\nvertex v2\n"
        "edge a1 v1 v1\nedge a2 v1 v2\nedge b1 v2 v1\nedge b2 v2 v2\n"
    ),
    "loop_sink": "vertex v\nvertex s\nedge l v v\nedge t v s\n",
    "path3": "vertex v0\nvertex v1\nvertex v2\nvertex v3\nedge e1 v0 v1\nedge e2 v1 v2\nedge e3 v2 v3\n",
    "diamond": (
        "vertex r\nvertex m1\nvertex m2\nvertex s\n"
        "edge a r m1\nedge b r m2\nedge c m1 s\nedge d m2 s\n"
    ),
    "diamond_relabeled": (
        "vertex R\nvertex N1\nvertex N2\nvertex S\n"
        "edge x R N2\nedge y R N1\nedge z N2 S\nedge t N1 S\n"
    ),
    "fork": "vertex r\nvertex s1\nvertex s2\nedge x r s1\nedge y r s2\n",
    # complete binary tree of height 3
    "tree3": _tree_text(3),
    # 3x3 grid, edges rightwards and downwards
    "grid3": _grid_text(3),
}

ACYCLIC = (
    "pt", "p2", "p2_relabeled", "p2_twice", "path3", "diamond", "diamond_relabeled", "fork", "tree3", "grid3",
)


def graph(name: str) -> DirectedGraph:
    return parse_graph(GRAPHS[name], name)


def _identity_text(g: DirectedGraph) -> str:
    lines = ["state s initial"]
    lines += [f"map s {e} {e} s" for e in g.edge_ids]
    lines += [f"sinkmap s {v} @{v}" for v in g.sinks]
    return "\n".join(lines) + "\n"


def _one_block(pairs: dict[str, str], sinks: dict[str, str]) -> str:
    lines = ["state s initial"]
    lines += [f"map s {e} {f} s" for e, f in pairs.items()]
    lines += [f"sinkmap s {v} {p}" for v, p in sinks.items()]
    return "\n".join(lines) + "\n"


FIRST_LETTER_SWAP = """\
# swap the first symbol, copy the rest
state s0 initial
state s1
map s0 a b s1
map s0 b a s1
map s1 a a s1
map s1 b b s1
"""

# binary add-one with carry: a homeomorphism of the full 2-shift space
ODOMETER = """\
state c initial
state i
map c a b i
map c b a c
map i a a i
map i b b i
"""

ODOMETER_INV = """\
state c initial
state i
map c b a i
map c a b c
map i a a i
map i b b i
"""

COLLAPSE = "state s initial\nmap s a a s\nmap s b a s\n"

PT_TO_LOOP = "state s initial\nsinkmap s v (e)^w\n"
LOOP_TO_PT = "state t initial\nhalt t @v\n"

# exchanges the two points f and @w of p2
P2_SWAP = "state s initial\nstate t\nmap s f - t\nhalt t @w\nsinkmap s w f\n"

# 2-block code o2 -> o2_split: edge x_i becomes x with the class of x_(i+1)
SPLIT_CODE = """\
state s initial
state pa
state pb
map s a - pa
map s b - pb
map pa a a1 pa
map pa b a2 pb
map pb a b1 pa
map pb b b2 pb
"""

MERGE_CODE = """\
state r initial
map r a1 a r
map r a2 a r
map r b1 b r
map r b2 b r
"""


@dataclass
class MapInstance:
    name: str
    source: str
    target: str
    forward: str
    inverse: str
    homeomorphism: bool
    conjugacy: bool

    def transducers(self) -> tuple[Transducer, Transducer]:
        e, f = graph(self.source), graph(self.target)
        return (
            parse_transducer(self.forward, e, f, self.name),
            parse_transducer(self.inverse, f, e, self.name + "^-1"),
        )


def _instances() -> list[MapInstance]:
    o2, o3 = graph("o2"), graph("o3")
    swap = _one_block({"a": "b", "b": "a"}, {})
    cyc = _one_block({"a": "b", "b": "c", "c": "a"}, {})
    cyc_inv = _one_block({"b": "a", "c": "b", "a": "c"}, {})
    relabel = _one_block({"f": "g"}, {"w": "@q"})
    unlabel = _one_block({"g": "f"}, {"q": "@w"})
    sum_swap = _one_block({"f1": "f2", "f2": "f1"}, {"w1": "@w2", "w2": "@w1"})
    dia = _one_block({"a": "y", "b": "x", "c": "t", "d": "z"}, {"s": "@S"})
    dia_inv = _one_block({"y": "a", "x": "b", "t": "c", "z": "d"}, {"S": "@s"})
    fork_swap = _one_block({"x": "y", "y": "x"}, {"s1": "@s2", "s2": "@s1"})
    return [
        MapInstance("o2_identity", "o2", "o2", _identity_text(o2), _identity_text(o2), True, True),
        MapInstance("o2_swap", "o2", "o2", swap, swap, True, True),
        MapInstance("o3_cycle", "o3", "o3", cyc, cyc_inv, True, True),
        MapInstance("o3_identity", "o3", "o3", _identity_text(o3), _identity_text(o3), True, True),
        MapInstance("o2_split", "o2", "o2_split", SPLIT_CODE, MERGE_CODE, True, True),
        MapInstance("first_letter_swap", "o2", "o2", FIRST_LETTER_SWAP, FIRST_LETTER_SWAP, True, False),
        MapInstance("odometer", "o2", "o2", ODOMETER, ODOMETER_INV, True, False),
        MapInstance("pt_to_loop", "pt", "loop", PT_TO_LOOP, LOOP_TO_PT, True, False),
        MapInstance("p2_relabel", "p2", "p2_relabeled", relabel, unlabel, True, True),
        MapInstance("p2_twice_swap", "p2_twice", "p2_twice", sum_swap, sum_swap, True, True),
        MapInstance("p2_point_swap", "p2", "p2", P2_SWAP, P2_SWAP, True, False),
        MapInstance("diamond_relabel", "diamond", "diamond_relabeled", dia, dia_inv, True, True),
        MapInstance("fork_swap", "fork", "fork", fork_swap, fork_swap, True, True),
        MapInstance(
            "loop_sink_identity", "loop_sink", "loop_sink",
            _identity_text(graph("loop_sink")), _identity_text(graph("loop_sink")), True, True,
        ),
        MapInstance("collapse", "o2", "o2", COLLAPSE, _identity_text(o2), False, False),
    ]


INSTANCES: list[MapInstance] = _instances()


def instance(name: str) -> MapInstance:
    for inst in INSTANCES:
        if inst.name == name:
            return inst
    raise KeyError(name)


def write_corpus(directory) -> list[FsPath]:
    """Write every graph (``*.graph``) and map (``*.map``) into ``directory``."""
    out = FsPath(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in GRAPHS.items():
        p = out / f"{name}.graph"
        p.write_text(text)
        written.append(p)
    for inst in INSTANCES:
        for suffix, text in (("", inst.forward), ("_inv", inst.inverse)):
            p = out / f"{inst.name}{suffix}.map"
            p.write_text(text)
            written.append(p)
    return written
