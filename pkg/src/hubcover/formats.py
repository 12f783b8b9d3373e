"""Line-oriented text formats.

HCPI (instances)::

    hcpi 1
    variant v1|v2|v3
    allocation single|multi
    alpha p/q
    phi p/q                 # variant 1 only
    capacity N              # optional
    branch <name>
    hub <name> cost p/q
    dist <name> <name> p/q  # variant 1: every unordered vertex pair once
    edge <name> <name>      # variants 2 and 3
    task <name> <name>

HCPS (solutions)::

    hcps 1
    open <hub>
    tour <b> <h> <h2> <b2>  # multi allocation
    assign <b> <h>          # single allocation and variant 3

Small companion formats are used by the CLI: ``queens 1`` (``n N``,
``queen ROW COL``), ``setcover 1`` (``element E``, ``set S weight W E...``)
and ``cover 1`` (``pick S``).

Canonical form: keys in the order above, rationals in lowest terms.
Branch and hub lines keep declaration order because that order defines
indices (and therefore tie-breaking); every other entry is sorted by name.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction

from hubcover.errors import FormatSemanticError, FormatSyntaxError, InstanceError
from hubcover.feasibility import witness_kind
from hubcover.model import (
    AdjacencyGraph,
    CoverWitness,
    HcpInstance,
    MetricMatrix,
    MultiWitness,
    QueensInstance,
    SetCoverInstance,
    SetCoverSolution,
    SingleWitness,
    Solution,
    Tour,
    Variant,
    build_instance,
    make_solution,
)


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(token: str, line: int) -> Fraction:
    num, sep, den = token.partition("/")
    try:
        if sep:
            if not num.lstrip("-").isdigit() or not den.isdigit():
                raise ValueError
            return Fraction(int(num), int(den))
        if not token.lstrip("-").isdigit():
            raise ValueError
        return Fraction(int(token))
    except (ValueError, ZeroDivisionError):
        raise FormatSyntaxError(f"bad rational {token!r}", line) from None


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def _lines(text: str):
    """Yield (line number, tokens) for non-blank, non-comment lines."""
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield no, body.split()


def _expect_header(lines, kind: str) -> None:
    try:
        no, tokens = next(lines)
    except StopIteration:
        raise FormatSyntaxError(f"empty file, expected '{kind} 1'", 1) from None
    if tokens != [kind, "1"]:
        raise FormatSyntaxError(f"expected header '{kind} 1'", no)


def sniff(text: str) -> str | None:
    """Return the header keyword of a file ('hcpi', 'hcps', 'queens', ...)."""
    for _, tokens in _lines(text):
        return tokens[0]
    return None


# --------------------------------------------------------------------- HCPI

_SCALARS = ("variant", "allocation", "alpha", "phi", "capacity")


def serialize_instance(instance: HcpInstance) -> str:
    out = [
        "hcpi 1",
        f"variant {instance.variant.value}",
        f"allocation {instance.allocation.value}",
        f"alpha {format_rational(instance.alpha)}",
    ]
    if instance.variant is Variant.V1:
        out.append(f"phi {format_rational(instance.phi)}")
    if instance.capacity is not None:
        out.append(f"capacity {instance.capacity}")
    out += [f"branch {b}" for b in instance.branches]
    out += [
        f"hub {h} cost {format_rational(c)}" for h, c in zip(instance.hubs, instance.opening_cost)
    ]
    names = instance.branches + instance.hubs
    if instance.variant is Variant.V1:
        entries = [
            (names[u], names[v], format_rational(instance.dist(u, v)))
            for u in range(len(names))
            for v in range(u + 1, len(names))
        ]
        out += [f"dist {a} {b} {d}" for a, b, d in sorted(entries)]
    else:
        g = instance.geometry
        edges = [(instance.branches[b], instance.hubs[h]) for b, h in g.branch_hub]
        edges += [(instance.hubs[h], instance.hubs[h2]) for h, h2 in g.hub_hub]
        out += [f"edge {a} {b}" for a, b in sorted(edges)]
    tasks = sorted((instance.branches[b], instance.branches[b2]) for b, b2 in instance.tasks)
    out += [f"task {a} {b}" for a, b in tasks]
    return "\n".join(out) + "\n"


def parse_instance(text: str) -> HcpInstance:
    """Parse HCPI text; syntax errors carry 1-based line numbers."""
    lines = _lines(text)
    _expect_header(lines, "hcpi")
    scalars: dict[str, tuple[int, str]] = {}
    branches: list[str] = []
    hubs: list[str] = []
    costs: list[Fraction] = []
    dists: list[tuple[int, str, str, Fraction]] = []
    edges: list[tuple[int, str, str]] = []
    tasks: list[tuple[int, str, str]] = []
    last = 1
    for no, tok in lines:
        last = no
        key = tok[0]
        if key in _SCALARS:
            if len(tok) != 2:
                raise FormatSyntaxError(f"'{key}' takes exactly one value", no)
            if key in scalars:
                raise FormatSyntaxError(f"duplicate '{key}'", no)
            scalars[key] = (no, tok[1])
        elif key == "branch":
            if len(tok) != 2:
                raise FormatSyntaxError("expected 'branch <name>'", no)
            branches.append(tok[1])
        elif key == "hub":
            if len(tok) != 4 or tok[2] != "cost":
                raise FormatSyntaxError("expected 'hub <name> cost <p/q>'", no)
            hubs.append(tok[1])
            costs.append(parse_rational(tok[3], no))
        elif key == "dist":
            if len(tok) != 4:
                raise FormatSyntaxError("expected 'dist <name> <name> <p/q>'", no)
            dists.append((no, tok[1], tok[2], parse_rational(tok[3], no)))
        elif key == "edge":
            if len(tok) != 3:
                raise FormatSyntaxError("expected 'edge <name> <name>'", no)
            edges.append((no, tok[1], tok[2]))
        elif key == "task":
            if len(tok) != 3:
                raise FormatSyntaxError("expected 'task <name> <name>'", no)
            tasks.append((no, tok[1], tok[2]))
        else:
            raise FormatSyntaxError(f"unknown key {key!r}", no)

    for key in ("variant", "allocation", "alpha"):
        if key not in scalars:
            raise FormatSyntaxError(f"missing required key '{key}'", last)
    vno, vtext = scalars["variant"]
    try:
        variant = Variant(vtext)
    except ValueError:
        raise FormatSyntaxError(f"unknown variant {vtext!r}", vno) from None
    ano, atext = scalars["allocation"]
    if atext not in ("single", "multi"):
        raise FormatSyntaxError(f"unknown allocation {atext!r}", ano)
    alpha = parse_rational(scalars["alpha"][1], scalars["alpha"][0])
    phi = None
    if variant is Variant.V1:
        if "phi" not in scalars:
            raise FormatSyntaxError("missing required key 'phi' for variant v1", last)
        phi = parse_rational(scalars["phi"][1], scalars["phi"][0])
    elif "phi" in scalars:
        raise FormatSyntaxError("'phi' is only allowed for variant v1", scalars["phi"][0])
    capacity = None
    if "capacity" in scalars:
        cno, ctext = scalars["capacity"]
        if not ctext.isdigit():
            raise FormatSyntaxError(f"bad capacity {ctext!r}", cno)
        capacity = int(ctext)

    names = branches + hubs
    index = {name: i for i, name in enumerate(names)}
    if len(index) != len(names):
        raise FormatSemanticError("duplicate branch or hub name")
    nb = len(branches)

    def vertex(name: str, no: int) -> int:
        if name not in index:
            raise FormatSemanticError(f"unknown vertex {name!r}", no)
        return index[name]

    if variant is Variant.V1:
        if edges:
            raise FormatSyntaxError("'edge' lines are not allowed for variant v1", edges[0][0])
        n = len(names)
        matrix = [[Fraction(0)] * n for _ in range(n)]
        seen = set()
        for no, a, b, d in dists:
            u, v = vertex(a, no), vertex(b, no)
            if u == v:
                raise FormatSyntaxError("'dist' of a vertex to itself", no)
            pair = (min(u, v), max(u, v))
            if pair in seen:
                raise FormatSemanticError(f"duplicate distance {a} {b}", no)
            seen.add(pair)
            matrix[u][v] = matrix[v][u] = d
        expected = n * (n - 1) // 2
        if len(seen) != expected:
            missing = next(
                (names[u], names[v]) for u in range(n) for v in range(u + 1, n)
                if (u, v) not in seen
            )
            raise FormatSemanticError(
                f"distance matrix incomplete: missing dist {missing[0]} {missing[1]}", last
            )
        geometry = MetricMatrix(tuple(tuple(row) for row in matrix))
    else:
        if dists:
            raise FormatSyntaxError(
                "'dist' lines are only allowed for variant v1", dists[0][0]
            )
        bh, hh = set(), set()
        for no, a, b in edges:
            u, v = vertex(a, no), vertex(b, no)
            if u < nb and v < nb:
                raise FormatSemanticError("branch-branch edges are not allowed", no)
            if u >= nb and v >= nb:
                if u == v:
                    raise FormatSemanticError("hub self-loop", no)
                hh.add((min(u, v) - nb, max(u, v) - nb))
            else:
                b_, h_ = (u, v - nb) if u < nb else (v, u - nb)
                bh.add((b_, h_))
        geometry = AdjacencyGraph(frozenset(bh), frozenset(hh))

    task_idx = []
    for no, a, b in tasks:
        u, v = vertex(a, no), vertex(b, no)
        if u >= nb or v >= nb:
            raise FormatSemanticError("tasks connect branches only", no)
        task_idx.append((u, v))

    try:
        return build_instance(
            branches, hubs, costs, geometry, task_idx, alpha, phi, variant, atext, capacity
        )
    except InstanceError as exc:
        raise FormatSemanticError(f"{type(exc).__name__}: {exc}") from exc


# --------------------------------------------------------------------- HCPS

def serialize_solution(instance: HcpInstance, solution: Solution) -> str:
    out = ["hcps 1"]
    out += [f"open {h}" for h in sorted(instance.hubs[h] for h in solution.open_hubs)]
    w = solution.witness
    if isinstance(w, MultiWitness):
        rows = sorted(
            (instance.branches[t.b], instance.hubs[t.h], instance.hubs[t.h2], instance.branches[t.b2])
            for _, t in w.tours
        )
        out += ["tour " + " ".join(r) for r in rows]
    else:
        rows = sorted((instance.branches[b], instance.hubs[h]) for b, h in w.allocation)
        out += [f"assign {b} {h}" for b, h in rows]
    return "\n".join(out) + "\n"


def parse_solution(text: str, instance: HcpInstance) -> Solution:
    """Parse HCPS text against ``instance``; the cost is recomputed, never read."""
    lines = _lines(text)
    _expect_header(lines, "hcps")
    bidx = {b: i for i, b in enumerate(instance.branches)}
    hidx = {h: i for i, h in enumerate(instance.hubs)}

    def branch(name, no):
        if name not in bidx:
            raise FormatSemanticError(f"unknown branch {name!r}", no)
        return bidx[name]

    def hub(name, no):
        if name not in hidx:
            raise FormatSemanticError(f"unknown hub {name!r}", no)
        return hidx[name]

    kind = witness_kind(instance)
    opened = set()
    tours = {}
    alloc = {}
    for no, tok in lines:
        key = tok[0]
        if key == "open" and len(tok) == 2:
            opened.add(hub(tok[1], no))
        elif key == "tour" and len(tok) == 5:
            if kind is not MultiWitness:
                raise FormatSemanticError("'tour' lines need a multi allocation instance", no)
            t = Tour(branch(tok[1], no), hub(tok[2], no), hub(tok[3], no), branch(tok[4], no))
            if t.task in tours:
                raise FormatSemanticError("duplicate tour for one task", no)
            tours[t.task] = t
        elif key == "assign" and len(tok) == 3:
            if kind is MultiWitness:
                raise FormatSemanticError("'assign' lines need single allocation or v3", no)
            b = branch(tok[1], no)
            if b in alloc:
                raise FormatSemanticError(f"branch {tok[1]} assigned twice", no)
            alloc[b] = hub(tok[2], no)
        else:
            raise FormatSyntaxError(f"unrecognized line {' '.join(tok)!r}", no)
    if kind is MultiWitness:
        witness = MultiWitness.from_mapping(tours)
    elif kind is CoverWitness:
        witness = CoverWitness.from_mapping(alloc)
    else:
        witness = SingleWitness.from_mapping(alloc)
    return make_solution(instance, opened, witness)


# ------------------------------------------------------ queens / set cover

def serialize_queens(q: QueensInstance) -> str:
    out = ["queens 1", f"n {q.n}"] + [f"queen {r} {c}" for r, c in q.placed]
    return "\n".join(out) + "\n"


def parse_queens(text: str) -> QueensInstance:
    lines = _lines(text)
    _expect_header(lines, "queens")
    n = None
    placed = []
    for no, tok in lines:
        if tok[0] == "n" and len(tok) == 2 and tok[1].isdigit():
            if n is not None:
                raise FormatSyntaxError("duplicate 'n'", no)
            n = int(tok[1])
        elif tok[0] == "queen" and len(tok) == 3 and tok[1].isdigit() and tok[2].isdigit():
            placed.append((int(tok[1]), int(tok[2])))
        else:
            raise FormatSyntaxError(f"unrecognized line {' '.join(tok)!r}", no)
    if n is None:
        raise FormatSyntaxError("missing required key 'n'")
    try:
        return QueensInstance(n, tuple(placed))
    except InstanceError as exc:
        raise FormatSemanticError(str(exc)) from exc


def serialize_setcover(sc: SetCoverInstance) -> str:
    out = ["setcover 1"] + [f"element {e}" for e in sc.elements]
    for name, (w, members) in zip(sc.set_names, sc.sets):
        elems = " ".join(sorted(sc.elements[e] for e in members))
        out.append(f"set {name} weight {format_rational(w)} {elems}")
    return "\n".join(out) + "\n"


def parse_setcover(text: str) -> SetCoverInstance:
    lines = _lines(text)
    _expect_header(lines, "setcover")
    elements: list[str] = []
    raw_sets = []
    for no, tok in lines:
        if tok[0] == "element" and len(tok) == 2:
            elements.append(tok[1])
        elif tok[0] == "set" and len(tok) >= 4 and tok[2] == "weight":
            raw_sets.append((no, tok[1], parse_rational(tok[3], no), tok[4:]))
        else:
            raise FormatSyntaxError(f"unrecognized line {' '.join(tok)!r}", no)
    index = {e: i for i, e in enumerate(elements)}
    sets, names = [], []
    for no, name, w, members in raw_sets:
        for m in members:
            if m not in index:
                raise FormatSemanticError(f"unknown element {m!r}", no)
        sets.append((w, frozenset(index[m] for m in members)))
        names.append(name)
    try:
        return SetCoverInstance(tuple(elements), tuple(sets), tuple(names))
    except InstanceError as exc:
        raise FormatSemanticError(str(exc)) from exc


def serialize_cover(sc: SetCoverInstance, cover: SetCoverSolution) -> str:
    out = ["cover 1"] + [f"pick {n}" for n in sorted(sc.set_names[i] for i in cover.chosen)]
    return "\n".join(out) + "\n"


def parse_cover(text: str, sc: SetCoverInstance) -> SetCoverSolution:
    lines = _lines(text)
    _expect_header(lines, "cover")
    index = {n: i for i, n in enumerate(sc.set_names)}
    chosen = set()
    for no, tok in lines:
        if tok[0] != "pick" or len(tok) != 2:
            raise FormatSyntaxError(f"unrecognized line {' '.join(tok)!r}", no)
        if tok[1] not in index:
            raise FormatSemanticError(f"unknown set {tok[1]!r}", no)
        chosen.add(index[tok[1]])
    chosen_t = tuple(sorted(chosen))
    return SetCoverSolution(chosen_t, sc.weight_of(chosen_t))


def serialize_placement(n: int, placement) -> str:
    """A full queens placement in the queens format (every queen listed)."""
    return serialize_queens(QueensInstance(n, tuple(placement)))
