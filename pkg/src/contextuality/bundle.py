"""DOT rendering of a model's bundle picture.

The base carries one vertex per measurement and one edge per co-measurable
pair; above each measurement sits its fibre of outcomes, and two fibre
vertices are joined exactly when the pair of outcomes is supported jointly.
Contexts with more than two measurements cannot be drawn as base edges, so
they are emitted as annotations and only their pairwise traces appear.
Output is deterministic: declaration order for measurements and outcomes,
lexicographic order elsewhere.
"""

from __future__ import annotations

from .model import EmpiricalModel


def _quote(name: str) -> str:
    escaped = name.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def export_bundle_dot(model: EmpiricalModel) -> str:
    scn = model.scenario
    index = {m: i for i, m in enumerate(scn.measurements)}

    pairs: list[tuple[str, str]] = []
    seen = set()
    for ctx in scn.contexts:
        for i, a in enumerate(ctx):
            for b in ctx[i + 1 :]:
                key = (min(a, b, key=index.get), max(a, b, key=index.get))
                if key not in seen:
                    seen.add(key)
                    pairs.append(key)
    pairs.sort(key=lambda p: (index[p[0]], index[p[1]]))

    containing = {}
    for pair in pairs:
        for ci, ctx in enumerate(scn.contexts):
            if pair[0] in ctx and pair[1] in ctx:
                containing[pair] = ci
                break

    lines = ["graph bundle {"]
    wide = [ctx for ctx in scn.contexts if len(ctx) > 2]
    for ctx in wide:
        lines.append(
            f"  // context {{{', '.join(ctx)}}} has more than two measurements; "
            "only its pairwise traces are drawn"
        )
    lines.append("  node [fontsize=10];")

    lines.append("  subgraph cluster_base {")
    lines.append('    label="base";')
    lines.append("    node [shape=plaintext];")
    for m in scn.measurements:
        lines.append(f"    {_quote('base/' + m)} [label={_quote(m)}];")
    for a, b in pairs:
        lines.append(f"    {_quote('base/' + a)} -- {_quote('base/' + b)};")
    lines.append("  }")

    lines.append("  subgraph cluster_fibres {")
    lines.append('    label="outcome fibres";')
    lines.append("    node [shape=circle];")
    for m in scn.measurements:
        for o in scn.outcomes:
            lines.append(f"    {_quote(f'{m}:{o}')} [label={_quote(f'{m}:{o}')}];")
    for pair in pairs:
        ci = containing[pair]
        for s in model.restricted_support(ci, pair):
            a, b = pair
            lines.append(
                f"    {_quote(f'{a}:{s[a]}')} -- {_quote(f'{b}:{s[b]}')};"
            )
    lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
