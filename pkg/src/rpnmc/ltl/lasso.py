"""Direct evaluation of a formula on an ultimately periodic path."""
from __future__ import annotations

from collections.abc import Callable, Sequence

from .syntax import (Always, And, Atom, Const, Eventually, Formula, Implies, Next, Not, Or, Release,
                     Until, subformulas)


def holds_on_lasso(f: Formula, valuation: Sequence[Callable[[Atom], bool]], loop: int) -> bool:
    """Truth of ``f`` at position 0 of the infinite path
    ``v[0] .. v[loop-1] (v[loop] .. v[n-1])^omega``.

    ``valuation[i]`` evaluates atoms at position ``i``.
    """
    n = len(valuation)
    if not 0 <= loop < n:
        raise ValueError("loop index out of range")
    nxt = [i + 1 for i in range(n - 1)] + [loop]
    val: dict[Formula, list[bool]] = {}
    for g in subformulas(f):
        if g in val:
            continue
        if isinstance(g, Atom):
            val[g] = [bool(valuation[i](g)) for i in range(n)]
        elif isinstance(g, Const):
            val[g] = [g.value] * n
        elif isinstance(g, Not):
            val[g] = [not x for x in val[g.arg]]
        elif isinstance(g, And):
            val[g] = [a and b for a, b in zip(val[g.left], val[g.right])]
        elif isinstance(g, Or):
            val[g] = [a or b for a, b in zip(val[g.left], val[g.right])]
        elif isinstance(g, Implies):
            val[g] = [(not a) or b for a, b in zip(val[g.left], val[g.right])]
        elif isinstance(g, Next):
            a = val[g.arg]
            val[g] = [a[nxt[i]] for i in range(n)]
        elif isinstance(g, (Until, Eventually)):
            left = [True] * n if isinstance(g, Eventually) else val[g.left]
            right = val[g.arg] if isinstance(g, Eventually) else val[g.right]
            val[g] = _fixpoint(left, right, nxt, least=True)
        elif isinstance(g, (Release, Always)):
            left = [False] * n if isinstance(g, Always) else val[g.left]
            right = val[g.arg] if isinstance(g, Always) else val[g.right]
            val[g] = _fixpoint(left, right, nxt, least=False)
        else:
            raise TypeError(f"not a formula: {g!r}")
    return val[f][0]


def _fixpoint(left, right, nxt, least):
    n = len(left)
    cur = [not least] * n
    # Each sweep settles at least one more position; n + 1 sweeps suffice.
    for _ in range(n + 1):
        if least:
            new = [right[i] or (left[i] and cur[nxt[i]]) for i in range(n)]
        else:
            new = [right[i] and (left[i] or cur[nxt[i]]) for i in range(n)]
        if new == cur:
            break
        cur = new
    return cur
