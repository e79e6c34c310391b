"""Pure-Python kernels: reference implementation of the compiled hot loops.

Both backends must produce identical output for identical input: the hull
decisions are exact float comparisons and the greedy walk accumulates in a
fixed order, so results are reproducible bit for bit either way.
"""

from __future__ import annotations


def raw_extremes(offsets, alt_ids, weights, gains, default_pos, cross_tol,
                 out_pos, out_counts, lo, hi):
    """Fill per-individual extreme positions for individuals [lo, hi).

    For individual i the output region is out_pos[offsets[i]:offsets[i]+k]
    (k = out_counts[i]): flat positions of the retained alternatives in hull
    order, the default first.  Candidates with non-positive social gain are
    dropped, then dominated points (a cheaper-or-equal point with at least
    as much gain), then points on or below a segment between two retained
    points (cross-product test with absolute tolerance cross_tol).
    """
    offs = offsets.tolist()
    alts = alt_ids.tolist()
    ws = weights.tolist()
    gs = gains.tolist()
    dpos = default_pos.tolist()

    for i in range(lo, hi):
        a, b = offs[i], offs[i + 1]
        cand = [p for p in range(a, b) if gs[p] > 0.0]
        cand.sort(key=lambda p: (ws[p], -gs[p], alts[p]))

        stack = []
        last_g = 0.0
        for p in cand:
            g = gs[p]
            if g <= last_g:          # dominated by an earlier (cheaper) point
                continue
            last_g = g
            w = ws[p]
            while stack:
                bp = stack[-1]
                if len(stack) == 1:
                    aw = 0.0
                    ag = 0.0
                else:
                    ap = stack[-2]
                    aw = ws[ap]
                    ag = gs[ap]
                cross = (ws[bp] - aw) * (g - ag) - (gs[bp] - ag) * (w - aw)
                if cross >= -cross_tol:  # convex or collinear: middle point goes
                    stack.pop()
                else:
                    break
            stack.append(p)

        out_pos[a] = dpos[i]
        k = 1
        for p in stack:
            out_pos[a + k] = p
            k += 1
        out_counts[i] = k


def greedy_walk(step_weights, step_gains, budget, start, spend0, welf0,
                max_incl, out_spend, out_welf):
    """Walk the efficiency-sorted step list, including steps while they fit.

    Stops at the first step whose inclusion would exceed the budget (the
    split item) or after max_incl inclusions.  Returns
    (n_included, cursor, spend, welfare); cumulative spend/welfare after
    each inclusion are written to out_spend/out_welf[:n_included].
    """
    ws = step_weights.tolist()
    gs = step_gains.tolist()
    m = len(ws)
    t = start
    n = 0
    spend = spend0
    welf = welf0
    while t < m and n < max_incl:
        w = ws[t]
        if spend + w > budget:
            break
        spend = spend + w
        welf = welf + gs[t]
        out_spend[n] = spend
        out_welf[n] = welf
        n += 1
        t += 1
    return n, t, spend, welf
