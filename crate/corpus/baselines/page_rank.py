"""PageRank by power iteration."""


def page_rank(adjacency, damping, iterations):
    """Rank nodes of the graph given by an adjacency matrix."""
    n = len(adjacency)
    if n == 0:
        return []
    out_degree = [sum(row) for row in adjacency]
    ranks = [1.0 / n] * n
    for _ in range(iterations):
        dangling = sum(r for r, d in zip(ranks, out_degree) if d == 0)
        base = (1.0 - damping) / n + damping * dangling / n
        nxt = [base] * n
        for i, row in enumerate(adjacency):
            if out_degree[i] == 0:
                continue
            share = damping * ranks[i] / out_degree[i]
            for j, edge in enumerate(row):
                if edge:
                    nxt[j] += share
        ranks = nxt
    return ranks
