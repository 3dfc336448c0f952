"""PageRank by power iteration."""


def pagerank(adjacency, damping=0.85, tol=1e-8, max_iter=100):
    """Return the PageRank vector of the graph given as an adjacency matrix."""
    n = len(adjacency)
    assert n > 0, "empty graph"
    out_degree = [sum(row) for row in adjacency]
    rank = [1.0 / n] * n
    iteration = 0
    while iteration < max_iter:
        new_rank = [(1 - damping) / n] * n
        for i in range(n):
            try:
                share = rank[i] / out_degree[i]
            except ZeroDivisionError:
                share = rank[i] / n
                for j in range(n):
                    new_rank[j] += damping * share
                continue
            for j in range(n):
                if adjacency[i][j]:
                    new_rank[j] += damping * share
        delta = sum(abs(a - b) for a, b in zip(new_rank, rank))
        rank = new_rank
        iteration += 1
        if delta < tol:
            break
    return rank
