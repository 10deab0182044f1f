"""Brute-force references for the clustering tests.

Deliberately independent of the package under test: plain lists, plain
loops. Partitions are enumerated as restricted-growth strings, which walks
every set partition of n rows into exactly k non-empty blocks once (cluster
labels do not matter because the cost function is label-invariant).
"""


def hamming(a, b):
    return sum(1 for x, z in zip(a, b) if x != z)


def majority_value(values):
    """Most frequent value, lowest value on ties."""
    counts = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    top = max(counts.values())
    return min(v for v, c in counts.items() if c == top)


def partition_cost(rows, assignment, k):
    """Best achievable cost of this partition: per-cluster majority modes,
    then the summed mismatch of each row against its cluster's mode."""
    clusters = [[] for _ in range(k)]
    for row, label in zip(rows, assignment):
        clusters[label].append(row)
    total = 0
    for members in clusters:
        if not members:
            continue
        m = len(members[0])
        mode = [majority_value([row[j] for row in members]) for j in range(m)]
        total += sum(hamming(row, mode) for row in members)
    return total


def iter_partitions(n, k):
    """Yield every assignment of n rows to exactly k non-empty, unlabeled
    blocks (restricted growth strings with maximum k - 1)."""
    if k > n or k < 1:
        return
    assignment = [0] * n

    def extend(i, used):
        if n - i < k - used:
            return
        if i == n:
            if used == k:
                yield tuple(assignment)
            return
        for label in range(min(used, k - 1) + 1):
            assignment[i] = label
            yield from extend(i + 1, max(used, label + 1))

    yield from extend(1, 1)


def optimal_cost(rows, k):
    """Exhaustive minimum partition cost over exactly k non-empty clusters."""
    best = None
    for assignment in iter_partitions(len(rows), k):
        cost = partition_cost(rows, assignment, k)
        if best is None or cost < best:
            best = cost
    return best
