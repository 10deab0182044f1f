"""Online k-modes clustering over categorical (and mixed) datasets.

The fit procedure follows the classic online scheme: pick k initial modes,
allocate every row to its nearest mode while refreshing the receiving mode
after each allocation, then run reallocation epochs that move rows between
clusters (updating both affected modes immediately) until an epoch makes no
moves or the epoch budget is exhausted.

Everything is deterministic for a given dataset and config: rows are visited
in dataset order, distance ties go to the lowest cluster index, mode ties to
the lowest category code, and restart r uses seed + r.

Convergence (an epoch with zero moves) is guaranteed for the simple measure,
whose accepted moves strictly decrease the objective. The weighted and
auto-gamma mixed measures re-derive their statistics from the assignment at
every epoch start, so the target itself shifts and the procedure can settle
into a cycle instead of a fixed point; max_epochs bounds the work and the
model's ``converged`` flag reports which way the run ended.
"""

import math
import random
from collections import Counter
from dataclasses import dataclass, field

from .dissimilarity import (
    CATEGORICAL,
    MIXED,
    NUMERIC,
    SIMPLE,
    WEIGHTED,
    AttributeSpec,
    DissimilarityPolicy,
    Prototype,
    Record,
    compute_category_weights,
    compute_gamma,
    mixed_dissimilarity,
    simple_matching,
    weighted_matching,
)
from .errors import (
    AlignmentError,
    EmptyClusterError,
    InfeasibleConfigError,
    PolicyError,
)

INIT_STRATEGIES = ("random_rows", "density")


@dataclass(frozen=True)
class CategoricalDataset:
    """An immutable table of Records plus per-attribute metadata."""

    attrs: tuple[AttributeSpec, ...]
    rows: tuple[Record, ...]

    def __post_init__(self):
        object.__setattr__(self, "attrs", tuple(self.attrs))
        object.__setattr__(self, "rows", tuple(self.rows))
        m = len(self.attrs)
        for j, spec in enumerate(self.attrs):
            if spec.index != j:
                raise ValueError(
                    f"attribute {spec.name!r} carries index {spec.index}, expected {j}"
                )
        category_sets = {
            j: set(spec.categories)
            for j, spec in enumerate(self.attrs)
            if spec.kind == CATEGORICAL
        }
        for row in self.rows:
            if len(row.values) != m:
                raise AlignmentError(
                    f"row {row.row_id!r} has {len(row.values)} values, expected {m}"
                )
            for j, spec in enumerate(self.attrs):
                v = row.values[j]
                if spec.kind == CATEGORICAL:
                    if v not in category_sets[j]:
                        raise ValueError(
                            f"row {row.row_id!r}: value {v!r} is not a category of "
                            f"attribute {spec.name or j}"
                        )
                elif not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                    raise ValueError(
                        f"row {row.row_id!r}: numeric attribute {spec.name or j} "
                        f"holds non-finite value {v!r}"
                    )

    @property
    def n(self) -> int:
        return len(self.rows)

    @classmethod
    def from_values(cls, rows, kinds=None, names=None, row_ids=None):
        """Build a dataset whose cells are used directly as category codes.

        Categorical cells must already be small non-negative integers (such
        as Likert answers); each attribute's category list records
        first-appearance order.
        """
        rows = [tuple(r) for r in rows]
        if rows:
            m = len(rows[0])
        elif kinds is not None:
            m = len(kinds)
        else:
            m = 0
        for r in rows:
            if len(r) != m:
                raise AlignmentError(f"ragged input row of length {len(r)}, expected {m}")
        kinds = list(kinds) if kinds is not None else [CATEGORICAL] * m
        names = list(names) if names is not None else [f"attr{j}" for j in range(m)]
        if len(kinds) != m or len(names) != m:
            raise AlignmentError("kinds/names do not match the attribute count")
        if row_ids is None:
            row_ids = list(range(len(rows)))
        elif len(row_ids) != len(rows):
            raise AlignmentError("row_ids do not match the row count")
        attrs = []
        for j in range(m):
            categories = ()
            if kinds[j] == CATEGORICAL:
                categories = tuple(dict.fromkeys(r[j] for r in rows))
            attrs.append(AttributeSpec(index=j, kind=kinds[j], name=names[j], categories=categories))
        records = [Record(values=r, row_id=rid) for r, rid in zip(rows, row_ids)]
        return cls(attrs=tuple(attrs), rows=tuple(records))

    @classmethod
    def from_raw(cls, rows, kinds=None, names=None, row_ids=None):
        """Ingest raw labels: categorical values are recoded to dense codes
        0..c-1 in first-appearance order.

        Because the dense coding depends only on the order in which distinct
        labels first appear, any per-attribute bijective relabeling of the
        input produces the identical dataset, making every downstream result
        invariant under recoding.
        """
        rows = [tuple(r) for r in rows]
        m = len(rows[0]) if rows else (len(kinds) if kinds is not None else 0)
        kinds = list(kinds) if kinds is not None else [CATEGORICAL] * m
        code_maps = [dict() for _ in range(m)]
        encoded = []
        for r in rows:
            if len(r) != m:
                raise AlignmentError(f"ragged input row of length {len(r)}, expected {m}")
            enc = []
            for j, v in enumerate(r):
                if kinds[j] == CATEGORICAL:
                    codes = code_maps[j]
                    if v not in codes:
                        codes[v] = len(codes)
                    enc.append(codes[v])
                else:
                    enc.append(float(v))
            encoded.append(tuple(enc))
        return cls.from_values(encoded, kinds=kinds, names=names, row_ids=row_ids)


@dataclass(frozen=True)
class FitConfig:
    """Everything that determines a clustering run."""

    k: int
    policy: DissimilarityPolicy = field(default_factory=DissimilarityPolicy)
    init: str = "random_rows"
    seed: int = 0
    max_epochs: int = 100
    restarts: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise InfeasibleConfigError(f"k must be >= 1, got {self.k}")
        if self.init not in INIT_STRATEGIES:
            raise ValueError(f"unknown init strategy {self.init!r}")
        if self.max_epochs < 1:
            raise ValueError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")


@dataclass(frozen=True)
class ClusterModel:
    """A fitted clustering: one prototype per cluster, one cluster per row."""

    modes: tuple[Prototype, ...]
    assignments: tuple[int, ...]
    cost: float
    epochs_run: int
    converged: bool
    config: FitConfig

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "assignments", tuple(self.assignments))


def update_mode_attribute(values) -> int:
    """Most frequent category code in the multiset; ties break to the
    lowest code."""
    counts = Counter(values)
    if not counts:
        raise EmptyClusterError("cannot take the mode of an empty multiset")
    return _mode_from_counts(counts)


def _mode_from_counts(counts) -> int:
    best_code = None
    best_count = -1
    for code, count in counts.items():
        if count > best_count or (count == best_count and code < best_code):
            best_code, best_count = code, count
    return best_code


def _mismatches(a, b) -> int:
    return sum(1 for x, z in zip(a, b) if x != z)


def _density_seeds(dataset, k):
    # Seed 1 is the row whose values are, summed over attributes, the most
    # frequent in the dataset; later seeds greedily maximize the minimum
    # mismatch distance to the seeds chosen so far. Ties take the lowest
    # row index.
    rows = [r.values for r in dataset.rows]
    m = len(dataset.attrs)
    freq = [Counter(vals[j] for vals in rows) for j in range(m)]
    best_i, best_score = 0, -1
    for i, vals in enumerate(rows):
        score = sum(freq[j][vals[j]] for j in range(m))
        if score > best_score:
            best_i, best_score = i, score
    chosen = [rows[best_i]]
    while len(chosen) < k:
        best_i, best_d = 0, -1
        for i, vals in enumerate(rows):
            d = min(_mismatches(vals, c) for c in chosen)
            if d > best_d:
                best_i, best_d = i, d
        chosen.append(rows[best_i])
    return chosen


def init_modes(dataset, k: int, strategy: str = "random_rows", seed: int = 0):
    """Pick k initial prototypes.

    random_rows samples k distinct rows without replacement (seeded);
    density starts from the highest-frequency row and then spreads out.
    """
    n = dataset.n
    if k < 1:
        raise InfeasibleConfigError(f"k must be >= 1, got {k}")
    if k > n:
        raise InfeasibleConfigError(f"k={k} exceeds the number of rows ({n})")
    if strategy == "random_rows":
        distinct = list(dict.fromkeys(r.values for r in dataset.rows))
        if k > len(distinct):
            raise InfeasibleConfigError(
                f"k={k} exceeds the number of distinct rows ({len(distinct)})"
            )
        rng = random.Random(seed)
        chosen = rng.sample(distinct, k)
    elif strategy == "density":
        chosen = _density_seeds(dataset, k)
    else:
        raise ValueError(f"unknown init strategy {strategy!r}")
    return [Prototype(values=v, cluster_index=i) for i, v in enumerate(chosen)]


def nearest_mode(record, modes, attrs, policy, weights=None, gammas=None):
    """Index of the closest prototype and its distance; ties go to the
    lowest index. For the mixed policy, per-cluster gammas may be supplied;
    otherwise the fixed gamma (or 1.0 under auto) applies to every cluster.
    """
    modes = list(modes)
    if not modes:
        raise ValueError("modes must be non-empty")
    vals = record.values if isinstance(record, Record) else tuple(record)
    best_l, best_d = 0, None
    for l, proto in enumerate(modes):
        if policy.mode == SIMPLE:
            d = simple_matching(vals, proto, attrs)
        elif policy.mode == WEIGHTED:
            if weights is None:
                raise PolicyError("weighted policy needs a CategoryWeightTable")
            d = weighted_matching(vals, proto, attrs, weights)
        else:
            if gammas is not None:
                g = gammas[l]
            elif policy.gamma_mode == "fixed":
                g = policy.gamma_value
            else:
                g = 1.0
            d = mixed_dissimilarity(vals, proto, attrs, g)
        if best_d is None or d < best_d:
            best_l, best_d = l, d
    return best_l, best_d


class _Cluster:
    """Incremental per-cluster state: member counts per attribute and the
    current mode, refreshed on every add/remove."""

    __slots__ = ("size", "counts", "sums", "mode", "_cat", "_num")

    def __init__(self, cat_idx, num_idx, seed_values):
        self._cat = cat_idx
        self._num = num_idx
        self.size = 0
        self.counts = {j: {} for j in cat_idx}
        self.sums = {j: 0.0 for j in num_idx}
        self.mode = list(seed_values)

    def add(self, vals):
        self.size += 1
        for j in self._cat:
            c = self.counts[j]
            c[vals[j]] = c.get(vals[j], 0) + 1
            self.mode[j] = _mode_from_counts(c)
        for j in self._num:
            self.sums[j] += vals[j]
            self.mode[j] = self.sums[j] / self.size

    def remove(self, vals):
        self.size -= 1
        for j in self._cat:
            c = self.counts[j]
            c[vals[j]] -= 1
            if not c[vals[j]]:
                del c[vals[j]]
            if self.size:
                self.mode[j] = _mode_from_counts(c)
        for j in self._num:
            self.sums[j] -= vals[j]
            if self.size:
                self.mode[j] = self.sums[j] / self.size


def _validate_fit_policy(dataset, policy):
    kinds = {spec.kind for spec in dataset.attrs}
    if policy.mode in (SIMPLE, WEIGHTED) and NUMERIC in kinds:
        raise PolicyError(f"{policy.mode} policy requires an all-categorical dataset")
    if policy.mode == MIXED and policy.gamma_mode == "auto" and NUMERIC not in kinds:
        raise PolicyError("mixed policy with auto gamma needs at least one numeric attribute")


def _fit_once(dataset, config, seed, debug):
    attrs = dataset.attrs
    rows = [r.values for r in dataset.rows]
    k = config.k
    policy = config.policy
    cat_idx = [j for j, s in enumerate(attrs) if s.kind == CATEGORICAL]
    num_idx = [j for j, s in enumerate(attrs) if s.kind == NUMERIC]
    gamma_fixed = policy.gamma_value if policy.gamma_mode == "fixed" else None

    protos = init_modes(dataset, k, config.init, seed)
    clusters = [_Cluster(cat_idx, num_idx, p.values) for p in protos]
    assign = [0] * len(rows)

    def make_measure(weights=None, gammas=None):
        # The initial allocation pass has no assignment to derive weights or
        # per-cluster gammas from, so the weighted policy falls back to plain
        # matching there and auto gamma starts at 1.
        if policy.mode == SIMPLE or (policy.mode == WEIGHTED and weights is None):
            def d(vals, cluster, l):
                mode = cluster.mode
                t = 0
                for j in cat_idx:
                    if vals[j] != mode[j]:
                        t += 1
                return t
        elif policy.mode == WEIGHTED:
            def d(vals, cluster, l):
                mode = cluster.mode
                t = 0.0
                for j in cat_idx:
                    w = weights.weight(j, vals[j], l)
                    t += (1.0 - w) if vals[j] == mode[j] else w
                return t
        else:
            gs = gammas if gammas is not None else [gamma_fixed if gamma_fixed is not None else 1.0] * k
            def d(vals, cluster, l):
                mode = cluster.mode
                sq = 0.0
                for j in num_idx:
                    sq += (vals[j] - mode[j]) ** 2
                t = 0
                for j in cat_idx:
                    if vals[j] != mode[j]:
                        t += 1
                return math.sqrt(sq) + gs[l] * t
        return d

    def nearest(vals, d):
        best_l = 0
        best_d = d(vals, clusters[0], 0)
        for l in range(1, k):
            dl = d(vals, clusters[l], l)
            if dl < best_d:
                best_l, best_d = l, dl
        return best_l, best_d

    def live_cost(d):
        return sum(d(vals, clusters[assign[i]], assign[i]) for i, vals in enumerate(rows))

    # Initial allocation pass.
    d0 = make_measure()
    for i, vals in enumerate(rows):
        l, _ = nearest(vals, d0)
        assign[i] = l
        clusters[l].add(vals)

    # A mode can drift onto another seed's territory during the pass and
    # leave that seed's cluster empty; repair deterministically by moving
    # the row farthest from its own mode (lowest index on ties) out of a
    # cluster that can spare one. k <= n guarantees a donor exists.
    for l in range(k):
        if clusters[l].size:
            continue
        best_i, best_d = None, -1.0
        for i, vals in enumerate(rows):
            if clusters[assign[i]].size < 2:
                continue
            di = d0(vals, clusters[assign[i]], assign[i])
            if di > best_d:
                best_i, best_d = i, di
        vals = rows[best_i]
        clusters[assign[best_i]].remove(vals)
        clusters[l].add(vals)
        assign[best_i] = l

    # Reallocation epochs. A row moves only when some mode is strictly
    # closer than its current one (equidistant rows stay put, which is what
    # makes every accepted move strictly decrease the live cost) and only
    # when the move does not empty its source cluster.
    epochs_run = 0
    converged = False
    for epoch in range(1, config.max_epochs + 1):
        epochs_run = epoch
        if policy.mode == WEIGHTED:
            # Recomputed once per epoch and frozen within it.
            weights = compute_category_weights(dataset, assign, k)
            d = make_measure(weights=weights)
        elif policy.mode == MIXED and gamma_fixed is None:
            gammas = []
            for l in range(k):
                members = [dataset.rows[i] for i, a in enumerate(assign) if a == l]
                g = compute_gamma(members, attrs) if members else 0.0
                gammas.append(g if g > 0 else 1.0)
            d = make_measure(gammas=gammas)
        else:
            d = make_measure()
        moves = 0
        for i, vals in enumerate(rows):
            s = assign[i]
            ds = d(vals, clusters[s], s)
            t, dt = nearest(vals, d)
            if dt < ds and clusters[s].size >= 2:
                if debug and policy.mode == SIMPLE:
                    before = live_cost(d)
                clusters[s].remove(vals)
                clusters[t].add(vals)
                assign[i] = t
                moves += 1
                if debug and policy.mode == SIMPLE:
                    after = live_cost(d)
                    if not after < before:
                        raise AssertionError(
                            f"accepted move of row {i} failed to decrease cost "
                            f"({before} -> {after})"
                        )
        if moves == 0:
            converged = True
            break

    modes = tuple(
        Prototype(values=tuple(c.mode), cluster_index=l) for l, c in enumerate(clusters)
    )
    assignments = tuple(assign)
    cost = within_cluster_difference(dataset, modes, assignments, policy)
    return modes, assignments, epochs_run, converged, cost


def fit(dataset, config: FitConfig, debug: bool = False) -> ClusterModel:
    """Cluster the dataset; with restarts > 1, run restart r on seed + r and
    keep the lowest-cost model (earliest restart on ties).

    debug=True recomputes the full objective around every accepted move under
    the simple policy and raises if a move ever fails to decrease it.
    """
    if dataset.n < 1:
        raise ValueError("cannot fit an empty dataset")
    if config.k > dataset.n:
        raise InfeasibleConfigError(
            f"k={config.k} exceeds the number of rows ({dataset.n})"
        )
    _validate_fit_policy(dataset, config.policy)
    best = None
    for r in range(config.restarts):
        out = _fit_once(dataset, config, config.seed + r, debug)
        if best is None or out[4] < best[4]:
            best = out
    modes, assignments, epochs_run, converged, cost = best
    return ClusterModel(
        modes=modes,
        assignments=assignments,
        cost=cost,
        epochs_run=epochs_run,
        converged=converged,
        config=config,
    )


def within_cluster_difference(dataset, modes, assignments, policy=None, weights=None) -> float:
    """Total dissimilarity of every row to its cluster's prototype.

    Under the weighted policy a missing weight table is derived from the
    assignment itself; under mixed auto gamma, per-cluster gammas are
    recomputed from the assignment (0 is replaced by 1).
    """
    policy = policy if policy is not None else DissimilarityPolicy()
    modes = list(modes)
    k = len(modes)
    if len(assignments) != dataset.n:
        raise AlignmentError(
            f"{len(assignments)} assignments for {dataset.n} rows"
        )
    for l in assignments:
        if not 0 <= l < k:
            raise ValueError(f"assignment {l} out of range for k={k}")
    protos = []
    for l, m in enumerate(modes):
        if isinstance(m, Prototype):
            if m.cluster_index != l:
                raise ValueError("prototype cluster_index must equal its list position")
            protos.append(m)
        else:
            protos.append(Prototype(values=tuple(m), cluster_index=l))
    attrs = dataset.attrs
    total = 0.0
    if policy.mode == SIMPLE:
        for row, l in zip(dataset.rows, assignments):
            total += simple_matching(row, protos[l], attrs)
    elif policy.mode == WEIGHTED:
        table = weights if weights is not None else compute_category_weights(dataset, assignments, k)
        for row, l in zip(dataset.rows, assignments):
            total += weighted_matching(row, protos[l], attrs, table)
    else:
        if policy.gamma_mode == "fixed":
            gammas = [policy.gamma_value] * k
        else:
            members = [[] for _ in range(k)]
            for row, l in zip(dataset.rows, assignments):
                members[l].append(row)
            gammas = []
            for l in range(k):
                g = compute_gamma(members[l], attrs) if members[l] else 0.0
                gammas.append(g if g > 0 else 1.0)
        for row, l in zip(dataset.rows, assignments):
            total += mixed_dissimilarity(row, protos[l], attrs, gammas[l])
    return float(total)


def elbow_scan(dataset, k_min, k_max, policy=None, seed=0, restarts=1, init="random_rows"):
    """Fit every k in [k_min, k_max] and return the (k, cost) curve."""
    policy = policy if policy is not None else DissimilarityPolicy()
    if not 1 <= k_min <= k_max:
        raise ValueError(f"need 1 <= k_min <= k_max, got {k_min}..{k_max}")
    if k_max > dataset.n:
        raise InfeasibleConfigError(
            f"k_max={k_max} exceeds the number of rows ({dataset.n})"
        )
    curve = []
    for k in range(k_min, k_max + 1):
        model = fit(dataset, FitConfig(k=k, policy=policy, seed=seed, restarts=restarts, init=init))
        curve.append((k, model.cost))
    return curve


def select_k(curve, epsilon: float = 0.05) -> int:
    """Smallest k whose step to k+1 improves the cost by less than epsilon
    (relative); k_max if every step keeps paying off. A zero-cost point is
    returned as soon as it is seen."""
    curve = list(curve)
    if len(curve) < 2:
        raise ValueError("elbow curve needs at least two points")
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    ks = [k for k, _ in curve]
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("elbow curve k values must be strictly ascending")
    tiny = 1e-12
    for i, (k, wcd) in enumerate(curve):
        if wcd <= tiny:
            return k
        if i + 1 < len(curve):
            drop = (wcd - curve[i + 1][1]) / max(wcd, tiny)
            if drop < epsilon:
                return k
    return curve[-1][0]
