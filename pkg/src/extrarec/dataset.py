"""Interaction-file parsing, binarization and seeded train/probe splitting."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class ParseError(ValueError):
    """Raised when an interaction file cannot be parsed."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class InteractionLog:
    """Deduplicated (user, item[, rating, timestamp]) records with original IDs.

    ``users`` and ``items`` hold the raw identifiers (ints when every ID in the
    file parsed as an integer, strings otherwise). ``ratings`` and
    ``timestamps`` are ``None`` when the source did not carry them.
    """

    users: np.ndarray
    items: np.ndarray
    ratings: np.ndarray | None = None
    timestamps: np.ndarray | None = None

    def __post_init__(self):
        if len(self.users) == 0:
            raise ValueError("no records")
        if len(self.users) != len(self.items):
            raise ValueError("users and items must have equal length")

    def __len__(self):
        return len(self.users)

    @property
    def n_users(self) -> int:
        return len(np.unique(self.users))

    @property
    def n_items(self) -> int:
        return len(np.unique(self.items))

    def binarize(self, min_rating=None) -> "InteractionLog":
        """Drop records rated below ``min_rating``; ``None`` keeps every record."""
        if min_rating is None:
            return self
        if self.ratings is None:
            raise ValueError("log carries no ratings; cannot apply min_rating")
        keep = self.ratings >= min_rating
        return InteractionLog(
            self.users[keep],
            self.items[keep],
            self.ratings[keep],
            None if self.timestamps is None else self.timestamps[keep],
        )

    def stats(self) -> dict:
        n_links = len(self)
        n_users, n_items = self.n_users, self.n_items
        return {
            "links": n_links,
            "users": n_users,
            "items": n_items,
            "mean_user_degree": n_links / n_users,
            "mean_item_degree": n_links / n_items,
        }


def _as_ids(tokens):
    try:
        return np.array([int(t) for t in tokens], dtype=np.int64)
    except ValueError:
        return np.array(tokens, dtype=object)


def _read_lines(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read().splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read file ({exc.strerror})", path) from exc


def _dedup(users, items, *extra):
    seen = set()
    keep = []
    for idx, key in enumerate(zip(users.tolist(), items.tolist())):
        if key not in seen:
            seen.add(key)
            keep.append(idx)
    if len(keep) == len(users):
        return (users, items, *extra)
    keep = np.asarray(keep, dtype=np.int64)
    return (users[keep], items[keep], *(None if e is None else e[keep] for e in extra))


def parse_movielens(path) -> InteractionLog:
    """Parse a MovieLens ``u.data`` file: ``user item rating timestamp`` per line."""
    users, items, ratings, stamps = [], [], [], []
    for lineno, raw in enumerate(_read_lines(path), start=1):
        if not raw.strip():
            continue
        parts = raw.split("\t") if "\t" in raw else raw.split()
        if len(parts) != 4:
            raise ParseError(f"expected 4 fields, got {len(parts)}", path, lineno)
        try:
            u, i, r, t = (int(p) for p in parts)
        except ValueError:
            raise ParseError("non-integer field", path, lineno) from None
        users.append(u)
        items.append(i)
        ratings.append(r)
        stamps.append(t)
    if not users:
        raise ParseError("no records", path)
    cols = _dedup(
        np.asarray(users, dtype=np.int64),
        np.asarray(items, dtype=np.int64),
        np.asarray(ratings, dtype=np.int64),
        np.asarray(stamps, dtype=np.int64),
    )
    return InteractionLog(*cols)


def parse_edge_list(path) -> InteractionLog:
    """Parse a whitespace/tab separated ``user item [...]`` file.

    Columns beyond the second are ignored. Lines starting with ``#`` or ``%``
    are comments. Duplicate edges collapse to one record.
    """
    users, items = [], []
    for lineno, raw in enumerate(_read_lines(path), start=1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        parts = line.split()
        if len(parts) < 2:
            raise ParseError("expected at least 2 fields", path, lineno)
        users.append(parts[0])
        items.append(parts[1])
    if not users:
        raise ParseError("no records", path)
    return InteractionLog(*_dedup(_as_ids(users), _as_ids(items)))


def load_interactions(path, fmt="auto") -> InteractionLog:
    """Dispatch to :func:`parse_movielens` or :func:`parse_edge_list`.

    ``auto`` picks the MovieLens parser for files named ``u.data`` or ``*.data``.
    """
    if fmt == "auto":
        fmt = "movielens" if Path(path).suffix == ".data" else "edges"
    if fmt == "movielens":
        return parse_movielens(path)
    if fmt == "edges":
        return parse_edge_list(path)
    raise ValueError(f"unknown format {fmt!r}")


@dataclass(frozen=True)
class SplitDataset:
    """Train/probe partition of a link set over dense indices.

    ``training`` and ``probe`` are ``(n, 2)`` int arrays of ``(userIdx,
    itemIdx)`` rows sorted lexicographically. ``user_ids[k]`` / ``item_ids[k]``
    give the original identifier of dense index ``k``.
    """

    training: np.ndarray
    probe: np.ndarray
    user_count: int
    item_count: int
    seed: int
    train_fraction: float
    user_ids: np.ndarray = field(repr=False, default=None)
    item_ids: np.ndarray = field(repr=False, default=None)

    @property
    def n_links(self) -> int:
        return len(self.training) + len(self.probe)

    def header(self) -> dict:
        return {
            "seed": int(self.seed),
            "train_fraction": float(self.train_fraction),
            "user_count": int(self.user_count),
            "item_count": int(self.item_count),
            "training_links": int(len(self.training)),
            "probe_links": int(len(self.probe)),
        }


def _dense_index(ids):
    uniq, inverse = np.unique(ids, return_inverse=True)
    return uniq, inverse.astype(np.int64)


def _sorted_pairs(pairs):
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return pairs[order]


def split(log: InteractionLog, train_fraction: float, seed: int) -> SplitDataset:
    """Uniformly partition the link set into training and probe subsets.

    Dense indices are assigned from all links, sorted by original ID, so
    probe-only users and items still get a slot. The links, in canonical
    (userIdx, itemIdx) order, are shuffled with a PCG64 generator seeded by
    ``seed`` and the first ``round(train_fraction * n)`` go to training.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    user_ids, u_idx = _dense_index(log.users)
    item_ids, i_idx = _dense_index(log.items)
    links = _sorted_pairs(np.column_stack([u_idx, i_idx]))

    n = len(links)
    n_train = int(math.floor(train_fraction * n + 0.5))
    rng = np.random.Generator(np.random.PCG64(seed))
    perm = rng.permutation(n)
    training = _sorted_pairs(links[perm[:n_train]])
    probe = _sorted_pairs(links[perm[n_train:]])
    return SplitDataset(
        training=training,
        probe=probe,
        user_count=len(user_ids),
        item_count=len(item_ids),
        seed=int(seed),
        train_fraction=float(train_fraction),
        user_ids=user_ids,
        item_ids=item_ids,
    )


def write_split(ds: SplitDataset, out_dir) -> Path:
    """Write ``train.tsv``, ``probe.tsv`` (dense indices) and ``split.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, pairs in (("train.tsv", ds.training), ("probe.tsv", ds.probe)):
        np.savetxt(out / name, pairs, fmt="%d", delimiter="\t")
    header = ds.header()
    header["user_ids"] = [str(x) for x in ds.user_ids] if ds.user_ids is not None else None
    header["item_ids"] = [str(x) for x in ds.item_ids] if ds.item_ids is not None else None
    (out / "split.json").write_text(json.dumps(header, indent=1))
    return out


def read_split(in_dir) -> SplitDataset:
    src = Path(in_dir)
    header = json.loads((src / "split.json").read_text())

    def load(name):
        arr = np.loadtxt(src / name, dtype=np.int64, ndmin=2)
        return arr.reshape(-1, 2)

    ids = lambda key: None if header.get(key) is None else np.array(header[key], dtype=object)
    return SplitDataset(
        training=load("train.tsv"),
        probe=load("probe.tsv"),
        user_count=header["user_count"],
        item_count=header["item_count"],
        seed=header["seed"],
        train_fraction=header["train_fraction"],
        user_ids=ids("user_ids"),
        item_ids=ids("item_ids"),
    )
