"""Pattern descriptions, extents, refinement operators and lectic enumeration.

A description holds at most one restriction per attribute: a fixed value for a
nominal attribute, or a closed interval (stored as domain indices) for a
numerical one. Descriptions are canonical: an interval covering the whole
domain is never stored, so syntactic equality doubles as canonical equality.

Refinement follows the minimal-change scheme: a nominal attribute is refined
by fixing one of its values, a numerical interval by raising its lower bound
to the next domain value (a "left change") or dropping its upper bound to the
previous one (a "right change").
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .dataset import Dataset, NOMINAL, NUMERICAL, bit_indices


@dataclass(frozen=True)
class ValueRestriction:
    """Nominal restriction `attr = value`."""

    attr: int
    value: object


@dataclass(frozen=True)
class IntervalRestriction:
    """Numerical restriction by inclusive domain-index bounds."""

    attr: int
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty interval")


Restriction = ValueRestriction | IntervalRestriction


class Description:
    """Canonical, hashable conjunction of per-attribute restrictions."""

    __slots__ = ("restrictions", "_hash")

    def __init__(self, restrictions: Iterable[Restriction] = ()):
        rs = tuple(sorted(restrictions, key=lambda r: r.attr))
        attrs = [r.attr for r in rs]
        if len(set(attrs)) != len(attrs):
            raise ValueError("at most one restriction per attribute")
        object.__setattr__(self, "restrictions", rs)
        object.__setattr__(self, "_hash", hash(rs))

    def __eq__(self, other):
        return isinstance(other, Description) and self.restrictions == other.restrictions

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.restrictions)

    def __repr__(self):
        return f"Description({list(self.restrictions)!r})"

    def get(self, attr: int) -> Optional[Restriction]:
        for r in self.restrictions:
            if r.attr == attr:
                return r
        return None

    def with_restriction(self, r: Restriction, data: Dataset) -> "Description":
        """Replace/add one restriction, dropping full-domain intervals."""
        if isinstance(r, IntervalRestriction):
            if r.lo == 0 and r.hi == len(data.attributes[r.attr].domain) - 1:
                rest = tuple(x for x in self.restrictions if x.attr != r.attr)
                return Description(rest)
        rest = tuple(x for x in self.restrictions if x.attr != r.attr)
        return Description(rest + (r,))

    def effective_length(self, data: Dataset) -> int:
        """Number of restrictions that exclude at least one object.

        Stored intervals are always proper sub-intervals of observed values,
        so they always exclude something; a nominal restriction excludes
        nothing only when the attribute has a single observed value.
        """
        n = 0
        for r in self.restrictions:
            if isinstance(r, IntervalRestriction):
                n += 1
            elif len(data.attributes[r.attr].domain) > 1:
                n += 1
        return n


EMPTY = Description()


def canonical_key(desc: Description) -> tuple:
    """Syntactic, insertion-order-insensitive, totally ordered key."""
    key = []
    for r in desc.restrictions:
        if isinstance(r, ValueRestriction):
            key.append((r.attr, 0, str(r.value)))
        else:
            key.append((r.attr, 1, r.lo, r.hi))
    return tuple(key)


def description_mask(desc: Description, data: Dataset) -> int:
    """Extent bitmask: objects satisfying every restriction (all objects if empty)."""
    m = data.full_mask
    for r in desc.restrictions:
        if r.attr >= len(data.attributes):
            raise KeyError(f"restriction references unknown attribute index {r.attr}")
        if isinstance(r, ValueRestriction):
            m &= data.value_mask(r.attr, r.value)
        else:
            m &= data.interval_mask(r.attr, r.lo, r.hi)
        if not m:
            break
    return m


def extent(desc: Description, data: Dataset) -> frozenset:
    """Extent as a frozenset of object indices."""
    return frozenset(bit_indices(description_mask(desc, data)))


@dataclass(frozen=True)
class Subgroup:
    """A description together with its extent on a fixed dataset."""

    description: Description
    mask: int

    @property
    def support(self) -> int:
        return self.mask.bit_count()

    @property
    def extent(self) -> frozenset:
        return frozenset(bit_indices(self.mask))

    @classmethod
    def of(cls, desc: Description, data: Dataset) -> "Subgroup":
        return cls(desc, description_mask(desc, data))


def _implies(specific: Restriction, general: Restriction) -> bool:
    if specific.attr != general.attr or type(specific) is not type(general):
        return False
    if isinstance(specific, ValueRestriction):
        return specific.value == general.value
    return specific.lo >= general.lo and specific.hi <= general.hi


def is_more_specific(s1: Description, s2: Description) -> bool:
    """True iff s1 is strictly more specific than s2."""
    if s1 == s2:
        return False
    for r2 in s2.restrictions:
        r1 = s1.get(r2.attr)
        if r1 is None or not _implies(r1, r2):
            return False
    return True


# ---------------------------------------------------------------------------
# Refinement actions
#
# An action is (attr, payload): for a nominal attribute the payload is a
# domain value index, for a numerical one the token "L" (left change) or "R"
# (right change). Actions carry a global rank used by the lectic order:
# attributes in declaration order, values in domain order within a nominal
# attribute, left change before right change within a numerical one.
# ---------------------------------------------------------------------------

_LEFT = "L"
_RIGHT = "R"


def action_rank_offsets(data: Dataset) -> list:
    offsets = []
    total = 0
    for meta in data.attributes:
        offsets.append(total)
        total += len(meta.domain) if meta.kind == NOMINAL else 2
    return offsets


def _iter_actions(desc: Description, data: Dataset, max_length: Optional[int],
                  offsets, min_rank: int = -1):
    """Yield (rank, kind, attr, payload) candidate actions.

    `min_rank` implements the lectic rule: an action is allowed when its rank
    exceeds the provenance rank, or equals it and repeats a numerical change
    (after a left change both changes stay allowed, after a right change only
    further right changes do). Pass -1 for no restriction.
    """
    eff = desc.effective_length(data) if max_length is not None else 0
    for attr, meta in enumerate(data.attributes):
        r = desc.get(attr)
        if meta.kind == NOMINAL:
            if r is not None:
                continue
            if max_length is not None and len(meta.domain) > 1 and eff >= max_length:
                continue
            base = offsets[attr]
            for vi, value in enumerate(meta.domain):
                rank = base + vi
                if rank <= min_rank:
                    continue
                yield rank, NOMINAL, attr, value
        else:
            nvals = len(meta.domain)
            lo, hi = (r.lo, r.hi) if r is not None else (0, nvals - 1)
            if lo == hi:
                continue
            if r is None and max_length is not None and eff >= max_length:
                continue
            lrank, rrank = offsets[attr], offsets[attr] + 1
            if lrank >= min_rank:  # equality allowed: repeated left change
                yield lrank, _LEFT, attr, (lo + 1, hi)
            if rrank >= min_rank:
                yield rrank, _RIGHT, attr, (lo, hi - 1)


def _action_mask(data: Dataset, kind, attr, payload) -> int:
    if kind == NOMINAL:
        return data.value_mask(attr, payload)
    return data.interval_mask(attr, payload[0], payload[1])


def _child_desc(desc: Description, data: Dataset, kind, attr, payload) -> Description:
    if kind == NOMINAL:
        return desc.with_restriction(ValueRestriction(attr, payload), data)
    return desc.with_restriction(IntervalRestriction(attr, payload[0], payload[1]), data)


def _apply_action(desc: Description, data: Dataset, mask: int, kind, attr, payload):
    child = _child_desc(desc, data, kind, attr, payload)
    return child, mask & _action_mask(data, kind, attr, payload)


def _antichain(cands: list) -> list:
    """Drop candidates strictly more specific than another candidate.

    Only candidates reached through more refinement actions can be more
    specific than shorter ones, so comparisons are limited to differing
    action counts.
    """
    counts = {c[4] for c in cands}
    if len(counts) <= 1:
        return cands
    cands = sorted(cands, key=lambda c: c[4])
    kept = []
    for cand in cands:
        desc = cand[0]
        if any(k[4] < cand[4] and is_more_specific(desc, k[0]) for k in kept):
            continue
        kept.append(cand)
    return kept


def _refine(desc: Description, data: Dataset, min_supp: int,
            max_length: Optional[int], stop_mask_of, base_mask: Optional[int] = None,
            lectic: bool = False, last_rank: int = -1,
            emit_stuck: bool = False) -> list:
    """Shared engine for the refinement operators.

    Returns a list of (child, mask, rank, kind, n_actions). `stop_mask_of`
    maps an extent mask to the quantity whose change ends a branch (the mask
    itself for generator refinement, its true-positive part for label
    refinement, None for plain direct refinement). Branches whose stop
    quantity is unchanged are recursively refined with further direct changes;
    infrequent or over-length children are pruned. With `lectic` the actions
    of every step are restricted to the lectic continuation of the step's
    provenance rank.

    `emit_stuck` (label refinement) also emits intermediate patterns that
    cannot be refined any further without changing the stop quantity; this
    keeps the best member of every true-positive class reachable, since
    quality measures improve as the extent shrinks at fixed true positives.
    """
    offsets = action_rank_offsets(data)
    if base_mask is None:
        base_mask = description_mask(desc, data)
    stop_ref = None if stop_mask_of is None else stop_mask_of(base_mask)
    out = []
    seen = set()

    def emit(child, cmask, arank, kind, depth):
        key = canonical_key(child)
        if key not in seen:
            seen.add(key)
            out.append((child, cmask, arank, kind, depth))

    def rec(d, mask, arank, kind, min_rank, depth):
        continued = False
        for crank, ckind, attr, payload in _iter_actions(d, data, max_length, offsets, min_rank):
            cmask = mask & _action_mask(data, ckind, attr, payload)
            if cmask.bit_count() < min_supp:
                continue
            if stop_ref is None:
                out.append((_child_desc(d, data, ckind, attr, payload),
                            cmask, crank, ckind, depth + 1))
            elif stop_mask_of(cmask) != stop_ref:
                emit(_child_desc(d, data, ckind, attr, payload),
                     cmask, crank, ckind, depth + 1)
            else:
                continued = True
                rec(_child_desc(d, data, ckind, attr, payload), cmask,
                    crank, ckind, crank if lectic else -1, depth + 1)
        if emit_stuck and depth > 0 and not continued:
            emit(d, mask, arank, kind, depth)

    rec(desc, base_mask, -1, None, last_rank if lectic else -1, 0)
    if stop_ref is not None:
        out = _antichain(out)
    return out


def direct_refinements(desc: Description, data: Dataset, min_supp: int,
                       max_length: Optional[int] = None) -> list:
    """Frequent direct (minimal-change) specializations of `desc`."""
    cands = _refine(desc, data, min_supp, max_length, None)
    return [c[0] for c in cands]


def gen_refinements(desc: Description, data: Dataset, min_supp: int,
                    max_length: Optional[int] = None) -> list:
    """Frequent specializations refined through direct changes until the extent shrinks."""
    cands = _refine(desc, data, min_supp, max_length, lambda m: m)
    return [c[0] for c in cands]


def label_refinements(desc: Description, data: Dataset, min_supp: int, target,
                      max_length: Optional[int] = None) -> list:
    """Like gen_refinements, but a branch ends when its true-positive set changes.

    A branch also ends, emitting its last pattern, when no frequent direct
    change can keep the true-positive set; those class-minimal patterns carry
    the class's best quality value. A pattern without any true positive has
    nothing left to discriminate and yields no refinements at all.
    """
    lmask = data.label_mask(target)
    base_mask = description_mask(desc, data)
    if base_mask & lmask == 0:
        return []
    cands = _refine(desc, data, min_supp, max_length, lambda m: m & lmask,
                    base_mask=base_mask, emit_stuck=True)
    return [c[0] for c in cands]


def refinement_candidates(desc: Description, data: Dataset, min_supp: int,
                          max_length: Optional[int], mode: str, target=None,
                          lectic_rank: Optional[int] = None) -> list:
    """Candidate children for the search engine.

    Returns (child, mask, rank, kind) tuples. `mode` is direct/gen/label;
    passing `lectic_rank` restricts actions to the lectic continuation of the
    provenance rank (use -1 at the root).
    """
    emit_stuck = False
    if mode == "direct":
        stop = None
    elif mode == "gen":
        stop = lambda m: m
    elif mode == "label":
        lmask = data.label_mask(target)
        if description_mask(desc, data) & lmask == 0:
            return []
        stop = lambda m: m & lmask
        emit_stuck = True
    else:
        raise ValueError(f"unknown expand mode: {mode!r}")
    lectic = lectic_rank is not None
    cands = _refine(desc, data, min_supp, max_length, stop,
                    lectic=lectic, last_rank=lectic_rank if lectic else -1,
                    emit_stuck=emit_stuck)
    return [(c[0], c[1], c[2] if lectic else -1, c[3]) for c in cands]


def lectic_children(desc: Description, data: Dataset, last_rank: int,
                    min_supp: int = 1, max_length: Optional[int] = None) -> list:
    """Direct children allowed after a restriction of rank `last_rank`.

    Each reachable description is generated exactly once over a full
    depth-first traversal seeded with rank -1 at the root.
    """
    cands = refinement_candidates(desc, data, min_supp, max_length, "direct",
                                  lectic_rank=last_rank)
    return [(c[0], c[2], c[3]) for c in cands]


# ---------------------------------------------------------------------------
# Normalized exploration rate
# ---------------------------------------------------------------------------

def _interval_width(desc: Description, data: Dataset, attr: int) -> int:
    r = desc.get(attr)
    if r is None:
        return len(data.attributes[attr].domain)
    return r.hi - r.lo + 1


def subtree_size_total(desc: Description, data: Dataset) -> Fraction:
    """Number of descriptions more specific than or equal to `desc`."""
    total = Fraction(1)
    for attr, meta in enumerate(data.attributes):
        if meta.kind == NOMINAL:
            total *= 1 if desc.get(attr) is not None else len(meta.domain) + 1
        else:
            n = _interval_width(desc, data, attr)
            total *= Fraction(n * (n + 1), 2)
    return total


def subtree_size_lectic(desc: Description, data: Dataset, last_attr: int,
                        last_kind: Optional[str]) -> Fraction:
    """Size of the lectic subtree rooted at `desc` (including itself)."""
    total = Fraction(1)
    for attr, meta in enumerate(data.attributes):
        if attr < last_attr:
            continue
        if attr == last_attr:
            if meta.kind == NUMERICAL:
                n = _interval_width(desc, data, attr)
                total *= Fraction(n * (n + 1), 2) if last_kind == _LEFT else n
            continue
        if meta.kind == NOMINAL:
            total *= 1 if desc.get(attr) is not None else len(meta.domain) + 1
        else:
            n = _interval_width(desc, data, attr)
            total *= Fraction(n * (n + 1), 2)
    return total


def rho_norm(desc: Description, data: Dataset, last_attr: int = -1,
             last_kind: Optional[str] = None) -> Fraction:
    """Ratio of the full sub-lattice size to the lectic subtree size.

    Corrects UCB visit counts for the uneven subtree sizes of a lectic
    enumeration: a child reached by a numerical left change gets 1, a right
    change (n + 1) / 2 with n values inside the interval, and a nominal child
    gets the product form over unrestricted attributes.
    """
    if last_attr < 0:
        return Fraction(1)
    if last_kind not in (NOMINAL, _LEFT, _RIGHT):
        raise ValueError(f"undefined provenance kind: {last_kind!r}")
    v_total = subtree_size_total(desc, data)
    v_lectic = subtree_size_lectic(desc, data, last_attr, last_kind)
    return v_total / v_lectic


# ---------------------------------------------------------------------------
# Text serialization:  `attr = v` / `l <= attr <= r`, joined by " AND "
# ---------------------------------------------------------------------------

def _fmt_value(v) -> str:
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return str(v)


def format_description(desc: Description, data: Dataset) -> str:
    parts = []
    for r in desc.restrictions:
        name = data.attributes[r.attr].name
        if isinstance(r, ValueRestriction):
            parts.append(f"{name} = {_fmt_value(r.value)}")
        else:
            dom = data.attributes[r.attr].domain
            parts.append(f"{_fmt_value(dom[r.lo])} <= {name} <= {_fmt_value(dom[r.hi])}")
    return " AND ".join(parts)


_INTERVAL_RE = re.compile(r"^(?P<lo>\S+)\s*<=\s*(?P<name>.+?)\s*<=\s*(?P<hi>\S+)$")
_VALUE_RE = re.compile(r"^(?P<name>.+?)\s*=\s*(?P<value>.+)$")


def parse_description(text: str, data: Dataset) -> Description:
    """Inverse of format_description (the empty string parses to the empty pattern)."""
    text = text.strip()
    if not text:
        return EMPTY
    restrictions = []
    for clause in text.split(" AND "):
        clause = clause.strip()
        m = _INTERVAL_RE.match(clause)
        if m:
            attr = data.attribute_index(m.group("name"))
            dom = data.attributes[attr].domain
            lo = dom.index(float(m.group("lo")))
            hi = dom.index(float(m.group("hi")))
            restrictions.append(IntervalRestriction(attr, lo, hi))
            continue
        m = _VALUE_RE.match(clause)
        if not m:
            raise ValueError(f"cannot parse clause: {clause!r}")
        attr = data.attribute_index(m.group("name"))
        value = m.group("value")
        meta = data.attributes[attr]
        if meta.kind == NUMERICAL:
            vi = meta.domain.index(float(value))
            restrictions.append(IntervalRestriction(attr, vi, vi))
        else:
            restrictions.append(ValueRestriction(attr, value))
    return Description(restrictions)


def random_generalization(desc: Description, data: Dataset, rng: random.Random) -> Description:
    """Uniform per-attribute generalization used by the object sampler.

    Nominal restrictions are kept or dropped with equal probability; each
    numerical border is widened to a uniformly drawn admissible domain index
    (a full-domain result drops the restriction).
    """
    out = []
    for r in desc.restrictions:
        if isinstance(r, ValueRestriction):
            if rng.random() < 0.5:
                out.append(r)
        else:
            nvals = len(data.attributes[r.attr].domain)
            lo = rng.randint(0, r.lo)
            hi = rng.randint(r.hi, nvals - 1)
            if lo == 0 and hi == nvals - 1:
                continue
            out.append(IntervalRestriction(r.attr, lo, hi))
    return Description(out)
