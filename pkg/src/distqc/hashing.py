"""Hashing compression of Bell-pair sources on the label register.

A block of n Bell pairs is a 2n-bit string: bit 2i is the amplitude bit y1 of
pair i, bit 2i+1 the phase bit y2.  Channel pairs are 0..m-1 (bits 0..2m-1,
round k targets C bit k), waste pairs are m..n-1 (bits 2m..2n-1).  Mask rounds
fold random parities of the waste bits into the transmitted bits using only
bilateral CNOTs and bilateral Hadamards, which act linearly on labels.

Two observation semantics are first class:

* ``abstract``  - row k is exactly [unit C column | mask k], the form the
  failure analysis assumes;
* ``compiled``  - row k is the functional actually produced by the gate
  sequence, including the backaction each gate leaves in the waste register.

Decoding is exact maximum likelihood over the affine solution coset of the
observation system, scored through a sparse Walsh-Hadamard transform and
confirmed in exact rational arithmetic among the near-maximal candidates.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import CapacityError, ContractError, DimensionError

ABSTRACT = "abstract"
COMPILED = "compiled"
MODES = (ABSTRACT, COMPILED)

DEFAULT_COSET_CAP = 1 << 26
_CONFIRM_LIMIT = 4096
_SCORE_TOL = 1e-8


class BellLabel(NamedTuple):
    y1: int  # amplitude bit
    y2: int  # phase bit


def bcnot_labels(z: BellLabel, y: BellLabel) -> tuple[BellLabel, BellLabel]:
    """Bilateral CNOT: (z1, z2), (y1, y2) -> (z1+y1, z2), (y1, y2+z2) over GF(2)."""
    z, y = BellLabel(*z), BellLabel(*y)
    return BellLabel(z.y1 ^ y.y1, z.y2), BellLabel(y.y1, y.y2 ^ z.y2)


def bilateral_h_label(y: BellLabel) -> BellLabel:
    """Bilateral Hadamard swaps the amplitude and phase bits."""
    y = BellLabel(*y)
    return BellLabel(y.y2, y.y1)


def label_to_state(l: BellLabel) -> np.ndarray:
    """(|0,y1> + (-1)^y2 |1,1-y1>)/sqrt(2) as a 4-vector, first qubit major."""
    l = BellLabel(*l)
    v = np.zeros(4, dtype=np.complex128)
    v[l.y1] = 1.0
    v[2 + (1 - l.y1)] = -1.0 if l.y2 else 1.0
    return v / np.sqrt(2.0)


def label_index(l: BellLabel) -> int:
    """Position of the label in the source distribution: 2*y1 + y2."""
    return 2 * l.y1 + l.y2


@dataclass(frozen=True)
class LabelString:
    """Packed label register: bit 2i = y1 of pair i, bit 2i+1 = y2 of pair i."""

    n: int
    bits: int

    def __post_init__(self):
        if self.n < 1:
            raise ContractError("need at least one pair")
        if not (0 <= self.bits < 1 << (2 * self.n)):
            raise ContractError("bits outside the 2n-bit register")

    @classmethod
    def from_labels(cls, labels: Sequence[BellLabel]) -> "LabelString":
        bits = 0
        for i, l in enumerate(labels):
            l = BellLabel(*l)
            bits |= (l.y1 & 1) << (2 * i)
            bits |= (l.y2 & 1) << (2 * i + 1)
        return cls(n=len(labels), bits=bits)

    @classmethod
    def from_indices(cls, indices: Sequence[int]) -> "LabelString":
        return cls.from_labels([BellLabel(ix >> 1, ix & 1) for ix in indices])

    def pair(self, i: int) -> BellLabel:
        return BellLabel((self.bits >> (2 * i)) & 1, (self.bits >> (2 * i + 1)) & 1)

    def labels(self) -> list[BellLabel]:
        return [self.pair(i) for i in range(self.n)]

    def c_bits(self, m: int) -> int:
        return self.bits & ((1 << (2 * m)) - 1)

    def w_bits(self, m: int) -> int:
        return self.bits >> (2 * m)


def _swap_sibling_bits(mask: int, width: int) -> int:
    """Exchange bit 2r with bit 2r+1 across the register."""
    even = 0
    for r in range(0, width, 2):
        even |= 1 << r
    odd = even << 1
    return ((mask & even) << 1) | ((mask & odd) >> 1)


def _covered_pair_parity(mask: int) -> int:
    """Parity of the number of waste pairs whose bits are both set."""
    both = mask & (mask >> 1)
    count = 0
    r = 0
    while both >> r:
        count ^= (both >> r) & 1
        r += 2
    return count


def schedule_constraints_ok(masks: Sequence[int], n: int, m: int) -> bool:
    """Compiled-mode schedule constraints.

    Each amplitude-round mask must cover an even number of waste pairs fully,
    and each phase-round mask must be orthogonal to the sibling-swapped
    amplitude mask of its own pair.  Together these keep the pair's own bits
    out of its observation rows, which the decoding argument needs.
    """
    width = 2 * (n - m)
    for j in range(m):
        sa, sp = masks[2 * j], masks[2 * j + 1]
        if _covered_pair_parity(sa):
            return False
        if bin(sp & _swap_sibling_bits(sa, width)).count("1") & 1:
            return False
    return True


@dataclass(frozen=True)
class MaskSchedule:
    """2m random masks over the 2(n-m) waste-bit positions."""

    n: int
    m: int
    masks: tuple[int, ...]
    mode: str = ABSTRACT
    seed: int | None = None

    def __post_init__(self):
        if not (1 <= self.m <= self.n):
            raise ContractError(f"need 1 <= m <= n, got m={self.m}, n={self.n}")
        if self.mode not in MODES:
            raise ContractError(f"mode must be one of {MODES}")
        width = 2 * (self.n - self.m)
        if len(self.masks) != 2 * self.m:
            raise ContractError(f"need 2m = {2 * self.m} masks, got {len(self.masks)}")
        if any(not (0 <= s < 1 << width) for s in self.masks):
            raise ContractError(f"mask exceeds the {width}-bit waste register")
        if self.mode == COMPILED and not schedule_constraints_ok(self.masks, self.n, self.m):
            raise ContractError("schedule violates the compiled-mode resampling constraints")

    @classmethod
    def random(
        cls, n: int, m: int, mode: str, rng: np.random.Generator, seed: int | None = None
    ) -> "MaskSchedule":
        width = 2 * (n - m)

        def draw() -> int:
            out, shift = 0, 0
            while shift < width:
                chunk = min(32, width - shift)
                out |= int(rng.integers(0, 1 << chunk)) << shift
                shift += chunk
            return out

        masks: list[int] = []
        for _ in range(m):
            sa = draw()
            if mode == COMPILED:
                while _covered_pair_parity(sa):
                    sa = draw()
            sp = draw()
            if mode == COMPILED:
                swapped = _swap_sibling_bits(sa, width)
                while bin(sp & swapped).count("1") & 1:
                    sp = draw()
            masks.extend((sa, sp))
        return cls(n=n, m=m, masks=tuple(masks), mode=mode, seed=seed)


@dataclass(frozen=True)
class ObservationSystem:
    """GF(2) map from the initial 2n-bit register to the 2m observed bits.

    Row k (an int over the 2n columns) is the functional Charlie measures in
    round k.  The C-column block is unit lower triangular in round order.
    """

    n: int
    m: int
    rows: tuple[int, ...]
    mode: str

    def __post_init__(self):
        if len(self.rows) != 2 * self.m:
            raise ContractError("observation system needs 2m rows")
        c_all = (1 << (2 * self.m)) - 1
        for k, row in enumerate(self.rows):
            if not (row >> k) & 1:
                raise ContractError(f"row {k} is missing its unit diagonal")
            later = c_all & ~((1 << (k + 1)) - 1)
            if row & later:
                raise ContractError(f"row {k} touches a later channel column")


def compile_protocol(n: int, m: int, schedule: MaskSchedule) -> ObservationSystem:
    """Rows of the observation system induced by the mask rounds.

    ``abstract`` writes row k = [unit C column k | mask k] verbatim.
    ``compiled`` simulates the gate sequence on symbolic label functionals:
    round k reads each scheduled waste bit into C bit k (increasing waste
    position) while the gate's backaction adds the pair's other bit into the
    sibling waste position.
    """
    if schedule.n != n or schedule.m != m:
        raise DimensionError("schedule does not match (n, m)")
    if schedule.mode == ABSTRACT:
        rows = tuple((1 << k) | (schedule.masks[k] << (2 * m)) for k in range(2 * m))
        return ObservationSystem(n=n, m=m, rows=rows, mode=ABSTRACT)

    funcs = [1 << j for j in range(2 * n)]
    rows = []
    for k in range(2 * m):
        pair_c = k // 2
        amplitude_round = k % 2 == 0
        read_target = 2 * pair_c if amplitude_round else 2 * pair_c + 1
        back_source = 2 * pair_c + 1 if amplitude_round else 2 * pair_c
        remaining = schedule.masks[k]
        while remaining:
            low = remaining & -remaining
            w = low.bit_length() - 1
            remaining ^= low
            g = 2 * m + w
            funcs[read_target] ^= funcs[g]
            funcs[g ^ 1] ^= funcs[back_source]
        rows.append(funcs[read_target])
    return ObservationSystem(n=n, m=m, rows=tuple(rows), mode=COMPILED)


def observe(x: LabelString, sys: ObservationSystem) -> int:
    """M.x over GF(2), packed little-endian over the 2m rounds."""
    if x.n != sys.n:
        raise ContractError(f"label string has n={x.n}, system expects {sys.n}")
    out = 0
    for k, row in enumerate(sys.rows):
        out |= ((row & x.bits).bit_count() & 1) << k
    return out


@dataclass(frozen=True)
class DecodeResult:
    label: LabelString | None  # None on failure
    tie: bool
    best: LabelString  # lexicographically smallest maximizer, even on a tie
    coset_bits: int

    @property
    def ok(self) -> bool:
        return self.label is not None


def _walsh_hadamard(f: np.ndarray) -> np.ndarray:
    a = f
    size = a.shape[0]
    h = 1
    while h < size:
        a = a.reshape(-1, 2 * h)
        left = a[:, :h].copy()
        right = a[:, h:].copy()
        a[:, :h] = left + right
        a[:, h:] = left - right
        h *= 2
    return a.reshape(size)


def _affine_solution(sys: ObservationSystem, obs: int) -> tuple[int, list[int]]:
    """Particular solution (waste bits = 0) and per-bit dependence masks.

    Bit j of any solution equals x0_j xor parity(h_j & s) where s ranges over
    the free waste assignments.  Forward substitution down the unit-triangular
    C block does all the elimination work.
    """
    n, m = sys.n, sys.m
    q = 2 * (n - m)
    x0 = 0
    hs = [0] * (2 * n)
    for w in range(q):
        hs[2 * m + w] = 1 << w
    for k, row in enumerate(sys.rows):
        rest = row & ~(1 << k)
        const = (obs >> k) & 1
        const ^= (rest & x0).bit_count() & 1
        hk = 0
        rr = rest
        while rr:
            low = rr & -rr
            hk ^= hs[low.bit_length() - 1]
            rr ^= low
        x0 |= const << k
        hs[k] = hk
    return x0, hs


def _log2_table(p: Sequence[float], n: int) -> tuple[np.ndarray, float]:
    probs = np.asarray([float(x) for x in p], dtype=np.float64)
    if probs.shape != (4,) or np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-6:
        raise ContractError("p must be four nonnegative probabilities summing to 1")
    positive = probs[probs > 0]
    max_abs = float(np.max(np.abs(np.log2(positive)))) if positive.size else 1.0
    penalty = n * (max_abs + 1.0) + 1.0
    table = np.where(probs > 0, np.log2(np.where(probs > 0, probs, 1.0)), -penalty)
    return table, penalty


def decode(
    obs: int,
    sys: ObservationSystem,
    p: Sequence[float],
    cap: int = DEFAULT_COSET_CAP,
) -> DecodeResult:
    """Exact ML over the solution coset of M.x = obs.

    The coset has 2^(2(n-m)) elements; a sparse Walsh-Hadamard transform
    scores all of them at once, then the near-maximal slice (bounded well
    above the transform's rounding error) is re-ranked with exact rational
    probabilities.  A non-unique exact maximum is a tie failure.
    """
    n, m = sys.n, sys.m
    q = 2 * (n - m)
    if (1 << q) > cap:
        raise CapacityError(
            f"coset of 2^{q} candidates exceeds cap {cap}; shrink n or raise m"
        )
    logp, _ = _log2_table(p, n)
    x0, hs = _affine_solution(sys, obs)

    f = np.zeros(1 << q, dtype=np.float64)
    for i in range(n):
        ha, hb = hs[2 * i], hs[2 * i + 1]
        xa, xb = (x0 >> (2 * i)) & 1, (x0 >> (2 * i + 1)) & 1
        w = [logp[2 * (xa ^ a) + (xb ^ b)] for a, b in ((0, 0), (0, 1), (1, 0), (1, 1))]
        f[0] += (w[0] + w[1] + w[2] + w[3]) / 4.0
        f[ha] += (w[0] + w[1] - w[2] - w[3]) / 4.0
        f[hb] += (w[0] - w[1] + w[2] - w[3]) / 4.0
        f[ha ^ hb] += (w[0] - w[1] - w[2] + w[3]) / 4.0
    scores = _walsh_hadamard(f)

    near = np.flatnonzero(scores >= scores.max() - _SCORE_TOL)
    if near.size > _CONFIRM_LIMIT:
        near = near[:_CONFIRM_LIMIT]

    frac_p = [Fraction(float(x)) for x in p]
    best_prob = None
    best_bits = None
    tie = False
    for s in near.tolist():
        bits = x0
        for j in range(2 * n):
            if (hs[j] & s).bit_count() & 1:
                bits ^= 1 << j
        counts = [0, 0, 0, 0]
        for i in range(n):
            counts[((bits >> (2 * i)) & 1) * 2 + ((bits >> (2 * i + 1)) & 1)] += 1
        prob = Fraction(1)
        for c, fp in zip(counts, frac_p):
            if c:
                prob *= fp**c
        if best_prob is None or prob > best_prob:
            best_prob, best_bits, tie = prob, bits, False
        elif prob == best_prob:
            tie = True
            if bits < best_bits:
                best_bits = bits
    best = LabelString(n=n, bits=best_bits)
    if observe(best, sys) != obs:
        raise ContractError("decoded candidate fails the observation constraints")
    return DecodeResult(
        label=None if tie else best, tie=tie, best=best, coset_bits=q
    )


@dataclass(frozen=True)
class TrialResult:
    success: bool
    tie: bool
    x: LabelString
    decoded: LabelString | None


def sample_label_string(p: Sequence[float], n: int, rng: np.random.Generator) -> LabelString:
    probs = np.asarray([float(v) for v in p], dtype=np.float64)
    idx = rng.choice(4, size=n, p=probs / probs.sum())
    return LabelString.from_indices([int(i) for i in idx])


def run_protocol_trial(
    p: Sequence[float],
    n: int,
    m: int,
    mode: str,
    rng: np.random.Generator,
    cap: int = DEFAULT_COSET_CAP,
) -> TrialResult:
    """Sample a source string, draw a schedule, observe, decode, compare."""
    if not (1 <= m <= n):
        raise ContractError("need 1 <= m <= n")
    x = sample_label_string(p, n, rng)
    schedule = MaskSchedule.random(n, m, mode, rng)
    sys = compile_protocol(n, m, schedule)
    res = decode(observe(x, sys), sys, p, cap=cap)
    return TrialResult(success=res.label == x, tie=res.tie, x=x, decoded=res.label)


@dataclass(frozen=True)
class McConfig:
    p: tuple[float, float, float, float]
    n: int
    m: int
    trials: int
    delta: float | None = None
    mode: str = ABSTRACT
    seed: int = 0
    parallelism: int = 1
    cap: int = DEFAULT_COSET_CAP

    def resolved_delta(self, h: float) -> float:
        if self.delta is not None:
            return self.delta
        return max(0.0, (2 * self.m / self.n - h) / 2.0)


@dataclass(frozen=True)
class McReport:
    n: int
    m: int
    p: tuple[float, float, float, float]
    h: float
    delta: float
    trials: int
    failures: int
    ties: int
    empirical_failure_rate: float
    paper_bound: float
    mode: str
    seed: int

    CSV_HEADER = "n,m,H,delta,trials,failures,ties,empirical,bound,mode,seed"

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "p": list(self.p),
            "H": self.h,
            "delta": self.delta,
            "trials": self.trials,
            "failures": self.failures,
            "ties": self.ties,
            "empirical_failure_rate": self.empirical_failure_rate,
            "paper_bound": self.paper_bound,
            "mode": self.mode,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    def csv_row(self) -> str:
        return (
            f"{self.n},{self.m},{self.h:.9g},{self.delta:.9g},{self.trials},"
            f"{self.failures},{self.ties},{self.empirical_failure_rate:.9g},"
            f"{self.paper_bound:.9g},{self.mode},{self.seed}"
        )


def _entropy_of(p) -> float:
    q = np.asarray(p, dtype=np.float64)
    pos = q[q > 0]
    return float(-np.sum(pos * np.log2(pos)))


def run_monte_carlo(config: McConfig) -> McReport:
    """Failure statistics over independent trials.

    Each trial gets its own generator seeded from (seed, trial index), so the
    report is identical for any parallelism degree.
    """
    if config.trials < 1:
        raise ContractError("need at least one trial")
    q = 2 * (config.n - config.m)
    if (1 << q) > config.cap:
        raise CapacityError(
            f"coset of 2^{q} candidates exceeds cap {config.cap}; shrink n or raise m"
        )

    def one(i: int) -> TrialResult:
        rng = np.random.default_rng([config.seed, i])
        return run_protocol_trial(
            config.p, config.n, config.m, config.mode, rng, cap=config.cap
        )

    if config.parallelism > 1:
        with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
            results = list(pool.map(one, range(config.trials)))
    else:
        results = [one(i) for i in range(config.trials)]

    failures = sum(1 for r in results if not r.success)
    ties = sum(1 for r in results if r.tie)
    h = _entropy_of(config.p)
    delta = config.resolved_delta(h)
    return McReport(
        n=config.n,
        m=config.m,
        p=tuple(float(v) for v in config.p),
        h=h,
        delta=delta,
        trials=config.trials,
        failures=failures,
        ties=ties,
        empirical_failure_rate=failures / config.trials,
        paper_bound=2.0 ** (config.n * (h + delta) - 2 * config.m),
        mode=config.mode,
        seed=config.seed,
    )


def collision_probe(
    x: LabelString,
    y: LabelString,
    n: int,
    m: int,
    trials: int,
    rng: np.random.Generator,
    mode: str = ABSTRACT,
) -> float:
    """Fraction of random schedules for which x and y observe identically."""
    if x.n != n or y.n != n:
        raise ContractError("strings do not match n")
    hits = 0
    for _ in range(trials):
        sys = compile_protocol(n, m, MaskSchedule.random(n, m, mode, rng))
        if observe(x, sys) == observe(y, sys):
            hits += 1
    return hits / trials
