"""Noisy source model and copy-by-copy simulation of the verification test."""

import csv
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import DimensionMismatch, DomainError, LedgerFormatError, ZeroState
from .linalg import projector
from .mub import VerificationStrategy

NOISE_KINDS = ("none", "white", "dephase")
DEFAULT_VISIBILITY = 0.9352
PROB_SUM_TOL = 1e-10


@dataclass(frozen=True)
class NoiseChannel:
    """``none``; ``white`` with visibility ``param``; ``dephase`` with strength ``param``."""

    kind: str = "none"
    param: float = 0.0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise DomainError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.param <= 1.0:
            raise DomainError(f"noise parameter must lie in [0, 1], got {self.param}")

    @classmethod
    def white(cls, visibility=DEFAULT_VISIBILITY):
        return cls("white", float(visibility))

    @classmethod
    def dephase(cls, p):
        return cls("dephase", float(p))

    @classmethod
    def parse(cls, text):
        """``none``, ``white:0.9352`` or ``dephase:0.1``."""
        kind, _, value = text.strip().partition(":")
        if kind == "none":
            return cls()
        if not value:
            raise DomainError(f"noise {kind!r} needs a parameter, e.g. {kind}:0.9")
        return cls(kind, float(value))

    def __str__(self):
        return "none" if self.kind == "none" else f"{self.kind}:{self.param!r}"

    def apply(self, rho):
        dim = rho.shape[0]
        if self.kind == "white":
            return self.param * rho + (1 - self.param) * np.eye(dim) / dim
        if self.kind == "dephase":
            out = (1 - self.param) * rho
            np.fill_diagonal(out, np.diag(rho))
            return out
        return rho.copy()


@dataclass(frozen=True)
class DeviceModel:
    d: int
    coefficients: np.ndarray
    noise: NoiseChannel
    rho: np.ndarray = field(repr=False)


def build_device(d, coefficients=None, noise=None) -> DeviceModel:
    """Source emitting sum_k C_k |kk> followed by ``noise``.

    ``coefficients`` defaults to the balanced amplitudes and is normalized here.
    """
    if coefficients is None:
        coefficients = np.ones(d)
    c = np.asarray(coefficients, dtype=complex).ravel()
    if c.shape != (d,):
        raise DimensionMismatch(f"need {d} coefficients, got {c.size}")
    norm = np.linalg.norm(c)
    if norm == 0:
        raise ZeroState("all coefficients are zero")
    c = c / norm
    psi = np.zeros(d * d, dtype=complex)
    psi[np.arange(d) * (d + 1)] = c
    noise = noise or NoiseChannel()
    rho = noise.apply(projector(psi))
    return DeviceModel(d=d, coefficients=c, noise=noise, rho=rho)


def _check_dims(device, strategy):
    if device.d != strategy.d:
        raise DimensionMismatch(f"device d={device.d} vs strategy d={strategy.d}")


def pass_probability(device: DeviceModel, strategy: VerificationStrategy) -> float:
    """Tr(Omega rho)."""
    _check_dims(device, strategy)
    value = np.trace(strategy.omega @ device.rho)
    if abs(value.imag) > 1e-10:
        raise ValueError(f"Tr(Omega rho) has imaginary part {value.imag:g}")
    return float(min(1.0, max(0.0, value.real)))


def setting_pass_probability(device, strategy, i) -> float:
    """Tr(M_i rho) for a single setting."""
    _check_dims(device, strategy)
    return float(np.trace(strategy.settings[i] @ device.rho).real)


def outcome_table(device: DeviceModel, strategy: VerificationStrategy) -> np.ndarray:
    """P(k_a, k_b | setting i) as a (d+1, d*d) array, outcome index k_a*d + k_b."""
    _check_dims(device, strategy)
    d = device.d
    table = np.empty((d + 1, d * d))
    for i in range(d + 1):
        u = strategy.local_unitary(i)
        probs = np.einsum("ji,jk,ki->i", u.conj(), device.rho, u).real
        if abs(probs.sum() - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"setting {i}: outcome probabilities sum to {probs.sum()!r}")
        table[i] = np.clip(probs, 0.0, None)
    return table


def _cdf(table):
    cdf = np.cumsum(table, axis=1)
    cdf /= cdf[:, -1:]
    last = np.array([np.flatnonzero(row > 0)[-1] for row in table], dtype=np.int64)
    return cdf, last


class RandomStream:
    """Counter-based stream: Philox keyed by (seed, trial).

    Each simulated copy consumes exactly two doubles, so copy ``c`` of a trial
    always sees the same randomness however the trial is chunked.
    """

    def __init__(self, seed, trial=0):
        if not 0 <= seed < 2**64 or not 0 <= trial < 2**64:
            raise DomainError("seed and trial must be unsigned 64-bit integers")
        self.seed = int(seed)
        self.trial = int(trial)
        key = np.array([self.seed, self.trial], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))
        self.copies_drawn = 0

    def copy_uniforms(self, n):
        self.copies_drawn += n
        return self._gen.random((n, 2))


@dataclass(frozen=True)
class TestRecord:
    copy_index: int
    setting: int
    k_alice: int
    k_bob: int

    __test__ = False

    @property
    def passed(self):
        return self.k_alice == self.k_bob


@dataclass(frozen=True)
class RunLedger:
    """Per-copy outcomes of one trial, stored column-wise."""

    d: int
    settings: np.ndarray
    k_alice: np.ndarray
    k_bob: np.ndarray

    @property
    def n(self):
        return len(self.settings)

    @property
    def passed(self):
        return self.k_alice == self.k_bob

    @property
    def cumulative(self):
        """m(N) for N = 1..n."""
        return np.cumsum(self.passed, dtype=np.int64)

    @property
    def records(self):
        return [
            TestRecord(c + 1, int(s), int(a), int(b))
            for c, (s, a, b) in enumerate(zip(self.settings, self.k_alice, self.k_bob))
        ]

    def __eq__(self, other):
        if not isinstance(other, RunLedger):
            return NotImplemented
        return (
            self.d == other.d
            and np.array_equal(self.settings, other.settings)
            and np.array_equal(self.k_alice, other.k_alice)
            and np.array_equal(self.k_bob, other.k_bob)
        )


def _simulate(device, strategy, stream, n):
    cdf, last = _cdf(outcome_table(device, strategy))
    settings, outcomes = _backend.sample_outcomes(stream.copy_uniforms(n), cdf, last)
    return settings, outcomes // device.d, outcomes % device.d


def sample_copy(device, strategy, stream: RandomStream) -> TestRecord:
    index = stream.copies_drawn + 1
    settings, ka, kb = _simulate(device, strategy, stream, 1)
    return TestRecord(index, int(settings[0]), int(ka[0]), int(kb[0]))


def run_copies(device, strategy, n_copies, stream: RandomStream) -> RunLedger:
    if n_copies < 1:
        raise DomainError(f"n_copies must be at least 1, got {n_copies}")
    settings, ka, kb = _simulate(device, strategy, stream, int(n_copies))
    return RunLedger(d=device.d, settings=settings, k_alice=ka, k_bob=kb)


LEDGER_COLUMNS = ("copy_index", "setting", "k_alice", "k_bob", "passed")


def write_ledger_csv(ledger: RunLedger, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(LEDGER_COLUMNS) + "\n")
        passed = ledger.passed
        lines = [
            f"{c + 1},{s},{a},{b},{int(p)}\n"
            for c, (s, a, b, p) in enumerate(
                zip(ledger.settings.tolist(), ledger.k_alice.tolist(), ledger.k_bob.tolist(), passed.tolist())
            )
        ]
        fh.writelines(lines)


def read_ledger_csv(path, d=None) -> RunLedger:
    """Parse a ledger CSV; row numbers in errors count the header as row 1."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != LEDGER_COLUMNS:
            raise LedgerFormatError(path, 1, f"expected header {','.join(LEDGER_COLUMNS)}")
        rows = []
        for row_no, row in enumerate(reader, start=2):
            if len(row) != len(LEDGER_COLUMNS):
                raise LedgerFormatError(path, row_no, f"expected 5 fields, got {len(row)}")
            try:
                copy_index, setting, ka, kb, passed = (int(x) for x in row)
            except ValueError:
                raise LedgerFormatError(path, row_no, "non-integer field") from None
            if copy_index != row_no - 1:
                raise LedgerFormatError(path, row_no, f"copy_index {copy_index} out of sequence")
            if passed not in (0, 1) or passed != int(ka == kb):
                raise LedgerFormatError(path, row_no, "passed flag inconsistent with outcomes")
            if min(setting, ka, kb) < 0 or (d is not None and (setting > d or max(ka, kb) >= d)):
                raise LedgerFormatError(path, row_no, "index out of range")
            rows.append((setting, ka, kb))
    if not rows:
        raise LedgerFormatError(path, 2, "ledger has no records")
    arr = np.array(rows, dtype=np.int64)
    if d is None:
        d = int(max(arr[:, 1].max(), arr[:, 2].max(), arr[:, 0].max() - 1)) + 1
    return RunLedger(d=d, settings=arr[:, 0].copy(), k_alice=arr[:, 1].copy(), k_bob=arr[:, 2].copy())

