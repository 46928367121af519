"""Micro-batch streaming: sources, count-based batching, per-batch
classification + rule evaluation, alert emission, and checkpointed resume.

Batches are cut by record count (default 20), which keeps file replay
deterministic. Each batch is evaluated twice over:

* the six code quantities are aggregated (max by default) and classified,
  emitting one alert per quantity;
* every record is translated into facts (individual ``rec_<offset>`` with
  one unary atom per classification label and one binary atom per code),
  the rule set is saturated, and each derived fact becomes a RULE alert.

Delivery is at-least-once: alerts are flushed to the sink before the
checkpoint is saved, so a crash in between replays one whole batch.
Checkpoints refuse to resume when the rule/band fingerprint has changed.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import socket
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import fwi, ingest, rules as rules_mod

ALERT_KINDS = ("FFMC_IGNITION", "DMC", "DC_MOPUP", "ISI_SPREAD", "BUI", "FWI", "RULE")

# (alert kind, band quantity, code attribute) in emission order
_QUANTITY_ALERTS = (
    ("FFMC_IGNITION", "ignition_potential", "ffmc"),
    ("DMC", "dmc_class", "dmc"),
    ("DC_MOPUP", "dc_class", "dc"),
    ("ISI_SPREAD", "spread_rate", "isi"),
    ("BUI", "bui_class", "bui"),
    ("FWI", "fwi_class", "fwi"),
)


class StreamError(Exception):
    pass


class IoError(StreamError):
    pass


class BadCheckpoint(StreamError):
    pass


class StaleCheckpoint(StreamError):
    pass


class CorruptCheckpoint(StreamError):
    pass


class BatchEvaluationError(StreamError):
    def __init__(self, batch_seq, offset, cause):
        super().__init__(f"batch {batch_seq}, offset {offset}: {cause}")
        self.batch_seq = batch_seq
        self.offset = offset
        self.cause = cause


class SimulatedCrash(StreamError):
    """Raised by test crash hooks at instrumented pipeline points."""


@dataclass(frozen=True)
class Batch:
    seq: int
    records: tuple            # ((offset, WeatherRecord), ...)
    is_final: bool = False

    @property
    def first_offset(self):
        return self.records[0][0]

    @property
    def last_offset(self):
        return self.records[-1][0]

    def __len__(self):
        return len(self.records)


@dataclass(frozen=True)
class AlertEvent:
    batch: int
    kind: str
    severity: str
    value: float | None
    offsets: tuple
    rule: str | None
    ts_ms: int

    def to_json(self):
        return json.dumps({
            "batch": self.batch,
            "kind": self.kind,
            "severity": self.severity,
            "value": self.value,
            "offsets": list(self.offsets),
            "rule": self.rule,
            "ts_ms": self.ts_ms,
        }, sort_keys=True)


@dataclass(frozen=True)
class Checkpoint:
    source_id: str
    batch_seq: int      # last fully processed batch
    offset: int         # next unread record offset
    fingerprint: str


@dataclass
class PipelineStats:
    records_in: int = 0
    batches_out: int = 0
    alerts_by_kind: dict = field(default_factory=dict)
    duration_ms: float = 0.0

    def to_json(self):
        return json.dumps({
            "records_in": self.records_in,
            "batches_out": self.batches_out,
            "alerts_by_kind": dict(sorted(self.alerts_by_kind.items())),
            "duration_ms": self.duration_ms,
        }, sort_keys=True)


# --- sources -----------------------------------------------------------------

class StreamSource:
    """Iterable of (offset, WeatherRecord) with strictly increasing offsets."""

    def __init__(self, source_id, record_iter, start_offset=0):
        self.source_id = source_id
        self.position = start_offset
        self._iter = record_iter

    def __iter__(self):
        for record in self._iter:
            offset = self.position
            self.position += 1
            yield offset, record


def _file_records(path, start_offset, rate):
    with open(path, "r", encoding="utf-8") as fh:
        skipped = 0
        for record in ingest.iter_records(fh, header=True):
            if skipped < start_offset:
                skipped += 1
                continue
            if rate is not None:
                time.sleep(1.0 / rate)
            yield record


def _stdin_records():
    first = sys.stdin.readline()
    if not first:
        return
    fields = [f.strip().lower() for f in first.rstrip("\r\n").split(",")]
    has_header = set(fields) == {c.lower() for c in ingest.CANONICAL_COLUMNS}
    lines = itertools.chain([first], sys.stdin)
    yield from ingest.iter_records(lines, header=has_header)


def _socket_records(host, port, listener):
    conn, _addr = listener.accept()
    try:
        buffer = b""
        while True:
            chunk = conn.recv(65536)
            if not chunk:
                break
            buffer += chunk
            while b"\n" in buffer:
                line, buffer = buffer.split(b"\n", 1)
                text = line.decode("utf-8").strip()
                if text:
                    yield ingest.parse_record_fields(text.split(","))
        text = buffer.decode("utf-8").strip()
        if text:
            yield ingest.parse_record_fields(text.split(","))
    finally:
        conn.close()
        listener.close()


def open_source(spec, start_offset=0):
    """Open a record source.

    spec forms: ``file:<path>`` (optionally ``file:<path>?rate=<n>``),
    ``socket:<host>:<port>``, ``stdin:``. A bare path is read as a file.
    File replay honors start_offset for checkpoint resume.
    """
    if spec.startswith("socket:"):
        try:
            _, host, port = spec.split(":", 2)
            listener = socket.create_server((host, int(port)))
        except (OSError, ValueError) as exc:
            raise IoError(f"cannot bind {spec}: {exc}") from None
        return StreamSource(spec, _socket_records(host, port, listener),
                            start_offset)
    if spec in ("stdin:", "-"):
        return StreamSource("stdin:", _stdin_records(), start_offset)

    path, rate = spec, None
    if spec.startswith("file:"):
        path = spec[len("file:"):]
    if "?rate=" in path:
        path, rate_text = path.split("?rate=", 1)
        rate = float(rate_text)
    if not Path(path).is_file():
        raise IoError(f"no such file: {path}")
    return StreamSource(f"file:{path}", _file_records(path, start_offset, rate),
                        start_offset)


def cut_batches(source, size=20, first_seq=0):
    """Contiguous non-overlapping batches in arrival order; the final short
    batch (if any) carries the flush flag."""
    if size < 1:
        raise StreamError(f"batch size must be >= 1, got {size}")
    seq = first_seq
    pending = []
    for offset, record in source:
        pending.append((offset, record))
        if len(pending) == size:
            yield Batch(seq, tuple(pending))
            pending = []
            seq += 1
    if pending:
        yield Batch(seq, tuple(pending), is_final=True)


# --- per-batch evaluation ------------------------------------------------------

def _mangle(label):
    out = []
    for c in label:
        out.append(c if c.isalnum() else "_")
    return "".join(out)


_FACT_QUANTITIES = (
    ("IgnitionPotential", "ignition_potential"),
    ("DmcClass", "dmc_class"),
    ("DcClass", "dc_class"),
    ("SpreadRate", "spread_rate"),
)

_CODE_FACTS = (("hasFfmc", "ffmc"), ("hasDmc", "dmc"), ("hasDc", "dc"),
               ("hasIsi", "isi"), ("hasBui", "bui"), ("hasFwi", "fwi"))


def record_facts(offset, codes, classification):
    """Fact encoding for one record: individual rec_<offset>, one unary atom
    per classification label (predicate <Quantity>_<label>), one binary atom
    per code value."""
    individual = rules_mod.Individual(f"rec_{offset}")
    facts = []
    for prefix, attr in _FACT_QUANTITIES:
        label = getattr(classification, attr)
        facts.append(rules_mod.Atom(f"{prefix}_{_mangle(label)}", (individual,)))
    for predicate, attr in _CODE_FACTS:
        facts.append(rules_mod.Atom(
            predicate, (individual, rules_mod.Num(float(getattr(codes, attr))))))
    return facts


def _offsets_in_fact(fact):
    out = []
    for arg in fact.args:
        if isinstance(arg, rules_mod.Individual) and arg.name.startswith("rec_"):
            try:
                out.append(int(arg.name[4:]))
            except ValueError:
                continue
    return tuple(out)


def batch_evaluate(batch, bands=fwi.DEFAULT_BANDS, rules=None, aggregate="max"):
    """Alerts for one batch: six aggregate-classification alerts plus one
    RULE alert per fact the rule set derives from the record facts."""
    if not batch.records:
        raise StreamError(f"batch {batch.seq} is empty")
    if aggregate not in ("max", "mean"):
        raise StreamError(f"unknown aggregate: {aggregate}")

    now = int(time.time() * 1000)
    per_record = []
    for offset, record in batch.records:
        try:
            codes = fwi.compute_codes(record)
            classification = fwi.classify(codes, bands)
        except (fwi.OutOfRange, fwi.BandConfigError) as exc:
            raise BatchEvaluationError(batch.seq, offset, exc) from None
        per_record.append((offset, codes, classification))

    events = []
    for kind, quantity, attr in _QUANTITY_ALERTS:
        values = [(getattr(codes, attr), offset) for offset, codes, _ in per_record]
        if aggregate == "max":
            agg = max(v for v, _ in values)
            offsets = tuple(o for v, o in values if v == agg)
        else:
            agg = sum(v for v, _ in values) / len(values)
            offsets = tuple(o for _, o in values)
        severity = bands.classify_value(quantity, agg)
        events.append(AlertEvent(batch.seq, kind, severity, agg, offsets, None, now))

    if rules is not None and len(rules) > 0:
        facts = []
        for offset, codes, classification in per_record:
            facts.extend(record_facts(offset, codes, classification))
        base = rules_mod.FactBase(facts)
        try:
            saturated = rules_mod.evaluate(rules, base)
        except rules_mod.TypeClash as exc:
            raise BatchEvaluationError(batch.seq, batch.first_offset, exc) from None
        derived = sorted(saturated.derived(), key=rules_mod.format_atom)
        for fact in derived:
            deriv = saturated.derivations[fact]
            events.append(AlertEvent(
                batch.seq, "RULE", fact.predicate, None,
                _offsets_in_fact(fact), deriv.rule, now))
    return events


# --- checkpoints ---------------------------------------------------------------

def config_fingerprint(rules_text="", bands=fwi.DEFAULT_BANDS):
    payload = (rules_text + "\x00" + bands.fingerprint_text()).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


def checkpoint_save(path, cp: Checkpoint):
    """Atomic write (temp + rename) with a trailing integrity hash line.
    Refuses to regress behind an existing valid checkpoint."""
    path = Path(path)
    if path.exists():
        try:
            existing = checkpoint_load(path)
        except CorruptCheckpoint:
            existing = None
        if existing is not None and cp.batch_seq < existing.batch_seq:
            raise StaleCheckpoint(
                f"refusing to regress checkpoint from batch {existing.batch_seq} "
                f"to {cp.batch_seq}")
    body = json.dumps({
        "source_id": cp.source_id,
        "batch_seq": cp.batch_seq,
        "offset": cp.offset,
        "fingerprint": cp.fingerprint,
    }, sort_keys=True)
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(body + "\n" + digest + "\n", encoding="utf-8")
    tmp.replace(path)


def checkpoint_load(path) -> Checkpoint:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoError(f"cannot read checkpoint {path}: {exc}") from None
    if len(lines) < 2:
        raise CorruptCheckpoint(f"{path}: truncated")
    body, digest = lines[0], lines[1].strip()
    if hashlib.sha256(body.encode("utf-8")).hexdigest() != digest:
        raise CorruptCheckpoint(f"{path}: integrity hash mismatch")
    try:
        obj = json.loads(body)
        return Checkpoint(str(obj["source_id"]), int(obj["batch_seq"]),
                          int(obj["offset"]), str(obj["fingerprint"]))
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        raise CorruptCheckpoint(f"{path}: {exc}") from None


# --- pipeline ------------------------------------------------------------------

def run_pipeline(source_spec, sink_path, checkpoint_path=None, batch_size=20,
                 bands=fwi.DEFAULT_BANDS, rules=None, rules_text="",
                 aggregate="max", crash_hook=None) -> PipelineStats:
    """Replay a source through batching, evaluation, and the alert sink.

    Per batch, in order: evaluate, append alerts to the sink (flushed), then
    persist the checkpoint. On resume the fingerprint and source identity
    must match the checkpoint or the run is refused. crash_hook(point, seq)
    is called at the instrumented points "after_sink" and "after_checkpoint".
    """
    fingerprint = config_fingerprint(rules_text, bands)
    start_offset, first_seq = 0, 0
    if checkpoint_path is not None and Path(checkpoint_path).exists():
        cp = checkpoint_load(checkpoint_path)
        if cp.fingerprint != fingerprint:
            raise BadCheckpoint(
                "rule/band fingerprint changed since the checkpoint was written; "
                "refusing to resume")
        source_id = _source_id_for(source_spec)
        if cp.source_id != source_id:
            raise BadCheckpoint(
                f"checkpoint belongs to {cp.source_id!r}, not {source_id!r}")
        start_offset, first_seq = cp.offset, cp.batch_seq + 1

    source = open_source(source_spec, start_offset)
    stats = PipelineStats()
    started = time.perf_counter()
    try:
        sink = open(sink_path, "a", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot open sink {sink_path}: {exc}") from None
    with sink:
        for batch in cut_batches(source, batch_size, first_seq):
            events = batch_evaluate(batch, bands, rules, aggregate)
            for event in events:
                sink.write(event.to_json() + "\n")
            sink.flush()
            if crash_hook is not None:
                crash_hook("after_sink", batch.seq)
            if checkpoint_path is not None:
                checkpoint_save(checkpoint_path, Checkpoint(
                    source.source_id, batch.seq, batch.last_offset + 1, fingerprint))
            if crash_hook is not None:
                crash_hook("after_checkpoint", batch.seq)
            stats.records_in += len(batch)
            stats.batches_out += 1
            for event in events:
                stats.alerts_by_kind[event.kind] = \
                    stats.alerts_by_kind.get(event.kind, 0) + 1
    stats.duration_ms = (time.perf_counter() - started) * 1000.0
    return stats


def _source_id_for(spec):
    if spec.startswith("socket:") or spec in ("stdin:", "-"):
        return spec if spec != "-" else "stdin:"
    path = spec[len("file:"):] if spec.startswith("file:") else spec
    if "?rate=" in path:
        path = path.split("?rate=", 1)[0]
    return f"file:{path}"
