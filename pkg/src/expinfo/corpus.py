"""Turn text files into families of empirical measures."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from expinfo.maxent import InstanceFamily
from expinfo.measures import Alphabet, EmpiricalMeasure

MODES = ("char", "byte", "token")


@dataclass(frozen=True)
class IngestionConfig:
    """How to split files into symbols.

    ``char`` counts Unicode characters (UTF-8 input), ``byte`` counts raw
    bytes written as two hex digits, ``token`` counts whitespace-separated
    tokens. ``case_folding`` applies ``str.casefold`` (``bytes.lower`` in byte
    mode); nothing else is normalized.
    """

    paths: tuple[str, ...]
    mode: str = "char"
    case_folding: bool = False

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(str(p) for p in self.paths))
        if not self.paths:
            raise ValueError("at least one input file is required")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


def tokenize(data: bytes, mode: str = "char", case_folding: bool = False) -> list[str]:
    if mode == "byte":
        if case_folding:
            data = data.lower()
        return [f"{b:02x}" for b in data]
    text = data.decode("utf-8")
    if case_folding:
        text = text.casefold()
    if mode == "char":
        return list(text)
    if mode == "token":
        return text.split()
    raise ValueError(f"unknown mode {mode!r}")


def ingest_corpus(config: IngestionConfig) -> InstanceFamily:
    """One empirical measure per file over the sorted union alphabet.

    Raises
    ------
    OSError
        If a file cannot be read; the message names the file.
    ValueError
        If a file is not valid UTF-8 or the corpus yields no symbols.
    """
    tables: list[Counter] = []
    for path in config.paths:
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise OSError(f"{path}: cannot read ({exc.strerror or exc})") from exc
        try:
            tables.append(Counter(tokenize(data, config.mode, config.case_folding)))
        except UnicodeDecodeError as exc:
            raise ValueError(f"{path}: not valid UTF-8 ({exc.reason})") from exc
    symbols = sorted(set().union(*tables))
    if not symbols:
        raise ValueError(f"empty corpus: no symbols in {', '.join(config.paths)}")
    alphabet = Alphabet(tuple(symbols))
    instances = [EmpiricalMeasure(alphabet, [t[s] for s in symbols]) for t in tables]
    return InstanceFamily(instances, names=[Path(p).name for p in config.paths])


def ingest_files(paths: Sequence[str], mode: str = "char", case_folding: bool = False) -> InstanceFamily:
    return ingest_corpus(IngestionConfig(tuple(paths), mode, case_folding))
