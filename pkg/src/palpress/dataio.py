"""On-disk dataset format: binary PGM rasters plus a JSON manifest.

Layout under a dataset directory::

    manifest.json
    clips/<clip_id>/gray/<frame>.pgm        8-bit grayscale (maxval 255)
    clips/<clip_id>/depth/<frame>.pgm       16-bit depth in mm (maxval 65535)
    clips/<clip_id>/boxmask/<frame>.pgm     0 = out, 255 = in
    clips/<clip_id>/fingermask/<frame>.pgm  0 = out, 255 = in

16-bit PGM payloads are big-endian per the format. Loading validates
everything and rejects the whole dataset on the first violation, naming the
offending clip and frame — data is never silently repaired.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .core import (
    BinaryMask,
    Clip,
    CupSize,
    DepthFrame,
    Frame,
    GrayImage,
    MaskPair,
    PalpressError,
    Quadrant,
)

__all__ = [
    "DatasetFormatError",
    "FORMAT_VERSION",
    "write_pgm",
    "read_pgm",
    "save_dataset",
    "load_dataset",
    "split_view",
    "SplitCell",
    "canonical_json",
]

FORMAT_VERSION = "1"

_KIND_DIRS = ("gray", "depth", "boxmask", "fingermask")


class DatasetFormatError(PalpressError):
    """The on-disk dataset violates the format contract."""


def canonical_json(obj) -> str:
    """Stable JSON serialization: sorted keys, two-space indent, newline."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_pgm(path: str | Path, data: np.ndarray) -> None:
    """Write a 2-D uint8 or uint16 array as binary PGM (P5)."""
    arr = np.asarray(data)
    if arr.ndim != 2:
        raise DatasetFormatError(f"{path}: PGM data must be 2-D, got shape {arr.shape}")
    if arr.dtype == np.uint8:
        maxval, payload = 255, arr.tobytes()
    elif arr.dtype == np.uint16:
        maxval, payload = 65535, arr.astype(">u2").tobytes()
    else:
        raise DatasetFormatError(f"{path}: unsupported PGM dtype {arr.dtype}")
    height, width = arr.shape
    header = f"P5\n{width} {height}\n{maxval}\n".encode("ascii")
    Path(path).write_bytes(header + payload)


def _read_header_tokens(blob: bytes, path: str | Path) -> tuple[list[bytes], int]:
    """First four header tokens (magic, width, height, maxval) of a PNM file.

    Handles arbitrary whitespace and ``#`` comments; returns the offset of
    the first payload byte (one whitespace character after maxval).
    """
    tokens: list[bytes] = []
    i = 0
    n = len(blob)
    while len(tokens) < 4:
        while i < n and blob[i : i + 1].isspace():
            i += 1
        if i < n and blob[i : i + 1] == b"#":
            while i < n and blob[i : i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        start = i
        while i < n and not blob[i : i + 1].isspace() and blob[i : i + 1] != b"#":
            i += 1
        if i == start:
            raise DatasetFormatError(f"{path}: truncated PGM header")
        tokens.append(blob[start:i])
    if i >= n or not blob[i : i + 1].isspace():
        raise DatasetFormatError(f"{path}: malformed PGM header")
    return tokens, i + 1


def read_pgm(path: str | Path) -> np.ndarray:
    """Read a binary PGM (P5) file into a uint8 or uint16 array."""
    blob = Path(path).read_bytes()
    if len(blob) < 2 or blob[:2] != b"P5":
        raise DatasetFormatError(f"{path}: not a binary PGM (missing P5 magic)")
    tokens, offset = _read_header_tokens(blob, path)
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError:
        raise DatasetFormatError(f"{path}: non-numeric PGM header fields") from None
    if width < 1 or height < 1:
        raise DatasetFormatError(f"{path}: bad PGM dimensions {width}x{height}")
    if not 0 < maxval < 65536:
        raise DatasetFormatError(f"{path}: bad PGM maxval {maxval}")
    bytes_per = 1 if maxval < 256 else 2
    expected = width * height * bytes_per
    payload = blob[offset:]
    if len(payload) != expected:
        raise DatasetFormatError(
            f"{path}: payload is {len(payload)} bytes, expected {expected}"
        )
    dtype = np.uint8 if bytes_per == 1 else np.dtype(">u2")
    arr = np.frombuffer(payload, dtype=dtype).reshape(height, width)
    return arr.astype(np.uint16) if bytes_per == 2 else arr.copy()


def _clip_dir(out_dir: Path, clip_id: str) -> Path:
    return out_dir / "clips" / clip_id


def save_dataset(
    clips: Iterable[Clip], out_dir: str | Path, generator: Mapping | None = None
) -> dict:
    """Write clips and manifest.json under ``out_dir``; returns the manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for clip in clips:
        base = _clip_dir(out_dir, clip.clip_id)
        for kind in _KIND_DIRS:
            (base / kind).mkdir(parents=True, exist_ok=True)
        frame_entries = []
        for i, frame in enumerate(clip.frames):
            rasters = {
                "gray": frame.gray.pixels,
                "depth": frame.depth.pixels,
                "boxmask": frame.masks.box.pixels.astype(np.uint8) * 255,
                "fingermask": frame.masks.finger.pixels.astype(np.uint8) * 255,
            }
            paths = {}
            for kind, raster in rasters.items():
                rel = f"clips/{clip.clip_id}/{kind}/{i}.pgm"
                write_pgm(out_dir / rel, raster)
                paths[kind] = rel
            frame_entries.append(paths)
        entries.append(
            {
                "id": clip.clip_id,
                "cup": clip.cup.value,
                "quadrant": clip.quadrant.value,
                "split": clip.split,
                "frame_count": clip.n_frames,
                "frames": frame_entries,
            }
        )
    manifest = {"format_version": FORMAT_VERSION, "clips": entries}
    if generator is not None:
        manifest["generator"] = dict(generator)
    (out_dir / "manifest.json").write_text(canonical_json(manifest), encoding="utf-8")
    return manifest


def _load_frame(base: Path, clip_id: str, index: int, entry: Mapping) -> Frame:
    where = f"clip {clip_id!r} frame {index}"
    for kind in _KIND_DIRS:
        if kind not in entry:
            raise DatasetFormatError(f"{where}: missing {kind} path in manifest")
    arrays = {}
    for kind in _KIND_DIRS:
        path = base / str(entry[kind])
        if not path.is_file():
            raise DatasetFormatError(f"{where}: missing file {path}")
        arrays[kind] = read_pgm(path)
    gray = arrays["gray"]
    if gray.dtype != np.uint8:
        raise DatasetFormatError(f"{where}: gray raster must be 8-bit")
    shape = gray.shape
    for kind in ("depth", "boxmask", "fingermask"):
        if arrays[kind].shape != shape:
            raise DatasetFormatError(
                f"{where}: {kind} shape {arrays[kind].shape} != gray shape {shape}"
            )
    try:
        return Frame(
            gray=GrayImage(gray),
            depth=DepthFrame(arrays["depth"].astype(np.uint16)),
            masks=MaskPair(
                box=BinaryMask(arrays["boxmask"] > 0),
                finger=BinaryMask(arrays["fingermask"] > 0),
            ),
        )
    except PalpressError as exc:
        raise DatasetFormatError(f"{where}: {exc}") from exc


def load_dataset(manifest_path: str | Path) -> list[Clip]:
    """Load and fully validate a dataset; any violation rejects the load."""
    manifest_path = Path(manifest_path)
    if manifest_path.is_dir():
        manifest_path = manifest_path / "manifest.json"
    if not manifest_path.is_file():
        raise DatasetFormatError(f"manifest not found: {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"{manifest_path}: invalid JSON ({exc})") from exc
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise DatasetFormatError(f"unknown format_version {version!r}")
    base = manifest_path.parent
    clips: list[Clip] = []
    seen: set[str] = set()
    for entry in manifest.get("clips", []):
        clip_id = str(entry.get("id", ""))
        if not clip_id:
            raise DatasetFormatError("manifest clip entry without id")
        if clip_id in seen:
            raise DatasetFormatError(f"duplicate clip id {clip_id!r}")
        seen.add(clip_id)
        try:
            cup = CupSize.from_label(entry["cup"])
            quadrant = Quadrant.from_label(entry["quadrant"])
        except (KeyError, ValueError) as exc:
            raise DatasetFormatError(f"clip {clip_id!r}: {exc}") from exc
        split = entry.get("split")
        frames_meta = entry.get("frames", [])
        if int(entry.get("frame_count", -1)) != len(frames_meta):
            raise DatasetFormatError(
                f"clip {clip_id!r}: frame_count {entry.get('frame_count')} "
                f"does not match {len(frames_meta)} frame entries"
            )
        frames = tuple(
            _load_frame(base, clip_id, i, fe) for i, fe in enumerate(frames_meta)
        )
        try:
            clips.append(
                Clip(clip_id=clip_id, cup=cup, quadrant=quadrant, split=str(split), frames=frames)
            )
        except (PalpressError, ValueError) as exc:
            raise DatasetFormatError(f"clip {clip_id!r}: {exc}") from exc
    return clips


@dataclass(frozen=True)
class SplitCell:
    """Train/test clips of one (cup, quadrant) cell with frame counts."""

    train: tuple[Clip, ...]
    test: tuple[Clip, ...]

    @property
    def train_frames(self) -> int:
        return sum(c.n_frames for c in self.train)

    @property
    def test_frames(self) -> int:
        return sum(c.n_frames for c in self.test)


def split_view(clips: Iterable[Clip]) -> dict[tuple[CupSize, Quadrant], SplitCell]:
    """Group clips per (cup, quadrant) honoring each clip's declared split.

    Membership is declarative — it depends only on the clip's own split tag,
    never on manifest ordering — so no frame can sit on both sides.
    """
    cells: dict[tuple[CupSize, Quadrant], dict[str, list[Clip]]] = {}
    for clip in clips:
        bucket = cells.setdefault((clip.cup, clip.quadrant), {"train": [], "test": []})
        bucket[clip.split].append(clip)
    return {
        key: SplitCell(
            train=tuple(sorted(bucket["train"], key=lambda c: c.clip_id)),
            test=tuple(sorted(bucket["test"], key=lambda c: c.clip_id)),
        )
        for key, bucket in cells.items()
    }
