"""Parse per-app feature files and manifests into a PUDataset.

File formats:
  feature file  -- UTF-8 text, one "kind::value" per line, "#" starts a comment
  manifest      -- CSV with header app_id,path,group (group: positive|unlabeled)
  resolver map  -- TSV, host<TAB>ipv4, no header

URL features are normalized offline: each URL host is looked up in the
resolver map and replaced by its IPv4 address truncated to the /24 prefix
("a.b.c.x"). Unresolvable URLs are dropped as invalid.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable

from .features import AppSample, DatasetError, FeatureKind, FeatureSpace, PUDataset, SparseBinaryVector

KIND_TAGS = ("permission", "api", "url", "ip")


class ParseError(ValueError):
    """Malformed feature file, manifest or resolver map."""


class Group(Enum):
    POSITIVE = "positive"
    UNLABELED = "unlabeled"


@dataclass(frozen=True)
class RawFeatureLine:
    kind_tag: str
    value: str


@dataclass(frozen=True)
class ManifestRow:
    app_id: str
    path: str
    group: Group


def parse_feature_file(text: str) -> list[RawFeatureLine]:
    """One RawFeatureLine per non-blank, non-comment line; duplicates collapse."""
    out: list[RawFeatureLine] = []
    seen: set[tuple[str, str]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "::" not in line:
            raise ParseError(f"line {lineno}: missing '::' separator: {line!r}")
        kind_tag, value = line.split("::", 1)
        kind_tag = kind_tag.strip()
        value = value.strip()
        if kind_tag not in KIND_TAGS:
            raise ParseError(f"line {lineno}: unknown kind tag {kind_tag!r}")
        if not value:
            raise ParseError(f"line {lineno}: empty feature value")
        key = (kind_tag, value)
        if key not in seen:
            seen.add(key)
            out.append(RawFeatureLine(kind_tag, value))
    return out


def truncate_ip(ip: str) -> str:
    """Keep the three most significant octets: "216.59.192.44" -> "216.59.192.x"."""
    parts = ip.strip().split(".")
    if len(parts) != 4:
        raise ParseError(f"malformed IPv4 address: {ip!r}")
    for p in parts:
        if not p.isdigit() or not 0 <= int(p) <= 255:
            raise ParseError(f"malformed IPv4 address: {ip!r}")
    return ".".join(parts[:3]) + ".x"


def load_resolver_map(path: str | Path) -> dict[str, str]:
    """host -> dotted-quad map from a two-column TSV."""
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise ParseError(f"{path}: line {lineno}: expected host<TAB>ip")
        host, ip = cols[0].strip(), cols[1].strip()
        truncate_ip(ip)  # validates the dotted quad
        entries[host] = ip
    return entries


def resolve_urls(
    lines: Iterable[RawFeatureLine], resolver: dict[str, str]
) -> list[RawFeatureLine]:
    """Replace resolvable url lines with ip lines; drop unresolvable urls."""
    out: list[RawFeatureLine] = []
    seen: set[tuple[str, str]] = set()
    for line in lines:
        if line.kind_tag == "url":
            ip = resolver.get(line.value)
            if ip is None:
                continue
            line = RawFeatureLine("ip", ip)
        key = (line.kind_tag, line.value)
        if key not in seen:
            seen.add(key)
            out.append(line)
    return out


_KIND_BY_TAG = {
    "permission": FeatureKind.PERMISSION,
    "api": FeatureKind.API,
    "ip": FeatureKind.IP_ADDRESS,
}


def feature_pairs(lines: Iterable[RawFeatureLine]) -> set[tuple[str, FeatureKind]]:
    """(name, kind) pairs after IP truncation; url lines must be resolved first."""
    pairs: set[tuple[str, FeatureKind]] = set()
    for line in lines:
        if line.kind_tag == "url":
            raise ParseError("url lines must be resolved before vectorization")
        name = truncate_ip(line.value) if line.kind_tag == "ip" else line.value
        pairs.add((name, _KIND_BY_TAG[line.kind_tag]))
    return pairs


def load_manifest(path: str | Path) -> list[ManifestRow]:
    rows: list[ManifestRow] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["app_id", "path", "group"]:
            raise ParseError(f"{path}: manifest header must be app_id,path,group")
        for row in reader:
            app_id = row["app_id"].strip()
            group_tag = row["group"].strip().lower()
            if group_tag not in ("positive", "unlabeled"):
                raise ParseError(f"{path}: unknown group {row['group']!r} for {app_id!r}")
            if app_id in seen:
                raise DatasetError(f"{path}: duplicate app_id {app_id!r}")
            seen.add(app_id)
            rows.append(ManifestRow(app_id, row["path"].strip(), Group(group_tag)))
    return rows


def build_dataset(
    manifest: list[ManifestRow],
    resolver: dict[str, str],
    base_dir: str | Path = ".",
) -> PUDataset:
    """Read every app's feature file and assemble the full PUDataset.

    The FeatureSpace is the union of observed (kind, name) pairs after URL
    resolution and IP truncation, in the canonical (kind, name) order.
    """
    base = Path(base_dir)
    per_app: list[tuple[ManifestRow, set[tuple[str, FeatureKind]]]] = []
    all_pairs: set[tuple[str, FeatureKind]] = set()
    for row in manifest:
        path = base / row.path
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise IOError(f"cannot read feature file {path}: {exc}") from exc
        pairs = feature_pairs(resolve_urls(parse_feature_file(text), resolver))
        per_app.append((row, pairs))
        all_pairs |= pairs

    space = FeatureSpace.build(all_pairs)
    index = space.index_of()
    positives: list[AppSample] = []
    unlabeled: list[AppSample] = []
    for row, pairs in per_app:
        vec = SparseBinaryVector.from_indices(index[p] for p in pairs)
        discovery = 1 if row.group is Group.POSITIVE else 0
        sample = AppSample(row.app_id, vec, discovery)
        (positives if discovery else unlabeled).append(sample)
    return PUDataset(space, tuple(positives), tuple(unlabeled))
