"""Corpus ingestion, obfuscation dispatch and manifest persistence."""

from __future__ import annotations

import csv
import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, image_io
from .assets import AssetPack, sha256_file
from .core import CANONICAL_SIDE, central_crop_resize, derive_rng
from .geometric import (
    SwirlParams,
    WaveParams,
    perspective_transform_obfuscation,
    rotate_image,
    swirl_warp,
    wavy_color_warp,
)
from .obfuscations import by_name
from .overlays import (
    adversarial_patches,
    background_blur_composition,
    color_pattern_overlay,
    high_contrast_border,
    icon_overlay,
    image_overlay,
    interleave,
    perspective_composition,
    photo_composition,
    text_overlay,
)
from .pixel_transforms import (
    HalftoneTechnique,
    StripeSpec,
    TrianglePartition,
    color_noise_blocks,
    halftone,
    invert_lines,
    line_shift,
    low_contrast_triangles,
    rotate_blocks,
)
from .ranges import ParamRanges, SampledParams, sample_params
from .stylize import StylizationBackend, style_transfer, texturize

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp")

_CORNER_BITS = [(1, "tl"), (2, "tr"), (4, "bl"), (8, "br")]


def obfuscate_image(
    img: np.ndarray,
    params: SampledParams,
    pack: AssetPack | None = None,
    backend: StylizationBackend | None = None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Dispatch sampled parameters to the matching transform.

    Obfuscations that draw additional randomness at apply time continue
    from ``rng``; when it is omitted a fresh stream is derived from the
    params' seed triple (use apply_obfuscation for the canonical path).
    """
    h, w = img.shape[:2]
    if (h, w) != (CANONICAL_SIDE, CANONICAL_SIDE):
        raise ValueError(f"expected {CANONICAL_SIDE}x{CANONICAL_SIDE} input, got {w}x{h}")
    name = params.obfuscation
    by_name(name)  # validates
    v = params.values
    if rng is None:
        rng = derive_rng(*params.seed_triple)

    if name == "ColorNoiseBlocks":
        return color_noise_blocks(img, v["block_size"], rng)
    if name == "Halftoning":
        return halftone(img, v["block_size"], HalftoneTechnique(v["technique"]), rng)
    if name == "InvertLines":
        return invert_lines(img, StripeSpec(v["horizontal"], v["width"]))
    if name == "LowContrastTriangles":
        partition = TrianglePartition(scale=v["scale"], apex_frac=v["apex_frac"])
        return low_contrast_triangles(img, partition, (v["factor0"], v["factor1"], v["factor2"]))
    if name == "LineShift":
        return line_shift(img, StripeSpec(v["horizontal"], v["width"]), v["shift"])
    if name == "PerspectiveTransform":
        return perspective_transform_obfuscation(img, rng, v["jitter_radius"])
    if name == "RotateBlocks":
        return rotate_blocks(img, v["block_size"], v["rotations"])
    if name == "RotateImage":
        return rotate_image(img, v["degrees"])
    if name == "SwirlWarp":
        return swirl_warp(
            img,
            SwirlParams(strength=v["strength"], radius=v["radius"], center=(v["center_x"], v["center_y"])),
        )
    if name == "WavyColorWarp":
        return wavy_color_warp(
            img,
            WaveParams(wavelength=v["wavelength"], amplitude=v["amplitude"], hue_shift=v["hue_shift"]),
        )
    if name == "BackgroundBlurComposition":
        return background_blur_composition(img, v["width_factor"], v["height_factor"], v["blur_sigma"])
    if name == "HighContrastBorder":
        return high_contrast_border(img, v["contrast"], v["border"], rng)

    if pack is None:
        raise ValueError(f"{name} requires an asset pack")
    if name == "PerspectiveComposition":
        return perspective_composition(img, pack, v["scene_index"])
    if name == "PhotoComposition":
        photo = pack.photos[v["photo_index"]]
        sh = max(1, int(round(v["shrink"] * h)))
        sw = max(1, int(round(v["shrink"] * w)))
        max_y = photo.shape[0] - sh
        max_x = photo.shape[1] - sw
        pos = (
            min(int(v["pos_x_frac"] * (max_x + 1)), max_x),
            min(int(v["pos_y_frac"] * (max_y + 1)), max_y),
        )
        return photo_composition(img, pack, v["photo_index"], v["shrink"], position=pos)
    if name == "ColorPatternOverlay":
        return color_pattern_overlay(img, pack, v["pattern_index"], v["color_index"], v["alpha"])
    if name == "IconOverlay":
        return icon_overlay(img, pack, v["icon_index"], v["count"], v["alpha"])
    if name == "ImageOverlay":
        return image_overlay(img, pack, v["photo_index"], v["alpha"])
    if name == "Interleave":
        return interleave(img, pack, v["photo_index"], StripeSpec(v["horizontal"], v["width"]), v["alpha"])
    if name == "TextOverlay":
        return text_overlay(img, pack, v["text_index"], v["color_index"], v["size"], v["alpha"])
    if name == "AdversarialPatches":
        corners = {label for bit, label in _CORNER_BITS if v["corner_mask"] & bit}
        return adversarial_patches(img, pack, v["patch_index"], v["shrink"], corners)

    if backend is None:
        raise ValueError(f"{name} requires a stylization backend")
    image_id = params.seed_triple[1]
    if name == "StyleTransfer":
        return style_transfer(img, v["style_index"], v["resize_factor"], backend, image_id)
    if name == "Texturize":
        return texturize(img, v["texture_index"], v["resize_factor"], backend, image_id)
    raise AssertionError(f"unhandled obfuscation {name}")  # pragma: no cover


def apply_obfuscation(
    img: np.ndarray,
    image_id: str,
    obfuscation: str,
    global_seed: int,
    ranges: ParamRanges,
    pack: AssetPack | None = None,
    backend: StylizationBackend | None = None,
    overrides: dict | None = None,
) -> tuple[np.ndarray, SampledParams]:
    """Canonical entry: derive the stream, sample parameters, dispatch.

    The transform continues drawing from the same stream the sampler used,
    so results are a pure function of (global_seed, image_id, obfuscation).
    """
    triple = (global_seed, image_id, obfuscation)
    rng = derive_rng(*triple)
    params = sample_params(ranges, obfuscation, rng, seed_triple=triple, overrides=overrides)
    out = obfuscate_image(img, params, pack, backend, rng=rng)
    return out, params


@dataclass
class CorpusManifest:
    header: dict
    records: list[dict]
    failures: list[dict]

    def to_json(self) -> str:
        doc = {"header": self.header, "records": self.records, "failures": self.failures}
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_file(cls, path: str | Path) -> "CorpusManifest":
        doc = json.loads(Path(path).read_text())
        return cls(header=doc["header"], records=doc["records"], failures=doc["failures"])


def read_labels(labels_file: str | Path) -> dict[str, int]:
    """CSV with header image_id,class_id."""
    labels: dict[str, int] = {}
    with open(labels_file, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or not {"image_id", "class_id"} <= set(reader.fieldnames):
            raise ValueError("labels file must have an image_id,class_id header")
        for row in reader:
            cid = int(row["class_id"])
            if not 0 <= cid <= 999:
                raise ValueError(f"class id {cid} out of range for image {row['image_id']}")
            labels[row["image_id"]] = cid
    return labels


def _find_corpus_images(corpus_dir: Path) -> list[Path]:
    files = [
        p
        for p in sorted(corpus_dir.iterdir())
        if p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS
    ]
    if not files:
        raise ValueError(f"no images found in {corpus_dir}")
    return files


def run_corpus(
    corpus_dir: str | Path,
    labels_file: str | Path,
    ranges: ParamRanges,
    pack: AssetPack | None,
    obfuscation_names: list[str],
    global_seed: int,
    out_dir: str | Path,
    backend: StylizationBackend | None = None,
    workers: int = 1,
) -> CorpusManifest:
    """Obfuscate every corpus image with every selected obfuscation.

    A clean (crop/resize only) copy is always emitted. Per-image failures
    are recorded in the manifest, not fatal. All randomness derives from
    seed triples, so results are independent of the worker count.
    """
    corpus_dir = Path(corpus_dir)
    out_dir = Path(out_dir)
    labels = read_labels(labels_file)
    for name in obfuscation_names:
        by_name(name)
    files = _find_corpus_images(corpus_dir)

    (out_dir / "clean").mkdir(parents=True, exist_ok=True)
    for name in obfuscation_names:
        (out_dir / name).mkdir(parents=True, exist_ok=True)

    def process(path: Path):
        image_id = path.stem
        record: dict = {"image_id": image_id, "source": str(path)}
        failures: list[dict] = []
        if image_id not in labels:
            return None, [{"image_id": image_id, "error": "no label for image"}]
        record["class_id"] = labels[image_id]
        try:
            img = central_crop_resize(image_io.load_png(path), CANONICAL_SIDE)
        except Exception as exc:
            return None, [{"image_id": image_id, "error": f"unreadable image: {exc}"}]
        clean_path = out_dir / "clean" / f"{image_id}.png"
        image_io.save_png(clean_path, img)
        record["clean"] = {
            "path": str(clean_path.relative_to(out_dir)),
            "sha256": sha256_file(clean_path),
        }
        record["obfuscations"] = {}
        for name in obfuscation_names:
            try:
                out, params = apply_obfuscation(
                    img, image_id, name, global_seed, ranges, pack, backend
                )
            except Exception as exc:
                failures.append({"image_id": image_id, "obfuscation": name, "error": str(exc)})
                continue
            out_path = out_dir / name / f"{image_id}.png"
            image_io.save_png(out_path, out)
            record["obfuscations"][name] = {
                "path": str(out_path.relative_to(out_dir)),
                "sha256": sha256_file(out_path),
                "params": params.values,
            }
        return record, failures

    records: list[dict] = []
    failures: list[dict] = []
    if workers <= 1:
        results = [process(p) for p in files]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(process, files))
    for record, errs in results:
        if record is not None:
            records.append(record)
        failures.extend(errs)
    records.sort(key=lambda r: r["image_id"])
    failures.sort(key=lambda r: (r["image_id"], r.get("obfuscation", "")))

    header = {
        "global_seed": global_seed,
        "obfuscations": sorted(obfuscation_names),
        "ranges_checksum": ranges.checksum(),
        "pack_checksum": _pack_checksum(pack),
        "tool_version": __version__,
        "ranges_version": ranges.version,
    }
    manifest = CorpusManifest(header=header, records=records, failures=failures)
    manifest_path = out_dir / "manifest.json"
    tmp = manifest_path.with_name("manifest.json.tmp")
    tmp.write_text(manifest.to_json())
    os.replace(tmp, manifest_path)
    return manifest


def _pack_checksum(pack: AssetPack | None) -> str | None:
    if pack is None:
        return None
    canonical = json.dumps(pack.manifest, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def verify_manifest(out_dir: str | Path) -> list[str]:
    """Re-hash every referenced output file; return a list of problems."""
    out_dir = Path(out_dir)
    manifest = CorpusManifest.from_file(out_dir / "manifest.json")
    problems = []

    def check(entry: dict, what: str):
        path = out_dir / entry["path"]
        if not path.exists():
            problems.append(f"{what}: missing file {entry['path']}")
        elif sha256_file(path) != entry["sha256"]:
            problems.append(f"{what}: checksum mismatch for {entry['path']}")

    ids = set()
    for record in manifest.records:
        if record["image_id"] in ids:
            problems.append(f"duplicate image id {record['image_id']}")
        ids.add(record["image_id"])
        check(record["clean"], record["image_id"])
        for name, entry in record["obfuscations"].items():
            check(entry, f"{record['image_id']}/{name}")
    return problems
