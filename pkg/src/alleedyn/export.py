"""CSV, PPM and JSON writers.  Every file starts with a comment block that
echoes the scenario and the package version, and nothing in the output
depends on time or scheduling, so reruns are byte-identical."""

import csv
import json
from pathlib import Path

import numpy as np

from . import __version__

# label kind -> RGB
PALETTE = {
    "BoundaryE0": (255, 0, 0),
    "BoundaryExK": (0, 255, 255),
    "BoundaryEyK": (0, 0, 0),
    "Interior": (0, 0, 255),
    "Cycle": (255, 165, 0),
    "Aperiodic": (255, 0, 255),
    "Undetermined": (255, 255, 255),
}


def fmt(v):
    """17 significant digits for floats, plain text otherwise."""
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def header(scenario_text=None, extra=()):
    lines = [f"alleedyn {__version__}"]
    if scenario_text:
        lines.append("scenario:")
        lines.extend("  " + ln for ln in scenario_text.rstrip("\n").splitlines())
    lines.extend(extra)
    return lines


def write_csv(path, columns, rows, comments=()):
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        for c in comments:
            fh.write(f"# {c}\n" if c else "#\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path):
    """Rows of a file written by :func:`write_csv` as dicts of strings."""
    with Path(path).open(encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def raster_rgb(labels, kinds):
    """(ny, nx, 3) uint8 image: rows run from y_hi down to y_lo."""
    labels = np.asarray(labels)
    img = np.empty(labels.shape + (3,), dtype=np.uint8)
    img[...] = PALETTE["Undetermined"]
    for label, kind in kinds.items():
        img[labels == label] = PALETTE[kind]
    return np.ascontiguousarray(img.transpose(1, 0, 2)[::-1])


def write_ppm(path, labels, kinds, comments=(), binary=True):
    """Portable pixmap of a label raster ``labels[i, j]`` (x index i, y
    index j); ``kinds`` maps label ids to palette keys."""
    img = raster_rgb(labels, kinds)
    h, w = img.shape[:2]
    head = "P6\n" if binary else "P3\n"
    head += "".join(f"# {c}\n" for c in comments)
    head += f"{w} {h}\n255\n"
    path = Path(path)
    if binary:
        path.write_bytes(head.encode("ascii") + img.tobytes())
    else:
        body = "\n".join(" ".join(str(v) for v in row.ravel()) for row in img)
        path.write_text(head + body + "\n", encoding="ascii")
    return path


def read_ppm(path):
    """(magic, comments, image) of a P3 or P6 file."""
    data = Path(path).read_bytes()
    tokens, comments, pos = [], [], 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            end = data.index(b"\n", pos)
            comments.append(data[pos + 1:end].decode().strip())
            pos = end + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end].decode())
        pos = end
    magic, w, h = tokens[0], int(tokens[1]), int(tokens[2])
    pos += 1
    if magic == "P6":
        img = np.frombuffer(data[pos:pos + 3 * w * h], dtype=np.uint8).reshape(h, w, 3)
    else:
        img = np.array(data[pos:].split(), dtype=np.uint8).reshape(h, w, 3)
    return magic, comments, img


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if hasattr(obj, "value") and not isinstance(obj, (int, float, str)):
        return obj.value
    return obj


def write_json(path, obj, scenario_text=None):
    doc = {"version": __version__}
    if scenario_text is not None:
        doc["scenario"] = scenario_text
    doc.update(_plain(obj))
    path = Path(path)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
                    encoding="utf-8")
    return path
