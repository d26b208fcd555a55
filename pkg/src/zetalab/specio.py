"""Loading Euler-product specifications and scan targets from presets or JSON.

Spec file schema (JSON, one object per file):

  {"type": "character", "modulus": 5, "index": 2}

  {"type": "euler_product", "degree": 2, "sigma_phi": 0.5, "pole_order": 0,
   "roots": [[2, [1.0, 0.0], [0.5, 0.5]], [3, ...], ...]}

``roots`` rows are [prime, [re, im] x degree]; primes may be listed up to
any bound, and coefficient generation errors if the bound is too small
for the requested truncation.

Target file schema for scans:

  {"epsilon": 0.1,
   "components": [
     {"spec": "zeta",
      "rectangle": {"sigma": [0.7, 0.8], "height": 0.25, "resolution": 21},
      "polynomial": [[2.0, 0.0], [0.0, 0.0], [1.0, 0.0]]}],
   "phases": [[2, 0.25], [3, 0.5]]}

``spec`` is a preset name or a path to a spec file; ``polynomial`` lists
[re, im] coefficients by ascending degree (alternative key ``samples``
gives explicit grid values, row-major [re, im] pairs).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .arith import EulerProductSpec, character_from_index
from .metrics import CompactRectangle
from .scanner import HybridTarget, TargetComponent


class ConfigError(ValueError):
    """Configuration rejected; the message names the offending key path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


PRESET_CHARACTERS = {
    "zeta": (1, 0),
    "chi4_1": (4, 1),
    "chi5_0": (5, 0),
    "chi5_1": (5, 1),
    "chi5_2": (5, 2),
    "chi5_3": (5, 3),
}


def preset_names() -> list[str]:
    return sorted(PRESET_CHARACTERS)


def _check_keys(obj: dict, allowed: set[str], path: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}", "unknown key")


def _as_complex(pair, path: str) -> complex:
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise ConfigError(path, "expected [re, im]")
    return complex(float(pair[0]), float(pair[1]))


def spec_from_document(doc: dict, prime_bound: int, path: str = "spec") -> EulerProductSpec:
    if not isinstance(doc, dict):
        raise ConfigError(path, "expected a JSON object")
    kind = doc.get("type")
    if kind == "character":
        _check_keys(doc, {"type", "modulus", "index"}, path)
        try:
            chi = character_from_index(int(doc["modulus"]), int(doc.get("index", 0)))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"{path}.modulus/index", str(exc)) from None
        return EulerProductSpec.from_character(chi, prime_bound)
    if kind == "euler_product":
        _check_keys(doc, {"type", "degree", "sigma_phi", "pole_order", "roots"}, path)
        degree = int(doc.get("degree", 1))
        rows = doc.get("roots")
        if not isinstance(rows, list) or not rows:
            raise ConfigError(f"{path}.roots", "expected a nonempty list of rows")
        roots = {}
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != degree + 1:
                raise ConfigError(f"{path}.roots[{i}]",
                                  f"expected [prime, {degree} x [re, im]]")
            p = int(row[0])
            roots[p] = tuple(_as_complex(c, f"{path}.roots[{i}]") for c in row[1:])
        try:
            return EulerProductSpec(
                degree=degree,
                local_roots=roots,
                pole_order=int(doc.get("pole_order", 0)),
                sigma_phi=float(doc.get("sigma_phi", 0.5)),
                label=f"file:{path}",
            )
        except ValueError as exc:
            raise ConfigError(path, str(exc)) from None
    raise ConfigError(f"{path}.type", "must be 'character' or 'euler_product'")


def load_spec(name_or_path: str, prime_bound: int) -> EulerProductSpec:
    """Resolve a preset name or read a spec file."""
    if name_or_path in PRESET_CHARACTERS:
        q, idx = PRESET_CHARACTERS[name_or_path]
        chi = character_from_index(q, idx)
        return EulerProductSpec.from_character(chi, prime_bound, label=name_or_path)
    p = Path(name_or_path)
    if not p.exists():
        raise ConfigError("spec", f"'{name_or_path}' is neither a preset "
                          f"({', '.join(preset_names())}) nor a file")
    with open(p) as fh:
        doc = json.load(fh)
    return spec_from_document(doc, prime_bound, path=str(p))


def rectangle_from_document(doc: dict, path: str) -> CompactRectangle:
    _check_keys(doc, {"sigma", "height", "resolution"}, path)
    sig = doc.get("sigma")
    if not (isinstance(sig, list) and len(sig) == 2):
        raise ConfigError(f"{path}.sigma", "expected [sigma_left, sigma_right]")
    try:
        return CompactRectangle(
            sigma_left=float(sig[0]), sigma_right=float(sig[1]),
            height=float(doc.get("height", 0.0)),
            resolution=int(doc.get("resolution", 21)),
        )
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None


def target_from_document(doc: dict, prime_bound: int) -> HybridTarget:
    if not isinstance(doc, dict):
        raise ConfigError("target", "expected a JSON object")
    _check_keys(doc, {"epsilon", "components", "phases"}, "target")
    if "epsilon" not in doc:
        raise ConfigError("target.epsilon", "required")
    eps = float(doc["epsilon"])
    if not 0.0 < eps < 0.5:
        raise ConfigError("target.epsilon",
                          f"must lie in (0, 1/2) so phase windows stay proper, got {eps}")
    comps = []
    for i, cdoc in enumerate(doc.get("components", [])):
        cpath = f"target.components[{i}]"
        _check_keys(cdoc, {"spec", "rectangle", "polynomial", "samples"}, cpath)
        if "spec" not in cdoc or "rectangle" not in cdoc:
            raise ConfigError(cpath, "needs 'spec' and 'rectangle'")
        spec = load_spec(cdoc["spec"], prime_bound)
        rect = rectangle_from_document(cdoc["rectangle"], f"{cpath}.rectangle")
        try:
            if "polynomial" in cdoc:
                poly = [_as_complex(c, f"{cpath}.polynomial") for c in cdoc["polynomial"]]
                comps.append(TargetComponent.from_polynomial(spec, rect, poly,
                                                             label=str(cdoc["spec"])))
            elif "samples" in cdoc:
                flat = [_as_complex(c, f"{cpath}.samples") for c in cdoc["samples"]]
                samples = np.array(flat).reshape(rect.resolution, rect.resolution)
                comps.append(TargetComponent(spec=spec, rect=rect, samples=samples,
                                             label=str(cdoc["spec"])))
            else:
                raise ConfigError(cpath, "needs 'polynomial' or 'samples'")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(cpath, str(exc)) from None
    phases = []
    for i, row in enumerate(doc.get("phases", [])):
        if not (isinstance(row, list) and len(row) == 2):
            raise ConfigError(f"target.phases[{i}]", "expected [prime, theta]")
        phases.append((int(row[0]), float(row[1])))
    try:
        return HybridTarget(components=tuple(comps), phases=tuple(phases), epsilon=eps)
    except ValueError as exc:
        raise ConfigError("target", str(exc)) from None


def load_target(path: str, prime_bound: int) -> HybridTarget:
    with open(path) as fh:
        doc = json.load(fh)
    return target_from_document(doc, prime_bound)
