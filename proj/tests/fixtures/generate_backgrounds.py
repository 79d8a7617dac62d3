#!/usr/bin/env python3
"""Builds the fixture background images (simple gradients/textures and
wild scene-like noise) plus the exclusion-list fixture. Outputs are
committed; re-run only when changing the fixture design."""

import numpy as np
import cv2
from pathlib import Path

HERE = Path(__file__).resolve().parent
rng = np.random.default_rng(20240817)


def gradient(w, h, a, b, horizontal=True):
    t = np.linspace(0, 1, w if horizontal else h, dtype=np.float32)
    line = a + (b - a) * t
    img = np.tile(line, (h, 1)) if horizontal else np.tile(line[:, None], (1, w))
    return img.astype(np.uint8)


def texture(w, h, base, amp):
    noise = rng.normal(0, amp, (h // 4 + 1, w // 4 + 1)).astype(np.float32)
    noise = cv2.resize(noise, (w, h), interpolation=cv2.INTER_CUBIC)
    return np.clip(base + noise, 0, 255).astype(np.uint8)


def scene(w, h):
    img = texture(w, h, rng.integers(60, 180), 25).astype(np.float32)
    for _ in range(rng.integers(4, 10)):
        x0, y0 = rng.integers(0, w), rng.integers(0, h)
        x1, y1 = rng.integers(0, w), rng.integers(0, h)
        shade = float(rng.integers(20, 235))
        if rng.random() < 0.5:
            cv2.rectangle(img, (x0, y0), (x1, y1), shade, -1)
        else:
            cv2.circle(img, (x0, y0), int(rng.integers(8, min(w, h) // 2)), shade, -1)
    img = cv2.GaussianBlur(img, (0, 0), 1.5)
    return np.clip(img, 0, 255).astype(np.uint8)


def main():
    simple = HERE / "backgrounds" / "simple"
    wild = HERE / "backgrounds" / "wild"
    simple.mkdir(parents=True, exist_ok=True)
    wild.mkdir(parents=True, exist_ok=True)

    specs = [(400, 300), (640, 480), (320, 240), (500, 200), (256, 256), (800, 600)]
    for i, (w, h) in enumerate(specs):
        if i % 2 == 0:
            img = gradient(w, h, float(rng.integers(120, 230)),
                           float(rng.integers(150, 255)), i % 4 == 0)
        else:
            img = texture(w, h, float(rng.integers(140, 220)), 12)
        cv2.imwrite(str(simple / f"simple_{i:02d}.png"), img)

    # one deliberately tiny image to exercise the upscale-to-cover path
    cv2.imwrite(str(simple / "simple_tiny.png"),
                gradient(40, 20, 180.0, 240.0))

    for i in range(12):
        w, h = int(rng.integers(200, 800)), int(rng.integers(150, 600))
        cv2.imwrite(str(wild / f"coco_{i:04d}.png"), scene(w, h))

    # exclusion fixture: names 3 wild stems (one uppercased to test
    # case-insensitive matching) and one stem that does not exist
    (HERE / "cocotext_exclude.txt").write_text(
        "coco_0002\nCOCO_0005\ncoco_0009\nnot_present\n")
    print("backgrounds written")


if __name__ == "__main__":
    main()
