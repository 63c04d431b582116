#!/usr/bin/env python3
"""Download the 512x512 colour test image and store it as a binary PPM.

The image benchmark in ``tests/test_acceptance.py`` expects the USC-SIPI
"misc" volume image 4.2.04 (512x512, 24-bit colour) at
``data/usc_sipi_4_2_04.ppm``.  This machine is expected to have network
access; the test sandbox does not, so run this script wherever you can
reach sipi.usc.edu (or pass --url pointing at a mirror) and copy the
resulting PPM into the repository.

The USC-SIPI originals are TIFF files, so decoding needs Pillow:

    pip install pillow
    python3 scripts/fetch_test_image.py

The output is a plain binary P6 file with maxval 255, exactly what
``gaussmatch.ingest.read_ppm`` consumes.
"""

from __future__ import annotations

import argparse
import io
import sys
import urllib.request
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parents[1]
DEFAULT_URL = "https://sipi.usc.edu/database/misc/4.2.04.tiff"
DEFAULT_OUTPUT = REPO_ROOT / "data" / "usc_sipi_4_2_04.ppm"
EXPECTED_SHAPE = (512, 512)


def fetch(url: str, timeout: float) -> bytes:
    request = urllib.request.Request(url, headers={"User-Agent": "fetch-test-image/1.0"})
    with urllib.request.urlopen(request, timeout=timeout) as response:
        return response.read()


def tiff_to_pixels(payload: bytes):
    try:
        from PIL import Image
    except ImportError:
        sys.exit(
            "Pillow is required to decode the TIFF original; "
            "run `pip install pillow` and try again."
        )
    import numpy as np

    with Image.open(io.BytesIO(payload)) as image:
        rgb = image.convert("RGB")
        pixels = np.asarray(rgb, dtype=np.uint8)
    return pixels


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--url", default=DEFAULT_URL, help="source image URL (TIFF)")
    parser.add_argument(
        "--output",
        type=Path,
        default=DEFAULT_OUTPUT,
        help="destination PPM path (default: data/usc_sipi_4_2_04.ppm)",
    )
    parser.add_argument("--timeout", type=float, default=30.0, help="download timeout in seconds")
    args = parser.parse_args(argv)

    sys.path.insert(0, str(REPO_ROOT / "src"))
    from gaussmatch.ingest import Raster, write_ppm

    print(f"downloading {args.url} ...")
    payload = fetch(args.url, args.timeout)
    pixels = tiff_to_pixels(payload)
    if pixels.shape[:2] != EXPECTED_SHAPE:
        sys.exit(f"unexpected image size {pixels.shape[:2]}, wanted {EXPECTED_SHAPE}")

    args.output.parent.mkdir(parents=True, exist_ok=True)
    write_ppm(Raster(pixels.astype("uint16"), 255), args.output)
    print(f"wrote {args.output} ({pixels.shape[0]}x{pixels.shape[1]}, maxval 255)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
