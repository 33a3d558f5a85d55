"""What the rank-copula representation sees, and what it ignores.

Builds one textured image, then walks three kinds of edits past it:

  1. strictly increasing point maps evaluated in real arithmetic
     (brightness, contrast, gamma) -> the representation is bit-identical,
     distortion is exactly zero;
  2. the same maps requantized back to 8 bits -> codes merge wherever the
     map is locally contracting, distortion is tiny (and exactly zero when
     no codes merge at all, as for an integer shift);
  3. structural degradations (blur, noise, block-DCT) -> distortion lands
     an order of magnitude above any monotone edit.

PSNR is printed alongside to show the contrast: brightness +80 wrecks PSNR
while leaving the structure metric at zero, and a strong blur can keep a
decent PSNR while the structure metric objects.

Run: python3 demos/invariance_walkthrough.py
"""

import numpy as np

from copsem import extract_family, psnr
from copsem.harness import synthetic_corpus
from copsem.image_io import REAL, U8
from copsem.metrics import d_pc
from copsem.transforms import (
    apply_transform,
    awgn,
    block_dct_quant,
    blur,
    brightness,
    contrast,
    gamma,
)

BANK = [
    ("brightness +80, real", brightness(80.0, REAL)),
    ("contrast x1.5, real", contrast(1.5, domain=REAL)),
    ("gamma 0.5, real", gamma(0.5, REAL)),
    ("gamma 3.0, real", gamma(3.0, REAL)),
    ("brightness +80, requantized", brightness(80.0, U8)),
    ("contrast x1.5, requantized", contrast(1.5, domain=U8)),
    ("gamma 0.5, requantized", gamma(0.5, U8)),
    ("gamma 0.3, requantized", gamma(0.3, U8)),
    ("blur 7x7", blur(7)),
    ("white noise sigma=10", awgn(10.0, seed=99)),
    ("block-DCT quality 20", block_dct_quant(20)),
]


def main():
    name, img = synthetic_corpus(count=1, size=128)[0]
    base = extract_family(img)
    print(f"image: {name} ({img.width}x{img.height})")
    print(f"{'edit':<30} {'d_pc':>12} {'psnr_db':>9}")
    for label, spec in BANK:
        out = apply_transform(img, spec)
        fam = extract_family(out)
        dist = d_pc(base, fam).d_pc
        if out.domain == U8:
            p = psnr(img, out)
            p_txt = f"{p:9.2f}"
        else:
            p_txt = "        -"  # PSNR is undefined against real pixels
        print(f"{label:<30} {dist:12.3e} {p_txt}")
    print()
    print("the real-domain rows are exact zeros: ranks are untouched, so the")
    print("copulas are equal cell for cell, not merely close. requantized")
    print("monotone maps stay at or near zero (codes only merge where the")
    print("map contracts, as with gamma 0.3 in the bright range), while the")
    print("degradations sit an order of magnitude higher. note brightness")
    print("+80 has the worst PSNR of the table and a structural score of 0.")


if __name__ == "__main__":
    main()
