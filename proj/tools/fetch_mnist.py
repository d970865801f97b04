#!/usr/bin/env python3
"""Fetch the MNIST IDX files into data/mnist (convenience only; tests never
need network access once the files are present)."""

import argparse
import gzip
import hashlib
import urllib.request
from pathlib import Path

MIRRORS = [
    "https://ossci-datasets.s3.amazonaws.com/mnist/",
    "https://storage.googleapis.com/cvdf-datasets/mnist/",
]

FILES = {
    "train-images-idx3-ubyte.gz": "f68b3c2dcbeaaa9fbdd348bbdeb94873",
    "train-labels-idx1-ubyte.gz": "d53e105ee54ea40749a09fcbcd1e9432",
    "t10k-images-idx3-ubyte.gz": "9fb629c4189551a2d022fa330f9573f3",
    "t10k-labels-idx1-ubyte.gz": "ec29112dd5afa0611ce80d1b7f02629c",
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data/mnist", help="output directory")
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for name, md5 in FILES.items():
        dest = out / name
        if dest.exists():
            print(f"{name}: already present")
            continue
        last_err = None
        for mirror in MIRRORS:
            try:
                print(f"{name}: fetching from {mirror}")
                with urllib.request.urlopen(mirror + name, timeout=60) as r:
                    blob = r.read()
                if hashlib.md5(blob).hexdigest() != md5:
                    raise RuntimeError("md5 mismatch")
                gzip.decompress(blob)  # sanity: verify it decompresses
                dest.write_bytes(blob)
                break
            except Exception as e:  # try the next mirror
                last_err = e
        else:
            raise SystemExit(f"could not fetch {name}: {last_err}")
    print("done")


if __name__ == "__main__":
    main()
