#!/usr/bin/env python3
# Copyright 2026 The dpadmm Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Fetch the UCI Adult files (adult.data, adult.test, adult.names).

The files are taken from the `responsibly` wheel, which bundles the original
UCI distribution.
"""

import argparse
import hashlib
import pathlib
import subprocess
import sys
import tempfile
import zipfile

PACKAGE = "responsibly==0.1.2"
MEMBER_DIR = "responsibly/dataset/adult/"
FILES = {
    "adult.data": "5d7c39d7b8804f071cdd1f2a7c460872",
    "adult.test": "35238206dfdf7f1fe215bbb874adecdc",
    "adult.names": "1a7cdb3ff7a1b709968b1c7a11def63e",
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data/adult", type=pathlib.Path,
                        help="destination directory (default: data/adult)")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([sys.executable, "-m", "pip", "download", PACKAGE, "--no-deps",
                        "--only-binary", ":all:", "-q", "-d", tmp], check=True)
        wheel = next(pathlib.Path(tmp).glob("*.whl"))
        with zipfile.ZipFile(wheel) as zf:
            for name, md5 in FILES.items():
                payload = zf.read(MEMBER_DIR + name)
                digest = hashlib.md5(payload).hexdigest()
                if digest != md5:
                    print(f"error: {name} checksum {digest} != {md5}", file=sys.stderr)
                    return 1
                (args.out / name).write_bytes(payload)
                print(f"wrote {args.out / name} ({len(payload)} bytes)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
