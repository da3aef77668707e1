"""Place MovieLens 100K at data/ml-100k/u.data.

Tries the GroupLens archive first. If that is unreachable, falls back to the
copy bundled in the RecBole wheel (``ml-100k.inter``, same 100,000 ratings
with a header line), fetched with ``pip download``.
"""

import argparse
import io
import subprocess
import sys
import tempfile
import urllib.request
import zipfile
from pathlib import Path

URL = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"
ROOT = Path(__file__).resolve().parent.parent
DEST = ROOT / "data" / "ml-100k" / "u.data"


def from_grouplens(timeout=30) -> bytes:
    with urllib.request.urlopen(URL, timeout=timeout) as resp:
        blob = resp.read()
    with zipfile.ZipFile(io.BytesIO(blob)) as zf:
        return zf.read("ml-100k/u.data")


def from_recbole() -> bytes:
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([sys.executable, "-m", "pip", "download", "recbole", "--no-deps",
                        "--only-binary", ":all:", "-d", tmp], check=True)
        wheel = next(Path(tmp).glob("recbole-*.whl"))
        with zipfile.ZipFile(wheel) as zf:
            text = zf.read("recbole/dataset_example/ml-100k/ml-100k.inter").decode()
    lines = text.splitlines()[1:]  # drop "user_id:token\titem_id:token\t..." header
    return ("\n".join(lines) + "\n").encode()


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dest", type=Path, default=DEST)
    ap.add_argument("--force", action="store_true")
    args = ap.parse_args(argv)
    if args.dest.exists() and not args.force:
        print(f"{args.dest} already present")
        return 0
    try:
        data = from_grouplens()
        source = URL
    except Exception as exc:  # network policy, DNS, TLS ...
        print(f"GroupLens download failed ({exc}); trying the RecBole wheel", file=sys.stderr)
        data = from_recbole()
        source = "recbole wheel"
    n = data.count(b"\n")
    if n != 100_000:
        print(f"unexpected line count {n}", file=sys.stderr)
        return 1
    args.dest.parent.mkdir(parents=True, exist_ok=True)
    args.dest.write_bytes(data)
    print(f"wrote {args.dest} ({n} ratings) from {source}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
