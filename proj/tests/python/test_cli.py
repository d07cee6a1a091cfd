"""End-to-end CLI checks: every subcommand, the documented exit codes, and the
CSV schemas. Drives the real binary named by GVCSR_BIN on tiny synthetic
images, so the whole run stays in the seconds range."""
import math
import os
import subprocess
import sys
import tempfile
from pathlib import Path

BIN = os.environ["GVCSR_BIN"]

failures = []


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def run(*args):
    p = subprocess.run([BIN, *[str(a) for a in args]], capture_output=True, text=True, timeout=300)
    return p.returncode, p.stdout, p.stderr


def write_pgm(path, w, h, fn):
    data = bytearray(f"P5\n{w} {h}\n255\n".encode())
    for r in range(h):
        for c in range(w):
            data.append(max(0, min(255, int(fn(r, c)))))
    Path(path).write_bytes(bytes(data))


def csv_rows(path):
    lines = Path(path).read_text().splitlines()
    return lines[0], lines[1], [ln.split(",") for ln in lines[2:] if ln]


def main():
    tmp = Path(tempfile.mkdtemp(prefix="gvcsr_cli_"))
    img1 = tmp / "img1.pgm"
    img2 = tmp / "img2.pgm"
    img3 = tmp / "img3.pgm"
    write_pgm(img1, 20, 20, lambda r, c: 20 + (6 * r + 4 * c + (30 if (r // 4 + c // 4) % 2 else 0)) % 200)
    write_pgm(img2, 20, 20, lambda r, c: 110 + 80 * math.sin(0.5 * r) + 0.8 * c)
    img3.write_bytes(img1.read_bytes())  # duplicate content, distinct name

    dict1 = tmp / "dict1.gvcd"
    dict2 = tmp / "dict2.gvcd"

    # train
    rc, out, _ = run("train", img1, img2, "--patch", 4, "--gamma", 1.5, "--outer-iters", 2,
                     "--max-iters", 300, "--seed", 1, "--out", dict1)
    check(rc == 0 and dict1.exists(), "train exits 0 and writes the dictionary")
    check("round 0:" in out and "wrote" in out, "train prints per-round reports")
    check(dict1.read_bytes()[:4] == b"GVCD", "dictionary file carries its magic")

    rc, _, _ = run("train", img2, "--patch", 4, "--gamma", 1.5, "--outer-iters", 1,
                   "--max-iters", 200, "--seed", 9, "--out", dict2)
    check(rc == 0, "second dictionary trains")

    # encode / determinism / decode
    stream = tmp / "img1.gvcb"
    rc, out, _ = run("encode", img1, "--dict", dict1, "--quant", 8, "--out", stream)
    check(rc == 0 and stream.read_bytes()[:4] == b"GVCB", "encode exits 0 with stream magic")
    check("bpp=" in out and "psnr=" in out, "encode reports rate and distortion")

    stream2 = tmp / "again.gvcb"
    run("encode", img1, "--dict", dict1, "--quant", 8, "--out", stream2)
    check(stream.read_bytes() == stream2.read_bytes(), "encode is byte-deterministic")

    recon = tmp / "recon.pgm"
    rc, _, _ = run("decode", stream, "--dict", dict1, "--out", recon)
    header = recon.read_bytes()[:20]
    check(rc == 0 and header.startswith(b"P5") and b"20 20" in header,
          "decode exits 0 and writes a 20x20 PGM")

    # integrity failures exit 3
    rc, _, err = run("decode", stream, "--dict", dict2, "--out", tmp / "bad.pgm")
    check(rc == 3 and "error:" in err, "decode with the wrong dictionary exits 3")

    corrupt = tmp / "corrupt.gvcb"
    blob = bytearray(stream.read_bytes())
    blob[0] ^= 0xFF
    corrupt.write_bytes(bytes(blob))
    rc, _, _ = run("decode", corrupt, "--dict", dict1, "--out", tmp / "bad2.pgm")
    check(rc == 3, "decode of a corrupted stream exits 3")

    # usage errors exit 2
    rc, _, _ = run("encode", tmp / "missing.pgm", "--dict", dict1, "--out", tmp / "x.gvcb")
    check(rc == 2, "encode of a missing image exits 2")
    rc, _, _ = run("no-such-command")
    check(rc == 2, "unknown subcommand exits 2")
    rc, _, _ = run("encode", img1, "--dict", dict1)
    check(rc == 2, "missing required --out exits 2")
    rc, _, _ = run("encode", img1, "--dict", dict1, "--coder", "bogus", "--out", tmp / "x.gvcb")
    check(rc == 2, "unknown coder spec exits 2")

    # rd-sweep CSV
    sweep = tmp / "sweep.csv"
    rc, _, _ = run("rd-sweep", img1, "--dict", dict1, "--alpha-list", "0.5,2",
                   "--omp-l-list", "2", "--quant-list", "8", "--out", sweep)
    schema, header, rows = csv_rows(sweep)
    check(rc == 0 and schema == "# schema: gvcsr-rdsweep-v1", "rd-sweep writes its schema line")
    check(header == "image,coder,alpha,beta,L,eps,quant,bpp,psnr,mean_l0", "rd-sweep header")
    check(len(rows) == 3 and [r[1] for r in rows] == ["gvcsr", "gvcsr", "omp-l"],
          "rd-sweep emits one row per operating point")
    check(all(float(r[7]) > 0 and float(r[8]) > 0 for r in rows), "rd-sweep rates are positive")

    # trace CSV
    trace = tmp / "trace.csv"
    rc, _, _ = run("trace", img1, "--dict", dict1, "--max-iters", 50, "--out", trace)
    schema, header, rows = csv_rows(trace)
    check(rc == 0 and schema == "# schema: gvcsr-trace-v1", "trace writes its schema line")
    check(header == "iter,mse_term,variance_term,objective", "trace header")
    check(len(rows) >= 2 and [int(r[0]) for r in rows] == list(range(len(rows))),
          "trace rows are sequential iterations")

    # fig1 CSV
    fig = tmp / "fig1.csv"
    rc, _, _ = run("fig1", "--seed", 0, "--out", fig)
    schema, header, rows = csv_rows(fig)
    check(rc == 0 and schema == "# schema: gvcsr-fig1-v1", "fig1 writes its schema line")
    check(header == "variance,bits_per_sample,gaussian_bound", "fig1 header")
    check(len(rows) == 10 and [float(r[0]) for r in rows] == [float(2 ** i) for i in range(10)],
          "fig1 sweeps ten power-of-two variances")
    check(all(float(r[1]) <= float(r[2]) + 1.0 for r in rows),
          "fig1 coded rate stays within a bit of the bound")

    # set pipeline
    archive = tmp / "set.gvcs"
    rc, out, _ = run("set-encode", img1, img2, img3, "--dict", dict1, "--patch", 4,
                     "--gamma", 1.5, "--coder", "omp-l=2", "--outer-iters", 1,
                     "--max-iters", 200, "--quant", 8, "--out", archive)
    check(rc == 0 and archive.read_bytes()[:4] == b"GVCS", "set-encode exits 0 with archive magic")
    check("average:" in out and out.count("parent=") >= 3, "set-encode reports per-image stats")

    outdir = tmp / "decoded"
    rc, _, _ = run("set-decode", archive, "--dict", dict1, "--out", outdir)
    names = sorted(p.name for p in outdir.iterdir()) if outdir.exists() else []
    check(rc == 0 and names == ["img1.pgm", "img2.pgm", "img3.pgm"],
          "set-decode exits 0 and writes every image")
    check(all((outdir / n).read_bytes().startswith(b"P5") for n in names),
          "set-decode outputs are PGMs")

    rc, _, _ = run("set-decode", archive, "--dict", dict2, "--out", tmp / "decoded2")
    check(rc == 3, "set-decode with the wrong global dictionary exits 3")

    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
