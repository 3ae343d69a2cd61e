#!/usr/bin/env python3
"""End-to-end smoke test for the nbldpc Python extension.

Builds nothing itself: run `cargo build -p nbldpc-py --release` first. The
script copies the compiled cdylib next to itself as `nbldpc.so` when needed.
"""

import math
import pathlib
import shutil
import sys
import tempfile

HERE = pathlib.Path(__file__).resolve().parent
ROOT = HERE.parent


def _import_nbldpc():
    sys.path.insert(0, str(HERE))
    try:
        import nbldpc  # noqa: F401
    except ImportError:
        for profile in ("release", "debug"):
            so = ROOT / "target" / profile / "libnbldpc.so"
            if so.exists():
                shutil.copy2(so, HERE / "nbldpc.so")
                break
        else:
            sys.exit(
                "libnbldpc.so not found; run `cargo build -p nbldpc-py --release` first"
            )
        import nbldpc  # noqa: F401
    return sys.modules["nbldpc"]


nbldpc = _import_nbldpc()


def check(name, cond):
    status = "ok" if cond else "FAIL"
    print(f"  {status}: {name}")
    if not cond:
        sys.exit(1)


print("field arithmetic")
f4 = nbldpc.Field(2)
check("GF(4) order", f4.order == 4)
check("alpha * alpha = alpha + 1", f4.mul(2, 2) == f4.add(2, 1) == 3)
check("inverse", f4.mul(2, f4.inv(2)) == 1)
check("exp table", list(f4.exp_table()) == [1, 2, 3])
check("power notation", f4.power_notation(3) == "a^2")
try:
    nbldpc.Field(3, 0b1001)  # x^3 + 1 is reducible
    check("reducible polynomial rejected", False)
except ValueError:
    check("reducible polynomial rejected", True)

print("code construction and I/O")
code = nbldpc.Code.generate(n=16, m=8, dc=4, dv=2, q=4, seed=7)
check("shape", code.n == 16 and code.m == 8 and code.order == 16)
check("edge count", code.edges == 32)
with tempfile.TemporaryDirectory() as td:
    path = str(pathlib.Path(td) / "c1.code")
    code.save(path)
    back = nbldpc.Code.load(path)
    check("file round trip", back.entries() == code.entries())

print("encoding and syndrome")
cw = code.encode([3] * code.k)
_, ok = code.syndrome(cw)
check("encoded word satisfies the checks", ok)
bad = list(cw)
bad[0] ^= 1
_, ok = code.syndrome(bad)
check("corrupted word fails the checks", not ok)

print("noiseless decoding")
cw = code.random_codeword(seed=5)
signal = code.modulate(cw)
check("sample count", len(signal) == code.n * code.q)
priors = code.channel_priors(signal, sigma=0.0)
for algo in ("fft-spa", "min-max"):
    for arith in ("f64", "i32", "i8"):
        out = code.decode(priors, algo=algo, arith=arith, max_iters=10)
        check(
            f"{algo}/{arith} recovers the codeword in 1 iteration",
            out.decoded == cw and out.syndrome_ok and out.iterations == 1,
        )

print("noisy decoding")
samples, sigma = nbldpc.add_awgn(signal, ebn0_db=4.0, rate=code.rate, seed=3)
check("sigma mapping", math.isclose(sigma, 1.0 / math.sqrt(2 * code.rate * 10 ** 0.4)))
noisy = code.channel_priors(samples, sigma)
out = code.decode(noisy, algo="fft-spa", max_iters=20, counters=True)
check("decode returns a result", len(out.decoded) == code.n)

print("operation counters")
totals = out.counters()
per_iter = out.counters_per_iteration()
check("totals scale with iterations", totals["additions"] == per_iter["additions"] * out.iterations)
blocks = dict(out.counter_blocks())
model = dict(nbldpc.predict_counts("fft-spa", m=8, n=16, dc=4, dv=2, g=16))
check(
    "measured transform counters match the model",
    blocks["fft"] == {k: v for k, v in model["fft"].items()},
)
check("arith total present", model["total/arith_ops"]["arith_ops"] > 0)

print("staged decoding")
staged = code.staged_decode(noisy, algo="min-max", max_iters=4, early_stop=False, threads=4)
plain = code.decode(noisy, algo="min-max", max_iters=4, early_stop=False, counters=True)
check("staged output identical", staged.decoded == plain.decoded)
barriers = staged.counters_per_iteration()["barriers"]
check(
    "barriers per iteration",
    barriers == nbldpc.predicted_barriers("min-max", g=16, m=8, dc=4) == 2 * 8 * 4 + 1,
)

print("batch decoding")
report = code.run_batch(algo="min-max", arith="i8", ebn0_db=3.0, frames=200, workers=2, seed=1)
check("all frames decoded", report["frames"] == 200)
check("throughput positive", report["throughput_bps"] > 0)
r2 = code.run_batch(algo="min-max", arith="i8", ebn0_db=3.0, frames=200, workers=1, seed=1)
check("outcomes independent of workers", r2["frame_errors"] == report["frame_errors"])

print("quantization")
check("saturating quantizer", nbldpc.quantize_i8([200.4, -200.4, 1.26], 1.0) == [127, -128, 1])

print("all smoke checks passed")
