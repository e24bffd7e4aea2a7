"""End-to-end throughput benchmark (forward + decode + NMS)."""

from __future__ import annotations

import platform
import time
from dataclasses import dataclass

import torch

from ..detector.decode import decode, nms

__all__ = ["FpsResult", "fps_benchmark", "hardware_string", "REFERENCE_FPS"]

# throughput reported for the same architecture on an RTX 3090, for
# context only; never asserted against
REFERENCE_FPS = {"rtx3090": 57.2}


def hardware_string() -> str:
    bits = [platform.machine(), platform.system()]
    cpu = platform.processor() or ""
    try:
        with open("/proc/cpuinfo") as fh:
            for line in fh:
                if line.lower().startswith("model name"):
                    cpu = line.split(":", 1)[1].strip()
                    break
    except OSError:
        pass
    if cpu:
        bits.append(cpu)
    bits.append(f"torch-{torch.__version__}")
    if torch.cuda.is_available():
        bits.append(torch.cuda.get_device_name(0))
    else:
        bits.append(f"cpu-threads={torch.get_num_threads()}")
    return " / ".join(bits)


@dataclass(frozen=True)
class FpsResult:
    fps: float
    latency_ms: float
    iters: int
    input_size: int
    hardware: str


def fps_benchmark(
    model,
    input_size: int = 640,
    warmup: int = 3,
    iters: int = 30,
    conf_thresh: float = 0.25,
    iou_thresh: float = 0.6,
) -> FpsResult:
    """Batch-1 latency after warmup, including decode and NMS."""
    model.eval()
    strides = getattr(getattr(model, "cfg", None), "strides", (8, 16, 32))
    x = torch.randn(1, 3, input_size, input_size)

    def run_once():
        with torch.no_grad():
            outs = model(x)
        per_image = decode(outs, input_size, strides, conf_thresh=conf_thresh)
        for dets in per_image:
            nms(dets, conf_thresh, iou_thresh)

    for _ in range(warmup):
        run_once()
    start = time.perf_counter()
    for _ in range(iters):
        run_once()
    elapsed = time.perf_counter() - start
    return FpsResult(
        fps=iters / elapsed,
        latency_ms=1000.0 * elapsed / iters,
        iters=iters,
        input_size=input_size,
        hardware=hardware_string(),
    )
