from prometheus_client import Counter, Histogram, Gauge, REGISTRY
from prometheus_client.openmetrics.exposition import generate_latest
from pathlib import Path

# Stepping Metrics
STEP_COUNT = Counter(
    "radmhd_steps_total",
    "Total number of accepted time steps",
    ["mode"],
)

STEP_LATENCY = Histogram(
    "radmhd_step_duration_seconds",
    "Wall-clock time spent per accepted step",
    ["mode"],
    buckets=(1e-5, 5e-5, 1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2, 1e-1, 1.0),
)

SIMULATION_ABORTS = Counter(
    "radmhd_aborts_total", "Total number of aborted simulations", ["reason"]
)

SIMULATED_TIME = Gauge("radmhd_simulated_time", "Current simulated time")

TIME_STEP = Gauge("radmhd_time_step", "Most recent accepted time step")

# Physics Metrics
NEWTON_FALLBACKS = Counter(
    "radmhd_newton_fallbacks_total",
    "Cells whose temperature inversion fell back to bisection",
)

# Verification Metrics
MMS_LEVELS = Counter(
    "radmhd_mms_levels_total",
    "Total number of manufactured-solution levels completed",
    ["case"],
)


# Helper functions for metrics
def record_step(mode: str, duration: float, t: float, dt: float):
    STEP_COUNT.labels(mode=mode).inc()
    STEP_LATENCY.labels(mode=mode).observe(duration)
    SIMULATED_TIME.set(t)
    TIME_STEP.set(dt)


def record_abort(reason: str):
    SIMULATION_ABORTS.labels(reason=reason).inc()


def record_newton_fallback(count: int):
    NEWTON_FALLBACKS.inc(count)


def record_mms_level(case: str):
    MMS_LEVELS.labels(case=case).inc()


def write_metrics(path: Path) -> Path:
    path.write_bytes(generate_latest(REGISTRY))
    return path
