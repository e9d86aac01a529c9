import logging
import sys
import time
from functools import wraps
from typing import Dict, Any

import structlog
from prometheus_client import Counter, Histogram, CollectorRegistry, generate_latest

logger = structlog.get_logger()

# Create a custom registry; a one-shot CLI exposes it on demand instead of serving it
registry = CollectorRegistry()

# Root finding metrics
POLYNOMIAL_SOLVES = Counter(
    'alhazen_polynomial_solves_total',
    'Total number of polynomial solves',
    ['degree'],
    registry=registry
)

ABERTH_ITERATIONS = Histogram(
    'alhazen_aberth_iterations',
    'Simultaneous-iteration sweeps per solve',
    buckets=(5, 10, 20, 40, 80, 120, 160, 200),
    registry=registry
)

ROOT_RESIDUAL_WARNINGS = Counter(
    'alhazen_root_residual_warnings_total',
    'Roots whose polished residual stayed above the target',
    registry=registry
)

# Level set metrics
LEVEL_SET_SKIPPED = Counter(
    'alhazen_level_set_skipped_angles_total',
    'Level set rays on which the requested level is unreachable',
    registry=registry
)

# Command metrics
COMMAND_DURATION = Histogram(
    'alhazen_command_duration_seconds',
    'Command duration in seconds',
    ['command'],
    registry=registry
)

ERROR_COUNT = Counter(
    'alhazen_errors_total',
    'Total number of errors',
    ['error_type', 'component'],
    registry=registry
)

# Invariant suite metrics
SUITE_CHECKS = Counter(
    'alhazen_suite_checks_total',
    'Invariant checks performed',
    ['suite'],
    registry=registry
)

SUITE_FAILURES = Counter(
    'alhazen_suite_failures_total',
    'Invariant checks that failed',
    ['suite'],
    registry=registry
)


def configure_logging(level: str = "WARNING", fmt: str = "console"):
    """Route structlog through stdlib logging on stderr; stdout carries command output"""
    numeric_level = getattr(logging, level.upper(), logging.WARNING)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    root = logging.getLogger()
    root.handlers = [handler]
    root.setLevel(numeric_level)

    renderer = structlog.processors.JSONRenderer() if fmt == "json" else structlog.dev.ConsoleRenderer(colors=False)
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=False,
    )


def record_polynomial_solve(degree: int, iterations: int = 0):
    """Record a polynomial solve"""
    POLYNOMIAL_SOLVES.labels(degree=str(degree)).inc()
    if iterations:
        ABERTH_ITERATIONS.observe(iterations)


def record_residual_warning():
    """Record a root that did not reach the residual target"""
    ROOT_RESIDUAL_WARNINGS.inc()


def record_skipped_angles(count: int):
    """Record unreachable level set rays"""
    if count:
        LEVEL_SET_SKIPPED.inc(count)


def record_error_metrics(error_type: str, component: str):
    """Record error metrics"""
    ERROR_COUNT.labels(error_type=error_type, component=component).inc()


def record_suite_metrics(suite: str, checked: int, failures: int):
    """Record invariant suite outcome"""
    SUITE_CHECKS.labels(suite=suite).inc(checked)
    if failures:
        SUITE_FAILURES.labels(suite=suite).inc(failures)


def timed_command(command: str):
    """Decorator timing a CLI command"""
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.time()
            try:
                return func(*args, **kwargs)
            finally:
                COMMAND_DURATION.labels(command=command).observe(time.time() - start_time)
        return wrapper
    return decorator


def render_metrics() -> str:
    """Prometheus text exposition of the private registry"""
    return generate_latest(registry).decode("utf-8")


def get_metrics_summary() -> Dict[str, Any]:
    """Get a summary of solve counters"""
    summary: Dict[str, Any] = {}
    for metric in registry.collect():
        for sample in metric.samples:
            if sample.name.endswith("_total"):
                key = sample.name
                if sample.labels:
                    key += "{" + ",".join(f"{k}={v}" for k, v in sorted(sample.labels.items())) + "}"
                summary[key] = sample.value
    return summary
