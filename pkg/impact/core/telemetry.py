"""
OpenTelemetry setup module.

This module defines the engine's metrics and installs an exporting meter
provider when an OTLP endpoint is configured.
"""
from opentelemetry import metrics
from opentelemetry.exporter.otlp.proto.grpc.metric_exporter import OTLPMetricExporter
from opentelemetry.sdk.metrics import MeterProvider
from opentelemetry.sdk.metrics.export import PeriodicExportingMetricReader
from opentelemetry.sdk.resources import Resource

from impact import __version__
from impact.core.config import settings
from impact.core.logging import get_logger

logger = get_logger(__name__)


# Metrics for impact resolution
meter = metrics.get_meter("rough_impact.engine")
impacts_resolved = meter.create_counter(
    name="impact.resolved",
    description="Resolved impacts by branch and law",
)

resolve_time = meter.create_histogram(
    name="impact.resolve.time",
    description="Time taken to resolve one impact",
    unit="ms",
)

error_counter = meter.create_counter(
    name="impact.errors",
    description="Engine errors by code",
)


def setup_telemetry() -> bool:
    """
    Set up OpenTelemetry metrics export.

    Returns:
        bool: True when an exporting provider was installed
    """
    if not settings.OTLP_ENDPOINT:
        logger.debug("OTLP_ENDPOINT not set. Metrics stay on the no-op provider.")
        return False

    try:
        resource = Resource.create(
            {
                "service.name": settings.APP_NAME,
                "service.version": __version__,
                "environment": settings.ENVIRONMENT,
            }
        )
        reader = PeriodicExportingMetricReader(
            OTLPMetricExporter(endpoint=settings.OTLP_ENDPOINT, insecure=True)
        )
        metrics.set_meter_provider(MeterProvider(resource=resource, metric_readers=[reader]))
        logger.info("OpenTelemetry metrics export enabled")
        return True
    except Exception as e:
        logger.exception(f"Failed to set up OpenTelemetry: {e}")
        return False
