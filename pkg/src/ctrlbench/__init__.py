"""Controller benchmarking: plants, controllers, metrics, and an experiment harness."""

__version__ = "0.1.0"
