from hypothesis import HealthCheck, settings

settings.register_profile(
    "restock",
    deadline=None,
    max_examples=40,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("restock")
