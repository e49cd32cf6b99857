import os

THREADS = max(1, int(os.getenv("LRPOSSIB_THREADS", str(os.cpu_count() or 1))))

LOG_LEVEL = os.getenv("LRPOSSIB_LOG_LEVEL", "warning")

SENTRY_DSN = os.getenv("SENTRY_DSN")
