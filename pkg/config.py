import os
from dotenv import load_dotenv

basedir = os.path.abspath(os.path.dirname(__file__))
load_dotenv(os.path.join(basedir, '.env'))


class Config:
    # Logging
    LOG_LEVEL = os.environ.get('POLARLENS_LOG_LEVEL', 'INFO').upper()
    LOGGING_INI = os.path.join(basedir, 'polarlens', 'logging.ini')

    # FFT worker threads; wall time only, never results
    THREADS = int(os.environ.get('POLARLENS_THREADS') or 1)

    # Artifacts
    OUTPUT_DIR = os.environ.get('POLARLENS_OUTPUT_DIR') or os.path.join(basedir, 'runs')
    CONFIG_DIR = os.path.join(basedir, 'configs')
    MANIFEST_NAME = 'manifest.yaml'

    # Sweep worker pool
    SWEEP_WORKERS = int(os.environ.get('POLARLENS_SWEEP_WORKERS') or 4)


class TestConfig(Config):
    LOG_LEVEL = 'WARNING'
    THREADS = 1
    SWEEP_WORKERS = 2
