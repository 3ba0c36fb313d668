import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_field(spec, rng):
    """Complex white noise on ``spec``."""
    from plcwt.grid import ComplexField2D
    return ComplexField2D(spec, rng.normal(size=spec.shape) + 1j * rng.normal(size=spec.shape))


def band_limited_field(spec, rng, keep=0.25):
    """White noise low-passed to ``|k| <= keep * n`` cycles per side."""
    from plcwt.grid import ComplexField2D
    noise = rng.normal(size=spec.shape) + 1j * rng.normal(size=spec.shape)
    k1 = np.fft.fftfreq(spec.n1)[:, None]
    k2 = np.fft.fftfreq(spec.n2)[None, :]
    lowpass = np.hypot(k1, k2) <= keep
    return ComplexField2D(spec, np.fft.ifft2(np.fft.fft2(noise) * lowpass))


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
