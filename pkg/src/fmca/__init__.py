"""t-wise covering arrays for feature models, with root/mandatory-child reduction."""
from pathlib import Path

__version__ = "0.1.0"

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.fm"


def fixture_names() -> list[str]:
    return sorted(p.stem for p in FIXTURES.glob("*.fm"))
