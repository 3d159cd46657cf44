import pytest


@pytest.fixture
def write_lines(tmp_path):
    """Write lines as a UTF-8 text file with trailing newlines; returns the path."""

    def _write(name, lines):
        p = tmp_path / name
        p.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        return p

    return _write
