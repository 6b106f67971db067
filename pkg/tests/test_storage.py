from __future__ import annotations

import pytest

from app import storage


@pytest.mark.parametrize(
    "name, kind",
    [("train.vrt", "corpus"), ("model.ADB", "axes"), ("model.jdb", "joints"), ("tags.txt", "inventory")],
)
def test_validate_extension_accepts_known_suffixes(name, kind):
    storage.validate_extension(name, kind)


def test_validate_extension_rejects_other_suffixes():
    with pytest.raises(storage.UnsupportedFileType) as excinfo:
        storage.validate_extension("model.json", "joints")
    assert excinfo.value.kind == "joints"
    assert ".json" in str(excinfo.value)
    assert ".jdb" in str(excinfo.value)

    with pytest.raises(storage.UnsupportedFileType, match="<none>"):
        storage.validate_extension("README", "corpus")


def test_write_text_atomic_replaces_the_target(tmp_path):
    target = tmp_path / "out.vrt"
    target.write_text("old\n", encoding="utf-8")

    assert storage.write_text_atomic(target, "new\n") == target
    assert target.read_text(encoding="utf-8") == "new\n"
    assert [path.name for path in tmp_path.iterdir()] == ["out.vrt"]


def test_write_text_atomic_cleans_up_after_a_failed_rename(tmp_path, monkeypatch):
    target = tmp_path / "out.jdb"

    def fail(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(storage.os, "replace", fail)
    with pytest.raises(OSError):
        storage.write_text_atomic(target, "text\n")
    assert list(tmp_path.iterdir()) == []


def test_open_text_reports_the_line_of_the_first_bad_byte(tmp_path):
    path = tmp_path / "corpus.vrt"
    path.write_bytes(b"They\tSUBJ\nsee\tFMAINV\n\xe9t\tOBJ\n")

    with pytest.raises(storage.EncodingError) as excinfo:
        storage.open_text(path)
    assert excinfo.value.line == 3
    assert str(excinfo.value).startswith("line 3: ")

    path.write_bytes("café\tOBJ\r\n".encode("utf-8"))
    with storage.open_text(path) as stream:
        assert stream.read() == "café\tOBJ\n"
