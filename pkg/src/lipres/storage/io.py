# -*- coding: utf-8 -*-

"""Input/Output Operation For File System."""

import hashlib
from pathlib import Path
from typing import Generator, Iterable, List, Union

import orjson

__all__ = ("IO",)


class IO:
    """Input Output."""

    @classmethod
    def dir_create(
        cls,
        folder: Union[str, Path],
    ) -> bool:
        """create directory"""
        path = Path(folder)
        path.mkdir(parents=True, exist_ok=True)
        return path.is_dir()

    @classmethod
    def load_str(
        cls,
        file: Union[str, Path],
        encoding: str = "utf8",
    ) -> str:
        """load string from file"""
        with open(file, "r", encoding=encoding) as fp:
            return fp.read()

    @classmethod
    def save_str(
        cls,
        file: Union[str, Path],
        content: str,
        encoding: str = "utf8",
    ) -> bool:
        """save string into file"""
        path = Path(file)
        with open(path, "w", encoding=encoding, newline="\n") as fp:
            fp.write(content)
        return path.exists()

    @classmethod
    def load_line(
        cls,
        file: Union[str, Path],
        encoding: str = "utf8",
        skip_blank: bool = False,
    ) -> List[str]:
        """load lines of string from file"""
        with open(file, "r", encoding=encoding) as fp:
            result = [x.rstrip("\r\n") for x in fp.readlines()]
        if skip_blank:
            result = [x for x in result if x.strip()]
        return result

    @classmethod
    def save_line(
        cls,
        file: Union[str, Path],
        texts: Iterable[str],
        encoding: str = "utf8",
    ) -> bool:
        """save lines of string into file, newline terminated"""
        path = Path(file)
        with open(path, "w", encoding=encoding, newline="\n") as fp:
            for text in texts:
                fp.write(text + "\n")
        return path.exists()

    @classmethod
    def load_dict(
        cls,
        file: Union[str, Path],
    ) -> dict:
        """load dictionary from json file"""
        with open(file, "rb") as fp:
            result = orjson.loads(fp.read())
        if isinstance(result, dict):
            return result
        raise ValueError(f"load_dict error: {file}")

    @classmethod
    def save_dict(
        cls,
        file: Union[str, Path],
        item: dict,
    ) -> bool:
        """save dictionary into json file, keys sorted for stable output"""
        path = Path(file)
        opt = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY
        with open(path, "wb") as fp:
            fp.write(orjson.dumps(item, option=opt))
        return path.exists()

    @classmethod
    def load_jsonl(
        cls,
        file: Union[str, Path],
    ) -> Generator[dict, None, None]:
        """Load data from jsonl file."""
        with open(file, "rb") as fp:
            for line in fp:
                line = line.strip()
                if line:
                    yield orjson.loads(line)

    @classmethod
    def save_jsonl(
        cls,
        file: Union[str, Path],
        data: Iterable[dict],
    ) -> bool:
        """Save data into jsonl file."""
        path = Path(file)
        opt = orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY
        with open(path, "wb") as fp:
            for item in data:
                fp.write(orjson.dumps(item, option=opt) + b"\n")
        return path.is_file()

    @classmethod
    def md5(
        cls,
        file: Union[str, Path],
        chunk: int = 1 << 20,
    ) -> str:
        """md5 hex digest of file content"""
        digest = hashlib.md5()
        with open(file, "rb") as fp:
            for block in iter(lambda: fp.read(chunk), b""):
                digest.update(block)
        return digest.hexdigest()
