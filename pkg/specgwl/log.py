"""Logging setup shared by every command"""

import logging
import os
from typing import Optional

_main_formatter = logging.Formatter(
    fmt="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
    style="%",
)


class MemoryLogsHandler(logging.Handler):
    """
    Keeps 2 buffers.
    One for dispatched records.
    One for records below the current level.
    When the length of the 2 together is `capacity`
    truncate to make them `capacity` together,
    first trimming handled then unused.
    """

    def __init__(self, target: logging.Handler, capacity: int):
        super().__init__(0)
        self.target = target
        self.capacity = capacity
        self.buffer = []
        self.handledbuffer = []
        self.lvl = logging.NOTSET

    def setLevel(self, level: int):
        self.lvl = level

    def clear(self):
        self.buffer = []
        self.handledbuffer = []

    def dump(self) -> list:
        """Return a list of logging entries"""
        return self.handledbuffer + self.buffer

    def dumps(self, lvl: int = 0) -> list:
        """Return all entries of minimum level as list of strings"""
        return [
            self.target.format(record)
            for record in (self.handledbuffer + self.buffer)
            if record.levelno >= lvl
        ]

    def write(self, path: str, lvl: int = 0) -> str:
        """Store buffered entries in a text file"""
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w") as f:
            f.write("\n".join(self.dumps(lvl)) + "\n")

        return path

    def emit(self, record: logging.LogRecord):
        if len(self.buffer) + len(self.handledbuffer) >= self.capacity:
            if self.handledbuffer:
                del self.handledbuffer[0]
            else:
                del self.buffer[0]

        self.buffer.append(record)

        if record.levelno >= self.lvl >= 0:
            self.acquire()
            try:
                for precord in self.buffer:
                    self.target.handle(precord)

                self.handledbuffer = (
                    self.handledbuffer[-(self.capacity - len(self.buffer)) :]
                    + self.buffer
                )
                self.buffer = []
            finally:
                self.release()


def get_handler() -> Optional[MemoryLogsHandler]:
    """Memory handler installed by `init`, if any"""
    for handler in logging.getLogger().handlers:
        if isinstance(handler, MemoryLogsHandler):
            return handler

    return None


def init(level: int = logging.INFO):
    handler = logging.StreamHandler()
    handler.setFormatter(_main_formatter)
    memory = MemoryLogsHandler(handler, 7000)
    memory.setLevel(level)
    logging.getLogger().handlers = []
    logging.getLogger().addHandler(memory)
    logging.getLogger().setLevel(logging.NOTSET)
    logging.getLogger("git").setLevel(logging.WARNING)
    logging.getLogger("asyncio").setLevel(logging.WARNING)
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    logging.captureWarnings(True)
    return memory
