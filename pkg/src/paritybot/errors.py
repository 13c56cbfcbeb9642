"""Domain errors carry a stable machine-readable code.

Codes are part of the package contract: tests and the HTTP service branch on
``err.code``, never on message text.
"""


class ParityError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
