"""Certificates for normal extensions of semigroup representations."""

from ._normex import *  # noqa: F401,F403
from ._normex import __version__, run_cli

import json as _json


def check(document, condition="all", *extra):
    """Runs `normex check` on a spec document (dict or JSON text) and returns
    (exit_code, machine report as a dict)."""
    import os
    import tempfile

    text = document if isinstance(document, str) else _json.dumps(document)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "input.json")
        with open(path, "w") as f:
            f.write(text)
        code, out, err = run_cli(["check", condition, "--input", path, "--format", "machine", *extra])
    if code == 2:
        raise InputError(err.strip())  # noqa: F405
    return code, _json.loads(out)
