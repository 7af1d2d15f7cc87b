"""Module entrypoint for ``python -m axdecomp``.

A thin wrapper around :func:`axdecomp.cli.main`: the CLI return code becomes the process exit
status through ``SystemExit``. Equivalent to the ``axdecomp`` console script.
"""

from __future__ import annotations

from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())
