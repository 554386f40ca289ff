"""Entry point of `python -m specgwl`"""

import sys

if sys.version_info < (3, 8, 0):
    print("🚫 Error: you must use at least Python version 3.8.0")
    sys.exit(1)
elif __package__ != "specgwl":  # In case they did python __main__.py
    print("🚫 Error: you cannot run this as a script; you must execute as a package")  # fmt: skip
    sys.exit(1)
else:
    try:
        from . import log

        log.init()

        from . import main
    except ModuleNotFoundError as e:  # pragma: no cover
        print(
            "🚫 Error: you have not installed all dependencies correctly.\n"
            f"{str(e)}\n"
            "Install them with: pip install -r requirements.txt"
        )
        sys.exit(1)

    if __name__ == "__main__":
        sys.exit(main.main())
