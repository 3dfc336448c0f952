"""Stand-in child process speaking the runner protocol.

Loads the solution file, calls the entry point named in the input bundle
with the bundle's positional arguments and prints one status line last.
Exit codes: 0 ok, 3 entry point missing, 4 exception, 5 unreadable input.
"""
import argparse
import hashlib
import json
import runpy
import sys
import traceback

PREFIX = "PELLI-SHIM:"


def emit(code, entry_point_found, exception=None, digest=None):
    status = {
        "ok": code == 0,
        "entry_point_found": entry_point_found,
        "exception": exception,
        "result_digest": digest,
    }
    sys.stdout.write("\n" + PREFIX + json.dumps(status, sort_keys=True) + "\n")
    sys.stdout.flush()
    sys.exit(code)


def describe(exc):
    return {"type": type(exc).__name__, "message": str(exc)[:500]}


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--solution", required=True)
    parser.add_argument("--task", required=True)
    parser.add_argument("--input", required=True)
    args = parser.parse_args()
    try:
        with open(args.input, encoding="utf-8") as fh:
            bundle = json.load(fh)
        entry = bundle["entry_point"]
        call_args = list(bundle["args"])
    except (OSError, ValueError, KeyError, TypeError):
        emit(5, False)
    try:
        namespace = runpy.run_path(args.solution, run_name="pelli_solution")
    except Exception as exc:  # solution failed while loading
        traceback.print_exc()
        emit(4, False, describe(exc))
    func = namespace.get(entry)
    if not callable(func):
        emit(3, False)
    try:
        result = func(*call_args)
    except Exception as exc:
        traceback.print_exc()
        emit(4, True, describe(exc))
    digest = hashlib.sha256(repr(result).encode("utf-8", "replace")).hexdigest()
    emit(0, True, digest=digest)


if __name__ == "__main__":
    main()
