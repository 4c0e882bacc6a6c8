"""Entry shim executed inside the candidate's interpreter.

Usage: python _shim.py <source.py> <input> <output>

Loads the candidate source, resolves its `solve` function and calls
solve(input_path, output_path).  Any failure prints a traceback to stderr
and exits nonzero; the harness classifies from the exit status and the
output file state.
"""

import sys
import traceback


def main() -> int:
    if len(sys.argv) != 4:
        print("usage: _shim.py SOURCE INPUT OUTPUT", file=sys.stderr)
        return 64
    source_path, input_path, output_path = sys.argv[1:4]
    try:
        with open(source_path, "r", encoding="utf-8") as fh:
            source = fh.read()
        code = compile(source, source_path, "exec")
        namespace = {"__name__": "__candidate__", "__file__": source_path}
        exec(code, namespace)
        solve = namespace.get("solve")
        if not callable(solve):
            print("candidate defines no callable `solve`", file=sys.stderr)
            return 65
        solve(input_path, output_path)
    except SystemExit as exc:
        return int(exc.code or 0)
    except BaseException:
        traceback.print_exc()
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
