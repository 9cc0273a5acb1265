"""Print the measured constants next to the values pinned in the fixtures file."""

import sys

from affwave.oracles import load_fixtures
from affwave.verify import measure_constants


def main() -> int:
    pinned = load_fixtures()
    for item in measure_constants():
        now = complex(item["re"], item["im"])
        old = pinned.get(item["name"])
        was = complex(old["re"], old["im"]) if old else None
        drift = abs(now - was) if was is not None else float("nan")
        print(f"{item['name']:32s} {now.real:+.12e} {now.imag:+.12e}  drift {drift:.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
