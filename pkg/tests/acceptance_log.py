RESULTS: list[str] = []


def record(number: str, name: str, passed: bool, detail: str = "") -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] {number} {name}"
    if detail:
        line += f": {detail}"
    RESULTS.append(line)
    print(line)
