"""Writes dsl/generated/*.chart. Each file lists its expected declaration
order per region in `// order` header lines."""
import random
from pathlib import Path

OUT = Path(__file__).parent / "dsl" / "generated"
WORDS = ["Idle", "Run", "Wait", "Send", "Recv", "Check", "Done", "Fail", "Retry", "Load",
         "Save", "Open", "Close", "Ping", "Ack", "Halt", "Boot", "Scan", "Sync", "Park"]


def region(rng, prefix, depth, headers, owner=""):
    n = rng.randint(1, 9 if depth == 0 else 4)
    names = [f"{prefix}{rng.choice(WORDS)}{i}" for i in range(n)]
    lines = []
    for i, name in enumerate(names):
        flags = []
        if i == 0 and rng.random() < 0.8:
            flags.append("initial")
        if rng.random() < 0.1:
            flags.append("final")
        if rng.random() < 0.1:
            flags.append("connector")
        text = " ".join(flags + ["state", name])
        if depth == 0 and rng.random() < 0.15:
            inner = region(rng, name.lower() + "_", depth + 1, headers, name)
            text += " {\n" + "\n".join("    " + l for l in inner) + "\n}"
        for _ in range(rng.choice([0, 1, 1, 2, 3])):
            text += " -> " + rng.choice(names)
            if rng.random() < 0.4:
                text += f" [g{rng.randint(0, 99)} > 0]"
        if rng.random() < 0.1:
            text += "  // note"
        lines.append(text)
    headers.append((owner, names))
    return lines


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for k in range(50):
        rng = random.Random(1000 + k)
        headers = []
        body = region(rng, "", 0, headers)
        head = []
        for owner, names in reversed(headers):
            label = f"order {owner}:" if owner else "order:"
            head.append(f"// {label} {' '.join(names)}")
        text = "\n".join(head) + f"\nchart Gen{k} {{\n" + "\n".join("    " + l.replace("\n", "\n    ") for l in body) + "\n}\n"
        (OUT / f"gen_{k:02}.chart").write_text(text)


if __name__ == "__main__":
    main()
