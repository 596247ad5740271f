#!/usr/bin/env python3
"""Runs every logprose subcommand and validates its JSON output against schemas/.

usage: validate_schemas.py <logprose binary> <schemas dir> <fixtures dir>
"""

import csv
import json
import random
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

FAST_CONFIG = {"learn": {"embedding": {"dimension": 8, "epochs": 2}, "rf": {"n_trees": 5}, "folds": 3}}

SUBJECTS = "region table snapshot replica segment client session quota index tablet".split()
VERBS = "flushed opened closed assigned recovered compacted rejected scheduled expired moved".split()


def write_labeled_csv(path, n, seed):
    rng = random.Random(seed)
    with open(path, "w", newline="") as f:
        out = csv.writer(f)
        out.writerow(["message", "level", "structure", "information", "wording"])
        for _ in range(n):
            s, v = rng.choice(SUBJECTS), rng.choice(VERBS)
            labels = [1, 1, 1]
            shape = rng.randrange(6)
            if shape == 0:
                msg, labels[1] = f"{s} {v}", 0
            elif shape == 1:
                msg, labels[0] = f"{s} {v} {{}} {{}} {{}}", 0
            elif shape == 2:
                msg, labels[2] = f"{s} {v} NOW!!!", 0
            else:
                msg = f"{s} {v} after retry, {s}: {{}}, took: {{}} ms"
            out.writerow([msg, rng.choice(["debug", "info", "warn", "error"]), *labels])


class Runner:
    def __init__(self, binary, schemas):
        self.binary = binary
        self.schemas = schemas
        self.failures = []

    def schema(self, name):
        return json.loads((self.schemas / f"{name}.schema.json").read_text())

    def run(self, args, codes=(0,)):
        proc = subprocess.run([self.binary, *args], capture_output=True, text=True)
        if proc.returncode not in codes:
            self.failures.append(f"{' '.join(args)}: exit {proc.returncode}\n{proc.stderr}")
            return None
        return proc.stdout

    def check(self, label, document, schema_name):
        try:
            jsonschema.validate(document, self.schema(schema_name))
            print(f"ok    {label}")
        except jsonschema.ValidationError as e:
            self.failures.append(f"{label}: {e.message} at {list(e.absolute_path)}")
            print(f"FAIL  {label}")

    def check_output(self, label, args, schema_name, codes=(0,)):
        text = self.run(args, codes)
        if text is not None:
            self.check(label, json.loads(text), schema_name)


def main():
    binary, schemas, fixtures = sys.argv[1], Path(sys.argv[2]), sys.argv[3]
    for p in schemas.glob("*.schema.json"):
        jsonschema.Draft202012Validator.check_schema(json.loads(p.read_text()))

    r = Runner(binary, schemas)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        config = tmp / "fast.json"
        config.write_text(json.dumps(FAST_CONFIG))
        labeled = tmp / "labeled.csv"
        write_labeled_csv(labeled, 90, 3)

        r.check_output("scan", ["scan", fixtures], "scan", codes=(1,))

        text = r.run(["extract", fixtures])
        if text is not None:
            lines = [line for line in text.splitlines() if line]
            for i, line in enumerate(lines):
                r.check(f"extract record {i}", json.loads(line), "extract-record")

        for kind in ("dt", "rf", "lr"):
            model = tmp / f"{kind}.json"
            r.check_output(f"train {kind}", ["--config", str(config), "train", "--aspect", "wording", "--model", kind,
                                             "--out", str(model), str(labeled)], "train")
            if model.exists():
                r.check(f"{kind} model file", json.loads(model.read_text()), "model")
                r.check_output(f"classify {kind}", ["classify", "--model", str(model), fixtures], "classify")
        embedding = tmp / "rf.embedding.json"
        if embedding.exists():
            r.check("embedding file", json.loads(embedding.read_text()), "embedding")
        r.check_output("classify --message", ["classify", "--model", str(tmp / "rf.json"), "--message",
                                               "region moved NOW!!!", "--level", "warn"], "classify")

        r.check_output("evaluate", ["--config", str(config), "evaluate", str(labeled)], "evaluate")
        r.check_output("sample", ["sample", "1316", "2619", "413"], "sample")

        a, b = tmp / "a.txt", tmp / "b.txt"
        a.write_text("adequate\ninadequate\nadequate\ninadequate\n")
        b.write_text("adequate\ninadequate\ninadequate\ninadequate\n")
        r.check_output("kappa", ["kappa", str(a), str(b)], "kappa")

        scan_out = tmp / "scan.json"
        r.run(["--out", str(scan_out), "scan", fixtures], codes=(1,))
        r.check_output("stats from scan", ["stats", str(scan_out)], "stats")
        r.check_output("stats from csv", ["stats", str(labeled)], "stats")

    for f in r.failures:
        print(f, file=sys.stderr)
    return 1 if r.failures else 0


if __name__ == "__main__":
    sys.exit(main())
