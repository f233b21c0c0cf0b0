#!/usr/bin/env python3
"""End-to-end checks of the CLI surface: subcommands, files, exit codes."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

CLI = sys.argv[1]
failures = 0


def run(*args, expect=0):
    global failures
    proc = subprocess.run([CLI, *args], capture_output=True, text=True)
    if proc.returncode != expect:
        failures += 1
        print(f"FAIL: {' '.join(args)} -> exit {proc.returncode}, expected {expect}")
        print(proc.stderr[-500:])
    return proc


def check(cond, label):
    global failures
    if not cond:
        failures += 1
        print(f"FAIL: {label}")


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)

    scene = {
        "width": 2,
        "height": 2,
        "layers": [
            {"depth": 1.5, "amplitude": 0.6},
            {"depth": 6.0, "amplitude": 0.3},
        ],
    }
    scene_path = tmp / "scene.json"
    scene_path.write_text(json.dumps(scene))

    # simulate -> cube + sidecar
    cube_path = tmp / "cube.csv"
    run("simulate", "--scene", str(scene_path), "--out", str(cube_path),
        "--harmonics", "33", "--noise-sigma", "0.01", "--seed", "5")
    check(cube_path.exists(), "cube CSV written")
    check((tmp / "cube.csv.meta.json").exists(), "cube sidecar written")
    header = cube_path.read_text().splitlines()[0]
    check(header == "pixel_x,pixel_y,harmonic,re,im", f"cube header: {header}")
    meta = json.loads((tmp / "cube.csv.meta.json").read_text())
    check(meta["plan"]["harmonic_count"] == 33, "sidecar harmonic count")

    # decompose the cube
    maps_dir = tmp / "maps"
    run("decompose", "--cube", str(cube_path), "--out", str(maps_dir),
        "--grid-size", "256", "--k", "2")
    for name in ["depth_1.csv", "amplitude_2.csv", "baseline_depth.csv", "histogram.csv",
                 "report.json", "metadata.json"]:
        check((maps_dir / name).exists(), f"decompose output {name}")

    # end-to-end run with trace
    run_dir = tmp / "run"
    run("run", "--scene", str(scene_path), "--out", str(run_dir), "--harmonics", "33",
        "--grid-size", "256", "--k", "2", "--debug-trace")
    check((run_dir / "trace.csv").exists(), "solver trace written")
    report = json.loads((run_dir / "report.json").read_text())
    check(not report["no_signal"], "run reports signal")

    # histogram from a maps directory
    hist_path = tmp / "hist.csv"
    run("histogram", "--maps", str(run_dir), "--out", str(hist_path), "--harmonic", "2",
        "--bins", "32")
    lines = hist_path.read_text().splitlines()
    check(lines[0] == "series,bin_index,bin_center,count", "histogram header")
    check(len(lines) == 1 + 32 * 3, f"histogram rows: {len(lines)}")

    # reproduce, tiny
    rep_dir = tmp / "rep"
    run("reproduce", "--out", str(rep_dir), "--seed", "9")
    check((rep_dir / "summary.json").exists(), "reproduce summary written")
    summary = json.loads((rep_dir / "summary.json").read_text())
    check(summary["right_half"]["components"][2]["pixel_count"] == 0,
          "right-half third component absent")

    # exit codes: 2 for config errors, 3 for data errors
    run("run", "--scene", str(scene_path), "--out", str(tmp / "x"), "--harmonics", "33",
        "--grid-size", "16", expect=2)  # insufficient oversampling
    bad_scene = tmp / "bad.json"
    bad_scene.write_text(json.dumps({
        "width": 1, "height": 1,
        "layers": [{"depth": 1.0, "amplitude": 1.7}],
    }))
    run("simulate", "--scene", str(bad_scene), "--out", str(tmp / "y.csv"), expect=3)
    run("simulate", "--scene", str(tmp / "missing.json"), "--out", str(tmp / "z.csv"),
        expect=3)
    run("nonsense-subcommand", expect=2)

if failures:
    print(f"{failures} CLI checks failed")
    sys.exit(1)
print("all CLI checks passed")
