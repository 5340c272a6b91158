"""Command-line front end: run sweeps and analyses, emit CSV/JSON artifacts.

Commands: ``sweep`` (error-rate Monte Carlo), ``sensitivity`` (peak output vs
CFO per root), ``profile`` (full lag/CFO correlator profile), ``bound``
(worst-case peak bound and loss in dB), ``trial`` (single-trial debug dump).

Numeric flags accept comma lists (``-14,-12,0``) and ranges
(``lo..hi`` or ``lo..hi:step``).  A flat ``key = value`` config file can
supply any flag; explicit flags override the file, the file overrides the
built-in defaults.  Every CSV gets a sidecar ``*.manifest.txt`` recording the
resolved configuration, enough to reproduce the CSV byte for byte.

Exit codes: 0 success, 2 usage error, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import datetime
import json
import re
import secrets
import sys
from pathlib import Path

from . import __version__
from .closed_form import (
    OffsetGrid,
    closed_form_corr,
    energy_loss_db,
    min_peak_bound,
    sensitivity_sweep,
)
from .simulate import SimConfig, run_sweep, run_trial, _trial_rng
from .estimators import SCHEMES

_USAGE_ERROR = 2


def _parse_number_list(text: str, *, as_int: bool = False, default_step=None) -> list:
    """Parse '1,2,3' or 'lo..hi' or 'lo..hi:step' into a list of numbers."""
    text = text.strip()
    if ".." in text:
        span, _, step_s = text.partition(":")
        lo_s, _, hi_s = span.partition("..")
        lo, hi = float(lo_s), float(hi_s)
        if step_s:
            step = float(step_s)
        elif default_step is not None:
            step = float(default_step)
        else:
            step = 1.0
        if step <= 0:
            raise ValueError(f"range step must be positive in {text!r}")
        if hi < lo:
            raise ValueError(f"empty range {text!r}")
        out = []
        v = lo
        i = 0
        while v <= hi + 1e-9:
            out.append(v)
            i += 1
            v = lo + i * step
    else:
        out = [float(tok) for tok in text.split(",") if tok.strip() != ""]
        if not out:
            raise ValueError(f"no values in {text!r}")
    if as_int:
        ints = []
        for v in out:
            if abs(v - round(v)) > 1e-9:
                raise ValueError(f"expected integers, got {v} in {text!r}")
            ints.append(int(round(v)))
        return ints
    return out


def _read_config_file(path: str) -> dict[str, str]:
    """Flat 'key = value' file; '#' starts a comment, blank lines ignored."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip().replace("_", "-")] = value.strip()
    return values


def _resolve(args, defaults: dict[str, object]) -> dict[str, object]:
    """Merge built-in defaults, config-file values and explicit flags."""
    file_vals: dict[str, str] = {}
    if getattr(args, "config", None):
        file_vals = _read_config_file(args.config)
    resolved = dict(defaults)
    for key in defaults:
        if key in file_vals:
            resolved[key] = file_vals[key]
    for key in defaults:
        flag_val = getattr(args, key.replace("-", "_"), None)
        if flag_val is not None:
            resolved[key] = flag_val
    return resolved


def _format_number(v) -> str:
    """Shortest round-trip decimal for floats; plain digits for ints."""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    # rows are fully materialized before writing: no partial file on failure
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_number(v) if not isinstance(v, str) else v for v in row))
    path.write_text("\n".join(lines) + "\n")


def _write_manifest(path: Path, command: str, artifact: Path, resolved: dict) -> None:
    lines = [
        f"command = {command}",
        f"artifact = {artifact.name}",
        f"tool_version = {__version__}",
        f"created_utc = {datetime.datetime.now(datetime.timezone.utc).isoformat()}",
    ]
    for key in sorted(resolved):
        v = resolved[key]
        if isinstance(v, (list, tuple)):
            v = ",".join(_format_number(x) if not isinstance(x, str) else x for x in v)
        elif isinstance(v, (int, float, bool)):
            v = _format_number(v)
        lines.append(f"{key} = {v}")
    path.write_text("\n".join(lines) + "\n")


def _pick_seed(value) -> int:
    """Explicit seed, or a fresh random one that is printed and recorded."""
    if value is not None:
        return int(value)
    seed = secrets.randbelow(2**32)
    print(f"seed = {seed}")
    return seed


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="master seed; random (and printed) if omitted")
    parser.add_argument("--out", default=None, help="output directory (default: current directory)")
    parser.add_argument("--config", default=None, help="flat key=value config file")


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zcsync", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="Monte Carlo error-rate sweep over SNR")
    _add_common(sweep)
    sweep.add_argument("--trials", type=int, default=None)
    sweep.add_argument(
        "--snr",
        default=None,
        help="SNR grid in dB, list or lo..hi:step; use --snr=-20..0:2 for leading minus",
    )
    sweep.add_argument("--scheme", default=None, help=f"comma list from {', '.join(SCHEMES)}")
    sweep.add_argument("--max-cfo-hz", type=float, default=None)
    sweep.add_argument("--n", type=int, default=None, help="sync sequence length")
    sweep.add_argument("--root", type=int, default=None)
    sweep.add_argument("--kd", type=int, default=None, help="differential correlator lag")
    sweep.add_argument("--jobs", type=int, default=None, help="parallel workers (joblib)")

    sens = sub.add_parser("sensitivity", help="peak correlator output vs CFO per root")
    _add_common(sens)
    sens.add_argument("--roots", default=None, help="comma list of roots")
    sens.add_argument("--dlam", default=None, help="normalized CFO grid, list or lo..hi:step")
    sens.add_argument("--n", type=int, default=None)

    prof = sub.add_parser("profile", help="correlator magnitude over (CFO, lag) grid")
    _add_common(prof)
    prof.add_argument("--root", type=int, default=None)
    prof.add_argument("--dlam", default=None, help="normalized CFO values, list or range")
    prof.add_argument("--dk", default=None, help="timing offsets, list or lo..hi")
    prof.add_argument("--n", type=int, default=None)

    bound = sub.add_parser("bound", help="worst-case peak bound and energy loss")
    _add_common(bound)
    bound.add_argument("--n", type=int, default=None)
    bound.add_argument("--dlam-max", type=float, default=None)

    trial = sub.add_parser("trial", help="single-trial debug dump (JSON)")
    _add_common(trial)
    trial.add_argument("--snr", type=float, default=None, help="SNR in dB")
    trial.add_argument("--scheme", default=None)
    trial.add_argument("--max-cfo-hz", type=float, default=None)
    trial.add_argument("--n", type=int, default=None)
    trial.add_argument("--root", type=int, default=None)
    trial.add_argument("--kd", type=int, default=None)
    trial.add_argument("--trial-index", type=int, default=None)
    return p


def _cmd_sweep(args, parser) -> int:
    defaults = {
        "trials": 2000,
        "snr": "-14..0:2",
        "scheme": "conjugated_pair,diff_single,diff_averaged_pair",
        "max-cfo-hz": 40000.0,
        "n": 131,
        "root": 1,
        "kd": 1,
        "jobs": 1,
        "seed": None,
        "out": ".",
    }
    r = _resolve(args, defaults)
    try:
        trials = int(r["trials"])
        if trials < 1:
            raise ValueError("--trials must be >= 1")
        snr_list = _parse_number_list(str(r["snr"]), default_step=2.0)
        schemes = tuple(s.strip() for s in str(r["scheme"]).split(",") if s.strip())
        seed = _pick_seed(r["seed"])
        cfg = SimConfig(
            n_len=int(r["n"]),
            root=int(r["root"]),
            max_cfo_hz=float(r["max-cfo-hz"]),
            snr_db_list=tuple(snr_list),
            n_trials=trials,
            schemes=schemes,
            diff_distance=int(r["kd"]),
            seed=seed,
        )
        jobs = int(r["jobs"])
    except ValueError as exc:
        parser.error(str(exc))

    result = run_sweep(cfg, n_jobs=jobs)
    out_dir = Path(str(r["out"]))
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "sweep.csv"
    rows = [
        [row.snr_db, row.scheme, row.error_rate, row.errors, row.n_trials, row.wilson_lo, row.wilson_hi]
        for row in result.rows
    ]
    _write_csv(csv_path, ["snr_db", "scheme", "error_rate", "errors", "trials", "wilson_lo", "wilson_hi"], rows)
    resolved = {
        "trials": trials,
        "snr": snr_list,
        "scheme": ",".join(schemes),
        "max-cfo-hz": cfg.max_cfo_hz,
        "n": cfg.n_len,
        "root": cfg.root,
        "kd": cfg.diff_distance,
        "jobs": jobs,
        "seed": seed,
        "period-samples": cfg.period_samples,
        "sample-rate-hz": cfg.sample_rate_hz,
        "subcarrier-spacing-hz": cfg.subcarrier_spacing_hz,
        "error-threshold-s": cfg.error_threshold_s,
    }
    _write_manifest(out_dir / "sweep.manifest.txt", "sweep", csv_path, resolved)
    print(f"wrote {csv_path} ({len(rows)} rows)")
    return 0


def _cmd_sensitivity(args, parser) -> int:
    defaults = {"roots": "1", "dlam": "0..32:0.5", "n": 131, "seed": None, "out": "."}
    r = _resolve(args, defaults)
    try:
        roots = _parse_number_list(str(r["roots"]), as_int=True)
        dlam = _parse_number_list(str(r["dlam"]), default_step=0.5)
        n_len = int(r["n"])
        curves = sensitivity_sweep(roots, dlam, n_len)
    except ValueError as exc:
        parser.error(str(exc))

    out_dir = Path(str(r["out"]))
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "sensitivity.csv"
    rows = []
    for curve, root in zip(curves, roots):
        for d, z in zip(curve.dlam, curve.z_max):
            rows.append([d, root, z])
    _write_csv(csv_path, ["dlam", "root", "z_max"], rows)
    _write_manifest(
        out_dir / "sensitivity.manifest.txt",
        "sensitivity",
        csv_path,
        {"roots": roots, "dlam": dlam, "n": n_len},
    )
    print(f"wrote {csv_path} ({len(rows)} rows)")
    return 0


def _cmd_profile(args, parser) -> int:
    defaults = {"root": 1, "dlam": "32", "dk": "-40..40", "n": 131, "seed": None, "out": "."}
    r = _resolve(args, defaults)
    try:
        root = int(r["root"])
        n_len = int(r["n"])
        grid = OffsetGrid(
            dk_values=_parse_number_list(str(r["dk"]), as_int=True),
            dlam_values=_parse_number_list(str(r["dlam"]), default_step=0.5),
        )
        if not 0 <= root < n_len:
            raise ValueError(f"--root must be in [0, {n_len - 1}]")
    except ValueError as exc:
        parser.error(str(exc))

    a2 = root / n_len
    rows = [
        [d, k, closed_form_corr(k, d, a2, n_len)]
        for d in grid.dlam_values
        for k in grid.dk_values
    ]
    out_dir = Path(str(r["out"]))
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "profile.csv"
    _write_csv(csv_path, ["dlam", "dk", "z"], rows)
    _write_manifest(
        out_dir / "profile.manifest.txt",
        "profile",
        csv_path,
        {"root": root, "dlam": dlam, "dk": dk, "n": n_len},
    )
    print(f"wrote {csv_path} ({len(rows)} rows)")
    return 0


def _cmd_bound(args, parser) -> int:
    defaults = {"n": 131, "dlam-max": 32.0, "seed": None, "out": "."}
    r = _resolve(args, defaults)
    try:
        n_len = int(r["n"])
        dlam_max = float(r["dlam-max"])
        if dlam_max < 0:
            raise ValueError("--dlam-max must be >= 0")
        payload = {
            "n": n_len,
            "dlam_max": dlam_max,
            "min_peak_bound": min_peak_bound(dlam_max, n_len),
            "energy_loss_db": energy_loss_db(dlam_max, n_len),
        }
    except ValueError as exc:
        parser.error(str(exc))
    print(json.dumps(payload))
    return 0


def _cmd_trial(args, parser) -> int:
    defaults = {
        "snr": 0.0,
        "scheme": "conjugated_pair",
        "max-cfo-hz": 40000.0,
        "n": 131,
        "root": 1,
        "kd": 1,
        "trial-index": 0,
        "seed": None,
        "out": ".",
    }
    r = _resolve(args, defaults)
    try:
        seed = _pick_seed(r["seed"])
        scheme = str(r["scheme"])
        cfg = SimConfig(
            n_len=int(r["n"]),
            root=int(r["root"]),
            max_cfo_hz=float(r["max-cfo-hz"]),
            snr_db_list=(float(r["snr"]),),
            n_trials=1,
            schemes=(scheme,),
            diff_distance=int(r["kd"]),
            seed=seed,
        )
        t_idx = int(r["trial-index"])
    except ValueError as exc:
        parser.error(str(exc))

    res = run_trial(cfg, float(r["snr"]), _trial_rng(seed, 0, t_idx), scheme)
    print(
        json.dumps(
            {
                "seed": seed,
                "trial_index": t_idx,
                "snr_db": float(r["snr"]),
                "scheme": scheme,
                "true_delay": res.true_delay,
                "estimate": res.estimate,
                "cfo_hz": res.cfo_hz,
                "is_error": res.is_error,
            }
        )
    )
    return 0


_COMMANDS = {
    "sweep": _cmd_sweep,
    "sensitivity": _cmd_sensitivity,
    "profile": _cmd_profile,
    "bound": _cmd_bound,
    "trial": _cmd_trial,
}


# flags whose values may start with '-' (ranges like -40..40); argparse would
# otherwise read them as option strings, so glue flag and value together
_LEADING_DASH_FLAGS = {"--snr", "--dk", "--dlam", "--roots", "--dlam-max", "--max-cfo-hz"}


def _normalize_argv(argv) -> list[str]:
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (
            tok in _LEADING_DASH_FLAGS
            and i + 1 < len(argv)
            and re.match(r"^-[\d.]", argv[i + 1])
        ):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = _build_parser()
    args = parser.parse_args(_normalize_argv(argv))
    try:
        return _COMMANDS[args.command](args, parser)
    except SystemExit:
        raise
    except Exception as exc:  # runtime failure, distinct from usage errors
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
