"""Command-line front end: synthesis, scattering, propagation, the
Monte-Carlo experiments, capacity calculators, and canned `reproduce`
targets.  Every run writes its outputs plus a JSON manifest capturing the
fully resolved parameters, so any result can be regenerated bit-exactly
with --from-manifest.

Config resolution order: built-in defaults, then a `key = value` config
file (--config), then SOLITONCOMM_<KEY> environment variables, then
explicit command-line flags.  Unknown config keys are rejected.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, capacity, mclab, zs
from .propagator import ChannelSpec, StepSizeError, propagate, propagate_noisy, suggest_steps
from .synthesis import synthesize_reflectionless
from .waveform import (
    WaveformError,
    make_grid,
    read_waveform_csv,
    write_waveform_csv,
)

ENV_PREFIX = "SOLITONCOMM_"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_IO = 4
EXIT_COMPUTE = 5


class ConfigError(ValueError):
    pass


# parameter schema per subcommand: name -> (type, default, help)
SCHEMAS = {
    "synth": {
        "n_samples": (int, 2048, "grid sample count (power of two)"),
        "t_span": (float, 40.0, "time window length"),
        "out": (str, "waveform.csv", "output waveform CSV"),
        "modes_json": (str, "", "JSON file with [[eta,kappa,t,phase],...]"),
    },
    "scatter": {
        "infile": (str, "waveform.csv", "input waveform CSV"),
        "out": (str, "scattering.json", "output scattering-data JSON"),
        "re_min": (float, -2.0, "search rectangle Re lower edge"),
        "re_max": (float, 2.0, "search rectangle Re upper edge"),
        "im_min": (float, 0.01, "search rectangle Im lower edge"),
        "im_max": (float, 0.0, "Im upper edge (0 = auto from peak amplitude)"),
        "coarse_n": (int, 80, "coarse scan grid points per axis"),
        "xi_min": (float, -10.0, "reflection grid lower edge"),
        "xi_max": (float, 10.0, "reflection grid upper edge"),
        "xi_n": (int, 257, "reflection grid points"),
    },
    "propagate": {
        "infile": (str, "waveform.csv", "input waveform CSV"),
        "out": (str, "propagated.csv", "output waveform CSV"),
        "Z": (float, 1.0, "normalized distance"),
        "eps": (float, 0.0, "noise scale (0 = noiseless)"),
        "n_steps": (int, 0, "split steps (0 = auto)"),
        "seed": (int, 12345, "noise seed"),
    },
    "mc-var": {
        "eta": (float, 1.0, "soliton amplitude"),
        "eps": (float, 0.05, "noise scale"),
        "Z": (float, 1.0, "distance"),
        "trials": (int, 2000, "Monte-Carlo trials"),
        "seed": (int, 12345, "experiment seed"),
        "n_samples": (int, 2048, "grid samples"),
        "t_span": (float, 40.0, "window length"),
        "threads": (int, 1, "worker threads"),
        "out": (str, "mc_var.csv", "output CSV"),
    },
    "mc-jitter": {
        "eta": (float, 3.0, "soliton amplitude"),
        "eps": (float, 0.05, "noise scale"),
        "Z_list": (str, "1,2,3,4", "comma-separated distances"),
        "trials": (int, 1000, "trials per distance"),
        "seed": (int, 12345, "experiment seed"),
        "n_samples": (int, 512, "grid samples"),
        "t_span": (float, 20.0, "window length"),
        "threads": (int, 1, "worker threads"),
        "out": (str, "mc_jitter.csv", "output CSV"),
    },
    "mc-gain": {
        "eta1": (float, 2.0, "first mode amplitude"),
        "eta2": (float, 1.0, "second mode amplitude"),
        "separations": (str, "0,1,2,3,5,10", "comma-separated position offsets"),
        "eps": (float, 0.05, "noise scale"),
        "Z": (float, 0.5, "distance"),
        "trials": (int, 600, "trials per separation"),
        "seed": (int, 12345, "experiment seed"),
        "n_samples": (int, 1024, "grid samples"),
        "t_span": (float, 40.0, "window length"),
        "threads": (int, 1, "worker threads"),
        "out": (str, "mc_gain.csv", "output CSV"),
    },
    "link": {
        "eta_min": (float, 1.0, "amplitude interval lower edge"),
        "eta_max": (float, 2.0, "amplitude interval upper edge"),
        "eps": (float, 0.05, "noise scale"),
        "Z": (float, 1.0, "distance"),
        "symbols": (int, 2000, "transmitted symbols"),
        "seed": (int, 12345, "experiment seed"),
        "n_samples": (int, 1024, "grid samples"),
        "t_span": (float, 40.0, "window length"),
        "out": (str, "link.csv", "output CSV"),
    },
    "ba": {
        "eta_min": (float, 1.0, "input interval lower edge"),
        "eta_max": (float, 2.0, "input interval upper edge"),
        "sigma": (float, 0.1, "noise std at eta=1"),
        "n_x": (int, 200, "input grid points"),
        "n_y": (int, 1200, "output grid points"),
        "zero_atom": (int, 0, "1 = include the no-soliton input"),
        "tol": (float, 1e-8, "per-iteration capacity-change tolerance"),
        "out": (str, "ba_prior.csv", "capacity-achieving prior CSV"),
    },
    "modgain": {
        "eta_max": (float, 2.0, "amplitude interval upper edge"),
        "sigma_eff_list": (str, "0.05,0.1,0.2,0.3", "comma-separated sigma_eff sweep"),
        "C_spacing": (float, 7.0, "inter-symbol spacing factor"),
        "alpha": (float, 1.0, "intra-symbol spacing factor"),
        "Z": (float, 1.0, "distance (fixes eps from sigma_eff)"),
        "curve_points": (int, 200, "eta_min samples per curve"),
        "out": (str, "modgain.csv", "output CSV"),
    },
    "reproduce": {
        "target": (str, "ba-figure", "one of: ba-figure, modgain-figures, "
                   "variance-gain-figure, jitter-figure, variance-laws"),
        "outdir": (str, ".", "output directory"),
        "trials": (int, 0, "Monte-Carlo trials override (0 = target default)"),
        "seed": (int, 12345, "experiment seed"),
        "threads": (int, 1, "worker threads"),
    },
}

OUTPUT_COLUMNS = {
    "synth": "waveform CSV: t,re,im",
    "scatter": "scattering JSON: modes[{zeta_re,zeta_im,b_re,b_im,c_re,c_im,t_pos}],xi,r_re,r_im",
    "propagate": "waveform CSV: t,re,im",
    "mc-var": "CSV: quantity,mean,var,std_error,analytic  (per recovered quantity)",
    "mc-jitter": "CSV: Z,var_t,std_error,analytic_cubic,analytic_total,lost  (+ slope printed)",
    "mc-gain": "CSV: separation,gain_eta1,gain_eta2,corr,se_eta1,se_eta2,lost",
    "link": "CSV: eta_in,eta_out  (+ mutual information printed)",
    "ba": "CSV: eta,prob  (capacity-achieving prior; capacity printed)",
    "modgain": "CSV: eta_min,sigma_eff,gain_single,gain_off,gain_2bound,gain_ntrain",
    "reproduce": "target-dependent CSVs in --outdir (see README)",
}


def load_config(path: str, schema: dict) -> dict:
    """Parse a `key = value` config file against a subcommand schema;
    unknown keys are rejected by name."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in schema:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        typ = schema[key][0]
        try:
            values[key] = typ(val.strip())
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def _env_overrides(schema: dict) -> dict:
    values = {}
    for key, (typ, _default, _help) in schema.items():
        env = ENV_PREFIX + key.upper().replace("-", "_")
        if env in os.environ:
            try:
                values[key] = typ(os.environ[env])
            except ValueError as exc:
                raise ConfigError(f"bad value in ${env}: {exc}") from exc
    return values


def resolve_params(command: str, flag_values: dict, config_path: str | None) -> dict:
    schema = SCHEMAS[command]
    params = {k: default for k, (_t, default, _h) in schema.items()}
    if config_path:
        params.update(load_config(config_path, schema))
    params.update(_env_overrides(schema))
    params.update({k: v for k, v in flag_values.items() if v is not None})
    return params


def _write_csv(path, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(
                ",".join(repr(float(v)) if isinstance(v, float) else str(v) for v in row)
            )
            fh.write("\n")


def write_manifest(command: str, params: dict, outputs, duration: float) -> str:
    """JSON record from which the run can be reproduced bit-exactly."""
    manifest = {
        "command": command,
        "params": params,
        "seed": params.get("seed"),
        "version": __version__,
        "duration_s": round(duration, 3),
        "outputs": list(outputs),
    }
    base = outputs[0] if outputs else f"{command}.out"
    path = os.path.splitext(base)[0] + ".manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return path


def _parse_float_list(text: str):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad numeric list {text!r}: {exc}") from exc


# ---------------------------------------------------------------- commands


def cmd_synth(p: dict, mode_flags) -> list:
    grid = make_grid(p["n_samples"], p["t_span"])
    modes = []
    for spec in mode_flags or []:
        vals = _parse_float_list(spec)
        if len(vals) != 4:
            raise ConfigError(f"--mode needs eta,kappa,t,phase; got {spec!r}")
        eta, kappa, t, phase = vals
        modes.append((complex(kappa / 2.0, eta / 2.0), t, phase))
    if p["modes_json"]:
        with open(p["modes_json"], encoding="utf-8") as fh:
            for eta, kappa, t, phase in json.load(fh):
                modes.append((complex(kappa / 2.0, eta / 2.0), t, phase))
    if not modes:
        raise ConfigError("synth needs at least one --mode or a --modes-json file")
    w = synthesize_reflectionless(grid, modes)
    write_waveform_csv(w, p["out"])
    return [p["out"]]


def cmd_scatter(p: dict) -> list:
    w = read_waveform_csv(p["infile"])
    im_max = p["im_max"] if p["im_max"] > 0 else None
    rect = None
    if im_max is not None:
        rect = zs.SearchRect(p["re_min"], p["re_max"], p["im_min"], im_max)
    xi = np.linspace(p["xi_min"], p["xi_max"], p["xi_n"])
    sd = zs.scatter_waveform(w, xi_grid=xi, search=rect, coarse_n=p["coarse_n"])
    with open(p["out"], "w", encoding="utf-8") as fh:
        fh.write(zs.scattering_data_to_json(sd))
        fh.write("\n")
    for m in sd.modes:
        print(f"mode: zeta={m.zeta:.8f} eta={m.eta():.6f} kappa={m.kappa():.6f} t={m.t_pos:.6f}")
    return [p["out"]]


def cmd_propagate(p: dict) -> list:
    w = read_waveform_csv(p["infile"])
    if p["eps"] > 0:
        spec = ChannelSpec(Z=p["Z"], eps=p["eps"], n_steps=p["n_steps"], seed=p["seed"])
        out = propagate_noisy(w, spec)
    else:
        out = propagate(w, p["Z"], p["n_steps"])
    write_waveform_csv(out, p["out"])
    return [p["out"]]


def cmd_mc_var(p: dict) -> list:
    grid = make_grid(p["n_samples"], p["t_span"])
    stats = mclab.mc_eigenvalue_fluctuations(
        p["eta"], p["eps"], p["Z"], p["trials"], p["seed"],
        grid=grid, n_threads=p["threads"],
    )
    analytic = {
        "eta": mclab.analytic_amp_var(p["eta"], p["eps"], p["Z"]),
        "kappa": mclab.analytic_vel_var(p["eta"], p["eps"], p["Z"]),
        "t": mclab.analytic_timing_var_total(p["eta"], p["eps"], p["Z"]),
    }
    rows = [
        (
            name,
            float(stats.sample_mean[name][0]),
            float(stats.sample_var[name][0]),
            float(stats.std_error[name][0]),
            analytic[name],
        )
        for name in mclab.QUANTITIES
    ]
    _write_csv(p["out"], "quantity,mean,var,std_error,analytic", rows)
    print(f"kept {stats.n_kept}/{stats.n_trials} trials (lost {stats.lost_trials})")
    for name, _m, v, se, an in rows:
        print(f"var({name}) = {v:.6e}  analytic {an:.6e}  (se {se:.2e})")
    return [p["out"]]


def cmd_mc_jitter(p: dict) -> list:
    grid = make_grid(p["n_samples"], p["t_span"])
    Z_list = _parse_float_list(p["Z_list"])
    stats_list, slope = mclab.mc_timing_jitter(
        p["eta"], p["eps"], Z_list, p["trials"], p["seed"],
        grid=grid, n_threads=p["threads"],
    )
    rows = []
    for Z, st in zip(Z_list, stats_list):
        rows.append(
            (
                Z,
                float(st.sample_var["t"][0]),
                float(st.std_error["t"][0]),
                mclab.analytic_timing_var(p["eta"], p["eps"], Z),
                mclab.analytic_timing_var_total(p["eta"], p["eps"], Z),
                st.lost_trials,
            )
        )
    _write_csv(p["out"], "Z,var_t,std_error,analytic_cubic,analytic_total,lost", rows)
    print(f"log-log slope of var(t) vs Z: {slope:.3f}")
    return [p["out"]]


def cmd_mc_gain(p: dict) -> list:
    grid = make_grid(p["n_samples"], p["t_span"])
    rows_out = []
    rows = mclab.mc_variance_gain(
        p["eta1"], p["eta2"], _parse_float_list(p["separations"]),
        p["eps"], p["Z"], p["trials"], p["seed"],
        grid=grid, n_threads=p["threads"],
    )
    for r in rows:
        rows_out.append(
            (r.separation, r.gain[0], r.gain[1], r.corr, r.gain_se[0], r.gain_se[1], r.lost_trials)
        )
        print(
            f"sep={r.separation:5.2f}  gain1={r.gain[0]:.3f} gain2={r.gain[1]:.3f} "
            f"corr={r.corr:+.3f}  lost={r.lost_trials}"
        )
    _write_csv(
        p["out"], "separation,gain_eta1,gain_eta2,corr,se_eta1,se_eta2,lost", rows_out
    )
    return [p["out"]]


def cmd_link(p: dict) -> list:
    grid = make_grid(p["n_samples"], p["t_span"])
    res = mclab.mc_link_experiment(
        (p["eta_min"], p["eta_max"]), p["eps"], p["Z"], p["symbols"], p["seed"],
        grid=grid,
    )
    _write_csv(p["out"], "eta_in,eta_out",
               [(float(a), float(b)) for a, b in zip(res.eta_in, res.eta_out)])
    bound = capacity.spectral_efficiency_bound(
        p["eta_max"] - p["eta_min"], p["eta_max"], p["eps"], p["Z"]
    )
    print(
        f"MI estimate {res.mi_bits:.3f} bits ({res.n_bins} bins), "
        f"analytic lower bound {bound:.3f} bits, lost {res.lost_trials}"
    )
    return [p["out"]]


def cmd_ba(p: dict) -> list:
    ch = capacity.build_sqrt_mult_channel(
        p["eta_min"], p["eta_max"], p["sigma"], p["n_x"], p["n_y"],
        include_zero_atom=bool(p["zero_atom"]),
    )
    cap_bits, prior = capacity.blahut_arimoto(ch, tol=p["tol"])
    _write_csv(p["out"], "eta,prob",
               [(float(x), float(r)) for x, r in zip(ch.x_grid, prior)])
    ydist = prior @ ch.W
    ypath = os.path.splitext(p["out"])[0] + "_output.csv"
    _write_csv(ypath, "y,prob", [(float(y), float(q)) for y, q in zip(ch.y_grid, ydist)])
    bound = capacity.spectral_efficiency_bound(
        p["eta_max"] - p["eta_min"], p["eta_max"], p["sigma"], 1.0
    )
    print(f"capacity={cap_bits:.4f} bits  analytic lower bound={bound:.4f} bits")
    return [p["out"], ypath]


def cmd_modgain(p: dict) -> list:
    rows = []
    eta_max = p["eta_max"]
    x_grid = np.linspace(0.0, eta_max, p["curve_points"] + 2)[1:-1]
    C, alpha = p["C_spacing"], p["alpha"]
    for s_eff in _parse_float_list(p["sigma_eff_list"]):
        # eps realizing this sigma_eff at the configured Z
        eps = s_eff / np.sqrt(np.pi * np.e * eta_max * p["Z"])
        sj = capacity.sigma_jitter(eta_max, eps, p["Z"])
        for x in x_grid:
            L = np.log2((eta_max - x) / s_eff)
            g1 = max(0.0, x / eta_max * L)
            goff = x / eta_max * np.log2(1.0 + (eta_max - x) / s_eff)
            pmix = float(capacity.q_function(alpha / x / sj)) if sj > 0 else 0.0
            g2 = max(
                0.0,
                2.0 * C / (C + alpha)
                * (goff - x / eta_max * 0.5 * capacity.binary_entropy(pmix)),
            )
            gn = max(
                0.0,
                goff - x / eta_max * capacity.permutation_penalty_ntrain(min(pmix, 0.499)),
            )
            rows.append((float(x), s_eff, float(g1), float(goff), float(g2), float(gn)))
    _write_csv(
        p["out"],
        "eta_min,sigma_eff,gain_single,gain_off,gain_2bound,gain_ntrain",
        rows,
    )
    return [p["out"]]


def cmd_reproduce(p: dict) -> list:
    target = p["target"]
    outdir = p["outdir"]
    os.makedirs(outdir, exist_ok=True)
    join = lambda name: os.path.join(outdir, name)
    trials = p["trials"]
    if target == "ba-figure":
        out = cmd_ba({
            "eta_min": 1.0, "eta_max": 2.0, "sigma": 0.1, "n_x": 200, "n_y": 1200,
            "zero_atom": 0, "tol": 1e-8, "out": join("ba_prior.csv"),
        })
        print("expected: capacity=1.568+-0.02, bound=1.275")
        return out
    if target == "modgain-figures":
        return cmd_modgain({
            "eta_max": 2.0, "sigma_eff_list": "0.05,0.1,0.2,0.3",
            "C_spacing": 7.0, "alpha": 1.0, "Z": 1.0, "curve_points": 200,
            "out": join("modgain_curves.csv"),
        })
    if target == "variance-gain-figure":
        return cmd_mc_gain({
            "eta1": 2.0, "eta2": 1.0, "separations": "0,1,2,3,5,10",
            "eps": 0.05, "Z": 0.5, "trials": trials or 600, "seed": p["seed"],
            "n_samples": 1024, "t_span": 40.0, "threads": p["threads"],
            "out": join("variance_gain.csv"),
        })
    if target == "jitter-figure":
        return cmd_mc_jitter({
            "eta": 3.0, "eps": 0.05, "Z_list": "1,2,3,4",
            "trials": trials or 1000, "seed": p["seed"],
            "n_samples": 512, "t_span": 20.0, "threads": p["threads"],
            "out": join("jitter.csv"),
        })
    if target == "variance-laws":
        return cmd_mc_var({
            "eta": 1.0, "eps": 0.05, "Z": 1.0, "trials": trials or 2000,
            "seed": p["seed"], "n_samples": 512, "t_span": 20.0,
            "threads": p["threads"], "out": join("variance_laws.csv"),
        })
    raise ConfigError(f"unknown reproduce target {target!r}")


# ---------------------------------------------------------------- driver


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="solitoncomm",
        description="Soliton/scattering-domain communication laboratory "
        "for the noisy NLS channel.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--from-manifest", metavar="JSON",
        help="re-run a previous invocation from its manifest file",
    )
    sub = parser.add_subparsers(dest="command")
    for command, schema in SCHEMAS.items():
        sp = sub.add_parser(
            command,
            help=OUTPUT_COLUMNS[command],
            description=f"Outputs: {OUTPUT_COLUMNS[command]}",
        )
        sp.add_argument("--config", help="key = value config file")
        if command == "synth":
            sp.add_argument(
                "--mode", action="append", metavar="ETA,KAPPA,T,PHASE",
                help="add one bound state (repeatable)",
            )
        if command == "reproduce":
            sp.add_argument("target_pos", nargs="?", help="reproduce target")
        for key, (typ, default, helptext) in schema.items():
            flag = "--" + key.replace("_", "-")
            if key == "infile":
                flag = "--in"
            sp.add_argument(
                flag, dest=key, type=typ, default=None,
                help=f"{helptext} (default: {default})",
            )
    return parser


DISPATCH = {
    "scatter": cmd_scatter,
    "propagate": cmd_propagate,
    "mc-var": cmd_mc_var,
    "mc-jitter": cmd_mc_jitter,
    "mc-gain": cmd_mc_gain,
    "link": cmd_link,
    "ba": cmd_ba,
    "modgain": cmd_modgain,
    "reproduce": cmd_reproduce,
}


def _execute(command: str, params: dict, mode_flags=None) -> int:
    start = time.perf_counter()
    if command == "synth":
        outputs = cmd_synth(params, mode_flags)
    else:
        outputs = DISPATCH[command](params)
    manifest = write_manifest(
        command,
        dict(params, **({"mode_flags": mode_flags} if mode_flags else {})),
        outputs,
        time.perf_counter() - start,
    )
    print(f"wrote {', '.join(outputs)} (manifest {manifest})")
    return EXIT_OK


def run(argv) -> int:
    """Entry point; returns a process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.from_manifest:
            with open(args.from_manifest, encoding="utf-8") as fh:
                manifest = json.load(fh)
            command = manifest["command"]
            if command not in SCHEMAS:
                raise ConfigError(f"manifest names unknown command {command!r}")
            params = dict(manifest["params"])
            mode_flags = params.pop("mode_flags", None)
            return _execute(command, params, mode_flags)
        if not args.command:
            parser.print_help()
            return EXIT_USAGE
        command = args.command
        flag_values = {k: getattr(args, k) for k in SCHEMAS[command]}
        if command == "reproduce" and getattr(args, "target_pos", None):
            flag_values["target"] = args.target_pos
        params = resolve_params(command, flag_values, getattr(args, "config", None))
        mode_flags = getattr(args, "mode", None) if command == "synth" else None
        return _execute(command, params, mode_flags)
    except ConfigError as exc:
        print(f"solitoncomm: error code=config {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"solitoncomm: error code=io {exc}", file=sys.stderr)
        return EXIT_IO
    except (WaveformError, zs.ScatteringError, capacity.CapacityError,
            StepSizeError, ValueError) as exc:
        print(f"solitoncomm: error code=compute {exc}", file=sys.stderr)
        return EXIT_COMPUTE


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
