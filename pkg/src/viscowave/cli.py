"""Command-line runner: config-driven experiments with reproducible outputs.

Verbs
-----
resolvent   resolve a memory kernel, write its resolvent and second
            derivative as CSV plus a residual report
simulate    forward-simulate the homogeneous system with memory from given
            initial coefficients, write the modal trajectory
control     assemble the moment matrix, solve the minimum-norm steering
            problem, re-simulate the control and report the terminal error
verify      estimate the direct and inverse constants and the annihilator
            gap at the configured truncation
sweep       repeat the verify quantities over a list of values of one time
            parameter, one CSV row per value

All commands share ``--config <toml>``, ``--out <dir>``, ``--seed <u64>``
and ``--threads <n>``.  Outputs are written atomically (a failed run
leaves no partial files), every JSON report embeds the resolved config,
and identical (config, seed) pairs produce byte-identical outputs.

Exit codes: 0 success, 2 config error, 3 numerical guard violation,
4 I/O error.
"""

import argparse
import copy
import json
import os
import sys
import tempfile

import numpy as np

from . import config as cfgmod
from .control import (build_elastic_moment_matrix,
                      build_viscoelastic_moment_matrix, min_norm_control,
                      steer_and_verify)
from .cosine import CoeffState
from .errors import ConfigError, GuardError
from .kernels import resolvent_kernel
from .modal import solve_modal_memory
from .quadrature import uniform_grid
from .verification import (direct_inequality_ratio,
                           inverse_inequality_constant, orthogonality_test)


def _fmt(x):
    return repr(float(x))


class OutputStage:
    """Collects output files in a scratch dir, publishes them on success."""

    def __init__(self, out_dir):
        self.out_dir = out_dir
        self.tmp = None
        self.files = []

    def __enter__(self):
        os.makedirs(self.out_dir, exist_ok=True)
        self.tmp = tempfile.mkdtemp(prefix=".stage-", dir=self.out_dir)
        return self

    def path(self, name):
        self.files.append(name)
        return os.path.join(self.tmp, name)

    def __exit__(self, exc_type, exc, tb):
        try:
            if exc_type is None:
                for name in self.files:
                    os.replace(os.path.join(self.tmp, name),
                               os.path.join(self.out_dir, name))
            else:
                for name in self.files:
                    target = os.path.join(self.tmp, name)
                    if os.path.exists(target):
                        os.unlink(target)
        finally:
            try:
                os.rmdir(self.tmp)
            except OSError:
                pass
        return False


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj]
    return obj


def write_report(path, command, cfg, results):
    payload = {"command": command, "config": _jsonable(cfg),
               "results": _jsonable(results)}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _time_block(cfg):
    block = cfgmod.require_block(cfg, "time")
    h = float(block["h"])
    t_end = float(block["T"])
    t_control = float(block.get("T1", t_end))
    return h, t_end, t_control


def cmd_resolvent(cfg, out_dir, threads):
    if "kernel" not in cfg:
        raise ConfigError("resolvent needs a [kernel] block")
    kernel = cfgmod.build_kernel(cfg)
    h, t_end, _ = _time_block(cfg)
    res = resolvent_kernel(kernel, h, t_end)
    with OutputStage(out_dir) as stage:
        write_csv(stage.path("resolvent.csv"), ["t", "R", "K"],
                  zip(res.grid, res.values, res.k))
        write_report(stage.path("report.json"), "resolvent", cfg, {
            "a": res.a, "b": res.b, "residual": res.residual,
            "tol": res.tol, "analytic": res.analytic_form is not None,
            "kernel": cfgmod.kernel_descriptor(cfg),
            "h": h, "T": t_end,
        })
    return 0


def cmd_simulate(cfg, out_dir, threads):
    basis = cfgmod.build_basis(cfg)
    kernel = cfgmod.build_kernel(cfg)
    h, t_end, _ = _time_block(cfg)
    block = cfg.get("initial", {})
    xi = cfgmod.coefficient_vector(block, basis.n_modes, "xi")
    eta = cfgmod.coefficient_vector(block, basis.n_modes, "eta")
    grid = uniform_grid(t_end, h)
    traj = solve_modal_memory(basis.lam, kernel, xi, eta, None, grid)
    header = ["t"]
    for n in range(1, basis.n_modes + 1):
        header += [f"z_{n}", f"zp_{n}"]
    interleaved = np.empty((grid.size, 2 * basis.n_modes))
    interleaved[:, 0::2] = traj.z
    interleaved[:, 1::2] = traj.zp
    with OutputStage(out_dir) as stage:
        write_csv(stage.path("trajectory.csv"), header,
                  (np.concatenate([[t], row])
                   for t, row in zip(grid, interleaved)))
        write_report(stage.path("report.json"), "simulate", cfg, {
            "N": basis.n_modes, "h": h, "T": t_end,
            "kernel": cfgmod.kernel_descriptor(cfg),
            "terminal_sup": float(np.max(np.abs(traj.z[-1]))),
        })
    return 0


def cmd_control(cfg, out_dir, threads):
    basis = cfgmod.build_basis(cfg)
    kernel = cfgmod.build_kernel(cfg)
    h, t_end, t_control = _time_block(cfg)
    block = cfgmod.require_block(cfg, "control")
    xi = CoeffState(cfgmod.coefficient_vector(block, basis.n_modes,
                                              "target_xi"), "L2")
    eta = CoeffState(cfgmod.coefficient_vector(block, basis.n_modes,
                                               "target_eta"), "Hm1")
    reg = float(block.get("reg", 1e-10))
    profiles = block.get("profiles")
    if profiles is not None:
        profiles = [np.asarray(p, dtype=float) for p in profiles]

    grid = uniform_grid(t_control, h)
    if kernel.is_zero:
        mm = build_elastic_moment_matrix(basis, t_control, grid, profiles)
    else:
        mm = build_viscoelastic_moment_matrix(basis, kernel, t_control,
                                              grid, profiles)
    sol = min_norm_control(xi, eta, mm, reg=reg)
    report = steer_and_verify(sol.control, kernel, basis, (xi, eta),
                              t_control)
    with OutputStage(out_dir) as stage:
        amp = sol.control.amplitudes
        header = ["t"] + [f"amplitude_{p + 1}" for p in range(amp.shape[1])]
        write_csv(stage.path("control.csv"), header,
                  (np.concatenate([[t], row]) for t, row in zip(grid, amp)))
        write_report(stage.path("report.json"), "control", cfg, {
            "terminal_error": report["terminal_error_Hm1_L2"],
            "predicted_residual": sol.residual,
            "control_norm": report["control_norm"],
            "gramian_sigma_min": sol.gramian_min,
            "gramian_sigma_max": sol.gramian_max,
            "rank": sol.rank,
            "T": t_control, "N": basis.n_modes,
            "kernel_descriptor": cfgmod.kernel_descriptor(cfg),
        })
    return 0


def _verify_quantities(basis, kernel, cfg, t_end, h, seed, threads):
    block = cfg.get("verify", {})
    n_samples = int(block.get("samples", 8))
    n_modes = int(block.get("modes", basis.n_modes))
    sub = basis.truncated(min(n_modes, basis.n_modes))
    direct = direct_inequality_ratio(sub, kernel, t_end, n_samples, seed, h,
                                     threads=threads)
    grid = uniform_grid(t_end, h)
    if kernel.is_zero:
        mm = build_elastic_moment_matrix(sub, t_end, grid)
    else:
        mm = build_viscoelastic_moment_matrix(sub, kernel, t_end, grid)
    m_hat = inverse_inequality_constant(mm)
    sigma_min = orthogonality_test(sub, kernel, t_end, sub.n_modes, h)
    return {
        "direct_constant": direct.constant_estimate,
        "direct_sharp": direct.sharp_constant,
        "direct_samples": direct.sample_count,
        "inverse_constant": m_hat,
        "sigma_min": sigma_min,
        "N": sub.n_modes,
    }


def cmd_verify(cfg, out_dir, seed, threads):
    basis = cfgmod.build_basis(cfg)
    kernel = cfgmod.build_kernel(cfg)
    h, t_end, _ = _time_block(cfg)
    results = _verify_quantities(basis, kernel, cfg, t_end, h, seed, threads)
    results.update({"h": h, "T": t_end, "seed": seed,
                    "kernel_descriptor": cfgmod.kernel_descriptor(cfg)})
    with OutputStage(out_dir) as stage:
        write_report(stage.path("report.json"), "verify", cfg, results)
    return 0


def cmd_sweep(cfg, out_dir, seed, threads):
    basis = cfgmod.build_basis(cfg)
    param, values = cfgmod.sweep_spec(cfg)
    rows = []
    for value in values:
        run_cfg = copy.deepcopy(cfg)
        block, key = param.split(".")
        run_cfg[block][key] = value
        cfgmod.validate_time(run_cfg["time"])
        kernel = cfgmod.build_kernel(run_cfg)
        h, t_end, _ = _time_block(run_cfg)
        results = _verify_quantities(basis, kernel, run_cfg, t_end, h, seed,
                                     threads)
        rows.append((value, results["inverse_constant"],
                     results["sigma_min"], results["direct_sharp"]))
    with OutputStage(out_dir) as stage:
        write_csv(stage.path("sweep.csv"),
                  [param.replace(".", "_"), "m_hat", "sigma_min",
                   "direct_sharp"], rows)
        write_report(stage.path("report.json"), "sweep", cfg, {
            "parameter": param, "values": values, "seed": seed,
            "rows": [list(r) for r in rows],
        })
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="viscowave",
        description="Spectral simulation and boundary-control synthesis "
                    "for wave dynamics with memory.",
    )
    parser.add_argument("command",
                        choices=["resolvent", "simulate", "control",
                                 "verify", "sweep"])
    parser.add_argument("--config", required=True, help="TOML run config")
    parser.add_argument("--out", default=None,
                        help="output directory (default: [output].dir or ./out)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for sampling loops")
    args = parser.parse_args(argv)

    try:
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        cfg = cfgmod.load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be nonnegative")
            cfg["seed"] = args.seed
        seed = cfg["seed"]
        out_dir = args.out or cfg.get("output", {}).get("dir", "out")

        if args.command == "resolvent":
            return cmd_resolvent(cfg, out_dir, args.threads)
        if args.command == "simulate":
            return cmd_simulate(cfg, out_dir, args.threads)
        if args.command == "control":
            return cmd_control(cfg, out_dir, args.threads)
        if args.command == "verify":
            return cmd_verify(cfg, out_dir, seed, args.threads)
        return cmd_sweep(cfg, out_dir, seed, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # inconsistencies between config-derived inputs surface as plain
        # ValueErrors from the library (grid mismatches, short kernels, ...)
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except GuardError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
