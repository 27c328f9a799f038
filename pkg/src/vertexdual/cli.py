"""Command-line entry point: seeded verification experiments with
machine-readable JSON reports.

Commands
--------
verify-duality    per-eigenstate ladder-spectrum verification
solve-bethe       sector-by-sector equation solving with ED cross-checks
rs-evolve         classical flow with invariant-drift monitoring
check-identities  randomized determinant-identity trials

Exit codes: 0 pass, 1 verification failure, 2 config error,
3 numerical failure (degeneracy, collision, no convergence).

Reports are UTF-8 JSON with the fixed top level
{schema_version, command, config, results, summary, timestamp};
complex numbers are encoded as [re, im] pairs.  Identical config and
seed produce byte-identical payloads apart from the timestamp.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .bethe import all_eigenvalues_h, solve_bae
from .duality import verify_duality, verify_momentum_identification
from .errors import (
    CollisionDetected,
    ConfigError,
    DegenerateSpectrum,
    GeneralPositionViolated,
    MatchFailed,
    NoConvergence,
    SingularConfiguration,
    SingularSpectralPoint,
    SingularVandermonde,
    StepSizeUnderflow,
    VertexDualError,
    ZeroGValue,
)
from .identities import (
    ladder_char_poly,
    q_factorized,
    q_matrix,
    q_tilde_factorized,
    q_tilde_matrix,
    verify_determinant_splitting,
)
from .linalg import charpoly_minors, match_multisets, poly_rel_residual, rel_diff
from .ruijsenaars import (
    RSState,
    char_poly_via_en,
    evolve,
    lax_from_momenta,
    rs_hamiltonian,
    velocities,
)
from .sampling import GENERATOR_NAME, draw_chain_params, draw_identity_params, rng_from_seed
from .spin_chain import ChainParams, joint_diagonalize

SCHEMA_VERSION = "1"

_MAX_L = 10


def _as_complex(value, key):
    if isinstance(value, (int, float)):
        return complex(value)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) for v in value)
    ):
        return complex(value[0], value[1])
    raise ConfigError(f"{key}: expected a number or [re, im], got {value!r}")


def _complex_out(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _vector_out(values) -> list[list[float]]:
    return [_complex_out(z) for z in np.asarray(values).ravel()]


# Per-command schema: key -> default.  None means "must be resolved at
# run time" (optional values); unknown keys are rejected.
_SCHEMAS: dict[str, dict] = {
    "verify-duality": {
        "schema_version": SCHEMA_VERSION,
        "L": 1,
        "eta": 0.5,
        "h": 0.3,
        "v": 0.0,
        "inhom": [0.0],
        "trials": 1,
        "seed": 0,
        "tol": 1e-8,
    },
    "solve-bethe": {
        "schema_version": SCHEMA_VERSION,
        "L": 3,
        "eta": 0.5,
        "h": 0.3,
        "inhom": None,
        "sectors": None,
        "n_starts": 64,
        "seed": 0,
        "tol": 1e-10,
        "cross_validate": True,
    },
    "rs-evolve": {
        "schema_version": SCHEMA_VERSION,
        "eta": 0.35,
        "x0": [0.1, 1.0, 1.9],
        "p0": [0.1, -0.2, 0.15],
        "t_final": 2.0,
        "tol_ode": 1e-10,
        "n_samples": 33,
        "seed": 0,
        "tol": 1e-6,
    },
    "check-identities": {
        "schema_version": SCHEMA_VERSION,
        "trials": 100,
        "n_max": 6,
        "seed": 7,
        "tol": 1e-8,
        "corrupt_g": False,
    },
}


def _resolve_config(command: str, args) -> dict:
    schema = _SCHEMAS[command]
    config = dict(schema)
    if args.config is not None:
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(loaded) - set(schema)
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
        config.update(loaded)
    if args.seed is not None:
        config["seed"] = args.seed
    if args.tol is not None:
        config["tol"] = args.tol
    if args.trials is not None:
        if "trials" not in schema:
            raise ConfigError(f"--trials is not applicable to {command}")
        config["trials"] = args.trials
    if str(config["schema_version"]) != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {config['schema_version']!r}")
    _validate_common(config)
    return config


def _validate_common(config: dict):
    if "tol" in config and not (isinstance(config["tol"], (int, float)) and config["tol"] > 0):
        raise ConfigError(f"tol must be a positive number, got {config['tol']!r}")
    if "tol_ode" in config and not (
        isinstance(config["tol_ode"], (int, float)) and config["tol_ode"] > 0
    ):
        raise ConfigError(f"tol_ode must be positive, got {config['tol_ode']!r}")
    if "seed" in config:
        seed = config["seed"]
        if not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    if "trials" in config:
        trials = config["trials"]
        if not isinstance(trials, int) or trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {trials!r}")
    if "L" in config:
        L = config["L"]
        if not isinstance(L, int) or not 1 <= L <= _MAX_L:
            raise ConfigError(f"L must be an integer in [1, {_MAX_L}], got {L!r}")


def _chain_from_config(config: dict, rng) -> ChainParams:
    L = config["L"]
    eta = _as_complex(config["eta"], "eta") if config["eta"] is not None else None
    h = _as_complex(config["h"], "h") if config["h"] is not None else None
    v = _as_complex(config.get("v", 0.0), "v")
    if config.get("inhom") is not None:
        inhom = [_as_complex(z, "inhom") for z in config["inhom"]]
        if len(inhom) != L:
            raise ConfigError(f"inhom must list {L} values")
        if eta is None or h is None:
            raise ConfigError("eta and h are required when inhom is given")
        try:
            return ChainParams(L=L, eta=eta, h=h, v=v, inhom=tuple(inhom))
        except (GeneralPositionViolated, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
    return draw_chain_params(rng, L, eta=eta, h=h, v=v)


def _chain_config_out(chain: ChainParams) -> dict:
    return {
        "L": chain.L,
        "eta": _complex_out(chain.eta),
        "h": _complex_out(chain.h),
        "v": _complex_out(chain.v),
        "inhom": _vector_out(chain.inhom),
        "params_hash": chain.params_hash,
    }


def _cmd_verify_duality(config: dict):
    rng = rng_from_seed(config["seed"])
    trials = []
    worst = 0.0
    for trial in range(config["trials"]):
        chain = _chain_from_config(config, rng)
        report = verify_duality(chain, seed=config["seed"] + trial)
        momentum_resid = verify_momentum_identification(
            chain, joint_diagonalize(chain, seed=config["seed"] + trial)
        )
        worst = max(worst, report.worst_error, momentum_resid)
        trials.append(
            {
                "chain": _chain_config_out(chain),
                "worst_error": report.worst_error,
                "momentum_residual": momentum_resid,
                "n_states": report.n_states,
                "states": [
                    {
                        "sector_M2": rec.sector_M2,
                        "match_error": rec.max_match_error,
                        "lax_eigenvalues": _vector_out(rec.lax_eigenvalues),
                    }
                    for rec in report.records
                ],
            }
        )
    passed = worst <= config["tol"]
    summary = {
        "worst_error": worst,
        "n_trials": config["trials"],
        "passed": passed,
    }
    return {"trials": trials}, summary, (0 if passed else 1)


def _cmd_solve_bethe(config: dict):
    rng = rng_from_seed(config["seed"])
    chain = _chain_from_config(config, rng)
    sectors = config["sectors"]
    if sectors is None:
        sectors = list(range(chain.L + 1))
    if not all(isinstance(m, int) and 0 <= m <= chain.L for m in sectors):
        raise ConfigError(f"sectors must be integers in [0, {chain.L}]")
    cross = bool(config["cross_validate"]) and chain.L <= 4
    spectrum = joint_diagonalize(chain, seed=config["seed"]) if cross else None
    results = []
    passed = True
    for m2 in sectors:
        sols = solve_bae(chain, m2, seed=config["seed"], n_starts=config["n_starts"])
        expected = math.comb(chain.L, m2)
        entry = {
            "M2": m2,
            "n_solutions": len(sols),
            "expected_count": expected,
            "residuals": [s.residual for s in sols],
            "roots": [_vector_out(s.roots) for s in sols],
        }
        if any(s.residual > config["tol"] for s in sols):
            passed = False
        if cross:
            ed_vectors = [
                st.H for st in spectrum.states if st.sector_M2 == m2
            ]
            match_errors = []
            for st_h in ed_vectors:
                errs = []
                for sol in sols:
                    hv = all_eigenvalues_h(sol, chain)
                    errs.append(
                        float(np.max(np.abs(hv - st_h) / np.maximum(np.abs(st_h), 1e-12)))
                    )
                match_errors.append(min(errs) if errs else None)
            entry["ed_match_errors"] = match_errors
            entry["ed_match_rate"] = (
                float(np.mean([e is not None and e <= 1e-8 for e in match_errors]))
                if match_errors
                else 1.0
            )
            if entry["ed_match_rate"] < 1.0 or len(sols) != expected:
                passed = False
        results.append(entry)
    summary = {
        "chain": _chain_config_out(chain),
        "cross_validated": cross,
        "passed": passed,
    }
    return {"sectors": results}, summary, (0 if passed else 1)


def _cmd_rs_evolve(config: dict):
    eta = _as_complex(config["eta"], "eta")
    x0 = np.array([_as_complex(z, "x0") for z in config["x0"]])
    p0 = np.array([_as_complex(z, "p0") for z in config["p0"]])
    if x0.size != p0.size:
        raise ConfigError("x0 and p0 must have the same length")
    n_samples = config["n_samples"]
    if not isinstance(n_samples, int) or n_samples < 2:
        raise ConfigError("n_samples must be an integer >= 2")
    try:
        state0 = RSState(eta=eta, x=x0, p=p0)
    except (GeneralPositionViolated, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    trajectory = evolve(
        state0, config["t_final"], tol_ode=config["tol_ode"], n_samples=n_samples
    )
    eig0 = np.linalg.eigvals(lax_from_momenta(state0).entries)
    en0 = char_poly_via_en(state0.x, velocities(state0), eta)
    samples = []
    lax_drift = 0.0
    invariant_drift = 0.0
    for t, state in trajectory:
        lax = lax_from_momenta(state)
        eig = np.linalg.eigvals(lax.entries)
        _, errors = match_multisets(eig, eig0)
        lax_drift = max(lax_drift, float(errors.max()))
        en = char_poly_via_en(state.x, velocities(state), eta)
        invariant_drift = max(
            invariant_drift, float(np.max(np.abs(en - en0)) / max(np.max(np.abs(en0)), 1.0))
        )
        samples.append(
            {
                "t": t,
                "x": _vector_out(state.x),
                "p": _vector_out(state.p),
                "energy": _complex_out(rs_hamiltonian(state)),
            }
        )
    passed = lax_drift <= config["tol"]
    summary = {
        "lax_eigenvalue_drift": lax_drift,
        "invariant_drift": invariant_drift,
        "passed": passed,
    }
    return {"trajectory": samples}, summary, (0 if passed else 1)


def _cmd_check_identities(config: dict):
    rng = rng_from_seed(config["seed"])
    n_max = config["n_max"]
    if not isinstance(n_max, int) or not 1 <= n_max <= 8:
        raise ConfigError(f"n_max must be an integer in [1, 8], got {n_max!r}")
    corrupt = bool(config["corrupt_g"])
    rows = []
    worst = 0.0
    for trial in range(config["trials"]):
        n = int(rng.integers(1, n_max + 1))
        m = int(rng.integers(0, n + 1))
        params = draw_identity_params(rng, n, m)
        residual = verify_determinant_splitting(params)
        fact_q = rel_diff(q_matrix(params, check=False), q_factorized(params))
        fact_qt = (
            rel_diff(q_tilde_matrix(params, check=False), q_tilde_factorized(params))
            if m
            else 0.0
        )
        if corrupt:
            # Debug harness self-test: negating g on the right side only
            # must produce an order-one residual.
            bad = type(params)(
                N=params.N, M=params.M, x=params.x, y=params.y, g=-params.g, eta=params.eta
            )
            lhs = charpoly_minors(q_matrix(params, check=False))
            rhs = ladder_char_poly(bad.N - bad.M, bad.g, bad.eta)
            if bad.M:
                rhs = np.polymul(rhs, charpoly_minors(q_tilde_matrix(bad, check=False)))
            residual = max(residual, poly_rel_residual(lhs, rhs))
        worst = max(worst, residual, fact_q, fact_qt)
        rows.append(
            {
                "trial": trial,
                "N": n,
                "M": m,
                "identity_residual": residual,
                "factorization_residual_q": fact_q,
                "factorization_residual_q_tilde": fact_qt,
                "pass": bool(residual <= config["tol"]),
            }
        )
    passed = all(row["pass"] for row in rows)
    summary = {
        "n_trials": config["trials"],
        "worst_residual": worst,
        "passed": passed,
    }
    return {"trials": rows}, summary, (0 if passed else 1)


_RUNNERS = {
    "verify-duality": _cmd_verify_duality,
    "solve-bethe": _cmd_solve_bethe,
    "rs-evolve": _cmd_rs_evolve,
    "check-identities": _cmd_check_identities,
}

_NUMERICAL_FAILURES = (
    DegenerateSpectrum,
    NoConvergence,
    CollisionDetected,
    StepSizeUnderflow,
    SingularConfiguration,
    SingularSpectralPoint,
    SingularVandermonde,
    ZeroGValue,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vertexdual",
        description="Verification experiments for the 6-vertex / Ruijsenaars-Schneider "
        "spectral correspondence.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("verify-duality", "match Lax spectra of all eigenstates against the predicted ladders"),
        ("solve-bethe", "solve the sector equations and cross-validate against diagonalization"),
        ("rs-evolve", "integrate the classical flow and monitor spectral invariants"),
        ("check-identities", "run randomized determinant-identity trials"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", type=str, default=None, help="JSON config file")
        p.add_argument("--out", type=str, default=None, help="report output path")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (overrides config)")
        p.add_argument("--tol", type=float, default=None, help="pass tolerance (overrides config)")
        p.add_argument("--trials", type=int, default=None, help="trial count (overrides config)")
    return parser


def write_report(path: Path, report: dict):
    path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    command = args.command
    try:
        config = _resolve_config(command, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        results, summary, code = _RUNNERS[command](config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except GeneralPositionViolated as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except MatchFailed as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1
    except _NUMERICAL_FAILURES as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except VertexDualError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    summary = {**summary, "rng": GENERATOR_NAME, "tool_version": __version__}
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "results": results,
        "summary": summary,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    out_path = Path(args.out) if args.out else Path(f"{command.replace('-', '_')}_report.json")
    write_report(out_path, report)
    status = "PASS" if code == 0 else "FAIL"
    print(f"{command}: {status} (report: {out_path})")
    return code


def entry():
    sys.exit(main())
