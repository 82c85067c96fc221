"""
Command line interface
======================

``usdembed discriminate|cost|verify|atom``. With ``--format json`` the report
is the only thing written to stdout; the text summary and all messages go to
stderr. ``--out`` also writes the report to a file.

Exit codes: 0 success, 1 invalid input, 2 infeasible or degenerate problem,
3 failed verification.
"""
import argparse
import logging
import sys
from typing import List, Optional
import numpy as np

from . import __version__
from . import settings
from .exceptions import (
    ValidationError,
    SettingsError,
    InfeasibleProbabilitiesError,
    PassivityError,
    DegenerateDesignError,
    VerificationError,
    ConvergenceError
)
from .io import ProblemFile, AtomFile, ReportFile, encode_complex
from .usd import StateSet, build_lossy, validate_usd, equal_marginal_probs
from .embedding import canonical_embedding, optimal_hamiltonian, cost_report, reduce_ancilla
from .dynamics import simulate_discrimination, conclusive_basis
from .sweep import parse_sweep, CostSweep
from .verify import run_suite
from .atomlaser import AtomConfig, atom_sweep, design_for_overlap, rwa_unitary

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFICATION = 3

DEFAULT_ATOM_SWEEP = '0.1:0.9:9'

logger = logging.getLogger('usdembed')


def _float_list(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(',')]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f'expected comma separated numbers, got {text!r}') from err


def _seed(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f'expected an integer seed, got {text!r}') from err


def _add_output_args(cmd: argparse.ArgumentParser):
    cmd.add_argument('--format', choices=['json', 'text'], default='text')
    cmd.add_argument('--out', default=None, help='Also write the JSON report to this path')


def _add_problem_args(cmd: argparse.ArgumentParser, required: bool = True):
    cmd.add_argument('-i', '--input', required=required, help='Problem file (JSON)')
    cmd.add_argument('--probs', type=_float_list, default=None, help='Conclusive probabilities, comma separated')
    cmd.add_argument('--priors', type=_float_list, default=None, help='Prior probabilities, comma separated')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='usdembed',
        description='Minimal-action unitary embeddings of unambiguous state discrimination.'
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('-v', '--verbose', action='store_true', help='Debug logging on stderr')
    sub = parser.add_subparsers(dest='command', required=True)

    disc = sub.add_parser('discriminate', help='Embed K and simulate the discrimination')
    _add_problem_args(disc)
    disc.add_argument('--trials', type=int, default=settings.get_setting('default_trials'))
    disc.add_argument('--seed', type=_seed, default=settings.get_setting('default_seed'))
    disc.add_argument('--workers', type=int, default=None, help='Threads for the simulation')
    _add_output_args(disc)

    cost = sub.add_parser('cost', help='Minimal action of embedding K')
    _add_problem_args(cost, required=False)
    cost.add_argument('--norm', choices=['spectral', 'hs'], default='spectral')
    cost.add_argument('--sweep', default=None, help='Symmetric two-state overlaps c_min:c_max:steps')
    cost.add_argument('--csv', default=None, help='Write the sweep as CSV to this path')
    _add_output_args(cost)

    ver = sub.add_parser('verify', help='Run the optimality and consistency checks')
    _add_problem_args(ver)
    ver.add_argument('--samples', type=int, default=200)
    ver.add_argument('--seed', type=_seed, default=settings.get_setting('default_seed'))
    ver.add_argument('--inject-theta-scale', type=float, default=1.0, help=argparse.SUPPRESS)
    _add_output_args(ver)

    atom = sub.add_parser('atom', help='Three-level atom pulse design and RWA check')
    atom.add_argument('-i', '--input', default=None, help='Atom file (JSON), default atom if omitted')
    atom.add_argument('--sweep', default=None, help='Overlaps c_min:c_max:steps')
    atom.add_argument('--csv', default=None, help='Write the sweep as CSV to this path')
    atom.add_argument('--trials', type=int, default=10_000)
    atom.add_argument('--seed', type=_seed, default=settings.get_setting('default_seed'))
    atom.add_argument('--no-fidelity', action='store_true', help='Skip the lab frame propagation')
    _add_output_args(atom)
    return parser


def _load_problem(args: argparse.Namespace):
    problem = ProblemFile.from_file(args.input)
    states = problem.states
    if args.priors is not None:
        states = StateSet(states.states, args.priors)
    if args.probs is not None:
        probs = np.asarray(args.probs)
    elif problem.probs is not None:
        probs = problem.probs
    else:
        probs = equal_marginal_probs(states)
    inputs = problem.to_dict()
    inputs['priors'] = states.priors.tolist()
    inputs['probs'] = np.asarray(probs).tolist()
    return states, probs, inputs


def cmd_discriminate(args: argparse.Namespace) -> ReportFile:
    states, probs, inputs = _load_problem(args)
    k = build_lossy(states, probs)
    validation = validate_usd(k, states)
    validation.raise_for_status()
    embedding = canonical_embedding(k)
    h_opt = optimal_hamiltonian(embedding)
    costs = cost_report(k)
    generator_error = float(np.max(np.abs(h_opt.propagator() - embedding.matrix)))
    record = simulate_discrimination(
        states, embedding, trials=args.trials, seed=args.seed, workers=args.workers, logger=logger
    )
    inputs['trials'] = args.trials
    return ReportFile(
        command='discriminate',
        seed=args.seed,
        inputs=inputs,
        results={
            **costs.to_dict(),
            'n_anc': reduce_ancilla(embedding).n_anc,
            'probabilities': validation.probabilities.tolist(),
            'measurement': record.to_dict(),
            'hamiltonian_offdiagonal': encode_complex(h_opt.off_diagonal),
        },
        checks={
            'outputs_orthogonal': validation.passed,
            'generator_reproduces_embedding': generator_error <= settings.get_setting('tol_unitary'),
            'zero_conclusive_errors': record.errors == 0,
            'inconclusive_within_4_sigma': record.within_sigma(4.),
        }
    )


def cmd_cost(args: argparse.Namespace) -> ReportFile:
    if args.sweep is not None:
        table = CostSweep.compute(parse_sweep(args.sweep))
        if args.csv is not None:
            table.to_csv(args.csv)
        return ReportFile(
            command='cost',
            inputs={'sweep': args.sweep, 'norm': args.norm},
            results={
                'overlap': table['overlap'].value.tolist(),
                'cost': table[f'{args.norm}_action'].value.tolist(),
            }
        )
    if args.input is None:
        raise ValidationError('cost needs --input or --sweep.')
    states, probs, inputs = _load_problem(args)
    k = build_lossy(states, probs)
    costs = cost_report(k)
    h_opt = optimal_hamiltonian(canonical_embedding(k))
    inputs['norm'] = args.norm
    return ReportFile(
        command='cost',
        inputs=inputs,
        results={**costs.to_dict(), 'cost': costs.action(args.norm)},
        checks={
            'hamiltonian_attains_cost': abs(h_opt.action(args.norm) - costs.action(args.norm))
            <= settings.get_setting('tol_recon') * max(1, k.dim),
        }
    )


def cmd_verify(args: argparse.Namespace) -> ReportFile:
    states, probs, inputs = _load_problem(args)
    k = build_lossy(states, probs)
    report = run_suite(
        k, samples=args.samples, seed=args.seed, theta_scale=args.inject_theta_scale, logger=logger
    )
    inputs['samples'] = args.samples
    return ReportFile(
        command='verify',
        seed=args.seed,
        inputs=inputs,
        results={**cost_report(k).to_dict(), 'properties': report.to_dict()['results']},
        checks=report.checks
    )


def cmd_atom(args: argparse.Namespace) -> ReportFile:
    if args.input is not None:
        scenario = AtomFile.from_file(args.input)
    else:
        scenario = AtomFile(atom=AtomConfig.default())
    sweep = args.sweep or scenario.overlap_sweep or DEFAULT_ATOM_SWEEP
    overlaps = parse_sweep(sweep)
    if np.any(overlaps >= 1 - settings.get_setting('tol_norm')):
        raise DegenerateDesignError('Identical states (overlap 1) cannot be discriminated.')
    table = atom_sweep(
        scenario.atom,
        overlaps,
        amplitude=scenario.amplitude,
        mixing_angle=scenario.mixing_angle,
        duration=scenario.duration,
        with_fidelity=not args.no_fidelity,
        logger=logger
    )
    if args.csv is not None:
        table.to_csv(args.csv)
    errors = 0
    for c in overlaps:
        pulse, pair = design_for_overlap(c, scenario.amplitude, scenario.mixing_angle, scenario.duration)
        states = StateSet(np.stack(pair))
        u = rwa_unitary(pulse)
        basis = conclusive_basis(u[:2, :2], states)
        errors += simulate_discrimination(states, u, trials=args.trials, seed=args.seed, output_basis=basis).errors
    lhs = table['lhs'].value
    rhs = table['rhs'].value
    fidelity = table['fidelity'].value
    checks = {
        'tradeoff': bool(np.all(np.abs(lhs - rhs) <= settings.get_setting('tol_orth'))),
        'zero_conclusive_errors': errors == 0,
    }
    if not args.no_fidelity:
        checks['rwa_fidelity'] = bool(np.all(fidelity >= 0.999))
    inputs = scenario.to_dict()
    inputs.update({'overlap_sweep': sweep, 'trials': args.trials})
    return ReportFile(
        command='atom',
        seed=args.seed,
        inputs=inputs,
        results={
            'overlap': overlaps.tolist(),
            'lhs': lhs.tolist(),
            'rhs': rhs.tolist(),
            'fidelity': None if args.no_fidelity else fidelity.tolist(),
            'conclusive_errors': errors,
        },
        checks=checks
    )


COMMANDS = {
    'discriminate': cmd_discriminate,
    'cost': cmd_cost,
    'verify': cmd_verify,
    'atom': cmd_atom,
}


def _summary(report: ReportFile) -> str:
    lines = [f'usdembed {report.command}: {"PASS" if report.passed else "FAIL"}']
    for key in ('s_min', 'spectral_action', 'hs_action', 'cost', 'n_anc'):
        if key in report.results:
            lines.append(f'  {key}: {report.results[key]}')
    if 'measurement' in report.results:
        m = report.results['measurement']
        lines.append(f'  inconclusive: {m["inconclusive"]}/{m["trials"]}, errors: {m["errors"]}')
    for name, passed in report.checks.items():
        lines.append(f'  [{"ok" if passed else "FAILED"}] {name}')
    return '\n'.join(lines)


def _configure_logging(verbose: bool):
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter('%(levelname)s %(name)s: %(message)s'))
    logger.handlers = [handler]
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run the command line interface and return the exit code.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        if getattr(args, 'seed', 0) < 0:
            raise ValidationError(f'Seed must be non-negative, got {args.seed}.')
        report = COMMANDS[args.command](args)
    except (InfeasibleProbabilitiesError, PassivityError, DegenerateDesignError) as err:
        logger.error(str(err))
        return EXIT_INFEASIBLE
    except (VerificationError, ConvergenceError) as err:
        logger.error(str(err))
        return EXIT_VERIFICATION
    except (ValidationError, SettingsError, OSError) as err:
        logger.error(str(err))
        return EXIT_INVALID
    if args.format == 'json':
        print(report.to_json())
    else:
        print(_summary(report), file=sys.stderr)
    if args.out is not None:
        report.write(args.out)
    if not report.passed:
        logger.error(f'Failed checks: {", ".join(k for k, v in report.checks.items() if not v)}')
        return EXIT_VERIFICATION
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
