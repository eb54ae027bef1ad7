import argparse
import logging
import math
import os
import re
import sys

from dotenv import dotenv_values, load_dotenv

from colorama import Fore, Style, init as colorama_init

# Initialize colorama
colorama_init(autoreset=True)

# Add src directory to Python path
sys.path.insert(0, os.path.abspath(os.path.dirname(__file__)))

from utils import config_value, load_config, oracle_limit, slugify
from eclift.cm_order import fixed_lattice, frobenius_alpha, lattice_tau, order_conductor
from eclift.emit import (
    fundamental_domain_scene, mult_group_svg, real_locus_svg, write_json, write_markers_obj,
    write_obj, write_ply, write_report, write_scene_json, write_svg,
)
from eclift.errors import EcliftError, NoConvergence, PoleCollision, UsageError
from eclift.frob_check import verify_phi_reduction
from eclift.hopf_map import build_embedding_ctx, generate_mesh, map_scene, shear_fraction
from eclift.lift import (
    GALLERY, MAX_LEVEL, arrow_order, build_lift_report, check_arrows_in_field, mult_group_points, real_locus,
)
from eclift.modclass import find_embedding_class
from eclift.selftest import run_selftest
from eclift.sphere_curve import solve_curve
from eclift.weierstrass import validate_curve

# --- Constants ---
DEFAULT_OUT_DIR = "out"
CURVE_PATTERN = re.compile(r"^(?:y\^2=)?x\^3(?:([+-]\d*)x)?([+-]\d+)?$")

# --- Color Constants ---
STEP_COLOR = Fore.CYAN
SUCCESS_COLOR = Fore.GREEN
ERROR_COLOR = Fore.RED
WARN_COLOR = Fore.YELLOW
INFO_COLOR = Fore.BLUE
RESET_ALL = Style.RESET_ALL

logger = logging.getLogger("eclift")

# Long flag names settable from a --config file, with the config.yaml entry that backs each one.
CONFIG_KEYS = {
    "wobble": ("embedding", "wobble", 3, int),
    "ns": ("embedding", "ns", 256, int),
    "nt": ("embedding", "nt", 128, int),
    "twist_power": ("embedding", "twist_power", 2, int),
    "oracle_limit": (None, None, None, int),
    "n": (None, None, 1, int),
    "out": (None, None, None, str),
}


# --- Helper Functions ---

def setup_logging(verbose: int):
    level_name = config_value('logging', 'level', 'WARNING')
    fmt = config_value('logging', 'format', '%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    level = {0: getattr(logging, str(level_name).upper(), logging.WARNING), 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(level=level, format=fmt, handlers=[logging.StreamHandler(sys.stderr)], force=True)


def parse_curve_text(text: str) -> tuple[int, int]:
    """(C, D) from 'x^3+Cx+D'; spaces are ignored, anything else is rejected."""
    match = CURVE_PATTERN.match(text.replace(" ", ""))
    if not match:
        raise UsageError(f"--curve expects the form x^3+Cx+D, got {text!r}")
    c, d = match.groups()
    if c is None:
        a = 0
    else:
        a = int(c + "1") if c in ("+", "-") else int(c)
    return a, int(d) if d is not None else 0


def apply_config_file(args: argparse.Namespace):
    """Fills flags left unset from --config, then from config.yaml. Flags on the command line win."""
    file_values = {}
    if getattr(args, "config", None):
        if not os.path.isfile(args.config):
            raise UsageError(f"config file not found: {args.config}")
        file_values = {k.strip().replace("-", "_"): v for k, v in dotenv_values(args.config).items()}
        unknown = sorted(set(file_values) - set(CONFIG_KEYS))
        if unknown:
            raise UsageError(f"unknown keys in {args.config}: {', '.join(unknown)}")
    for key, (section, name, default, cast) in CONFIG_KEYS.items():
        if not hasattr(args, key) or getattr(args, key) is not None:
            continue
        if key in file_values and file_values[key] is not None:
            try:
                setattr(args, key, cast(file_values[key]))
            except ValueError:
                raise UsageError(f"{key} = {file_values[key]!r} in {args.config} is not a valid {cast.__name__}")
        elif section is not None:
            setattr(args, key, cast(config_value(section, name, default)))
        else:
            setattr(args, key, default)


def resolve_curve(args: argparse.Namespace):
    if args.preset:
        a, b, p = GALLERY[args.preset]
    else:
        if args.curve:
            if args.a is not None or args.b is not None:
                raise UsageError("--curve cannot be combined with -a/-b")
            a, b = parse_curve_text(args.curve)
        else:
            a, b = args.a, args.b
        p = args.p
        if a is None or b is None or p is None:
            raise UsageError("a curve needs -a A -b B -p P, --curve 'x^3+Cx+D' -p P, or --preset NAME")
    return validate_curve(a, b, p)


def validate_args(args: argparse.Namespace):
    if getattr(args, "n", None) is not None and not 1 <= args.n <= MAX_LEVEL:
        raise UsageError(f"-n must lie in [1, {MAX_LEVEL}], got {args.n}")
    if getattr(args, "oracle_limit", None) is not None and args.oracle_limit <= 0:
        raise UsageError("--oracle-limit must be positive")
    if getattr(args, "wobble", None) is not None and args.wobble < 2:
        raise UsageError("--wobble must be at least 2")
    if getattr(args, "ns", None) is not None and args.ns <= 0:
        raise UsageError("--ns must be positive")
    if getattr(args, "nt", None) is not None and args.nt < 8:
        raise UsageError("--nt must be at least 8")
    if getattr(args, "twist_power", None) is not None and args.twist_power not in (1, 2):
        raise UsageError("--twist-power must be 1 or 2")
    if getattr(args, "rotation", None) is not None and math.hypot(*args.rotation) == 0:
        raise UsageError("--rotation must be a nonzero quaternion")


def output_path(out_dir: str, stem: str, ext: str) -> str:
    return os.path.join(out_dir, f"{stem}.{ext}")


def curve_stem(curve, n: int) -> str:
    return slugify(f"{curve.slug}_{curve.p}_{n}")


def report_written(paths: list[str]):
    for path in paths:
        print(f"{SUCCESS_COLOR}Wrote {path}")


# --- Command Handlers ---

def handle_analyze_command(args) -> int:
    curve = resolve_curve(args)
    logger.info(f"Analyzing {curve.equation()} up to n = {args.n}")
    report = build_lift_report(curve, args.n, limit=args.oracle_limit)
    if args.out:
        path = output_path(args.out, curve_stem(curve, args.n), "report.json")
        write_report(report, path)
        report_written([path])
    else:
        sys.stdout.write(write_report(report).decode("utf-8"))
    return 0


def handle_lattice_command(args) -> int:
    curve = resolve_curve(args)
    frob = frobenius_alpha(curve, limit=args.oracle_limit)
    tau = lattice_tau(frob.alpha)
    level = fixed_lattice(frob.alpha, args.n, tau)
    out_dir = args.out or DEFAULT_OUT_DIR
    stem = curve_stem(curve, args.n)
    svg_path, json_path = output_path(out_dir, stem, "svg"), output_path(out_dir, stem, "lattice.json")
    write_svg(fundamental_domain_scene(level), svg_path)
    write_json({
        "curve": {"a": curve.a, "b": curve.b, "p": curve.p},
        "n": level.n,
        "count": level.count,
        "d1": level.d1,
        "d2": level.d2,
        "tau": {"re": tau.re, "im": tau.im},
        "coords": [[str(s), str(t)] for s, t in level.coords],
        "generators": [[str(s), str(t)] for s, t in level.generators],
        "edges": [list(edge) for edge in level.edges],
    }, json_path)
    report_written([svg_path, json_path])
    return 0


def solve_with_wobble(cls, wobble: int, max_wobble: int, warnings: list[str]):
    """Curve solve, stepping the wobble count up while the solve fails near a pole."""
    for k in range(wobble, max(wobble, max_wobble) + 1):
        try:
            return solve_curve(cls.a_star, cls.l_star, k)
        except (PoleCollision, NoConvergence) as e:
            if k == max(wobble, max_wobble):
                raise
            message = f"wobble k = {k} failed ({type(e).__name__}), trying k = {k + 1}"
            logger.warning(f"{message} ({e})")
            print(f"{WARN_COLOR}{message}")
            warnings.append(message)


def handle_embed_command(args) -> int:
    curve = resolve_curve(args)
    frob = frobenius_alpha(curve, limit=args.oracle_limit)
    tau = lattice_tau(frob.alpha)
    warnings = []
    if not frob.ordinary:
        warnings.append(f"supersingular curve (a_p = {frob.a_p})")
    conductor = order_conductor(frob.a_p, curve.p)
    if conductor > 1:
        warnings.append(f"Z[alpha] has conductor {conductor} in its maximal order")

    print(f"{STEP_COLOR}Enumerating level n = {args.n} of {curve.equation()}...")
    level = fixed_lattice(frob.alpha, args.n, tau)
    cls = find_embedding_class(tau.value, int(config_value('modclass', 'entry_bound', 12)),
                               exact=(tau.re_exact, tau.im2_exact))
    sphere_curve = solve_with_wobble(cls, args.wobble, int(config_value('embedding', 'max_wobble', 12)), warnings)

    ns = args.ns
    denominator = shear_fraction(cls).denominator
    if ns % denominator:
        ns = -(-ns // denominator) * denominator
        message = f"Ns = {args.ns} rounded up to {ns}, a multiple of the shear denominator {denominator}"
        logger.warning(message)
        print(f"{WARN_COLOR}{message}")
        warnings.append(message)

    print(f"{STEP_COLOR}Embedding torus for tau' = {cls.tau_prime:.6f} with k = {sphere_curve.k}...")
    ctx = build_embedding_ctx(sphere_curve, cls, rotation=args.rotation, twist_power=args.twist_power,
                              samples=int(config_value('embedding', 'arc_samples', 4096)))
    mesh = generate_mesh(ctx, ns, args.nt)
    x, y = tau.alpha_in_tau_basis()
    metadata = {
        "curve": {"a": curve.a, "b": curve.b, "p": curve.p},
        "n": args.n,
        "a_p": frob.a_p,
        "alpha": {"x": x, "y": y},
        "count": level.count,
        "structure": [level.d1, level.d2],
        "tau": {"re": tau.re, "im": tau.im},
        "tau_prime": {"re": cls.tau_prime.real, "im": cls.tau_prime.imag},
        "class": {"matrix": list(cls.transform), "mirrored": cls.mirrored, "circle": cls.circle_flag,
                  "a_star": cls.a_star, "l_star": cls.l_star},
        "sphere_curve": {"phi0": sphere_curve.phi0, "amp": sphere_curve.amp, "k": sphere_curve.k},
        "mesh": {"ns": ns, "nt": args.nt},
        "twist_power": args.twist_power,
        "warnings": warnings,
    }
    scene = map_scene(ctx, level, mesh=mesh, segments=int(config_value('embedding', 'edge_segments', 32)),
                      metadata=metadata)

    out_dir = args.out or DEFAULT_OUT_DIR
    stem = curve_stem(curve, args.n)
    paths = [output_path(out_dir, stem, ext) for ext in ("obj", "markers.obj", "ply", "json")]
    write_obj(mesh, paths[0])
    write_markers_obj(scene, paths[1])
    write_ply(scene, paths[2])
    write_scene_json(scene, paths[3])
    report_written(paths)
    return 0


def handle_mulgrp_command(args) -> int:
    if args.p is None:
        raise UsageError("mulgrp needs -p P")
    group = mult_group_points(args.p, args.n)
    out_dir = args.out or DEFAULT_OUT_DIR
    stem = slugify(f"mulgrp_{args.p}_{args.n}")
    svg_path, json_path = output_path(out_dir, stem, "svg"), output_path(out_dir, stem, "json")
    mult_group_svg(group, svg_path)
    write_json({
        "p": group.p,
        "n": group.n,
        "q": group.q,
        "points": len(group.points),
        "arrow_order": arrow_order(group),
        "arrows_match_field": check_arrows_in_field(group),
        "arrows": [list(a) for a in group.arrows],
    }, json_path)
    report_written([svg_path, json_path])
    return 0


def handle_real_locus_command(args) -> int:
    if args.tau is not None:
        re_part, im_part = args.tau
        if im_part <= 0:
            raise UsageError("--tau needs a positive imaginary part")
        tau = complex(re_part, im_part)
        stem = slugify(f"tau_{re_part:g}_{im_part:g}".replace(".", "p"))
    else:
        curve = resolve_curve(args)
        tau = lattice_tau(frobenius_alpha(curve, limit=args.oracle_limit).alpha).value
        stem = curve_stem(curve, args.n)
    locus = real_locus(tau)
    out_dir = args.out or DEFAULT_OUT_DIR
    svg_path, json_path = output_path(out_dir, stem, "real.svg"), output_path(out_dir, stem, "real.json")
    real_locus_svg(locus, svg_path)
    write_json({
        "tau": {"re": locus.tau.real, "im": locus.tau.imag},
        "reflection_stable": locus.reflection_stable,
        "circles": [
            {"offset": c.offset, "height_fraction": str(c.height_fraction),
             "witness": list(c.witness), "component": c.component}
            for c in locus.circles
        ],
    }, json_path)
    report_written([svg_path, json_path])
    return 0


def handle_verify_frobenius_lift_command(args) -> int:
    result = verify_phi_reduction()
    if args.out:
        path = output_path(args.out, "frobenius_lift", "json")
        write_json(result.to_dict(), path)
        report_written([path])
    else:
        sys.stdout.write(write_json(result.to_dict()).decode("utf-8"))
    return 0 if result.phi1_ok and result.phi2_ok else 1


def handle_selftest_command(args) -> int:
    print(f"{STEP_COLOR}Running acceptance checks...")
    results = run_selftest()
    for r in results:
        color, verdict = (SUCCESS_COLOR, "PASS") if r.passed else (ERROR_COLOR, "FAIL")
        print(f"{color}{verdict}{RESET_ALL} {r.name} ({r.seconds:.2f} s){'  ' + r.detail if r.detail else ''}")
    failed = sum(not r.passed for r in results)
    print(f"{ERROR_COLOR if failed else SUCCESS_COLOR}{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


HANDLERS = {
    "analyze": handle_analyze_command,
    "lattice": handle_lattice_command,
    "embed": handle_embed_command,
    "mulgrp": handle_mulgrp_command,
    "real-locus": handle_real_locus_command,
    "verify-frobenius-lift": handle_verify_frobenius_lift_command,
    "selftest": handle_selftest_command,
}


# --- Argument Parsing ---

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, metavar='FILE', help='key = value file with flag defaults')
    common.add_argument('--out', type=str, metavar='DIR', default=None, help='Output directory')
    common.add_argument('--oracle-limit', type=int, metavar='Q', default=None,
                        help='Largest field order for brute-force oracles (default: ECLIFT_ORACLE_LIMIT or config.yaml)')
    common.add_argument('-v', '--verbose', action='count', default=0, help='-v for info, -vv for debug logging')

    curve_args = argparse.ArgumentParser(add_help=False)
    curve_args.add_argument('-a', type=int, default=None, help='Coefficient a of y^2 = x^3 + ax + b')
    curve_args.add_argument('-b', type=int, default=None, help='Coefficient b of y^2 = x^3 + ax + b')
    curve_args.add_argument('-p', type=int, default=None, help='Prime p')
    curve_args.add_argument('--curve', type=str, metavar='EQ', help="Curve as 'x^3+Cx+D' (with -p)")
    curve_args.add_argument('--preset', choices=sorted(GALLERY), help='Named gallery curve')
    curve_args.add_argument('-n', type=int, default=None, help=f'Extension degree / level, 1..{MAX_LEVEL}')

    embed_args = argparse.ArgumentParser(add_help=False)
    embed_args.add_argument('--wobble', type=int, default=None, help='Wobble count k of the spherical curve')
    embed_args.add_argument('--ns', type=int, default=None, help='Mesh resolution along the fibres')
    embed_args.add_argument('--nt', type=int, default=None, help='Mesh resolution across the fibres (>= 8)')
    embed_args.add_argument('--rotation', type=float, nargs=4, metavar=('W', 'X', 'Y', 'Z'), default=None,
                            help='Unit quaternion applied to S^3 before projection')
    embed_args.add_argument('--twist-power', type=int, default=None, help='Exponent of sin(phi/2) in the twist (2, or 1)')

    parser = argparse.ArgumentParser(
        prog="eclift",
        description=f"{INFO_COLOR}eclift: lattice lifts of elliptic curves over F_p and their Hopf tori{RESET_ALL}",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common, curve_args], help='JSON lift report for n = 1..N')
    sub.add_parser("lattice", parents=[common, curve_args], help='Fundamental-domain SVG and JSON of one level')
    sub.add_parser("embed", parents=[common, curve_args, embed_args], help='OBJ mesh, PLY scene and JSON metadata')
    mulgrp = sub.add_parser("mulgrp", parents=[common], help='Roots-of-unity model of F_q^*')
    mulgrp.add_argument('-p', type=int, default=None, help='Prime p')
    mulgrp.add_argument('-n', type=int, default=None, help='Extension degree')
    real = sub.add_parser("real-locus", parents=[common, curve_args], help='Conjugation-fixed circles (JSON + SVG)')
    real.add_argument('--tau', type=float, nargs=2, metavar=('RE', 'IM'), default=None,
                      help='Lattice parameter instead of a curve')
    sub.add_parser("verify-frobenius-lift", parents=[common], help='Reduce the explicit Frobenius lift mod 5')
    sub.add_parser("selftest", parents=[common], help='Run the acceptance checks')
    return parser


# --- Main Execution ---

def run(argv: list[str]) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        load_config()
        setup_logging(args.verbose)
        apply_config_file(args)
        if getattr(args, "oracle_limit", None) is None and args.command != "mulgrp":
            args.oracle_limit = oracle_limit()
        validate_args(args)
        logger.info(f"Parsed arguments: {vars(args)}")
        return HANDLERS[args.command](args)
    except UsageError as e:
        print(f"{ERROR_COLOR}error [{e.contract}] {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except EcliftError as e:
        print(f"{ERROR_COLOR}error [{e.contract}] {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.critical(f"An unhandled exception occurred: {e}", exc_info=True)
        print(f"{ERROR_COLOR}A critical error occurred. Check logs for details: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    try:
        sys.exit(run(sys.argv[1:]))
    except KeyboardInterrupt:
        print("\nOperation cancelled by user.")
        sys.exit(1)
