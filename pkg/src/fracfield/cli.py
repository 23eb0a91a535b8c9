"""Command-line surface.

Exit codes: 0 = success / all checks pass, 1 = at least one check FAILed,
2 = usage or parameter-window error.  Every verify subcommand prints
machine-parsable lines ``CHECK <name> <PASS|FAIL> <value> <bound>``.
Randomized subcommands require --seed and echo it; reruns with identical
argv produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from fracfield import analysis, fieldfile, fracop, stable, synthesis, wavelet
from fracfield.errors import FracfieldError, ParameterWindowError
from fracfield.fieldfile import FieldFileError
from fracfield.grid import SampledField, bump, modulated_bump
from fracfield.stable import StableLaw
from fracfield.synthesis import TruncationSpec


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def _check(name: str, ok: bool, value: float, bound: float) -> bool:
    print(f"CHECK {name} {'PASS' if ok else 'FAIL'} {value:.6e} {bound:.6e}")
    return ok


def _band_limited_bump(n: int, width: float = 200.0) -> SampledField:
    """Deterministic smooth field with spectrum confined below n/8."""
    freqs = np.fft.fftfreq(n, 1.0 / n)
    spec = np.where(np.abs(freqs) < n // 8,
                    np.exp(-np.abs(freqs) ** 2 / width), 0.0)
    return SampledField(np.fft.ifft(spec).real)


def _basis(args, d=None):
    return wavelet.build_basis("daubechies", getattr(args, "order", 6),
                               d if d is not None else getattr(args, "d", 1))


def _field_metadata(args, trunc, extra=None):
    meta = {"gamma": repr(args.gamma), "p": repr(args.p), "seed": str(args.seed),
            "jmin": str(trunc.j_min), "jmax": str(trunc.j_max),
            "basis": f"daubechies{args.order}"}
    meta.update(extra or {})
    return meta


def cmd_sample_stable(args) -> int:
    law = StableLaw(args.p, args.sigma)
    draws = stable.sample_sps(law, args.n, args.seed, stream=args.stream)
    print(f"SEED {args.seed}")
    if args.csv:
        fieldfile.export_samples_csv(draws, args.csv)
        print(f"WROTE {args.csv}")
    emp = np.cos(draws).mean()
    print(f"SAMPLE-STABLE p={args.p} sigma={args.sigma} n={args.n} "
          f"ecf(1)={emp:.6f} cf(1)={stable.char_fn(law, 1.0):.6f}")
    return 0


def cmd_field(args) -> int:
    basis = _basis(args)
    law = StableLaw(args.p, args.sigma)
    trunc = (TruncationSpec(args.jmin, args.jmax)
             if args.jmax is not None else synthesis.default_truncation(args.n))
    field = synthesis.field_y(args.gamma, law, args.d, args.n, basis,
                              trunc=trunc, seed=args.seed, unsafe=args.unsafe)
    print(f"SEED {args.seed}")
    if args.out:
        fieldfile.write_field(field, _field_metadata(args, trunc), args.out)
        print(f"WROTE {args.out}")
    if args.csv:
        fieldfile.export_csv(field, args.csv)
        print(f"WROTE {args.csv}")
    if args.pgm:
        fieldfile.export_pgm(field, args.pgm)
        print(f"WROTE {args.pgm}")
    return 0


def cmd_pair(args) -> int:
    basis = _basis(args)
    phi = bump(args.d, radius=args.phi_radius)
    trunc = TruncationSpec(0, args.jmax)
    result = synthesis.pair_scale(phi, args.gamma, args.p, args.a, basis,
                                  trunc, unsafe=args.unsafe)
    print(f"PAIR sigma={result.sigma!r} a={args.a} gamma={args.gamma} "
          f"p={args.p} tail={result.tail_fraction:.3e}")
    if args.draws > 0:
        if args.seed is None:
            raise ParameterWindowError("--seed is required when drawing samples")
        print(f"SEED {args.seed}")
        law = StableLaw(args.p, args.sigma)
        draws = synthesis.pair_sample(phi, args.gamma, law, basis, trunc,
                                      n=args.draws, seed=args.seed, a=args.a,
                                      unsafe=args.unsafe)
        if args.csv:
            fieldfile.export_samples_csv(draws, args.csv)
            print(f"WROTE {args.csv}")
        target = StableLaw(args.p, args.sigma * result.sigma)
        ks = analysis.ecdf_ks(draws, target)
        ok = _check("pair-law-ks", ks < args.max_ks, ks, args.max_ks)
        return 0 if ok else 1
    return 0


def cmd_tails(args) -> int:
    basis = _basis(args)
    law = StableLaw(args.p, 1.0)
    rungs = [TruncationSpec(0, j) for j in args.ladder]
    reference = TruncationSpec(0, max(args.ladder) + args.ref_extra)
    if args.mode == "pair":
        side = reference.grid_side()
        radius = (0.0625 if args.phi == "bump" else 4.0 / side)
        subject = bump(args.d, radius=radius)
    else:
        subject = reference.grid_side()
    residuals = synthesis.tail_diagnostic(subject, args.gamma, law, basis,
                                          rungs, reference=reference,
                                          unsafe=args.unsafe)
    for rung, res in zip(rungs, residuals):
        print(f"TAIL jmax={rung.j_max} residual={res:.6e}")
    decreasing = all(a > b for a, b in zip(residuals, residuals[1:]))
    print(f"TAILS {'DECREASING' if decreasing else 'NOT-DECREASING'}")
    return 0


def verify_parseval(args) -> int:
    basis = _basis(args)
    field = SampledField(_rng(args.seed).standard_normal((args.n,) * args.d))
    coeffs = wavelet.analyze(field, basis)
    ratio = coeffs.energy() / ((field.values ** 2).sum() * field.cell_volume())
    print(f"SEED {args.seed}")
    return 0 if _check("parseval", abs(ratio - 1.0) < 1e-8, abs(ratio - 1.0), 1e-8) else 1


def verify_scaling(args) -> int:
    f = _band_limited_bump(args.n)
    idx = (2 * np.arange(args.n)) % args.n
    lhs = fracop.riesz_apply(SampledField(f.values[idx]), args.gamma).values
    rhs = 2.0 ** (-args.gamma) * fracop.riesz_apply(f, args.gamma).values[idx]
    rel = np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs)
    return 0 if _check("scaling", rel < 1e-6, rel, 1e-6) else 1


def verify_semigroup(args) -> int:
    field = SampledField(_rng(args.seed).standard_normal((args.n,) * args.d))
    lhs = fracop.riesz_apply(fracop.riesz_apply(field, args.alpha), args.beta).values
    rhs = fracop.riesz_apply(field, args.alpha + args.beta).values
    rel = np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs)
    print(f"SEED {args.seed}")
    return 0 if _check("semigroup", rel < 1e-12, rel, 1e-12) else 1


def verify_laplacian(args) -> int:
    f = _band_limited_bump(args.n)
    residual, sign = fracop.laplacian_identity_check(f, args.gamma)
    print(f"LAPLACIAN-SIGN {'-' if sign < 0 else '+'}")
    return 0 if _check("laplacian", residual < 1e-10, residual, 1e-10) else 1


def verify_kernel(args) -> int:
    xs = np.array([0.25, 0.5, 1.0, 2.0, 4.0])
    vals = [fracop.kernel_norm([x] + [0.0] * (args.d - 1), args.gamma,
                               args.p, args.d) for x in xs]
    slope = float(np.polyfit(np.log(xs), np.log(vals), 1)[0])
    expected = args.gamma - (1.0 - 1.0 / args.p) * args.d
    return 0 if _check("kernel-slope", abs(slope - expected) < 0.02,
                       abs(slope - expected), 0.02) else 1


def verify_t1(args) -> int:
    basis = _basis(args)
    from fracfield.grid import standard_corpus
    corpus = standard_corpus(args.d)
    ok = True
    worst_margin = 0.0
    consts = []
    for n in (args.n, 2 * args.n):
        cmax = 0.0
        for fn in corpus:
            rep = analysis.t1_bounds(fn, args.p, args.s, basis, n=n)
            margin = (rep.lower - rep.value) / max(rep.lower, 1e-300)
            worst_margin = max(worst_margin, margin)
            cmax = max(cmax, rep.params["c_emp"])
        consts.append(cmax)
    ok &= _check("t1-lower", worst_margin <= 1e-10, worst_margin, 0.0)
    drift = abs(consts[1] / consts[0] - 1.0)
    ok &= _check("t1-constant-stability", drift < 0.1, drift, 0.1)
    print(f"T1-CONSTANT {consts[1]:.6f}")
    return 0 if ok else 1


def verify_weighted(args) -> int:
    phi = bump(args.d, center=(0.0,) * args.d, radius=0.2)
    ratios = []
    for n in (args.n, 2 * args.n):
        rep = analysis.weighted_sampling_bound(phi.sample(n), args.p)
        ratios.append(rep.params["ratio"])
    drift = abs(ratios[1] / ratios[0] - 1.0)
    ok = _check("weighted-stability", drift < 0.1, drift, 0.1)
    print(f"WEIGHTED-RATIO {ratios[1]:.6f}")
    return 0 if ok else 1


def verify_ssbounds(args) -> int:
    basis = _basis(args)
    phi = modulated_bump(args.d, radius=0.125, freq=16.0)
    ok = True
    for a in args.a_list:
        rep = analysis.ss_bounds(phi, args.gamma, args.p, args.s, a, basis)
        ok &= _check(f"ssbounds[a={a:g}]", rep.passed, rep.value, rep.upper)
    return 0 if ok else 1


def cmd_spectrum(args) -> int:
    field, _meta = fieldfile.read_field(args.infile)
    slope = analysis.periodogram_slope(field, (args.lo, args.hi))
    if args.expect is not None:
        err = abs(slope - args.expect)
        return 0 if _check("spectrum-slope", err < args.tol, err, args.tol) else 1
    print(f"SLOPE {slope!r}")
    return 0


def cmd_hausdorff(args) -> int:
    field, meta = fieldfile.read_field(args.infile)
    code = 0
    if args.rho is not None:
        energy = analysis.frostman_energy(field, args.rho)
        print(f"ENERGY rho={args.rho} {energy!r}")
        return code
    est = analysis.box_dimension(field)
    print(f"BOXDIM {est.estimate!r} stderr={est.stderr:.4f} "
          f"scales={est.scale_range}")
    expect = args.expect
    if expect is None and "gamma" in meta:
        expect = 1.5 - float(meta["gamma"]) + 1.0
    if expect is not None:
        err = abs(est.estimate - expect)
        code = 0 if _check("hausdorff-bound", err < args.tol, err, args.tol) else 1
    return code


def cmd_ks(args) -> int:
    samples = np.loadtxt(args.infile)
    ks = analysis.ecdf_ks(samples, StableLaw(args.p, args.sigma))
    if args.max_ks is not None:
        return 0 if _check("ks", ks < args.max_ks, ks, args.max_ks) else 1
    print(f"KS {ks!r}")
    return 0


def cmd_export_pgm(args) -> int:
    field, _meta = fieldfile.read_field(args.infile)
    fieldfile.export_pgm(field, args.out)
    print(f"WROTE {args.out}")
    return 0


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok]


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracfield",
        description="Stable random wavelet fields: synthesis and verification")
    sub = parser.add_subparsers(dest="command", required=True)

    ss = sub.add_parser("sample-stable", help="draw symmetric stable variates")
    ss.add_argument("--p", type=float, required=True)
    ss.add_argument("--sigma", type=float, default=1.0)
    ss.add_argument("--n", type=int, required=True)
    ss.add_argument("--seed", type=int, required=True)
    ss.add_argument("--stream", type=int, default=0)
    ss.add_argument("--csv")
    ss.set_defaults(func=cmd_sample_stable)

    fd = sub.add_parser("field", help="synthesize a pointwise random field")
    fd.add_argument("--d", type=int, default=1)
    fd.add_argument("--gamma", type=float, required=True)
    fd.add_argument("--p", type=float, required=True)
    fd.add_argument("--sigma", type=float, default=1.0)
    fd.add_argument("--n", type=int, required=True)
    fd.add_argument("--seed", type=int, required=True)
    fd.add_argument("--jmin", type=int, default=0)
    fd.add_argument("--jmax", type=int, default=None)
    fd.add_argument("--order", type=int, default=6)
    fd.add_argument("--unsafe", action="store_true")
    fd.add_argument("--out")
    fd.add_argument("--csv")
    fd.add_argument("--pgm")
    fd.set_defaults(func=cmd_field)

    pr = sub.add_parser("pair", help="pairing scale and law check")
    pr.add_argument("--d", type=int, default=1)
    pr.add_argument("--gamma", type=float, required=True)
    pr.add_argument("--p", type=float, required=True)
    pr.add_argument("--sigma", type=float, default=1.0)
    pr.add_argument("--a", type=float, default=1.0)
    pr.add_argument("--jmax", type=int, default=10)
    pr.add_argument("--order", type=int, default=6)
    pr.add_argument("--phi-radius", type=float, default=0.0625)
    pr.add_argument("--draws", type=int, default=0)
    pr.add_argument("--seed", type=int, default=None)
    pr.add_argument("--max-ks", type=float, default=0.01)
    pr.add_argument("--csv")
    pr.add_argument("--unsafe", action="store_true")
    pr.set_defaults(func=cmd_pair)

    tl = sub.add_parser("tails", help="truncation residual ladder")
    tl.add_argument("--d", type=int, default=1)
    tl.add_argument("--gamma", type=float, required=True)
    tl.add_argument("--p", type=float, required=True)
    tl.add_argument("--mode", choices=("pair", "field"), default="pair")
    tl.add_argument("--phi", choices=("bump", "rough"), default="bump")
    tl.add_argument("--ladder", type=_int_list, default=[4, 6, 8])
    tl.add_argument("--ref-extra", type=int, default=2)
    tl.add_argument("--order", type=int, default=6)
    tl.add_argument("--unsafe", action="store_true")
    tl.set_defaults(func=cmd_tails)

    vf = sub.add_parser("verify", help="operator and inequality checks")
    vsub = vf.add_subparsers(dest="verify_command", required=True)

    vp = vsub.add_parser("parseval")
    vp.add_argument("--d", type=int, default=1)
    vp.add_argument("--n", type=int, default=1024)
    vp.add_argument("--order", type=int, default=6)
    vp.add_argument("--seed", type=int, required=True)
    vp.set_defaults(func=verify_parseval)

    vs = vsub.add_parser("scaling")
    vs.add_argument("--gamma", type=float, default=0.6)
    vs.add_argument("--n", type=int, default=4096)
    vs.set_defaults(func=verify_scaling)

    vg = vsub.add_parser("semigroup")
    vg.add_argument("--d", type=int, default=1)
    vg.add_argument("--alpha", type=float, required=True)
    vg.add_argument("--beta", type=float, required=True)
    vg.add_argument("--n", type=int, default=4096)
    vg.add_argument("--seed", type=int, required=True)
    vg.set_defaults(func=verify_semigroup)

    vl = vsub.add_parser("laplacian")
    vl.add_argument("--gamma", type=float, default=2.5)
    vl.add_argument("--n", type=int, default=1024)
    vl.set_defaults(func=verify_laplacian)

    vk = vsub.add_parser("kernel")
    vk.add_argument("--d", type=int, default=1)
    vk.add_argument("--p", type=float, default=2.0)
    vk.add_argument("--gamma", type=float, default=0.75)
    vk.set_defaults(func=verify_kernel)

    vt = vsub.add_parser("t1")
    vt.add_argument("--d", type=int, default=1)
    vt.add_argument("--p", type=float, default=1.6)
    vt.add_argument("--s", type=float, default=0.4)
    vt.add_argument("--n", type=int, default=256)
    vt.add_argument("--order", type=int, default=6)
    vt.set_defaults(func=verify_t1)

    vw = vsub.add_parser("weighted")
    vw.add_argument("--d", type=int, default=1)
    vw.add_argument("--p", type=float, default=1.5)
    vw.add_argument("--n", type=int, default=256)
    vw.set_defaults(func=verify_weighted)

    vb = vsub.add_parser("ssbounds")
    vb.add_argument("--d", type=int, default=1)
    vb.add_argument("--p", type=float, default=1.5)
    vb.add_argument("--gamma", type=float, default=0.3)
    vb.add_argument("--s", type=float, default=0.45)
    vb.add_argument("--a-list", type=_float_list, default=[0.5, 1.0, 2.0, 4.0])
    vb.add_argument("--order", type=int, default=6)
    vb.set_defaults(func=verify_ssbounds)

    sp = sub.add_parser("spectrum", help="periodogram slope of a field file")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--lo", type=float, required=True)
    sp.add_argument("--hi", type=float, required=True)
    sp.add_argument("--expect", type=float, default=None)
    sp.add_argument("--tol", type=float, default=0.2)
    sp.set_defaults(func=cmd_spectrum)

    hd = sub.add_parser("hausdorff", help="graph dimension / energy of a field file")
    hd.add_argument("--in", dest="infile", required=True)
    hd.add_argument("--rho", type=float, default=None)
    hd.add_argument("--expect", type=float, default=None)
    hd.add_argument("--tol", type=float, default=0.1)
    hd.set_defaults(func=cmd_hausdorff)

    ks = sub.add_parser("ks", help="KS distance of samples to a stable law")
    ks.add_argument("--in", dest="infile", required=True)
    ks.add_argument("--p", type=float, required=True)
    ks.add_argument("--sigma", type=float, default=1.0)
    ks.add_argument("--max-ks", type=float, default=None)
    ks.set_defaults(func=cmd_ks)

    ep = sub.add_parser("export-pgm", help="render a d=2 field file to PGM")
    ep.add_argument("--in", dest="infile", required=True)
    ep.add_argument("--out", required=True)
    ep.set_defaults(func=cmd_export_pgm)

    return parser


def _apply_config(argv: list[str]) -> list[str]:
    """Expand ``--config FILE`` (before the subcommand) into flags.

    The file holds ``key=value`` lines (# comments allowed); they are
    prepended right after the subcommand so explicit flags override them.
    """
    if not argv or argv[0] != "--config":
        return argv
    if len(argv) < 3:
        raise ParameterWindowError("--config needs a file and a subcommand")
    path, rest = argv[1], argv[2:]
    flags: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParameterWindowError(f"bad config line (need key=value): {line!r}")
            key, _, value = line.partition("=")
            flags.extend([f"--{key.strip()}", value.strip()])
    return [rest[0]] + flags + rest[1:]


def run_cli(argv: list[str]) -> int:
    """Programmatic entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(_apply_config(list(argv)))
        return args.func(args)
    except ParameterWindowError as exc:
        print(f"parameter window violation: {exc}", file=sys.stderr)
        return 2
    except FieldFileError as exc:
        print(f"field file error: {exc}", file=sys.stderr)
        return 2
    except (FracfieldError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
