import sys
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import click
import pandas as pd

from config.settings import configure_logging, settings
from modules import __version__
from modules.experiments import (
    angle_sweep,
    load_scenario,
    random_angles,
    resolve_output_dir,
    run_scenario,
)
from modules.ifs_core import IFS, NotSeparatedAtDepth, check_strong_separation, solve_moran
from modules.projection import (
    Direction,
    check_condition_B,
    check_condition_B_prime,
    density_boundedness_diagnostic,
    detect_exact_overlaps,
    estimate_projection_length,
    project_ifs,
    pushforward_density,
)
from modules.rectangles import build_rect_pair, find_constants, verify_rect_pair
from modules.slicing import box_dimension_slice, pack_premeasure, slice_cover
from utils.errors import BudgetExceeded, ValidationError
from utils.file_utils import OutputManager
from utils.serialization import (
    encode_scalar,
    ifs_to_dict,
    parse_ifs_argument,
    parse_number_list,
)

logger = logging.getLogger(__name__)

PROG_NAME = "fractal-slicer"


class Invocation:
    """1回の実行の入力（サブコマンド・引数・出力先・シード・詳細度）"""

    def __init__(self, argv: Sequence[str], output_dir: Optional[str], seed: Optional[int],
                 threads: Optional[int], verbosity: int):
        self.argv = list(argv)
        self.output_dir = output_dir
        self.seed = seed
        self.threads = threads or settings.threads
        self.verbosity = verbosity

    def manager(self, subcommand: str, override: Optional[Path] = None) -> OutputManager:
        if override is not None:
            return OutputManager(override)
        if self.output_dir is not None:
            return OutputManager(self.output_dir)
        return OutputManager(settings.output_dir / subcommand)

    def manifest(self, subcommand: str, params: Dict[str, Any]) -> Dict[str, Any]:
        return {
            "tool": PROG_NAME,
            "version": __version__,
            "subcommand": subcommand,
            "argv": self.argv,
            "params": params,
            "ifs": None,
            "seed": self.seed,
            "threads": self.threads,
            "budget": settings.cylinder_budget,
        }


def _execute(ctx: click.Context, subcommand: str, params: Dict[str, Any],
             body: Callable[[OutputManager, Optional[IFS]], Dict[str, Any]],
             ifs_ref: Optional[str] = None,
             output_dir: Optional[Path] = None) -> Dict[str, Any]:
    """IFS を読み込んで本体を実行し、成否にかかわらず manifest.json を書く"""
    invocation: Invocation = ctx.obj
    manager = invocation.manager(subcommand, output_dir)
    manifest = invocation.manifest(subcommand, params)
    try:
        ifs = parse_ifs_argument(ifs_ref) if ifs_ref is not None else None
        if ifs is not None:
            manifest["ifs"] = ifs_to_dict(ifs)
        result = body(manager, ifs)
        outputs = sorted(set(manager.list_outputs()) | {"manifest.json"})
        manifest["result"] = {"success": True, "outputs": outputs}
        manager.write_manifest(manifest)
        return result
    except Exception as e:
        manifest["result"] = {"success": False, "error": str(e), "error_type": type(e).__name__}
        manager.write_manifest(manifest)
        raise


def _direction(theta: Optional[float], vector: Optional[str]) -> Direction:
    if theta is not None and vector is not None:
        raise click.UsageError("--theta と --direction は同時に指定できません")
    if vector is not None:
        components = parse_number_list(vector)
        if len(components) != 2:
            raise click.UsageError(f"--direction は x,y の形式で指定してください: {vector}")
        return Direction.from_vector(*components)
    if theta is None:
        raise click.UsageError("--theta か --direction のどちらかが必要です")
    return Direction(theta)


def ifs_option(f):
    return click.option("--ifs", "ifs_ref", required=True,
                        help="IFS の JSON ファイル、または preset:<name>[:<rho>]")(f)


def direction_options(f):
    f = click.option("--direction", "vector", default=None, help="方向ベクトル x,y（正規化する）")(f)
    return click.option("--theta", type=float, default=None, help="方向の角度（ラジアン）")(f)


def _echo_verdict(label: str, verdict: str, detail: str = "") -> None:
    click.echo(f"{label}: {verdict}" + (f" {detail}" if detail else ""))


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--output-dir", default=None, help="出力ディレクトリ（既定: output/<subcommand>）")
@click.option("--seed", type=int, default=None, help="乱数シード")
@click.option("--threads", type=int, default=None, help="ワーカー数の上限")
@click.option("-v", "--verbose", count=True, help="ログの詳細度（-v: INFO, -vv: DEBUG）")
@click.version_option(__version__, prog_name=PROG_NAME)
@click.pass_context
def cli(ctx: click.Context, output_dir, seed, threads, verbose):
    """平面 RRF 自己相似集合の射影・スライス・パッキングの解析ツール"""
    configure_logging(verbose)
    argv = ctx.meta.get("argv", sys.argv[1:])
    ctx.obj = Invocation(argv, output_dir, seed, threads, verbose)


@cli.command()
@click.option("--ratios", default=None, help="縮小率のカンマ区切りリスト")
@click.option("--ifs", "ifs_ref", default=None, help="IFS の JSON ファイル、または preset:<name>[:<rho>]")
@click.pass_context
def dim(ctx, ratios, ifs_ref):
    """Moran 方程式 Σ ρ_j^s = 1 の解 s"""
    if (ratios is None) == (ifs_ref is None):
        raise click.UsageError("--ratios か --ifs のどちらか一方を指定してください")

    def body(manager, ifs):
        values = [float(m.ratio) for m in ifs.maps] if ifs is not None else parse_number_list(ratios)
        s = solve_moran(values)
        click.echo(f"{s:.12f}")
        result = {"ratios": values, "dimension": s}
        manager.write_json(result, "result.json")
        return result

    return _execute(ctx, "dim", {"ratios": ratios, "ifs": ifs_ref}, body, ifs_ref)


@cli.command("check-ssc")
@ifs_option
@click.option("--max-depth", type=int, default=6, show_default=True)
@click.pass_context
def check_ssc(ctx, ifs_ref, max_depth):
    """強分離条件の確認"""

    def body(manager, ifs):
        result = check_strong_separation(ifs, max_depth)
        if isinstance(result, NotSeparatedAtDepth):
            _echo_verdict("strong separation", "NotSeparatedAtDepth",
                          f"depth={result.depth} witness={result.witness} distance={result.distance:.6g}")
            data = {"verdict": "NotSeparatedAtDepth", "depth": result.depth,
                    "witness": list(result.witness), "distance": result.distance}
        else:
            _echo_verdict("strong separation", "Separated", f"gap={result.gap:.6g} depth={result.depth}")
            data = {"verdict": "Separated", "gap": result.gap, "depth": result.depth}
        manager.write_json(data, "result.json")
        return data

    return _execute(ctx, "check-ssc", {"ifs": ifs_ref, "max_depth": max_depth}, body, ifs_ref)


@cli.command()
@ifs_option
@direction_options
@click.pass_context
def project(ctx, ifs_ref, theta, vector):
    """方向 u への射影 IFS（c_j = ⟨w_j, u⟩）"""
    direction = _direction(theta, vector)

    def body(manager, ifs):
        pifs = project_ifs(ifs, direction)
        for j, (rho, c) in enumerate(zip(pifs.ratios, pifs.offsets), start=1):
            click.echo(f"{j}: ratio={float(rho):.12g} offset={float(c):.12g}")
        data = {
            "theta": direction.theta,
            "maps": [{"ratio": encode_scalar(r), "offset": encode_scalar(c)}
                     for r, c in zip(pifs.ratios, pifs.offsets)],
            "weights": pifs.weights.tolist(),
            "dimension": pifs.dimension,
        }
        manager.write_json(data, "projected.json")
        return data

    return _execute(ctx, "project", {"ifs": ifs_ref, "theta": direction.theta}, body, ifs_ref)


@cli.command()
@ifs_option
@direction_options
@click.pass_context
def extent(ctx, ifs_ref, theta, vector):
    """射影アトラクタの凸包 [a, b]"""
    direction = _direction(theta, vector)

    def body(manager, ifs):
        a, b = project_ifs(ifs, direction).extent()
        click.echo(f"{a:.12g} {b:.12g}")
        data = {"theta": direction.theta, "a": a, "b": b}
        manager.write_json(data, "result.json")
        return data

    return _execute(ctx, "extent", {"ifs": ifs_ref, "theta": direction.theta}, body, ifs_ref)


@cli.command("check-b")
@ifs_option
@direction_options
@click.option("--tol", type=float, default=None, help="一致の許容誤差（既定: 厳密なら0、浮動小数なら1e-10）")
@click.pass_context
def check_b(ctx, ifs_ref, theta, vector, tol):
    """固定点の一致がないか（条件 B）"""
    direction = _direction(theta, vector)

    def body(manager, ifs):
        result = check_condition_B(project_ifs(ifs, direction), tol)
        pairs = [list(p) for p in getattr(result, "pairs", ())]
        _echo_verdict("condition B", result.verdict, str(pairs) if pairs else "")
        data = {"theta": direction.theta, "verdict": result.verdict, "pairs": pairs}
        manager.write_json(data, "result.json")
        return data

    return _execute(ctx, "check-b", {"ifs": ifs_ref, "theta": direction.theta, "tol": tol}, body, ifs_ref)


@cli.command("check-bprime")
@ifs_option
@direction_options
@click.option("--tol", type=float, default=None)
@click.pass_context
def check_bprime(ctx, ifs_ref, theta, vector, tol):
    """端点のファイバーが1つの第1世代片だけと交わるか（条件 B′）"""
    direction = _direction(theta, vector)

    def body(manager, ifs):
        result = check_condition_B_prime(project_ifs(ifs, direction), tol)
        sides = list(getattr(result, "sides", ()))
        letters = list(getattr(result, "letters", ()))
        _echo_verdict("condition B'", result.verdict,
                      " ".join(f"{s}={l}" for s, l in zip(sides, letters)))
        data = {"theta": direction.theta, "verdict": result.verdict, "sides": sides, "letters": letters}
        manager.write_json(data, "result.json")
        return data

    return _execute(ctx, "check-bprime", {"ifs": ifs_ref, "theta": direction.theta, "tol": tol},
                    body, ifs_ref)


@cli.command()
@ifs_option
@direction_options
@click.option("--depth", type=int, default=4, show_default=True)
@click.option("--tol", type=float, default=None)
@click.option("--all-pairs", is_flag=True, default=False, help="最小でない組も出力する")
@click.pass_context
def overlaps(ctx, ifs_ref, theta, vector, depth, tol, all_pairs):
    """長さ depth 以下の語で射影写像が一致する組"""
    direction = _direction(theta, vector)

    def body(manager, ifs):
        pairs = detect_exact_overlaps(project_ifs(ifs, direction), depth, tol, minimal=not all_pairs)
        for u, v in pairs:
            click.echo(f"{'.'.join(map(str, u))} = {'.'.join(map(str, v))}")
        click.echo(f"pairs: {len(pairs)}")
        data = {"theta": direction.theta, "depth": depth, "minimal": not all_pairs,
                "pairs": [[list(u), list(v)] for u, v in pairs]}
        manager.write_json(data, "result.json")
        return data

    params = {"ifs": ifs_ref, "theta": direction.theta, "depth": depth, "tol": tol, "all_pairs": all_pairs}
    return _execute(ctx, "overlaps", params, body, ifs_ref)


@cli.command()
@ifs_option
@direction_options
@click.option("--r", "r", type=float, required=True, help="スケール r")
@click.option("--bins", type=int, default=None, help="ビン数（既定: max(8, round(1/r))）")
@click.option("--ladder", default=None, help="有界性判定に使う r のリスト（例: 0.05,0.01,0.002）")
@click.pass_context
def density(ctx, ifs_ref, theta, vector, r, bins, ladder):
    """射影測度のヒストグラム（density.csv）"""
    direction = _direction(theta, vector)
    bins = bins if bins is not None else max(8, int(round(1.0 / r)))

    def body(manager, ifs):
        pifs = project_ifs(ifs, direction)
        histogram = pushforward_density(pifs, r, bins)
        manager.write_csv(histogram.to_frame(), "density.csv")
        click.echo(f"total mass: {histogram.total_mass:.12g}")
        click.echo(f"sup density: {histogram.sup_density:.6g}")
        data = {"theta": direction.theta, "r": r, "bins": bins,
                "total_mass": histogram.total_mass, "sup_density": histogram.sup_density}
        if ladder is not None:
            diagnostic = density_boundedness_diagnostic(pifs, parse_number_list(ladder))
            _echo_verdict("density", diagnostic.verdict, "(heuristic)")
            manager.write_csv(diagnostic.to_frame(), "density_ladder.csv")
            data["diagnostic"] = {"verdict": diagnostic.verdict, "window": diagnostic.window,
                                  "stability": diagnostic.stability, "note": diagnostic.note}
        manager.write_json(data, "result.json")
        return data

    params = {"ifs": ifs_ref, "theta": direction.theta, "r": r, "bins": bins, "ladder": ladder}
    return _execute(ctx, "density", params, body, ifs_ref)


@cli.command()
@ifs_option
@direction_options
@click.option("--r", "r", type=float, required=True)
@click.pass_context
def length(ctx, ifs_ref, theta, vector, r):
    """射影の長さの上からの推定 τ̂"""
    direction = _direction(theta, vector)

    def body(manager, ifs):
        tau = estimate_projection_length(project_ifs(ifs, direction), r)
        click.echo(f"{tau:.12g}")
        data = {"theta": direction.theta, "r": r, "length": tau}
        manager.write_json(data, "result.json")
        return data

    return _execute(ctx, "length", {"ifs": ifs_ref, "theta": direction.theta, "r": r}, body, ifs_ref)


@cli.command("slice")
@ifs_option
@direction_options
@click.option("--t", "t", type=float, required=True, help="直線上の座標 t")
@click.option("--r", "r", type=float, required=True)
@click.pass_context
def slice_command(ctx, ifs_ref, theta, vector, t, r):
    """スライス K_t の被覆（slice.csv）"""
    direction = _direction(theta, vector)

    def body(manager, ifs):
        cover = slice_cover(ifs, direction, t, r)
        frame = pd.DataFrame(cover.intervals, columns=["lo", "hi"])
        manager.write_csv(frame, "slice.csv")
        click.echo(f"components: {cover.component_count} (pieces: {len(cover.pieces)})")
        data = {"theta": direction.theta, "t": t, "r": r, "components": cover.component_count,
                "pieces": len(cover.pieces), "max_length": cover.max_length}
        manager.write_json(data, "result.json")
        return data

    return _execute(ctx, "slice", {"ifs": ifs_ref, "theta": direction.theta, "t": t, "r": r}, body, ifs_ref)


@cli.command()
@ifs_option
@direction_options
@click.option("--t", "t", type=float, required=True)
@click.option("--delta", required=True, help="δ（カンマ区切りで複数可）")
@click.option("--s", "s", type=float, default=None, help="次元 s（既定: IFS の相似次元）")
@click.option("--r", "r", type=float, default=None, help="被覆のスケール（既定: δ/32）")
@click.pass_context
def pack(ctx, ifs_ref, theta, vector, t, delta, s, r):
    """パッキング前測度の下界（pack.csv）"""
    direction = _direction(theta, vector)
    deltas = parse_number_list(delta)
    coupling = settings.get_experiment_config()["r_coupling"]

    def body(manager, ifs):
        dimension = s if s is not None else ifs.dimension
        rows = []
        for d in deltas:
            cover = slice_cover(ifs, direction, t, r if r is not None else d / coupling)
            packing = pack_premeasure(cover, d, dimension)
            histogram = ";".join(f"{k:.6g}:{n}" for k, n in sorted(packing.rung_histogram.items()))
            rows.append({"t": t, "delta": d, "value": packing.value, "item_count": packing.item_count,
                         "strategy": packing.strategy, "rung_histogram": histogram})
            click.echo(f"delta={d:.6g} value={packing.value:.6g} items={packing.item_count}")
        manager.write_csv(pd.DataFrame(rows), "pack.csv")
        return {"rows": rows}

    params = {"ifs": ifs_ref, "theta": direction.theta, "t": t, "delta": deltas, "s": s, "r": r}
    return _execute(ctx, "pack", params, body, ifs_ref)


@cli.command()
@ifs_option
@direction_options
@click.option("--t", "t", type=float, required=True)
@click.option("--ladder", default=None, help="r のリスト（狭義単調減少、4段以上）")
@click.pass_context
def slicedim(ctx, ifs_ref, theta, vector, t, ladder):
    """スライスの箱次元の推定"""
    direction = _direction(theta, vector)
    r_ladder = parse_number_list(ladder) if ladder else settings.get_experiment_config()["slice_r_ladder"]

    def body(manager, ifs):
        estimate = box_dimension_slice(ifs, direction, t, r_ladder)
        click.echo(f"slope: {estimate.slope:.6f} (residual {estimate.residual:.3g})")
        click.echo(f"counts: {estimate.counts}")
        data = {"theta": direction.theta, **estimate.to_dict()}
        manager.write_json(data, "result.json")
        return data

    params = {"ifs": ifs_ref, "theta": direction.theta, "t": t, "ladder": list(r_ladder)}
    return _execute(ctx, "slicedim", params, body, ifs_ref)


def _parse_word(word: Optional[str]) -> List[int]:
    if not word:
        return []
    try:
        return [int(v) for v in word.replace(",", ".").split(".") if v]
    except ValueError:
        raise ValidationError(f"語は 1.2.1 の形式で指定してください: {word!r}")


@cli.command("lemma4-constants")
@ifs_option
@direction_options
@click.pass_context
def lemma4_constants(ctx, ifs_ref, theta, vector):
    """長方形対の定数 κ, N, c, A, η"""
    direction = _direction(theta, vector)

    def body(manager, ifs):
        consts = find_constants(ifs, direction)
        for key in ("side", "letter", "kappa", "N", "c", "A", "eta"):
            click.echo(f"{key}: {getattr(consts, key)}")
        data = {"constants": consts.to_dict()}
        manager.write_json(data, "result.json")
        return data

    return _execute(ctx, "lemma4-constants", {"ifs": ifs_ref, "theta": direction.theta}, body, ifs_ref)


def _lemma4_params(ifs_ref, direction, word, k, C, **extra):
    return {"ifs": ifs_ref, "theta": direction.theta, "word": word, "k": k, "C": C, **extra}


@cli.command("lemma4-build")
@ifs_option
@direction_options
@click.option("--word", default="", help="語 ω（例: 1.2.1、空なら空語）")
@click.option("--k", "k", type=int, default=None, help="k（既定: 最小の k_C）")
@click.option("--C", "C", type=float, required=True, help="目標の縦横比 C")
@click.pass_context
def lemma4_build(ctx, ifs_ref, theta, vector, word, k, C):
    """同心の長方形対 R₁ ⊂ R₂ を作る"""
    direction = _direction(theta, vector)

    def body(manager, ifs):
        consts = find_constants(ifs, direction)
        pair = build_rect_pair(ifs, direction, _parse_word(word), k, consts, C)
        click.echo(f"R2: {pair.to_dict()['R2']}")
        click.echo(f"R1: {pair.to_dict()['R1']}")
        data = {"constants": consts.to_dict(), "pair": pair.to_dict()}
        manager.write_json(data, "result.json")
        return data

    return _execute(ctx, "lemma4-build", _lemma4_params(ifs_ref, direction, word, k, C), body, ifs_ref)


@cli.command("lemma4-verify")
@ifs_option
@direction_options
@click.option("--word", default="")
@click.option("--k", "k", type=int, default=None)
@click.option("--C", "C", type=float, required=True)
@click.option("--verify-r", type=float, default=None, help="検証のスケール（既定: w(R₂)/64）")
@click.pass_context
def lemma4_verify(ctx, ifs_ref, theta, vector, word, k, C, verify_r):
    """長方形対を作って (i)〜(v) を検証する"""
    direction = _direction(theta, vector)

    def body(manager, ifs):
        consts = find_constants(ifs, direction)
        pair = build_rect_pair(ifs, direction, _parse_word(word), k, consts, C)
        r = verify_r if verify_r is not None else pair.R2.width / 64
        report = verify_rect_pair(ifs, direction, pair, r, consts)
        for key in ("i", "ii", "iii", "iv", "v"):
            click.echo(f"({key}) {getattr(report, key)}")
        click.echo(f"passed: {report.passed}")
        data = {"constants": consts.to_dict(), "pair": pair.to_dict(), "checks": report.to_dict()}
        manager.write_json(data, "result.json")
        return data

    params = _lemma4_params(ifs_ref, direction, word, k, C, verify_r=verify_r)
    return _execute(ctx, "lemma4-verify", params, body, ifs_ref)


@cli.command()
@click.option("--scenario", "scenario_path", required=True, help="シナリオの TOML ファイル")
@click.pass_context
def experiment(ctx, scenario_path):
    """シナリオを実行して results.csv / dims.csv / summary.json を書き出す"""
    invocation: Invocation = ctx.obj
    scenario = load_scenario(scenario_path)
    if invocation.seed is not None:
        scenario.seed = invocation.seed
    output_dir = resolve_output_dir(scenario, invocation.output_dir)

    def body(manager, ifs):
        summary = run_scenario(scenario, str(manager.output_dir), invocation.threads)
        if "divergence" in summary:
            _echo_verdict("divergence", summary["divergence"]["verdict"])
        if "slice_dimension" in summary:
            dims = summary["slice_dimension"]
            _echo_verdict("slice dimension", f"median={dims['median']:.4f}",
                          f"target={dims['target']:.4f} within_band={dims['within_band']}")
        return summary

    params = {"scenario": scenario_path, "resolved": scenario.to_dict()}
    return _execute(ctx, "experiment", params, body, scenario.ifs_ref, output_dir)


@cli.command()
@ifs_option
@click.option("--angles", default=None, help="角度のカンマ区切りリスト（ラジアン）")
@click.option("--random", "random_count", type=int, default=None, help="[0,π) の一様乱数の角度の数")
@click.option("--depth", type=int, default=None, help="重なりを探す語の長さ")
@click.option("--tol", type=float, default=None)
@click.option("--density-ladder", default=None, help="密度判定の r のリスト（none で省略）")
@click.pass_context
def sweep(ctx, ifs_ref, angles, random_count, depth, tol, density_ladder):
    """角度ごとの重なり・条件・密度判定（sweep.csv）"""
    invocation: Invocation = ctx.obj
    if (angles is None) == (random_count is None):
        raise click.UsageError("--angles か --random のどちらか一方を指定してください")
    seed = invocation.seed if invocation.seed is not None else 0
    values = parse_number_list(angles) if angles is not None else random_angles(random_count, seed)
    if density_ladder is None:
        ladder = None
    elif density_ladder.lower() == "none":
        ladder = []
    else:
        ladder = parse_number_list(density_ladder)

    def body(manager, ifs):
        report = angle_sweep(ifs, values, depth, tol, ladder, invocation.threads)
        manager.write_csv(report.to_frame(), "sweep.csv")
        summary = report.to_dict()
        manager.write_json(summary, "summary.json")
        click.echo(f"angles: {summary['angles']} exceptional: {summary['exceptional']} "
                   f"eligible: {summary['eligible']}")
        return summary

    params = {"ifs": ifs_ref, "angles": values, "depth": depth, "tol": tol, "density_ladder": ladder}
    return _execute(ctx, "sweep", params, body, ifs_ref)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    コマンドラインの実行（終了コード: 0 成功、1 入力エラー、2 列挙上限）

    Args:
        argv (Optional[Sequence[str]]): 引数（None なら sys.argv[1:]）

    Returns:
        int: 終了コード
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        with cli.make_context(PROG_NAME, list(argv)) as ctx:
            ctx.meta["argv"] = argv
            cli.invoke(ctx)
        return 0
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except ValidationError as e:
        logger.error(f"入力エラー: {str(e)}")
        click.echo(f"エラー: {str(e)}", err=True)
        return 1
    except BudgetExceeded as e:
        logger.error(f"列挙上限エラー: {str(e)}")
        click.echo(f"列挙上限エラー: {str(e)}", err=True)
        return 2
    except Exception as e:
        logger.error(f"予期しないエラー: {str(e)}")
        click.echo(f"エラー: {str(e)}", err=True)
        return 1
