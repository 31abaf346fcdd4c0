"""
命令行入口

    sample-path-causality simulate --config conf/app.yml --seed 3 --out out
    sample-path-causality estimate --input out/sequences.csv --direction both
    sample-path-causality evaluate --trace yx=out/trace_yx.csv
    sample-path-causality reproduce-example1
    sample-path-causality reproduce-fig1
    sample-path-causality sweep --config conf/app.yml

退出码：0 成功，2 配置错误，3 复现检查未通过，1 其他错误
"""

import argparse
import json
import sys
from typing import Dict, List, Optional
from sample_path_causality.config import load_experiment_config
from sample_path_causality.core.experiment import ExperimentRunner
from sample_path_causality.models.config import ExperimentConfig
from sample_path_causality.utils.exceptions import (
    CausalMeasureException, CheckFailure, ExperimentConfigError
)
from sample_path_causality.utils.log_utils import configure_logging, log

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_CHECK = 3

COMMANDS = ("simulate", "estimate", "evaluate", "reproduce-example1", "reproduce-fig1", "sweep")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="YAML配置文件路径")
    common.add_argument("--seed", type=int, default=None, help="随机种子")
    common.add_argument("--out", type=str, default=None, help="输出目录")
    common.add_argument("--direction", choices=["yx", "xy", "both"], default=None, help="估计方向")
    common.add_argument("--filter", choices=["exact", "paper-literal"], default=None,
                        help="受限真值的隐变量滤波方式")
    common.add_argument("--format", choices=["csv", "json"], default=None, help="轨迹文件格式")

    parser = argparse.ArgumentParser(prog="sample-path-causality", description="样本路径因果度量的估计与遗憾实验")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="按配置生成X/Y序列")
    estimate = sub.add_parser("estimate", parents=[common], help="估计逐轮因果度量")
    estimate.add_argument("--input", type=str, default=None, help="序列文件，缺省时按配置模拟")
    evaluate = sub.add_parser("evaluate", parents=[common], help="由轨迹文件生成遗憾报告")
    evaluate.add_argument("--trace", action="append", required=True, metavar="[DIR=]PATH",
                          help="轨迹文件，可重复；DIR为yx或xy，缺省为yx")
    evaluate.add_argument("--reference", type=str, default=None, help="参考轨迹文件，以其C_hat作为C*")
    example1 = sub.add_parser("reproduce-example1", parents=[common], help="复现闭式例子")
    example1.add_argument("--n", type=int, default=10_000, help="蒙特卡洛轮数")
    sub.add_parser("reproduce-fig1", parents=[common], help="变点实验")
    sub.add_parser("sweep", parents=[common], help="多个种子的批量运行")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, object]:
    return {
        "experiment.seed": args.seed,
        "experiment.direction": args.direction,
        "experiment.filter": args.filter,
        "output.out_dir": args.out,
        "output.format": args.format,
    }


def _parse_traces(values: List[str]) -> Dict[str, str]:
    traces = {}
    for value in values:
        direction, sep, path = value.partition("=")
        if not sep:
            direction, path = "yx", value
        if direction not in ("yx", "xy"):
            raise ExperimentConfigError(f"--trace的方向必须为yx或xy: {value}")
        traces[direction] = path
    return traces


def _emit(payload) -> None:
    print(json.dumps(payload, indent=2, ensure_ascii=False))


def run_command(args: argparse.Namespace, config: ExperimentConfig) -> None:
    runner = ExperimentRunner(config)
    if args.command == "simulate":
        _, _, files = runner.simulate(write=True)
        _emit({"files": files})
    elif args.command == "estimate":
        result = runner.estimate(args.input)
        _emit({d: item.report.model_dump(include={"causality_regret", "l_empirical", "theorem_bound",
                                                  "applicable", "within_envelope", "satisfied"})
               for d, item in result.directions.items()})
    elif args.command == "evaluate":
        reports = runner.evaluate(_parse_traces(args.trace), args.reference)
        _emit({d: r.model_dump(exclude={"learner_losses", "reference_losses"}) for d, r in reports.items()})
    elif args.command == "reproduce-example1":
        report = runner.reproduce_example1(args.n)
        _emit(report.model_dump())
    elif args.command == "reproduce-fig1":
        _, summaries = runner.reproduce_fig1()
        _emit({d: s.model_dump() for d, s in summaries.items()})
    elif args.command == "sweep":
        _emit(runner.sweep())


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_experiment_config(args.config, _overrides(args))
        configure_logging(config.logging.level, config.logging.file)
        log.info(f"执行命令: {args.command}")
        run_command(args, config)
    except ExperimentConfigError as e:
        log.error(f"配置错误: {e}")
        return EXIT_CONFIG
    except CheckFailure as e:
        log.error(f"检查未通过: {e}")
        return EXIT_CHECK
    except CausalMeasureException as e:
        log.error(f"执行失败: {e}")
        return EXIT_ERROR
    except OSError as e:
        log.error(f"文件读写失败: {e}")
        return EXIT_ERROR
    log.info(f"命令完成: {args.command}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
