"""
Omega Engine - entry point da linha de comando.

    python main.py tr --curve airy --chi 3
    python main.py mixed --curve acceptance --g 1 --m 1 --n 1 --method both
    python main.py psi --g 2
"""
import argparse
import logging.config
import sys
from typing import List, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

# .env antes de importar as configurações
load_dotenv()

from config.settings import LOGGING_CONFIG, Command, CurveFamily, EngineConfig, Method, OutputFormat  # noqa: E402
from core.errors import ExitCode  # noqa: E402
from core.models import RunConfig  # noqa: E402
from handlers.cli_handler import CLIHandler, render  # noqa: E402
from utils.logger import get_logger  # noqa: E402


logger = get_logger("main")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="omega-engine",
        description="Recursão topológica exata e troca x-y em curvas espectrais racionais",
    )
    parser.add_argument("command", choices=[c.value for c in Command])
    parser.add_argument("--curve", help="arquivo de curva (JSON) ou nome de uma curva incluída")
    parser.add_argument("--family", choices=[f.value for f in CurveFamily],
                        help="curva da biblioteca com y = z")
    parser.add_argument("--r", type=int, default=2)
    parser.add_argument("--epsilon", default="0")
    parser.add_argument("--lam", default="1")
    parser.add_argument("--chi", type=int, default=1, help="maior 2g-2+m+n")
    parser.add_argument("--g", type=int)
    parser.add_argument("--m", type=int)
    parser.add_argument("--n", type=int)
    parser.add_argument("--method", choices=[m.value for m in Method], default=Method.SIMPLE.value)
    parser.add_argument("--cutoff", dest="hbar_cutoff", type=int, help="corte em hbar")
    parser.add_argument("--cache", dest="cache_dir", default=EngineConfig.CACHE_DIR)
    parser.add_argument("--format", dest="output_format", choices=[f.value for f in OutputFormat],
                        default=OutputFormat.PRETTY.value)
    parser.add_argument("--seed", type=int, default=EngineConfig.PROBE_SEED)
    parser.add_argument("--workers", dest="max_workers", type=int, default=EngineConfig.MAX_WORKERS)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    logging.config.dictConfig(LOGGING_CONFIG)
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig(**{k: v for k, v in vars(args).items() if v is not None})
    except ValidationError as e:
        for err in e.errors():
            print(f"error: --{'.'.join(str(p) for p in err['loc'])}: {err['msg']}", file=sys.stderr)
        return ExitCode.VALIDATION

    payload, exit_code = CLIHandler().run(config)
    stream = sys.stdout if exit_code == ExitCode.OK else sys.stderr
    stream.write(render(payload, config.output_format))
    logger.info("cli_exit", command=config.command.value, exit_code=exit_code)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
