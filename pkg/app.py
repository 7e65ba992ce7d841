import argparse
import logging
import os
import sys
from typing import List, Optional

from dotenv import load_dotenv

from commands import COMMANDS, EXIT_CONFIG
from config.run_config import RunConfig, ConfigError, load_run_config, SCHEMES
from scenarios.catalog import list_scenarios

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='pds',
        description="Sistemas dinâmicos projetados em domínios variantes no tempo",
    )
    parser.add_argument('--log-level', default=None, help="Nível de log (padrão: PDS_LOG_LEVEL ou INFO)")
    subparsers = parser.add_subparsers(dest='command', required=True)

    for name, help_text in (
        ('cone', "Poliedros tangentes temporais em (x, t)"),
        ('certify', "Certificação de Lipschitz progressivo em t"),
        ('simulate', "Simulação do sistema projetado"),
        ('oracle-compare', "Solver poliédrico contra o oráculo de grade"),
    ):
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument('--scenario', choices=list_scenarios())
        sub.add_argument('--config', help="Arquivo JSON/YAML ou manifesto de uma execução anterior")
        sub.add_argument('--out', help="Diretório de saída")
        sub.add_argument('--seed', type=int)
        sub.add_argument('--threads', type=int)
        sub.add_argument('--t', type=float)
        sub.add_argument('--x', help="Estado separado por vírgulas, ex.: 0,0")
        if name == 'simulate':
            sub.add_argument('--dt', type=float)
            sub.add_argument('--t-end', dest='t_end', type=float)
            sub.add_argument('--scheme', choices=SCHEMES)
        if name == 'certify':
            sub.add_argument('--deltas', help="Valores de δ separados por vírgulas, decrescentes")
            sub.add_argument('--samples', type=int)
        if name == 'oracle-compare':
            sub.add_argument('--instances', type=int)
            sub.add_argument('--resolution', type=float)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    base = load_run_config(args.config) if args.config else RunConfig()
    overrides = {
        key: getattr(args, key, None)
        for key in ('scenario', 'out', 'seed', 'threads', 't', 'x', 'dt', 't_end',
                    'scheme', 'deltas', 'samples', 'instances', 'resolution')
    }
    return base.merged(command=args.command, **overrides)


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    level = (args.log_level or os.getenv('PDS_LOG_LEVEL') or 'INFO').upper()
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')

    try:
        config = resolve_config(args)
        result = COMMANDS[args.command](config)
    except ConfigError as e:
        logger.error(f"Erro de configuração: {e}")
        return EXIT_CONFIG

    if result.message:
        logger.info(f"{args.command}: {result.message}")
    logger.info(f"{args.command} terminou com código {result.exit_code}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
