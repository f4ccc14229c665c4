import logging
import sys

from src.config import settings


def configure_logging(level: str | None = None):
    """
    Configura logging básico para todo o projeto
    Vai para stderr: stdout fica livre para os relatórios
    """
    logging.basicConfig(
        level = (level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
        stream=sys.stderr,
        force=True,
    )
