# --------------------------------------------------
# repositories/report_repository.py
# --------------------------------------------------
# Repositório responsável por salvar e recuperar relatórios em disco
#
# - PREFIX.json: relatório completo (JSON canônico, chaves ordenadas)
# - PREFIX.csv:  tabela plot-ready do experimento
# - Escrita atômica: arquivo temporário no mesmo diretório + os.replace
# --------------------------------------------------

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from src.errors import ReportIOError
from src.experiments.reports import REPORT_SCHEMA
from src.utils.fingerprint import canonical_json

log = logging.getLogger("horolab.reports")

OutputFormat = Literal["csv", "json", "both"]


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class ReportRepository:
    """
    Persistência de relatórios num diretório base
    - Cada relatório é identificado pelo prefixo (sem extensão)
    - Mesmo corpo → mesmos bytes (nada de timestamp no conteúdo)
    """

    def __init__(self, base_dir: Path | str = "."):
        self.base_dir = Path(base_dir)

    def _target(self, prefix: Path | str, suffix: str) -> Path:
        path = Path(prefix)
        if not path.is_absolute():
            path = self.base_dir / path
        return path.with_name(path.name + suffix)

    def save(
        self,
        prefix: Path | str,
        body: Dict[str, Any],
        csv_text: Optional[str] = None,
        fmt: OutputFormat = "both",
    ) -> List[Path]:
        """Grava PREFIX.json e/ou PREFIX.csv; devolve os caminhos escritos."""
        written: List[Path] = []
        try:
            if fmt in ("json", "both"):
                path = self._target(prefix, ".json")
                path.parent.mkdir(parents=True, exist_ok=True)
                _atomic_write(path, canonical_json(body, indent=2) + "\n")
                written.append(path)
            if fmt in ("csv", "both") and csv_text is not None:
                path = self._target(prefix, ".csv")
                path.parent.mkdir(parents=True, exist_ok=True)
                _atomic_write(path, csv_text)
                written.append(path)
        except OSError as exc:
            log.error("report write failed prefix=%s error=%s", prefix, exc)
            raise ReportIOError(f"cannot write report {prefix}: {exc}") from exc
        for path in written:
            log.info("saved report path=%s", path)
        return written

    def load(self, prefix: Path | str) -> Dict[str, Any]:
        """Lê PREFIX.json (ou o caminho .json direto) e confere o esquema."""
        path = Path(prefix)
        if path.suffix != ".json":
            path = self._target(prefix, ".json")
        elif not path.is_absolute():
            path = self.base_dir / path
        try:
            body = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ReportIOError(f"cannot read report {path}: {exc}") from exc
        if body.get("schema") != REPORT_SCHEMA:
            raise ReportIOError(f"{path} has schema {body.get('schema')!r}, expected {REPORT_SCHEMA!r}")
        return body


def save_report(
    prefix: Path | str, body: Dict[str, Any], csv_text: Optional[str] = None, fmt: OutputFormat = "both"
) -> List[Path]:
    return ReportRepository().save(prefix, body, csv_text, fmt)


def load_report(prefix: Path | str) -> Dict[str, Any]:
    return ReportRepository().load(prefix)
