"""
Report storage for CSV tables and JSON reports
"""
import json
import sys
from pathlib import Path
from typing import Optional, Union

import pandas as pd

from config.settings import VERSION, settings
from utils.helpers import to_jsonable
from utils.logger import setup_logger

logger = setup_logger('ReportStorage')

FLOAT_FORMAT = '%.17g'


def render_json(document: dict) -> str:
    """Deterministic JSON text: insertion order, indent 2, complex as [re, im]"""
    return json.dumps(to_jsonable(document), indent=2, ensure_ascii=False, allow_nan=False) + '\n'


def render_csv(table: pd.DataFrame) -> str:
    """CSV text with 17 significant digits and '.' decimals"""
    return table.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


class ReportStorage:
    """Write reports into an output directory, or to stdout when the path is '-'"""

    def __init__(self, base_dir: Optional[str] = None):
        """
        Initialize report storage

        Args:
            base_dir: Directory for reports without an explicit path (default: settings.OUTPUT_DIR)
        """
        self.base_dir = Path(base_dir or settings.OUTPUT_DIR)

    def _resolve(self, output: Optional[Union[str, Path]], default_name: str) -> Optional[Path]:
        if output == '-':
            return None
        path = Path(output) if output else self.base_dir / default_name
        # created on first write
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def save_json(self, document: dict, output: Optional[Union[str, Path]] = None,
                  default_name: str = 'report.json') -> Optional[Path]:
        """
        Save a JSON report (version stamped)

        Returns:
            Path written, or None when written to stdout

        Raises:
            OSError: file cannot be written
        """
        document = {**document, 'version': document.get('version', VERSION)}
        text = render_json(document)
        path = self._resolve(output, default_name)
        if path is None:
            sys.stdout.write(text)
            return None
        path.write_text(text, encoding='utf-8')
        logger.info(f"📄 Report written: {path}")
        return path

    def save_csv(self, table: pd.DataFrame, metadata: dict, output: Optional[Union[str, Path]] = None,
                 default_name: str = 'profile.csv') -> Optional[Path]:
        """
        Save a CSV table plus a `<csv>.meta.json` sidecar holding config and version

        Raises:
            OSError: file cannot be written
        """
        text = render_csv(table)
        path = self._resolve(output, default_name)
        if path is None:
            sys.stdout.write(text)
            return None
        path.write_text(text, encoding='utf-8')
        sidecar = path.with_name(path.name + '.meta.json')
        sidecar.write_text(render_json({**metadata, 'version': VERSION}), encoding='utf-8')
        logger.info(f"📄 Table written: {path} ({len(table)} rows)")
        return path
