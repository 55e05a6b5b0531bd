from macauthpy.models.config_models import OutputRecord
import macauthpy.util as util
from typing import Any, List, Mapping, Optional, Protocol
from pathlib import Path
import json
import os
import pandas as pd


class IReportStore(Protocol):
    @property
    def report_output_path(self) -> str:
        """Path for outputting reports."""
        return ""

    def get_record(self) -> Optional[OutputRecord]:
        pass

    def save_record(self, record: OutputRecord) -> None:
        pass

    def save_rows(self, rows: List[Mapping[str, Any]]) -> None:
        pass


class LocalReportStore(IReportStore):
    def __init__(
        self, file_name: str = "report.json", file_path: Optional[str] = None
    ):
        self.file_name = file_name
        if file_path is None:
            self.report_file_path = Path(Path.cwd(), file_name)
        else:
            self.report_file_path = Path(file_path)

        if not os.path.exists(self.report_file_path.parent):
            os.makedirs(self.report_file_path.parent)

    @property
    def report_output_path(self) -> str:
        return str(self.report_file_path)

    def get_record(self) -> Optional[OutputRecord]:
        """None when there is no readable JSON record at the path."""
        try:
            with open(self.report_file_path, "r") as report_file:
                return OutputRecord(**json.loads(report_file.read()))
        except (OSError, ValueError):
            return None

    def save_record(self, record: OutputRecord) -> None:
        with open(self.report_file_path, "w") as report_file:
            report_file.write(util.canonical_json(record.to_json(), indent=2))
            report_file.write("\n")

    def save_rows(self, rows: List[Mapping[str, Any]]) -> None:
        pd.DataFrame(list(rows)).to_csv(self.report_file_path, index=False)
