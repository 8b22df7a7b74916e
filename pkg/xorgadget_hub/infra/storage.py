"""
File storage for the gadget compiler.
This module reads and writes every external format: DIMACS CNF, Max2XOR
JSON, Ising JSON, QUBO text, coupling graphs and placements.
"""

import json
import logging
import os
from pathlib import Path
from typing import Any

from xorgadget_hub.core.convert import IsingModel, QuboModel
from xorgadget_hub.core.embedding import CouplingGraph
from xorgadget_hub.core.exceptions import ModelFormatError
from xorgadget_hub.core.formula import DimacsReport, parse_dimacs_report
from xorgadget_hub.core.max2xor import Max2XorProblem

logger = logging.getLogger(__name__)

Model = Max2XorProblem | IsingModel | QuboModel


class StorageManager:
    """Manager for reading inputs and writing outputs"""

    def read_text(self, path: str | Path) -> str:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()

    def write_text(self, path: str | Path, text: str) -> None:
        """Write atomically through a temporary file"""
        path = str(path)
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        temp_path = path + ".tmp"
        try:
            with open(temp_path, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
            os.replace(temp_path, path)
        except Exception:
            if os.path.exists(temp_path):
                os.remove(temp_path)
            raise
        logger.info(f"Wrote {path}")

    def dump_json(self, data: Any) -> str:
        return json.dumps(data, indent=2, ensure_ascii=False) + "\n"

    def write_json(self, path: str | Path, data: Any) -> None:
        self.write_text(path, self.dump_json(data))

    def _read_json(self, path: str | Path, kind: str) -> Any:
        try:
            return json.loads(self.read_text(path))
        except json.JSONDecodeError as e:
            raise ModelFormatError(kind, f"{path}: {e}") from e

    def load_cnf(self, path: str | Path) -> DimacsReport:
        with open(path, "r", encoding="utf-8") as f:
            return parse_dimacs_report(f)

    def is_cnf(self, path: str | Path) -> bool:
        if str(path).endswith(".cnf"):
            return True
        for line in self.read_text(path).splitlines():
            stripped = line.strip()
            if stripped and not stripped.startswith("c"):
                return stripped.startswith("p cnf")
        return False

    def load_model(self, path: str | Path) -> Model:
        """Max2XOR JSON, Ising JSON or QUBO text, told apart by content"""
        text = self.read_text(path)
        if not text.lstrip().startswith("{"):
            return QuboModel.from_text(text)
        data = self._read_json(path, "model")
        if not isinstance(data, dict):
            raise ModelFormatError("model", f"{path}: expected a JSON object")
        if "spin_convention" in data or "h" in data or "J" in data:
            return IsingModel.from_json(data)
        return Max2XorProblem.from_json(data)

    def save_model(self, path: str | Path, model: Model) -> None:
        if isinstance(model, QuboModel):
            self.write_text(path, model.to_text())
        else:
            self.write_json(path, model.to_json())

    def load_graph(self, path: str | Path) -> CouplingGraph:
        return CouplingGraph.from_text(self.read_text(path))

    def load_placement(self, path: str | Path) -> dict[int, int]:
        """JSON object {"var": qubit} or one 'var qubit' pair per line"""
        text = self.read_text(path)
        if text.lstrip().startswith("{"):
            data = self._read_json(path, "placement")
            try:
                return {int(var): int(qubit) for var, qubit in data.items()}
            except (TypeError, ValueError) as e:
                raise ModelFormatError("placement", str(e)) from e
        placement = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            parts = raw.split()
            if not parts or parts[0] in ("#", "c"):
                continue
            try:
                var, qubit = (int(part) for part in parts)
            except ValueError:
                raise ModelFormatError("placement", f"line {lineno}: expected 'var qubit'") from None
            placement[var] = qubit
        return placement
