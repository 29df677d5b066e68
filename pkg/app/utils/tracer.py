import json
import logging
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

from app.utils.serialization import to_serializable_dict


class ScanTracer:
    """
    JSON-lines tracing of randomized scans, one object per line.
    """
    def __init__(self, log_path: Optional[str] = None):
        """
        Initialize the tracer.

        Args:
            log_path: Optional path to save trace lines, if None logs to stdout
        """
        self.logger = logging.getLogger('hyperlab_scan_tracer')
        self.logger.setLevel(logging.INFO)
        self.logger.propagate = False

        # Clear any existing handlers
        for handler in list(self.logger.handlers):
            self.logger.removeHandler(handler)

        if log_path:
            handler = logging.FileHandler(log_path)
        else:
            handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter('%(message)s'))
        self.logger.addHandler(handler)

    def _emit(self, trace_data: Dict[str, Any]) -> None:
        trace_data['timestamp'] = datetime.now(timezone.utc).isoformat()
        self.logger.info(json.dumps(to_serializable_dict(trace_data)))

    def trace_scan(self, scan_id: str, kind: str, params: Optional[Dict[str, Any]] = None) -> None:
        """
        Log the start of a scan.

        Args:
            scan_id: Identifier shared by the start and results lines
            kind: Scan kind, e.g. 'example1' or 'genericity'
            params: Seed, budget and the other inputs of the scan
        """
        self._emit({
            'scan_id': scan_id,
            'action': 'scan',
            'kind': kind,
            'params': params or {},
        })

    def trace_results(self, scan_id: str, trials: int, hits: int, duration_ms: float,
                      witnesses: Optional[List[Any]] = None) -> None:
        """
        Log the outcome of a scan.

        Witnesses are summarized by their points only.
        """
        summaries = [{'x': getattr(w, 'x', w)} for w in witnesses or []]
        self._emit({
            'scan_id': scan_id,
            'action': 'results',
            'trials': trials,
            'hits': hits,
            'duration_ms': duration_ms,
            'witnesses': summaries,
        })
