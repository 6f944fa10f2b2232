from .formatting import csv_cell, format_float, to_csv, to_json
from .workers import ordered_map, worker_count

__all__ = ["csv_cell", "format_float", "ordered_map", "to_csv", "to_json", "worker_count"]
