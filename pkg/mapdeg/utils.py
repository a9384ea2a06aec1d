# mapdeg/utils.py
from decimal import Decimal
from typing import Any, Dict, Iterable, Optional, Sequence

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

# stdout is reserved for JSON/CSV documents
console = Console(stderr=True)


def display_header(title: str):
    """Prints the rule line above a command's summary."""
    console.rule(f"[bold green]mapdeg - {title}[/bold green]")


def display_summary(title: str, values: Dict[str, Any]):
    """Key/value panel for scalar results."""
    lines = "\n".join(f"[cyan]{key}[/cyan]: {_short(value)}" for key, value in values.items())
    console.print(Panel(lines, title=f"[bold blue]{title}[/bold blue]", border_style="blue", expand=False))


def display_table(title: str, columns: Sequence[str], rows: Iterable[Sequence[Any]], limit: int = 40):
    table = Table(title=title, show_lines=False)
    for column in columns:
        table.add_column(column, justify="right")
    for k, row in enumerate(rows):
        if k >= limit:
            table.add_row(*["..." for _ in columns])
            break
        table.add_row(*[_short(v) for v in row])
    console.print(table)


def display_error(message: str):
    console.print(f"[bold red]Error:[/bold red] {message}")


def format_constant(value: float, decimal: Optional[str] = None) -> Dict[str, Any]:
    """
    A constant as {"value": float rounded to 15 significant digits,
    "decimal": full-precision string}.
    """
    text = decimal if decimal is not None else repr(float(value))
    return {"value": float(f"{float(value):.15g}"), "decimal": str(Decimal(text))}


def _short(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    text = str(value)
    return text if len(text) <= 60 else text[:28] + "..." + text[-28:]
