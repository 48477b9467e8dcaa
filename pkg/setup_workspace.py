"""Setup script for prodsys workspaces."""
from pathlib import Path
from rich.console import Console
from rich.prompt import Prompt, Confirm

console = Console()


def setup_workspace():
    """Interactive setup: directories and .env."""
    console.print("[bold blue]prodsys Setup[/bold blue]\n")

    dirs = ['data/fiber_cache', 'reports', 'logs']
    for dir_path in dirs:
        Path(dir_path).mkdir(parents=True, exist_ok=True)
    console.print("[green]✓ Created directories[/green]")

    if not Path('.env').exists():
        console.print("\n[yellow]Setting up environment variables...[/yellow]")

        cache_enabled = Confirm.ask("Cache GNS fibers on disk?", default=True)
        cache_path = Prompt.ask("Fiber cache directory", default="./data/fiber_cache")
        reports_path = Prompt.ask("Reports directory", default="./reports")
        log_level = Prompt.ask(
            "Log level",
            choices=["DEBUG", "INFO", "WARNING", "ERROR"],
            default="INFO"
        )

        env_content = "PRODSYS_CONFIG_PATH=config.yaml\n"
        env_content += f"PRODSYS_CACHE_ENABLED={'true' if cache_enabled else 'false'}\n"
        env_content += f"PRODSYS_CACHE_PATH={cache_path}\n"
        env_content += f"PRODSYS_REPORTS_PATH={reports_path}\n"
        env_content += f"PRODSYS_LOG_LEVEL={log_level}\n"

        with open('.env', 'w') as f:
            f.write(env_content)

        console.print("[green]✓ Created .env file[/green]")
    else:
        console.print("[yellow]⚠ .env file already exists, skipping...[/yellow]")

    console.print("\n[bold green]Setup complete![/bold green]\n")
    console.print("[bold]Next steps:[/bold]")
    console.print("1. Run: [cyan]python prodsys.py check --config configs/example2.json[/cyan]")
    console.print("2. Run: [cyan]python prodsys.py index --config configs/powers_decay.json[/cyan]")
    console.print("3. Run: [cyan]python prodsys.py powers --config configs/powers_decay.json[/cyan]\n")


if __name__ == "__main__":
    setup_workspace()
